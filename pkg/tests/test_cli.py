"""Config schema, presets, the runner's artifacts and the command-line front end."""
from __future__ import annotations

import copy
import csv
import json

import pytest

from rigsharp import __version__, runner
from rigsharp.cli import main
from rigsharp.config import PRESETS, ConfigError, dumps, loads, preset, validate
from rigsharp.graph import Graph, cycle_graph


def small_sweep(**over):
    cfg = {"name": "t", "task": "sweep", "seed": 5, "threads": 1,
           "sweep": {"model": "rig", "n": [80], "alpha": 2.0, "properties": ["connectivity"],
                     "grid": [-2, 0, 2], "samples": 8}}
    cfg["sweep"].update(over)
    return cfg


class TestConfig:
    def test_empty_grid_names_the_field(self):
        with pytest.raises(ConfigError, match="grid"):
            validate(small_sweep(grid=[]))

    @pytest.mark.parametrize("mutate,field", [
        (lambda c: c.update(colour="red"), "colour"),
        (lambda c: c["sweep"].update(sample=3), "sample"),
        (lambda c: c["sweep"].pop("samples"), "samples"),
        (lambda c: c["sweep"].update(samples="many"), "samples"),
        (lambda c: c["sweep"].update(properties=["planarity"]), "properties"),
        (lambda c: c.update(task="plot"), "task"),
        (lambda c: c.update(seed=-1), "seed"),
        (lambda c: c["sweep"].update(exploratory=1), "exploratory"),
        (lambda c: c["sweep"].update(k=True), "k"),
    ])
    def test_strict_fields(self, mutate, field):
        cfg = small_sweep()
        mutate(cfg)
        with pytest.raises(ConfigError, match=field):
            validate(cfg)

    def test_toml_round_trip(self):
        for name in PRESETS:
            cfg = preset(name)
            assert loads(dumps(cfg)) == cfg

    def test_toml_syntax_error(self):
        with pytest.raises(ConfigError, match="TOML"):
            loads("name = ")


class TestPresets:
    def test_lookup_examples(self):
        assert preset("theorem5")["sweep"]["properties"] == ["connectivity"]
        c2 = preset("coupling-case2")
        assert c2["task"] == "couple" and c2["couple"]["alpha"] == pytest.approx(2 / 3)
        conj = preset("conjecture")
        assert conj["sweep"]["alpha"] == 0.8 and conj["sweep"]["exploratory"]
        assert conj["sweep"]["properties"] == ["hamilton"]

    def test_unknown_lists_names(self):
        with pytest.raises(KeyError, match="theorem5"):
            preset("theorem9")

    def test_presets_are_copies(self):
        preset("theorem5")["sweep"]["n"].append(5)
        assert PRESETS["theorem5"]["sweep"]["n"] == [1000]


class TestRun:
    def test_artifacts_and_determinism(self, tmp_path):
        cfg = small_sweep()
        cfg["output"] = str(tmp_path)
        res = runner.run(copy.deepcopy(cfg))
        first = (tmp_path / "t" / "sweep.csv").read_bytes()
        manifest = json.loads((tmp_path / "t" / "manifest.json").read_text())
        assert manifest["config"] == cfg and manifest["seed"] == 5
        assert manifest["tool_version"] == __version__ and manifest["wall_time_s"] >= 0
        assert {p.name for p in res.files} == {"sweep.csv", "sweep.dat", "manifest.json"}
        runner.run(runner.load_any(tmp_path / "t" / "manifest.json"))
        assert (tmp_path / "t" / "sweep.csv").read_bytes() == first
        assert not list((tmp_path / "t").glob(".*tmp"))

    def test_threads_do_not_change_results(self, tmp_path):
        out = []
        for threads in (1, 3):
            cfg = small_sweep(samples=12)
            cfg.update(threads=threads, output=str(tmp_path / str(threads)))
            runner.run(cfg)
            out.append((tmp_path / str(threads) / "t" / "sweep.csv").read_bytes())
        assert out[0] == out[1]

    def test_theorem5_preset_shape(self, tmp_path):
        cfg = preset("theorem5")
        cfg.update(output=str(tmp_path), threads=1)
        cfg["sweep"]["samples"] = 4
        runner.run(cfg)
        rows = list(csv.DictReader(open(tmp_path / "theorem5" / "sweep.csv")))
        assert len(rows) == 9 and {r["property"] for r in rows} == {"connectivity"}
        assert (tmp_path / "theorem5" / "manifest.json").exists()

    def test_grouped_properties(self, tmp_path):
        cfg = small_sweep(properties=["connectivity", "hamilton", "perfect_matching"], k=2)
        cfg["output"] = str(tmp_path)
        runner.run(cfg)
        rows = list(csv.DictReader(open(tmp_path / "t" / "sweep.csv")))
        assert len(rows) == 9

    def test_env_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv(runner.OUTPUT_ENV, str(tmp_path))
        cfg = copy.deepcopy(PRESETS["chernoff"])
        res = runner.run(cfg)
        assert res.directory == tmp_path / "chernoff"
        rows = list(csv.DictReader(open(res.directory / "bound.csv")))
        assert len(rows) == 4

    def test_tv_and_couple_tasks(self, tmp_path):
        cfg = preset("fact9-tv")
        cfg["output"] = str(tmp_path)
        res = runner.run(cfg)
        assert res.summary["tv"] <= res.summary["bound"] == pytest.approx(0.2)
        cfg = preset("coupling-case1")
        cfg["output"] = str(tmp_path)
        cfg["couple"].update(n=60, samples=5)
        res = runner.run(cfg)
        assert res.summary["samples"] == 5 and res.summary["subgraph_on_success"] == res.summary["successes"]

    def test_crash_leaves_no_partial_file(self, tmp_path, monkeypatch):
        target = tmp_path / "x.csv"
        target.write_text("old\n")

        def exploding_fdopen(fd, *a, **k):
            import os
            os.close(fd)
            raise OSError("disk full")

        monkeypatch.setattr(runner.os, "fdopen", exploding_fdopen)
        with pytest.raises(OSError):
            runner.atomic_write(target, "new\n")
        assert target.read_text() == "old\n"
        assert [p.name for p in tmp_path.iterdir()] == ["x.csv"]

    def test_manifest_without_config(self, tmp_path):
        bad = tmp_path / "manifest.json"
        bad.write_text("{}")
        with pytest.raises(ConfigError):
            runner.load_any(bad)

    def test_parse_law(self):
        assert runner.parse_law("binomial:2:0.1", 3).mean == pytest.approx(0.2)
        with pytest.raises(ConfigError):
            runner.parse_law("geometric:0.3", 3)
        with pytest.raises(ConfigError):
            runner.parse_law("gnp:auto", 3)


class TestCommandLine:
    def test_config_error_exit_code(self, tmp_path, capsys):
        path = tmp_path / "c.toml"
        cfg = small_sweep(grid=[])
        path.write_text(dumps(cfg))
        assert main(["run", str(path)]) == 2
        assert "grid" in capsys.readouterr().err

    def test_run_with_overrides(self, tmp_path):
        path = tmp_path / "c.toml"
        path.write_text(dumps(small_sweep()))
        assert main(["run", str(path), "--samples", "3", "--seed", "9", "--threads", "1",
                     "--output", str(tmp_path)]) == 0
        manifest = json.loads((tmp_path / "t" / "manifest.json").read_text())
        assert manifest["config"]["seed"] == 9 and manifest["config"]["sweep"]["samples"] == 3

    def test_check_exit_codes(self, tmp_path, capsys):
        g = tmp_path / "g.txt"
        g.write_text(cycle_graph(6).to_edgelist())
        assert main(["check", str(g), "--property", "hamilton", "--certificate"]) == 0
        assert main(["check", str(g), "--property", "kconn:3"]) == 1
        assert main(["check", str(g), "--property", "mindeg:2"]) == 0
        assert main(["check", str(g), "--property", "matching", "--certificate"]) == 0
        assert main(["check", str(g), "--property", "bogus"]) == 2
        out = capsys.readouterr().out
        assert "hamilton: yes" in out and "kconn:3: no" in out

    def test_gen_round_trip(self, tmp_path):
        out = tmp_path / "g.txt"
        assert main(["gen", "rig", "-n", "12", "-m", "30", "-p", "0.1", "--seed", "4", "--with-features",
                     "-o", str(out)]) == 0
        text = out.read_text()
        g = Graph.from_edgelist(text)
        assert g.n == 12 and sum(":" in ln for ln in text.splitlines()) == 12
        main(["gen", "rig", "-n", "12", "-m", "30", "-p", "0.1", "--seed", "4", "-o", str(tmp_path / "h.txt")])
        assert Graph.from_edgelist((tmp_path / "h.txt").read_text()) == g

    def test_preset_and_tv_commands(self, tmp_path, capsys):
        assert main(["preset"]) == 0
        assert "theorem5" in capsys.readouterr().out
        assert main(["preset", "nope"]) == 2
        assert main(["preset", "fact1-tv", "--write", str(tmp_path / "f.toml")]) == 0
        assert loads((tmp_path / "f.toml").read_text())["tv"]["n"] == 4
        assert main(["tv", "-n", "4", "--law1", "poisson:1.3", "--law2", "gnp:auto", "--output", str(tmp_path)]) == 0
        assert main(["bound", "--mean", "10", "-t", "5", "--poisson", "--output", str(tmp_path)]) == 0
        assert main(["couple", "-n", "40", "--alpha", "2", "--samples", "3", "--output", str(tmp_path)]) == 0
        assert main(["sweep", "-n", "50", "--alpha", "2", "--property", "connectivity", "--grid", "0", "2",
                     "--samples", "3", "--threads", "1", "--output", str(tmp_path)]) == 0
