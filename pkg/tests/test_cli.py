"""Command-line interface tests (in-process, via main)."""

from __future__ import annotations

import json

import pytest

from lcg_engine.cli import EXIT_OK, EXIT_RESOURCE, EXIT_USAGE, main
from lcg_engine.formats import load_catalog, load_table, parse_rle

from conftest import B_HEPTOMINO_RLE, GLIDER, GLIDER_RLE


@pytest.fixture
def glider_file(tmp_path):
    p = tmp_path / "glider.rle"
    p.write_text(GLIDER_RLE)
    return str(p)


@pytest.fixture
def block_file(tmp_path):
    p = tmp_path / "block.cells"
    p.write_text("OO\nOO")
    return str(p)


@pytest.fixture(autouse=True)
def isolated_config(monkeypatch, tmp_path):
    monkeypatch.setenv("LCG_ENGINE_CONFIG", str(tmp_path / "no-such-config.toml"))


def test_run_glider(glider_file, capsys):
    assert main(["run", glider_file, "--steps", "4"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "generation: 4" in out
    assert "population: 5" in out
    assert "bounding box: (1, 1)..(3, 3)" in out


def test_run_empty(tmp_path, capsys):
    p = tmp_path / "empty.rle"
    p.write_text("x = 0, y = 0\n!")
    assert main(["run", str(p), "--steps", "100"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "population: 0" in out
    assert "bounding box: none" in out


def test_run_engines_agree(tmp_path, capsys):
    p = tmp_path / "b.rle"
    p.write_text(B_HEPTOMINO_RLE)
    assert main(["run", str(p), "--steps", "160", "--engine", "naive"]) == EXIT_OK
    naive = capsys.readouterr().out
    assert main(["run", str(p), "--steps", "160", "--engine", "fast"]) == EXIT_OK
    fast = capsys.readouterr().out
    assert naive == fast


def test_run_writes_rle(glider_file, tmp_path, capsys):
    out_path = tmp_path / "out.rle"
    assert main(["run", glider_file, "--steps", "4", "--out", str(out_path)]) == EXIT_OK
    written = parse_rle(out_path.read_text())
    assert written.cells == GLIDER


def test_run_parse_error_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.rle"
    p.write_text("x = 1, y = 1\nq!")
    assert main(["run", str(p), "--steps", "1"]) == EXIT_USAGE
    assert "column" in capsys.readouterr().err


def test_run_missing_file(capsys):
    assert main(["run", "no-such-file.rle", "--steps", "1"]) == EXIT_USAGE


def test_run_non_utf8_file(tmp_path, capsys):
    p = tmp_path / "binary.rle"
    p.write_bytes(b"\xff\xfe\x00junk")
    assert main(["run", str(p), "--steps", "1"]) == EXIT_USAGE
    assert "UTF-8" in capsys.readouterr().err


def test_run_population_limit(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "cfg.toml"
    cfg.write_text("population_limit = 4\n")
    monkeypatch.setenv("LCG_ENGINE_CONFIG", str(cfg))
    p = tmp_path / "b.rle"
    p.write_text(B_HEPTOMINO_RLE)
    assert main(["run", str(p), "--steps", "100"]) == EXIT_RESOURCE


def test_unknown_flag_is_usage_error(glider_file):
    assert main(["run", glider_file, "--steps", "1", "--frobnicate"]) == EXIT_USAGE


def test_classify_glider(glider_file, capsys):
    assert main(["classify", glider_file]) == EXIT_OK
    out = capsys.readouterr().out.strip()
    assert out == "repeating transient=0 period=4 displacement=(1,1) velocity=(1/4,1/4)"


def test_classify_single_cell(tmp_path, capsys):
    p = tmp_path / "dot.cells"
    p.write_text("O")
    assert main(["classify", str(p)]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "terminating length=1"


def test_classify_strict_mode(glider_file, capsys):
    assert main(["classify", glider_file, "--mode", "strict", "--budget", "128"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "unresolved budget=128"


def test_classify_two_groups(tmp_path, capsys):
    p = tmp_path / "two.cells"
    p.write_text(".O.........\n..O........\nOOO........\n...........\n.........OO\n.........OO")
    assert main(["classify", str(p)]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 2
    assert any("period=4" in line for line in lines)
    assert any("period=1" in line for line in lines)


def test_classify_json(glider_file, capsys):
    assert main(["classify", glider_file, "--json"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert len(payload) == 1
    assert payload[0]["classification"]["kind"] == "repeating"
    assert payload[0]["classification"]["velocity"] == ["1/4", "1/4"]


def test_enumerate_one_cell(tmp_path, capsys):
    out = tmp_path / "cat.json"
    assert main(["enumerate", "--cells", "1", "--budget", "16", "--out", str(out)]) == EXIT_OK
    text = capsys.readouterr().out
    assert "entries: 1" in text
    assert "terminating: 1" in text
    cat = load_catalog(out)
    assert len(cat.entries) == 1


def test_enumerate_triominoes(tmp_path, capsys):
    out = tmp_path / "cat3.json"
    assert main(["enumerate", "--cells", "3", "--budget", "64", "--out", str(out)]) == EXIT_OK
    cat = load_catalog(out)
    periods = {
        e.classification.period
        for e in cat.entries
        if type(e.classification).__name__ == "Repeating"
    }
    assert 2 in periods  # the blinker lineage


def test_enumerate_deterministic(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert main(["enumerate", "--cells", "3", "--budget", "64", "--out", str(a)]) == EXIT_OK
    assert main(["enumerate", "--cells", "3", "--budget", "64", "--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_config_file_changes_defaults(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "lcg-engine.toml"
    cfg.write_text("budget = 7\nunknown_key = 3\n")
    monkeypatch.setenv("LCG_ENGINE_CONFIG", str(cfg))
    p = tmp_path / "glider.rle"
    p.write_text(GLIDER_RLE)
    assert main(["classify", str(p), "--mode", "strict"]) == EXIT_OK
    captured = capsys.readouterr()
    assert captured.out.strip() == "unresolved budget=7"
    assert "unknown config key" in captured.err


def test_collide_command(tmp_path, glider_file, block_file, capsys):
    catalog_path = tmp_path / "cat.json"
    assert main(["enumerate", "--cells", "3", "--budget", "64", "--out", str(catalog_path)]) == EXIT_OK
    capsys.readouterr()
    table_path = tmp_path / "table.json"
    rc = main(
        [
            "collide",
            "--a", glider_file,
            "--b", block_file,
            "--window", "5",
            "--horizon", "512",
            "--catalog", str(catalog_path),
            "--out", str(table_path),
        ]
    )
    assert rc == EXIT_OK
    out = capsys.readouterr().out
    assert "specs:" in out
    table = load_table(table_path, load_catalog(catalog_path))
    assert table.outcomes


def test_collide_rejects_non_repeating_input(tmp_path, block_file, capsys):
    r = tmp_path / "r.rle"
    r.write_text("x = 3, y = 3\nb2o$2o$bo!")
    rc = main(
        ["collide", "--a", str(r), "--b", block_file,
         "--window", "3", "--horizon", "64", "--out", str(tmp_path / "t.json")]
    )
    assert rc == EXIT_USAGE
    assert "not a repeating pattern" in capsys.readouterr().err


def test_collide_accepts_catalog_ids(tmp_path, capsys):
    catalog_path = tmp_path / "cat.json"
    assert main(["enumerate", "--cells", "4", "--budget", "64", "--out", str(catalog_path)]) == EXIT_OK
    cat = load_catalog(catalog_path)
    block_id = next(
        e.id.digest
        for e in cat.entries
        if type(e.classification).__name__ == "Repeating"
        and e.classification.period == 1
        and e.population == 4
    )
    capsys.readouterr()
    rc = main(
        ["collide", "--a", block_id[:10], "--b", block_id[:10],
         "--window", "4", "--horizon", "64",
         "--catalog", str(catalog_path), "--out", str(tmp_path / "t.json")]
    )
    assert rc == EXIT_OK
    out = capsys.readouterr().out
    assert "no_interaction" in out


def test_info_command(tmp_path, capsys):
    catalog_path = tmp_path / "cat.json"
    assert main(["enumerate", "--cells", "3", "--budget", "64", "--out", str(catalog_path)]) == EXIT_OK
    cat = load_catalog(catalog_path)
    blinker = next(
        e for e in cat.entries
        if type(e.classification).__name__ == "Repeating" and e.classification.period == 2
    )
    capsys.readouterr()
    assert main(["info", str(catalog_path), blinker.id.digest[:12]]) == EXIT_OK
    out = capsys.readouterr().out
    assert f"id: {blinker.id.digest}" in out
    assert "period=2" in out
    # the trailing RLE block parses back to the entry's cells
    rle_start = out.index("x = ")
    assert parse_rle(out[rle_start:]).cells == blinker.cells


def test_info_unknown_id(tmp_path, capsys):
    catalog_path = tmp_path / "cat.json"
    assert main(["enumerate", "--cells", "1", "--budget", "16", "--out", str(catalog_path)]) == EXIT_OK
    assert main(["info", str(catalog_path), "ffff"]) == EXIT_USAGE
    assert "no catalog entry" in capsys.readouterr().err


def test_catalog_version_error_surfaces(tmp_path, capsys):
    catalog_path = tmp_path / "cat.json"
    assert main(["enumerate", "--cells", "1", "--budget", "16", "--out", str(catalog_path)]) == EXIT_OK
    doc = json.loads(catalog_path.read_text())
    doc["version"] = 42
    catalog_path.write_text(json.dumps(doc))
    assert main(["info", str(catalog_path), "ffff"]) == EXIT_USAGE
    assert "version" in capsys.readouterr().err


def test_entry_cap_gives_partial_catalog_and_exit_3(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "cfg.toml"
    cfg.write_text("entry_cap = 7101\n")
    monkeypatch.setenv("LCG_ENGINE_CONFIG", str(cfg))
    out = tmp_path / "cat5.json"
    rc = main(["enumerate", "--cells", "5", "--budget", "256", "--closure", "--out", str(out)])
    assert rc == EXIT_RESOURCE
    assert "complete: false" in capsys.readouterr().out
    cat = load_catalog(out)
    assert not cat.complete


def test_byte_determinism_across_hash_seeds(tmp_path):
    """Serialized catalogs must not depend on the interpreter's hash seed."""
    import subprocess
    import sys

    outputs = []
    for seed in ("1", "2"):
        out = tmp_path / f"cat-{seed}.json"
        env = dict(
            PYTHONHASHSEED=seed,
            PATH="/usr/bin:/bin",
            LCG_ENGINE_CONFIG=str(tmp_path / "none.toml"),
        )
        code = (
            "from lcg_engine.cli import main;"
            f"raise SystemExit(main(['enumerate', '--cells', '3', '--budget', '64', '--out', r'{out}']))"
        )
        proc = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True
        )
        assert proc.returncode == 0, proc.stderr
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
