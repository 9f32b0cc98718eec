import json

import pytest

from dynkc.cli import EXIT_INVALID, EXIT_IO, EXIT_OK, EXIT_USAGE, build_table, load_aggregate, main
from dynkc.workload import load_points_csv, read_trace


def generate(tmp_path, *extra):
    out = tmp_path / "data"
    rc = main(["generate", "--random", "--seeds", "4", "--per", "15", "--trace", "sliding",
               "--window", "20", "--query-every", "10", "--out", str(out), *extra])
    assert rc == EXIT_OK
    return out


def test_generate_desk_scale_csv(tmp_path, capsys):
    assert main(["generate", "--random", "--seeds", "100", "--per", "200", "--out", str(tmp_path)]) == EXIT_OK
    assert len(load_points_csv(tmp_path / "points.csv")) == 20000
    assert "seed 0" in capsys.readouterr().out


def test_generate_is_byte_identical(tmp_path):
    a = generate(tmp_path / "a", "--seed", "3")
    b = generate(tmp_path / "b", "--seed", "3")
    for name in ("points.csv", "trace-sliding.txt"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    read_trace(a / "trace-sliding.txt").check()


def test_seed_env_overrides(tmp_path, monkeypatch):
    monkeypatch.setenv("DYNKC_SEED", "3")
    a = generate(tmp_path / "a", "--seed", "99")
    monkeypatch.delenv("DYNKC_SEED")
    b = generate(tmp_path / "b", "--seed", "3")
    assert (a / "points.csv").read_bytes() == (b / "points.csv").read_bytes()
    assert read_trace(a / "trace-sliding.txt").seed == 3


def test_generate_mix_from_points(tmp_path):
    data = generate(tmp_path)
    out = tmp_path / "mix"
    rc = main(["generate", "--points", str(data / "points.csv"), "--trace", "mix", "--delete-frac", "0.1",
               "--out", str(out)])
    assert rc == EXIT_OK
    read_trace(out / "trace-mix.txt").check()


def test_run_grid_and_tables(tmp_path):
    data = generate(tmp_path)
    out = tmp_path / "res"
    rc = main(["run", "--trace", str(data / "trace-sliding.txt"), "--epsilon", "0.5", "1", "--k", "2", "5",
               "--repeats", "2", "--compare-gonzalez", "--out", str(out)])
    assert rc == EXIT_OK
    aggs = sorted(out.glob("*/*/aggregate.json"))
    assert len(aggs) == 4
    stored = [json.loads(p.read_text()) for p in aggs]
    for agg, path in zip(stored, aggs):
        runs = sorted(path.parent.glob("run*.json"))
        assert len(runs) == 2
        rebuilt = load_aggregate(runs)
        rebuilt["trace"] = agg["trace"]
        assert rebuilt == agg
        assert agg["phi_identical_across_repeats"]
    table = json.loads((out / "table.json").read_text())
    assert table == json.loads(json.dumps(build_table(stored)))
    assert table["k"] == [2, 5] and table["epsilon"] == [0.5, 1.0]
    assert all(v is not None for row in table["geomean_quality_ratio"] for v in row)


def test_run_parallel_jobs(tmp_path):
    data = generate(tmp_path)
    out = tmp_path / "res"
    rc = main(["run", "--trace", str(data / "trace-sliding.txt"), "--epsilon", "4", "--k", "2", "3",
               "--repeats", "1", "--jobs", "2", "--out", str(out)])
    assert rc == EXIT_OK
    assert len(list(out.glob("*/*/aggregate.json"))) == 2


def test_run_reports_infeasible_cell(tmp_path, capsys):
    data = generate(tmp_path)
    rc = main(["run", "--trace", str(data / "trace-sliding.txt"), "--epsilon", "0.1", "4", "--k", "2",
               "--repeats", "1", "--max-nets", "8", "--out", str(tmp_path / "res")])
    assert rc == EXIT_OK
    assert "skipped" in capsys.readouterr().err


def test_validate_clean_and_faulty(tmp_path, capsys):
    data = generate(tmp_path)
    trace = str(data / "trace-sliding.txt")
    assert main(["validate", "--trace", trace, "--epsilon", "1", "4"]) == EXIT_OK
    assert main(["validate", "--trace", trace, "--inject-fault"]) == EXIT_INVALID
    assert "violations after event" in capsys.readouterr().out


def test_validate_empty_trace(tmp_path):
    f = tmp_path / "empty.txt"
    f.write_text("#seed 0\n")
    assert main(["validate", "--trace", str(f)]) == EXIT_OK


def test_usage_errors(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["run"])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["run", "--trace", "x", "--k", "0"])
    assert exc.value.code == EXIT_USAGE
    assert main(["generate", "--out", str(tmp_path)]) == EXIT_USAGE


def test_bad_seed_env(tmp_path, monkeypatch):
    monkeypatch.setenv("DYNKC_SEED", "abc")
    assert main(["generate", "--random", "--seeds", "2", "--per", "2", "--out", str(tmp_path)]) == EXIT_USAGE


def test_io_errors(tmp_path):
    assert main(["run", "--trace", str(tmp_path / "missing.txt")]) == EXIT_IO
    assert main(["validate", "--trace", str(tmp_path / "missing.txt")]) == EXIT_IO
    bad = tmp_path / "bad.txt"
    bad.write_text("nonsense\n")
    assert main(["validate", "--trace", str(bad)]) == EXIT_IO
