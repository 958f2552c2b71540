import json

from conftest import GOLDEN
from gossip_lab.cli import main, parse_perm_file
from gossip_lab.tables import parse_run_table


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_run_identity_table_matches_golden(capsys):
    code, out, _ = run_cli(capsys, "run", "--n", "5", "--family", "identity")
    assert code == 0
    assert out == (GOLDEN / "table1.txt").read_text()


def test_run_pipelined_table_matches_golden(capsys):
    code, out, _ = run_cli(capsys, "run", "--n", "8", "--family", "pipelined")
    assert code == 0
    assert out == (GOLDEN / "table2.txt").read_text()


def test_run_table_round_trips(capsys):
    _, out, _ = run_cli(capsys, "run", "--n", "4", "--family", "pipelined")
    rt = parse_run_table(out)
    assert rt.n == 4 and rt.length == 12


def test_run_json_payload(capsys):
    code, out, _ = run_cli(
        capsys, "run", "--n", "8", "--family", "pipelined", "--format", "json"
    )
    payload = json.loads(out)
    assert code == 0
    assert payload["lambda"] == 24
    assert payload["mu"] == {"num": 6, "den": 1, "text": "6.0000"}
    assert payload["efficiency"]["text"] == "66.67%"
    assert payload["profile"] == "unconstrained"
    assert len(payload["actions"]) == 9


def test_run_csv_shape(capsys):
    code, out, _ = run_cli(
        capsys, "run", "--n", "3", "--family", "identity", "--format", "csv"
    )
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == "process,step,action,peer"
    assert len(lines) == 1 + 4 * 11


def test_run_unicode_arrows(capsys):
    code, out, _ = run_cli(
        capsys, "run", "--n", "2", "--family", "identity", "--unicode"
    )
    assert code == 0 and "↶" in out and "wr" not in out


def test_run_hybrid_requires_mix(capsys):
    code, _, err = run_cli(capsys, "run", "--n", "5", "--family", "hybrid")
    assert code == 2 and "--h" in err


def test_run_custom_permutations(tmp_path, capsys):
    path = tmp_path / "perms.txt"
    path.write_text("0: 1,2\n1: 2,0\n2: 0,1\n")
    code, out, _ = run_cli(capsys, "run", "--family", "custom", "--perm-file", str(path))
    assert code == 0 and "lambda=6" in out


def test_run_custom_duplicate_target_rejected(tmp_path, capsys):
    path = tmp_path / "perms.txt"
    path.write_text("0: 1,1\n1: 2,0\n2: 0,1\n")
    code, _, err = run_cli(capsys, "run", "--family", "custom", "--perm-file", str(path))
    assert code == 2 and "repeated" in err


def test_run_custom_ids_must_cover_range(tmp_path, capsys):
    path = tmp_path / "perms.txt"
    path.write_text("0: 1,2\n2: 0,1\n3: 0,1\n")
    code, _, err = run_cli(capsys, "run", "--family", "custom", "--perm-file", str(path))
    assert code == 2 and "exactly once" in err


def test_parse_perm_file_accepts_comments(tmp_path):
    path = tmp_path / "perms.txt"
    path.write_text("# comment\n0: 1 2\n1: 2,0\n2: 0,1\n")
    assignment = parse_perm_file(path)
    assert [spec.owner for spec in assignment] == [0, 1, 2]


def test_run_step_limit_exit_code(capsys):
    code, _, err = run_cli(
        capsys, "run", "--n", "5", "--family", "identity", "--max-steps", "3"
    )
    assert code == 3 and "did not terminate" in err


def test_sweep_endpoint_rows(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--n", "5", "--grid", "0,1")
    assert code == 0
    assert out.strip().splitlines() == [
        "h,mu,lambda",
        "0,2.307692,26",
        "1,4.000000,15",
    ]


def test_sweep_range_produces_full_grid(capsys):
    code, out, _ = run_cli(
        capsys,
        "sweep", "--n", "5", "--from", "0.005", "--to", "1.0", "--step", "0.005",
    )
    assert code == 0
    assert len(out.strip().splitlines()) == 201  # header + 200 samples


def test_sweep_mu_grows_with_mix(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--n", "12", "--grid", "0,0.5,1")
    rows = [line.split(",") for line in out.strip().splitlines()[1:]]
    mus = [float(r[1]) for r in rows]
    assert code == 0 and mus[-1] > mus[0]


def test_sweep_json_has_exact_fractions(capsys):
    code, out, _ = run_cli(
        capsys, "sweep", "--n", "5", "--grid", "0,1", "--format", "json"
    )
    payload = json.loads(out)
    assert payload["rows"][0]["mu"] == {"num": 30, "den": 13, "text": "2.3077"}
    assert payload["rows"][1]["lambda"] == 15


def test_sweep_rejects_decreasing_grid(capsys):
    code, _, err = run_cli(capsys, "sweep", "--n", "5", "--grid", "1,0")
    assert code == 2


def test_autotune_lookup_exact_match(capsys):
    code, out, _ = run_cli(
        capsys,
        "autotune", "--n", "5", "--constant", "4", "--planner", "lookup",
        "--grid", "0,1",
    )
    assert code == 0
    assert "h_best=1 mu_best=4.0000 saturated=false" in out


def test_autotune_lookup_saturated_flag(capsys):
    code, out, _ = run_cli(
        capsys,
        "autotune", "--n", "5", "--constant", "99", "--planner", "lookup",
        "--grid", "0,1",
    )
    assert code == 0
    assert "saturated=true" in out and "h_best=1" in out


def test_autotune_adaptive_session_json(capsys):
    code, out, _ = run_cli(
        capsys,
        "autotune", "--n", "30", "--constant", "10", "--format", "json",
    )
    payload = json.loads(out)
    assert code == 0
    summary = payload["summary"]
    assert summary["reason"] in ("in_band", "resolution")
    assert summary["mu_best"]["num"] / summary["mu_best"]["den"] >= 10
    assert payload["iterations"][0]["cp"] == 10


def test_autotune_csv_format(capsys):
    code, out, _ = run_cli(
        capsys,
        "autotune", "--n", "5", "--constant", "4", "--planner", "lookup",
        "--grid", "0,1", "--format", "csv",
    )
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == "iteration,cp,status,h,mu,map_size"


def test_autotune_schedule_provider(capsys):
    code, out, _ = run_cli(
        capsys,
        "autotune", "--n", "5", "--schedule", "1:4", "--planner", "lookup",
        "--grid", "0,1",
    )
    assert code == 0 and "h_best=1" in out


def test_autotune_trace_provider(tmp_path, capsys):
    trace = tmp_path / "trace.txt"
    trace.write_text("4\n4\n4\n")
    code, out, _ = run_cli(
        capsys,
        "autotune", "--n", "5", "--trace", str(trace), "--planner", "lookup",
        "--grid", "0,1",
    )
    assert code == 0 and "h_best=1" in out


def test_autotune_requires_one_provider(capsys):
    code, _, err = run_cli(capsys, "autotune", "--n", "5")
    assert code == 2 and "exactly one" in err


def test_autotune_saves_and_reloads_map(tmp_path, capsys):
    out_map = tmp_path / "map.csv"
    code, _, _ = run_cli(
        capsys,
        "autotune", "--n", "10", "--constant", "5", "--save-map", str(out_map),
    )
    assert code == 0
    lines = out_map.read_text().strip().splitlines()
    assert lines[0] == "h,mu" and len(lines) >= 3
    code, out, _ = run_cli(
        capsys,
        "autotune", "--n", "10", "--constant", "5", "--planner", "lookup",
        "--map", str(out_map),
    )
    assert code == 0 and "saturated=false" in out


def test_autotune_mu_gap_mode(capsys):
    code, out, _ = run_cli(
        capsys,
        "autotune", "--n", "20", "--constant", "10", "--mode", "mugap",
        "--iterations", "8",
    )
    assert code == 0 and "result reason=" in out


def test_autotune_rejects_bad_map_file(tmp_path, capsys):
    bad = tmp_path / "map.csv"
    bad.write_text("h,mu\n0,1\n0,2\n")
    code, _, err = run_cli(
        capsys,
        "autotune", "--n", "5", "--constant", "4", "--planner", "lookup",
        "--map", str(bad),
    )
    assert code == 2 and "duplicate" in err


def test_validate_passes_midrange(capsys):
    code, out, _ = run_cli(capsys, "validate", "--n", "2..8")
    assert code == 0
    assert "0 failures" in out and "FAIL" not in out


def test_validate_single_size(capsys):
    code, out, _ = run_cli(capsys, "validate", "--n", "5..5")
    assert code == 0 and "N=5 identity lambda=26" in out


def test_validate_skips_pipelined_at_n1(capsys):
    code, out, _ = run_cli(capsys, "validate", "--n", "1..1")
    assert code == 0
    assert "N=1 pipelined skipped (outside formula domain)" in out


def test_validate_json(capsys):
    code, out, _ = run_cli(capsys, "validate", "--n", "2..4", "--format", "json")
    payload = json.loads(out)
    assert code == 0 and payload["failures"] == 0


def test_validate_bad_range(capsys):
    code, _, _ = run_cli(capsys, "validate", "--n", "9..2")
    assert code == 2


def test_output_flag_writes_file(tmp_path, capsys):
    target = tmp_path / "out.txt"
    code, out, _ = run_cli(
        capsys, "run", "--n", "5", "--family", "identity", "--output", str(target)
    )
    assert code == 0 and out == ""
    assert target.read_text() == (GOLDEN / "table1.txt").read_text()


def test_plot_files_rendered(tmp_path, capsys):
    run_png = tmp_path / "run.png"
    sweep_png = tmp_path / "sweep.png"
    tune_png = tmp_path / "tune.png"
    assert run_cli(
        capsys, "run", "--n", "5", "--family", "identity", "--plot", str(run_png)
    )[0] == 0
    assert run_cli(
        capsys, "sweep", "--n", "5", "--grid", "0,0.5,1", "--plot", str(sweep_png)
    )[0] == 0
    assert run_cli(
        capsys,
        "autotune", "--n", "10", "--constant", "5", "--plot", str(tune_png),
    )[0] == 0
    for path in (run_png, sweep_png, tune_png):
        assert path.exists() and path.stat().st_size > 1000


def test_seed_env_var_accepted(monkeypatch, capsys):
    monkeypatch.setenv("GOSSIP_LAB_SEED", "1234")
    code, out, _ = run_cli(capsys, "run", "--n", "2", "--family", "identity")
    assert code == 0 and "lambda=6" in out


def test_help_exits_zero(capsys):
    code, out, _ = run_cli(capsys, "--help")
    assert code == 0 and "run" in out and "autotune" in out
