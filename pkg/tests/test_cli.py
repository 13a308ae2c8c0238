import csv
import json
import os
import stat

import pytest

from infoset_budget.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_rank(capsys):
    code, out, _ = run(capsys, "rank", "--cards", "AsKsQsJsTs")
    assert code == 0 and "StraightFlush [A]" in out
    assert out.startswith("config: ")
    code, out, _ = run(capsys, "rank", "--cards", "AsAdKcKhKd2s3d")
    assert code == 0 and "FullHouse [K,A]" in out


def test_rank_usage_errors(capsys):
    assert run(capsys, "rank", "--cards", "AsKsQsJsTs2d")[0] == 2
    assert run(capsys, "rank", "--cards", "AsKsQsJs1x")[0] == 2


def test_unknown_flag_rejected(capsys):
    with pytest.raises(SystemExit) as info:
        main(["rank", "--cards", "AsKsQsJsTs", "--bogus"])
    assert info.value.code == 2


def test_equity_mc_k1(capsys):
    code, out, _ = run(capsys, "equity", "--hand", "AA", "--mode", "mc", "--k", "1", "--seed", "7")
    assert code == 0
    line = out.splitlines()[-1]
    assert any(f"mean={v:.9f}" in line for v in (0, 0.5, 1))
    assert run(capsys, "equity", "--hand", "AA", "--mode", "mc", "--k", "1", "--seed", "7")[1] == out


def test_equity_exact_short_deck(capsys):
    code, out, _ = run(capsys, "equity", "--hand", "AA", "--mode", "exact", "--deck", "short:5")
    assert code == 0 and "mean=0.698170294" in out and "exact=true" in out


def test_equity_exact_full_deck_needs_confirmation(capsys):
    code, _, err = run(capsys, "equity", "--hand", "AA", "--mode", "exact")
    assert code == 2 and "2,097,572,400" in err and "--confirm-long" in err


def test_mc_command(capsys):
    code, out, _ = run(capsys, "mc", "--hand", "KQs", "--k", "1", "--trials", "5", "--seed", "1")
    rows = out.splitlines()[2:]
    assert code == 0 and len(rows) == 5
    assert all(float(r.split(",")[1]) in (0, 0.5, 1) for r in rows)


def test_gradcheck(capsys):
    code, out, _ = run(capsys, "gradcheck", "--sizes", "169,16,1")
    assert code == 0 and "PASS" in out


def test_table_gen_train(tmp_path, capsys):
    table = tmp_path / "t.csv"
    assert run(capsys, "table", "--deck", "short:5", "--out", str(table))[0] == 0
    meta = json.loads((tmp_path / "t.csv.json").read_text())
    assert meta["method"] == "exact" and meta["hands"] == 25
    data = tmp_path / "d.csv"
    assert run(capsys, "gen", "--deck", "short:5", "--budget", "3000", "--k", "3", "--out", str(data))[0] == 0
    code, out, _ = run(capsys, "train", "--deck", "short:5", "--data", str(data), "--out", str(tmp_path / "m"),
                       "--max-updates", "200", "--eval-every", "50", "--hidden", "8")
    assert code == 0
    traj = list(csv.DictReader(open(tmp_path / "m" / "trajectory.csv")))
    assert [r["updates"] for r in traj] == ["0", "50", "100", "150", "200"]
    assert json.loads((tmp_path / "m" / "checkpoint.json").read_text())["sizes"] == [25, 8, 1]


def test_train_rejects_foreign_dataset(tmp_path, capsys):
    data = tmp_path / "d.csv"
    run(capsys, "gen", "--deck", "short:5", "--budget", "300", "--k", "3", "--out", str(data))
    assert run(capsys, "train", "--deck", "short:6", "--data", str(data), "--out", str(tmp_path))[0] == 2


def test_sweep_smoke(tmp_path, capsys):
    code, out, _ = run(capsys, "sweep", "--ks", "1,3", "--budget", "1000", "--seeds", "0", "--out", str(tmp_path))
    assert code == 0
    assert out.splitlines()[1].startswith("k,n,seeds_done")
    assert len(list(csv.DictReader(open(tmp_path / "summary_by_k.csv")))) == 2


def test_sweep_missing_table(tmp_path, capsys):
    code, _, err = run(capsys, "sweep", "--ks", "1", "--budget", "100", "--table", str(tmp_path / "nope.csv"),
                       "--out", str(tmp_path))
    assert code == 2 and "'table' command" in err


@pytest.mark.skipif(os.geteuid() == 0, reason="root ignores directory permissions")
def test_sweep_readonly_out(tmp_path, capsys):
    ro = tmp_path / "ro"
    ro.mkdir()
    ro.chmod(stat.S_IRUSR | stat.S_IXUSR)
    assert run(capsys, "sweep", "--ks", "1", "--budget", "100", "--out", str(ro))[0] == 4


def test_sweep_out_is_a_file(tmp_path, capsys):
    f = tmp_path / "file"
    f.write_text("")
    assert run(capsys, "sweep", "--ks", "1", "--budget", "100", "--out", str(f))[0] == 4


def test_out_dir_from_environment(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("INFOSET_BUDGET_OUT", str(tmp_path))
    assert run(capsys, "gen", "--budget", "100", "--k", "2", "--seed", "3")[0] == 0
    assert (tmp_path / "dataset_k2_s3.csv").exists()


def test_profile_error(tmp_path, capsys):
    out_csv = tmp_path / "p.csv"
    code, out, _ = run(capsys, "profile-error", "--hands", "AA,KQs", "--ks", "1,4", "--trials", "2000",
                       "--deck", "short:5", "--out", str(out_csv))
    assert code == 0
    maes = [float(r.split(",")[1]) for r in out.splitlines()[2:]]
    assert maes[0] > maes[1]
    assert next(csv.reader(open(out_csv))) == ["k", "mean_abs_error", "bin_lo", "bin_hi", "count"]
