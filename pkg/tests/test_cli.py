import json
import subprocess
import sys

import pytest

from rpslab.cli import main
from rpslab.game import Transcript


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestPlay:
    def test_paper_vs_always_no_wins(self, tmp_path, capsys):
        code, out, _ = run_cli([
            "play", "--n", "12", "--s", "12", "--proposer", "paper_proposer",
            "--decider", "always_no", "--seed", "5", "--out", str(tmp_path),
        ], capsys)
        assert code == 0
        summary = json.loads(out)
        assert summary["win"] is True
        assert summary["edges"] == 0
        assert summary["alpha_certificate"] == 12

    def test_n2_forced_edge_loses(self, tmp_path, capsys):
        code, out, _ = run_cli([
            "play", "--n", "2", "--s", "2", "--proposer", "uniform",
            "--decider", "iid:1.0", "--seed", "1", "--out", str(tmp_path),
        ], capsys)
        assert code == 0
        summary = json.loads(out)
        assert summary["win"] is False and summary["alpha_certificate"] == 1

    def test_round_trip_verifies(self, tmp_path, capsys):
        code, out, _ = run_cli([
            "play", "--n", "18", "--s", "5", "--proposer", "paper_proposer",
            "--decider", "iid:0.3", "--seed", "9", "--out", str(tmp_path),
        ], capsys)
        assert code == 0
        path = json.loads(out)["transcript"]
        code, out, _ = run_cli(["verify", path], capsys)
        assert code == 0

    def test_n_rounded_for_paper_proposer(self, tmp_path, capsys):
        code, out, err = run_cli([
            "play", "--n", "14", "--s", "3", "--proposer", "paper_proposer",
            "--decider", "always_no", "--seed", "2", "--out", str(tmp_path),
        ], capsys)
        assert code == 0
        summary = json.loads(out)
        assert summary["requested_n"] == 14 and summary["n"] == 12
        assert "rounded" in err


class TestSweep:
    CONFIG = {
        "n": [8, 10],
        "s": [3],
        "proposers": [{"kind": "uniform"}],
        "deciders": [{"kind": "always_yes"}, {"kind": "iid", "p": 0.2}],
        "trials": 10,
        "master_seed": 31,
    }

    def _run(self, tmp_path, capsys, jobs, name):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(self.CONFIG))
        out_dir = tmp_path / name
        code, out, _ = run_cli([
            "sweep", "--config", str(cfg), "--jobs", str(jobs),
            "--out", str(out_dir),
        ], capsys)
        assert code == 0
        return (out_dir / "sweep.csv").read_bytes()

    def test_row_count_and_columns(self, tmp_path, capsys):
        data = self._run(tmp_path, capsys, 1, "a").decode()
        lines = data.strip().split("\n")
        assert lines[0] == ("n,trials,proposer,decider,p,s,wins,win_rate,"
                            "mean_alpha_certificate,mean_edges,mean_turns,seed")
        assert len(lines) == 1 + 2 * 2  # cells = 2 n x 1 proposer x 2 deciders
        # p column filled only for iid
        rows = [ln.split(",") for ln in lines[1:]]
        assert rows[0][3] == "always_yes" and rows[0][4] == ""
        assert rows[1][3] == "iid(p=0.2)" and rows[1][4] == "0.2"

    def test_deterministic_and_parallel_equivalent(self, tmp_path, capsys):
        a = self._run(tmp_path, capsys, 1, "s1")
        b = self._run(tmp_path, capsys, 1, "s2")
        c = self._run(tmp_path, capsys, 3, "p3")
        assert a == b == c


class TestThreshold:
    def test_n2_always_no(self, tmp_path, capsys):
        code, out, _ = run_cli([
            "threshold", "--n", "2", "--proposer", "uniform",
            "--decider", "always_no", "--trials", "40", "--seed", "3",
            "--out", str(tmp_path),
        ], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["s_star"] == 2
        assert payload["curve"][0] == {"s": 1, "wins": 40, "trials": 40}
        on_disk = json.loads((tmp_path / "threshold.json").read_text())
        assert on_disk == payload


class TestCoins:
    def test_json_fields(self, capsys):
        code, out, _ = run_cli([
            "coins", "--a", "3", "--nu", "12", "--nu0", "2", "--t", "0.2",
            "--policy", "all_heads", "--trials", "200", "--seed", "5",
        ], capsys)
        assert code == 0
        payload = json.loads(out)
        assert set(payload) == {"frequency", "ci_low", "ci_high",
                                "bound_raw", "bound_clamped"}
        assert payload["frequency"] == 0.0  # all-heads exact subset scores 0

    def test_bad_params_exit_1(self, capsys):
        code, _, err = run_cli([
            "coins", "--a", "7", "--nu", "12", "--nu0", "2", "--t", "0.2",
        ], capsys)
        assert code == 1
        assert "error" in err


class TestVerify:
    def _write_game(self, tmp_path, capsys):
        code, out, _ = run_cli([
            "play", "--n", "6", "--s", "2", "--proposer", "uniform",
            "--decider", "iid:0.5", "--seed", "8", "--out", str(tmp_path),
        ], capsys)
        assert code == 0
        return json.loads(out)["transcript"]

    def test_ok_exit_0(self, tmp_path, capsys):
        path = self._write_game(tmp_path, capsys)
        assert run_cli(["verify", path], capsys)[0] == 0

    def test_corrupted_exit_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.jsonl"
        bad.write_text("this is not json\n")
        assert run_cli(["verify", str(bad)], capsys)[0] == 1

    def test_rule_violation_exit_2(self, tmp_path, capsys):
        path = self._write_game(tmp_path, capsys)
        t = Transcript.from_jsonl(path)
        # duplicate the first turn at the end: forbidden re-proposal
        import numpy as np

        t2 = Transcript(
            n=t.n, target_s=t.target_s, proposer=t.proposer, decider=t.decider,
            master_seed=t.master_seed,
            pair_indices=np.concatenate([t.pair_indices, t.pair_indices[:1]]),
            answers=np.concatenate([t.answers, t.answers[:1]]),
        )
        bad = tmp_path / "tampered.jsonl"
        t2.to_jsonl(str(bad))
        code, _, err = run_cli(["verify", str(bad)], capsys)
        assert code == 2
        assert "forbidden-reproposal" in err

    def test_parse_error_takes_precedence(self, tmp_path, capsys):
        good = self._write_game(tmp_path, capsys)
        bad = tmp_path / "bad.jsonl"
        bad.write_text("nope\n")
        assert run_cli(["verify", str(bad), good], capsys)[0] == 1


class TestEntryPoint:
    def test_module_invocation(self, tmp_path):
        res = subprocess.run(
            [sys.executable, "-m", "rpslab.cli", "play", "--n", "4", "--s", "2",
             "--proposer", "uniform", "--decider", "always_no",
             "--seed", "1", "--out", str(tmp_path)],
            capture_output=True, text=True, timeout=300,
        )
        assert res.returncode == 0
        assert json.loads(res.stdout)["alpha_certificate"] == 4
