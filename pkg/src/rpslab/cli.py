"""Batch experiment driver.

Subcommands: ``play`` (one game, JSONL transcript + JSON summary line),
``sweep`` (cross-product of settings to CSV), ``threshold`` (win-threshold
curve to JSON), ``coins`` (Coins-and-Buckets tail measurement to JSON),
``verify`` (transcript validation, exit code 0/1/2).

Every run is a pure function of its configuration: trial i of cell c uses
game seed ``mix(mix(master_seed, c), i)``, so results are byte-identical
at any ``--jobs`` level and aggregation order never matters.  Strategy
descriptors are JSON objects (``{"kind": "iid", "p": 0.1}``) or shorthand
strings (``iid:0.1``, ``paper_proposer``, ``budget:5``).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from multiprocessing import get_context
from pathlib import Path
from typing import Optional

from . import analysis as _a
from . import coins as _c
from . import game as _g
from . import strategies as _s
from .seeding import mix


def _parse_descriptor(text: str) -> dict:
    text = text.strip()
    if text.startswith("{"):
        return json.loads(text)
    if ":" not in text:
        return {"kind": text}
    kind, arg = text.split(":", 1)
    if kind == "iid":
        return {"kind": "iid", "p": float(arg)}
    if kind == "budget":
        return {"kind": "budget", "k": int(arg)}
    if kind == "adaptive_threshold":
        return {"kind": "adaptive_threshold", "target": float(arg)}
    if kind == "scripted":
        return {"kind": "scripted", "answers": arg.split(",")}
    raise ValueError(f"cannot parse strategy descriptor {text!r}")


def _parse_heads_policy(text: str) -> dict:
    text = text.strip()
    if text.startswith("{"):
        return json.loads(text)
    if ":" not in text:
        return {"kind": text}
    kind, arg = text.split(":", 1)
    if kind == "budget":
        return {"kind": "budget", "k": int(arg)}
    if kind == "threshold":
        return {"kind": "threshold", "target": float(arg)}
    if kind == "scripted":
        return {"kind": "scripted", "faces": [int(x) for x in arg.split(",")]}
    raise ValueError(f"cannot parse heads policy {text!r}")


def _desc_str(desc: dict) -> str:
    params = {k: v for k, v in desc.items() if k != "kind"}
    if not params:
        return desc["kind"]
    inner = ",".join(f"{k}={params[k]}" for k in sorted(params))
    return f"{desc['kind']}({inner})"


def _fmt(x: float) -> str:
    return format(x, ".10g")


def _effective_n(n: int, proposer_desc: dict) -> int:
    """Round n down to a multiple of 6 when the proposer needs it."""
    if proposer_desc.get("kind") == "paper_proposer" and n % 6 != 0:
        return n - (n % 6)
    return n


def _load_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    with open(path) as f:
        return json.load(f)


def _pick(args_value, config: dict, key: str, default=None):
    if args_value is not None:
        return args_value
    return config.get(key, default)


def _as_list(x) -> list:
    if x is None:
        return []
    return list(x) if isinstance(x, (list, tuple)) else [x]


@dataclass(frozen=True)
class TrialResult:
    cell: int
    trial: int
    turns: int
    edges: int
    certificate: int


def _run_trial(task) -> TrialResult:
    cell_idx, trial_idx, n, proposer_desc, decider_desc, cell_seed = task
    game_seed = mix(cell_seed, trial_idx)
    proposer = _s.proposer_from_descriptor(proposer_desc, n)
    decider = _s.decider_from_descriptor(decider_desc)
    t = _g.play_game(n, proposer, decider, 1, game_seed)
    cert = _a.certify_graph(_a.GraphView.from_transcript(t), seed=mix(game_seed, 1))
    return TrialResult(cell_idx, trial_idx, t.num_turns, t.num_edges(), cert.size)


def _map_trials(tasks: list, jobs: int) -> list[TrialResult]:
    if jobs <= 1 or len(tasks) <= 1:
        results = [_run_trial(t) for t in tasks]
    else:
        with get_context("fork").Pool(jobs) as pool:
            results = list(pool.imap_unordered(_run_trial, tasks, chunksize=4))
    return sorted(results, key=lambda r: (r.cell, r.trial))


# ---------------------------------------------------------------------------
# subcommands


def cmd_play(args) -> int:
    config = _load_config(args.config)
    requested_n = int(_pick(args.n, config, "n"))
    target_s = int(_pick(args.s, config, "s", 1))
    proposer_desc = _pick(args.proposer, config, "proposer", "uniform")
    if isinstance(proposer_desc, str):
        proposer_desc = _parse_descriptor(proposer_desc)
    decider_desc = _pick(args.decider, config, "decider", "always_yes")
    if isinstance(decider_desc, str):
        decider_desc = _parse_descriptor(decider_desc)
    master_seed = int(_pick(args.seed, config, "master_seed", 0))
    out_dir = Path(_pick(args.out, config, "out", "."))
    out_dir.mkdir(parents=True, exist_ok=True)

    n = _effective_n(requested_n, proposer_desc)
    if n != requested_n:
        print(f"n rounded from {requested_n} to {n} (multiple of 6)", file=sys.stderr)
    proposer = _s.proposer_from_descriptor(proposer_desc, n)
    decider = _s.decider_from_descriptor(decider_desc)
    t = _g.play_game(n, proposer, decider, min(target_s, n), master_seed)
    cert = _a.certify_graph(_a.GraphView.from_transcript(t), seed=mix(master_seed, 1))
    path = out_dir / "transcript.jsonl"
    t.to_jsonl(str(path))
    summary = {
        "n": n,
        "requested_n": requested_n,
        "turns": t.num_turns,
        "edges": t.num_edges(),
        "alpha_certificate": cert.size,
        "win": cert.size >= min(target_s, n),
        "transcript": str(path),
    }
    print(json.dumps(summary))
    return 0


def cmd_sweep(args) -> int:
    config = _load_config(args.config)
    ns = [int(x) for x in _as_list(_pick(args.n, config, "n"))]
    svals = [int(x) for x in _as_list(_pick(args.s, config, "s", 1))]
    proposers = _as_list(_pick(None, config, "proposers"))
    deciders = _as_list(_pick(None, config, "deciders"))
    if args.proposer:
        proposers = [args.proposer]
    if args.decider:
        deciders = [args.decider]
    proposers = [_parse_descriptor(p) if isinstance(p, str) else p for p in proposers]
    deciders = [_parse_descriptor(d) if isinstance(d, str) else d for d in deciders]
    trials = int(_pick(args.trials, config, "trials", 10))
    master_seed = int(_pick(args.seed, config, "master_seed", 0))
    jobs = int(_pick(args.jobs, config, "jobs", 1))
    out_dir = Path(_pick(args.out, config, "out", "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    if not ns or not proposers or not deciders:
        print("sweep needs n, proposers, and deciders", file=sys.stderr)
        return 1

    cells = []
    for n in ns:
        for p_desc in proposers:
            for d_desc in deciders:
                cells.append((n, p_desc, d_desc))
    tasks = []
    cell_seeds = []
    failures: dict[int, str] = {}
    for ci, (n, p_desc, d_desc) in enumerate(cells):
        eff = _effective_n(n, p_desc)
        if eff != n:
            print(f"cell {ci}: n rounded from {n} to {eff}", file=sys.stderr)
        cell_seed = mix(master_seed, ci)
        cell_seeds.append(cell_seed)
        for ti in range(trials):
            tasks.append((ci, ti, eff, p_desc, d_desc, cell_seed))

    try:
        results = _map_trials(tasks, jobs)
    except Exception:
        # fall back to per-cell execution so one bad cell doesn't sink the run
        results = []
        for ci in range(len(cells)):
            cell_tasks = [t for t in tasks if t[0] == ci]
            try:
                results.extend(_map_trials(cell_tasks, jobs))
            except Exception as e:  # record and continue
                failures[ci] = f"{type(e).__name__}: {e}"
                print(f"cell {ci} failed: {failures[ci]}", file=sys.stderr)
        results.sort(key=lambda r: (r.cell, r.trial))

    by_cell: dict[int, list[TrialResult]] = {}
    for r in results:
        by_cell.setdefault(r.cell, []).append(r)

    path = out_dir / "sweep.csv"
    cols = ["n", "trials", "proposer", "decider", "p", "s", "wins", "win_rate",
            "mean_alpha_certificate", "mean_edges", "mean_turns", "seed"]
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(cols)
        for ci, (n, p_desc, d_desc) in enumerate(cells):
            eff = _effective_n(n, p_desc)
            pcol = _fmt(d_desc["p"]) if d_desc.get("kind") == "iid" else ""
            rows = by_cell.get(ci, [])
            for s in svals:
                if not rows:
                    w.writerow([eff, trials, _desc_str(p_desc), _desc_str(d_desc),
                                pcol, s, "", "", "", "", "", cell_seeds[ci]])
                    continue
                wins = sum(1 for r in rows if r.certificate >= s)
                w.writerow([
                    eff, trials, _desc_str(p_desc), _desc_str(d_desc), pcol, s,
                    wins, _fmt(wins / len(rows)),
                    _fmt(sum(r.certificate for r in rows) / len(rows)),
                    _fmt(sum(r.edges for r in rows) / len(rows)),
                    _fmt(sum(r.turns for r in rows) / len(rows)),
                    cell_seeds[ci],
                ])
    print(str(path))
    return 0


def cmd_threshold(args) -> int:
    config = _load_config(args.config)
    n = int(_pick(args.n, config, "n"))
    proposer_desc = _pick(args.proposer, config, "proposer", "uniform")
    if isinstance(proposer_desc, str):
        proposer_desc = _parse_descriptor(proposer_desc)
    decider_desc = _pick(args.decider, config, "decider", "always_yes")
    if isinstance(decider_desc, str):
        decider_desc = _parse_descriptor(decider_desc)
    trials = int(_pick(args.trials, config, "trials", 100))
    master_seed = int(_pick(args.seed, config, "master_seed", 0))
    out_dir = Path(_pick(args.out, config, "out", "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    eff = _effective_n(n, proposer_desc)
    if eff != n:
        print(f"n rounded from {n} to {eff}", file=sys.stderr)
    est = _a.estimate_threshold(eff, proposer_desc, decider_desc, trials, master_seed)
    payload = {
        "n": est.n,
        "s_star": est.s_star,
        "curve": [{"s": s, "wins": wins, "trials": est.trials} for s, wins in est.curve],
    }
    path = out_dir / "threshold.json"
    with open(path, "w") as f:
        json.dump(payload, f)
        f.write("\n")
    print(json.dumps(payload))
    return 0


def cmd_coins(args) -> int:
    config = _load_config(args.config)
    params = _c.CBParams(
        a=int(_pick(args.a, config, "a")),
        nu=int(_pick(args.nu, config, "nu")),
        nu0=int(_pick(args.nu0, config, "nu0")),
    )
    policy_spec = _pick(args.policy, config, "policy", "all_heads")
    desc = _parse_heads_policy(policy_spec) if isinstance(policy_spec, str) else policy_spec
    policy = _c.make_heads_policy(
        desc["kind"], **{k: v for k, v in desc.items() if k != "kind"}
    )
    t = Fraction(str(_pick(args.t, config, "t")))
    trials = int(_pick(args.trials, config, "trials", 10000))
    seed = int(_pick(args.seed, config, "master_seed", 0))
    mode = _pick(args.mode, config, "mode", _c.EXACT_SUBSET)
    if mode == _c.EXACT_SUBSET:
        est = _c.empirical_tail(params, policy, t, trials, seed)
        freq = est.frequency
        lo, hi = est.wilson_95_interval
        bound = est.bound
    else:
        hs, has = _c.run_trials(params, policy, _c.INDEPENDENT, trials, seed)
        num, den = t.numerator, t.denominator
        lhs = abs(params.nu * has - params.a * hs)
        event = (hs >= params.nu0) & (lhs * den >= num * hs * params.nu)
        hits = int(event.sum())
        freq = hits / trials
        lo, hi = _c.wilson_interval(hits, trials)
        bound = _c.tail_bound_bucket(params, t)
    payload = {
        "frequency": freq,
        "ci_low": lo,
        "ci_high": hi,
        "bound_raw": bound.raw,
        "bound_clamped": bound.clamped,
    }
    print(json.dumps(payload))
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "coins.json", "w") as f:
            json.dump(payload, f)
            f.write("\n")
    return 0


def cmd_verify(args) -> int:
    parse_errors = 0
    violations = 0
    for path in args.paths:
        try:
            t = _g.Transcript.from_jsonl(path)
        except (OSError, _g.TranscriptParseError) as e:
            print(f"{path}: parse error: {e}", file=sys.stderr)
            parse_errors += 1
            continue
        report = _a.verify_transcript(t)
        if report.ok:
            print(f"{path}: ok ({t.num_turns} turns, {t.num_edges()} edges)")
        else:
            violations += 1
            for v in report.violations:
                print(f"{path}: violation {v.rule} at turn {v.turn_index}: {v.detail}",
                      file=sys.stderr)
    if parse_errors:
        return 1
    if violations:
        return 2
    return 0


# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--seed", type=int, default=None, help="master seed (u64)")
    p.add_argument("--jobs", type=int, default=None, help="parallel worker count")
    p.add_argument("--out", default=None, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rpslab",
        description="Ramsey, Paper, Scissors simulation lab",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("play", help="play one game, write its transcript")
    _add_common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--s", type=int, help="target independent-set size")
    p.add_argument("--proposer", help="strategy descriptor")
    p.add_argument("--decider", help="strategy descriptor")
    p.set_defaults(fn=cmd_play)

    p = sub.add_parser("sweep", help="cross-product parameter sweep to CSV")
    _add_common(p)
    p.add_argument("--n", type=int, nargs="+")
    p.add_argument("--s", type=int, nargs="+")
    p.add_argument("--proposer", help="single proposer descriptor")
    p.add_argument("--decider", help="single decider descriptor")
    p.add_argument("--trials", type=int)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("threshold", help="estimate the win threshold s*")
    _add_common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--proposer")
    p.add_argument("--decider")
    p.add_argument("--trials", type=int)
    p.set_defaults(fn=cmd_threshold)

    p = sub.add_parser("coins", help="Coins-and-Buckets tail measurement")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--nu", type=int, required=True)
    p.add_argument("--nu0", type=int, required=True)
    p.add_argument("--t", required=True, help="score threshold (exact rational, e.g. 0.04)")
    p.add_argument("--policy", default="all_heads")
    p.add_argument("--mode", choices=[_c.EXACT_SUBSET, _c.INDEPENDENT],
                   default=_c.EXACT_SUBSET)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_coins)

    p = sub.add_parser("verify", help="verify transcript files")
    p.add_argument("paths", nargs="+")
    p.set_defaults(fn=cmd_verify)

    return ap


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, _g.GameError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
