"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 numerical or verification failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import fock_oracle, hafnian, ngbs, state_prep
from .config import ExperimentConfig, complex_pairs
from .errors import ConfigError, NgbsError
from .suite import quick_suite

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
STRICT_TOL = 1e-6
SELFTEST_TV = 1e-7


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _fmt_pattern(p) -> str:
    return " ".join(str(n) for n in p)


def cmd_prepare(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    cutoff = cfg.cutoff if args.cutoff is None else args.cutoff
    report = {"source_params": {"r": cfg.r, "t": cfg.t}, "sources": []}
    for k, (target, spec) in enumerate(zip(cfg.target_states(), cfg.sources())):
        entry = {
            "index": k,
            "target_amplitudes": complex_pairs(target.amplitudes),
            "alphas": complex_pairs(spec.alphas),
            "herald_displacements": complex_pairs(spec.herald_displacements()),
        }
        if spec.herald_count:
            source = state_prep.build_source(spec)
            p_oracle, _ = fock_oracle.simulate_source(spec)
            entry["herald_probability"] = state_prep.herald_probability(source)
            entry["herald_probability_oracle"] = p_oracle
            entry["herald_rank"] = state_prep.herald_rank(source)
        _, amps = fock_oracle.simulate_source(spec)
        shown = max(cutoff, target.degree)
        entry["heralded_amplitudes"] = complex_pairs(amps[: shown + 1])
        entry["heralded_tail_mass"] = float(np.sum(np.abs(amps[shown + 1:]) ** 2))
        entry["fidelity"] = state_prep.fidelity(spec, target)
        report["sources"].append(entry)
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_probs(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    exp = cfg.to_experiment(args.cutoff)
    dist = ngbs.full_distribution(exp, threads=args.threads)
    header = ["pattern", "probability"]
    oracle = None
    if args.oracle:
        oracle = dict(fock_oracle.simulate_experiment(exp))
        header += ["oracle", "abs_diff"]
    prep = ngbs.prepare(exp) if args.rank else None
    if args.rank:
        header.append("rank")
    lines = ["\t".join(header)]
    max_diff = 0.0
    for pattern, prob in dist.items():
        row = [_fmt_pattern(pattern), f"{prob:.15e}"]
        if oracle is not None:
            diff = abs(prob - oracle[pattern])
            max_diff = max(max_diff, diff)
            row += [f"{oracle[pattern]:.15e}", f"{diff:.3e}"]
        if prep is not None:
            inst = hafnian.submatrix_for_pattern(prep.af, prep.full_pattern(pattern))
            row.append(str(hafnian.numerical_rank(inst.a_sub)))
        lines.append("\t".join(row))
    lines.append(f"tail\t{dist.tail:.15e}")
    if oracle is not None:
        lines.append(f"max_abs_diff\t{max_diff:.3e}")
    _emit("\n".join(lines) + "\n", args.out)
    if oracle is not None and args.strict and max_diff > STRICT_TOL:
        print(f"oracle disagreement {max_diff:.3e} exceeds {STRICT_TOL:.0e}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_sample(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    exp = cfg.to_experiment(args.cutoff)
    seed = cfg.seed if args.seed is None else args.seed
    draws = ngbs.sample(exp, args.count, seed)
    _emit("".join(_fmt_pattern(p) + "\n" for p in draws), args.out)
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def bench_rank(n_list, r_list, trials, seed, loops=True):
    """Yield (N, R, enum_seconds, lowrank_seconds, max_residual) rows."""
    rng = np.random.default_rng(seed)
    for n in n_list:
        for r in r_list:
            t_enum = t_low = 0.0
            worst = 0.0
            for _ in range(trials):
                g = (rng.normal(size=(n, r)) + 1j * rng.normal(size=(n, r))) / np.sqrt(2 * r)
                f = (rng.normal(size=n) + 1j * rng.normal(size=n)) / np.sqrt(2) if loops else np.zeros(n, complex)
                inst = hafnian.MatchingInstance(g @ g.T, f)
                t0 = time.perf_counter()
                ref = hafnian.loop_hafnian(inst)
                t1 = time.perf_counter()
                val = hafnian.loop_hafnian_low_rank(hafnian.low_rank_factor(inst))
                t2 = time.perf_counter()
                t_enum += t1 - t0
                t_low += t2 - t1
                err = abs(val - ref) / abs(ref) if abs(ref) > 0 else abs(val)
                worst = max(worst, err)
            yield n, r, t_enum / trials, t_low / trials, worst


def cmd_bench_rank(args) -> int:
    n_list = _int_list(args.n_list)
    if any(n > 20 for n in n_list):
        raise ConfigError("bench-rank supports N <= 20")
    lines = ["N\tR\ttrials\tenum_s\tlowrank_s\tspeedup\tmax_rel_err"]
    if args.out is None:
        print(lines[0], flush=True)
    for n, r, te, tl, err in bench_rank(n_list, _int_list(args.r_list), args.trials, args.seed, not args.no_loops):
        speed = te / tl if tl > 0 else float("inf")
        lines.append(f"{n}\t{r}\t{args.trials}\t{te:.6e}\t{tl:.6e}\t{speed:.2f}\t{err:.3e}")
        if args.out is None:
            print(lines[-1], flush=True)
    if args.out:
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_selftest(args) -> int:
    failed = 0
    for name, exp in quick_suite():
        dist = ngbs.full_distribution(exp, threads=args.threads)
        absorbed = ngbs.full_distribution(exp, absorbed=True)
        oracle = np.array([p for _, p in fock_oracle.simulate_experiment(exp)])
        tv = 0.5 * float(np.abs(dist.probs - oracle).sum())
        gap = float(np.abs(dist.probs - absorbed.probs).max())
        ok = tv <= SELFTEST_TV and gap <= 1e-9
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}\t{name}\ttv={tv:.2e}\tabsorbed_gap={gap:.2e}")
    print(f"backend={hafnian.BACKEND}")
    return EXIT_OK if not failed else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ngbsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="experiment configuration (JSON)")
        p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("prepare", help="per-source state preparation report")
    common(p)
    p.add_argument("--cutoff", type=int)
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("probs", help="conditional output distribution table")
    common(p)
    p.add_argument("--cutoff", type=int)
    p.add_argument("--oracle", action="store_true", help="add Fock-oracle probabilities")
    p.add_argument("--strict", action="store_true", help=f"exit 3 if oracle differs by more than {STRICT_TOL}")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--rank", action="store_true", help="add the numerical rank of each pattern matrix")
    p.set_defaults(func=cmd_probs)

    p = sub.add_parser("sample", help="draw patterns from the conditional distribution")
    common(p)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--cutoff", type=int)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("bench-rank", help="time low-rank expansion against matching enumeration")
    common(p, config=False)
    p.add_argument("--n-list", default="8,10,12,14,16")
    p.add_argument("--r-list", default="1,2,3")
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-loops", action="store_true", help="zero loop weights (plain Hafnian)")
    p.set_defaults(func=cmd_bench_rank)

    p = sub.add_parser("selftest", help="pipeline-versus-oracle equivalence on small experiments")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "count", 0) is not None and getattr(args, "count", 0) < 0:
        print("error: --count must be non-negative", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NgbsError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
