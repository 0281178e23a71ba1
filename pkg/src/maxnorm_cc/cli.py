"""Command-line entry point (``maxnorm-cc``)."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import io
from .baselines import brute_force_optimal
from .core import absolute_disagreement, incidence_matrix, linear_disagreement
from .datagen import NoiseSpec, fig3_fixture, planted_clusters
from .experiments import (
    BALANCED,
    COMPARE_COLUMNS,
    METHODS,
    SWEEP_COLUMNS,
    SweepConfig,
    compare_optimizers,
    run_method,
    sweep_recovery,
    write_rows,
)
from .metrics import check_recovery_guarantee
from .solvers import SolverConfig, max_norm_bound, write_sdp

OBJECTIVE_FLAGS = {"abs": "absolute", "absolute": "absolute", "linear": "linear"}
NOISE_FLAGS = {"binary": "binary_flip", "binary_flip": "binary_flip", "fractional": "fractional"}

# Built-in defaults; a --config file overrides these and flags override both.
DEFAULTS = {
    "method": "tight",
    "objective": "abs",
    "mu": 0.05,
    "tau": 1.0,
    "iters": 2000,
    "outer_iters": 20,
    "rank": None,
    "restarts": None,
    "seed": 0,
    "sizes": ",".join(map(str, BALANCED)),
    "noise": "binary",
    "grid": "0,0.05,0.1,0.15,0.2,0.25",
    "trials": 20,
    "methods": "tight,trace,slink",
    "lambda0": 1.0,
    "lambda_every": 100,
    "jobs": 1,
    "rate": 0.0,
}


def read_config(path) -> dict:
    """Flat ``key=value`` file; ``#`` starts a comment, dashes map to underscores."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = val
    return out


def _ints(s: str) -> tuple:
    return tuple(int(v) for v in str(s).split(",") if v.strip())


def _floats(s: str) -> tuple:
    return tuple(float(v) for v in str(s).split(",") if v.strip())


class Settings:
    """Merged view of defaults, config file and explicit flags."""

    def __init__(self, args: argparse.Namespace):
        merged = dict(DEFAULTS)
        if getattr(args, "config", None):
            merged.update(read_config(args.config))
        for key, val in vars(args).items():
            if val is not None:
                merged[key] = val
        self._v = merged

    def __getattr__(self, name):
        try:
            return self._v[name]
        except KeyError:
            raise AttributeError(name) from None

    def solver(self) -> SolverConfig:
        v = self._v
        objective = OBJECTIVE_FLAGS.get(str(v["objective"]))
        if objective is None:
            raise ValueError(f"unknown objective {v['objective']!r}")
        return SolverConfig(
            tau=float(v["tau"]),
            iters=int(v["iters"]),
            outer_iters=int(v["outer_iters"]),
            rank_cap=None if v["rank"] in (None, "", "None") else int(v["rank"]),
            restarts=None if v["restarts"] in (None, "", "None") else int(v["restarts"]),
            mu=float(v["mu"]),
            objective=objective,
            seed=int(v["seed"]),
            lambda0=float(v["lambda0"]),
            lambda_double_every=int(v["lambda_every"]),
        )

    def sweep(self, methods: Optional[str] = None) -> SweepConfig:
        v = self._v
        noise = NOISE_FLAGS.get(str(v["noise"]))
        if noise is None:
            raise ValueError(f"unknown noise model {v['noise']!r}")
        return SweepConfig(
            sizes=_ints(v["sizes"]),
            noise=noise,
            grid=_floats(v["grid"]),
            trials=int(v["trials"]),
            methods=tuple(m.strip() for m in str(methods or v["methods"]).split(",")),
            solver=self.solver(),
            base_seed=int(v["seed"]),
            jobs=int(v["jobs"]),
            timing=bool(v.get("timing", False)),
        )


def _common(p: argparse.ArgumentParser, solver: bool = True) -> None:
    p.add_argument("--config", help="flat key=value file; flags override it")
    p.add_argument("--seed", type=int)
    if solver:
        p.add_argument("--objective", choices=sorted(OBJECTIVE_FLAGS))
        p.add_argument("--mu", type=float)
        p.add_argument("--tau", type=float)
        p.add_argument("--iters", type=int)
        p.add_argument("--outer-iters", dest="outer_iters", type=int)
        p.add_argument("--rank", type=int)
        p.add_argument("--restarts", type=int)
        p.add_argument("--lambda0", type=float)
        p.add_argument("--lambda-every", dest="lambda_every", type=int)


def _sweep_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sizes", help="comma-separated cluster sizes")
    p.add_argument("--noise", choices=sorted(NOISE_FLAGS))
    p.add_argument("--grid", help="comma-separated ascending noise rates")
    p.add_argument("--trials", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--out", help="CSV path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maxnorm-cc", description="Correlation clustering via max-norm relaxation."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="cluster one affinity file")
    p.add_argument("affinity")
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--truth", help="planted partition CSV; enables the guarantee report")
    p.add_argument("--out", help="partition CSV to write")
    p.add_argument("--trace-out", help="per-iteration trace CSV")
    p.add_argument("--k", type=int, help="cluster count for the spectral baseline")
    _common(p)

    for name, help_ in (
        ("sweep-recovery", "exact-recovery probability over a noise grid"),
        ("sweep-vi", "variation of information over a noise grid"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--methods", help=f"comma-separated subset of {','.join(METHODS)}")
        p.add_argument("--method", help="alias for a single method")
        p.add_argument("--timing", action="store_true", default=None,
                       help="add a runtime column (breaks byte-reproducibility)")
        _sweep_flags(p)
        _common(p)

    p = sub.add_parser("compare-optimizers", help="sparsity and l1 error of the optimizers")
    p.add_argument("--methods", help="comma-separated subset of factor,loss,dual,tight,trace")
    _sweep_flags(p)
    _common(p)

    p = sub.add_parser("oracle", help="exhaustive optimum (n <= 12)")
    p.add_argument("affinity")
    p.add_argument("--out", help="partition CSV to write")
    p.add_argument("--n-max", dest="n_max", type=int, default=12)

    p = sub.add_parser("gen", help="write a planted instance")
    p.add_argument("--sizes")
    p.add_argument("--noise", choices=sorted(NOISE_FLAGS))
    p.add_argument("--rate", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--config")
    p.add_argument("--out", required=True, help="affinity file")
    p.add_argument("--truth-out", help="planted partition CSV")

    p = sub.add_parser("fixture-fig3", help="write the two-clique counterexample")
    p.add_argument("--out", required=True)
    p.add_argument("--truth-out")

    p = sub.add_parser("export-sdp", help="write the max-norm SDP data for an external solver")
    p.add_argument("affinity")
    p.add_argument("--out", required=True)
    return parser


def cmd_solve(args) -> int:
    s = Settings(args)
    A = io.load_affinity(args.affinity)
    truth = io.load_partition(args.truth) if args.truth else None
    cfg = s.solver()
    k_hint = args.k if args.k is not None else (truth.k if truth is not None else None)
    if s.method == "spectral" and k_hint is None:
        raise ValueError("spectral clustering needs --k or --truth")
    part, cand, trace = run_method(s.method, A, k_hint or 1, cfg)
    K = incidence_matrix(part).entries
    print(f"method={s.method}")
    print(f"clusters={part.k}")
    print(f"objective={absolute_disagreement(A, K)!r}")
    print(f"linear_objective={linear_disagreement(A, K)!r}")
    if cand is not None:
        bound, estimated = max_norm_bound(cand)
        print(f"relaxed_objective={trace.best_objective!r}")
        print(f"max_norm_{'estimate' if estimated else 'witness'}={bound!r}")
        print(f"iterations={trace.iterations}")
        if args.trace_out:
            trace.write_csv(args.trace_out)
    if truth is not None:
        print(check_recovery_guarantee(A, truth).to_text(), end="")
        print(f"exact_recovery={str(part.same_clusters(truth)).lower()}")
    if args.out:
        io.save_partition(part, args.out)
    return 0


def cmd_sweep(args) -> int:
    s = Settings(args)
    methods = args.method if getattr(args, "method", None) else None
    if methods is None and args.methods is None and args.command == "sweep-vi":
        methods = "tight,trace,slink,spectral"
    cfg = s.sweep(methods)
    rows = sweep_recovery(cfg)
    cols = SWEEP_COLUMNS + (["runtime"] if cfg.timing else [])
    text = write_rows(rows, args.out, cols)
    if not args.out:
        sys.stdout.write(text)
    return 0


def cmd_compare(args) -> int:
    s = Settings(args)
    cfg = s.sweep("factor")
    methods = tuple((args.methods or "factor,loss,dual").split(","))
    rows = compare_optimizers(cfg, methods)
    text = write_rows(rows, args.out, COMPARE_COLUMNS)
    if not args.out:
        sys.stdout.write(text)
    return 0


def cmd_oracle(args) -> int:
    A = io.load_affinity(args.affinity)
    if A.n > args.n_max:
        print(
            f"error: n={A.n} is too large for exhaustive search (limit {args.n_max})",
            file=sys.stderr,
        )
        return 1
    res = brute_force_optimal(A, args.n_max)
    print(f"objective={res.objective!r}")
    print(f"clusters={res.partition.k}")
    print("labels=" + " ".join(str(int(v)) for v in res.partition.labels))
    print(f"partitions_examined={res.partitions_examined}")
    if args.out:
        io.save_partition(res.partition, args.out)
    return 0


def cmd_gen(args) -> int:
    s = Settings(args)
    noise = NoiseSpec(NOISE_FLAGS[str(s.noise)], float(s.rate), int(s.seed))
    A, p, dmax = planted_clusters(_ints(s.sizes), noise)
    io.save_affinity(A, args.out)
    if args.truth_out:
        io.save_partition(p, args.truth_out)
    print(f"n={A.n}")
    print(f"realized_d_max={dmax!r}")
    return 0


def cmd_fig3(args) -> int:
    A, p = fig3_fixture()
    io.save_affinity(A, args.out)
    if args.truth_out:
        io.save_partition(p, args.truth_out)
    return 0


def cmd_export_sdp(args) -> int:
    write_sdp(io.load_affinity(args.affinity), args.out)
    return 0


COMMANDS = {
    "solve": cmd_solve,
    "sweep-recovery": cmd_sweep,
    "sweep-vi": cmd_sweep,
    "compare-optimizers": cmd_compare,
    "oracle": cmd_oracle,
    "gen": cmd_gen,
    "fixture-fig3": cmd_fig3,
    "export-sdp": cmd_export_sdp,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
