"""Command-line front end.

``eigextrap run`` solves one problem with one or all methods and writes a
trace CSV per method.  ``eigextrap bench`` repeats the solve from seeded
random starts and reports mean iteration counts.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

from . import generators
from .errors import EigextrapError
from .linop import LinearOperator, shift_invert_operator
from .mmio import load_matrix_market, write_trace_csv
from .solvers import EigenResult, SolverConfig, solve

__all__ = [
    "MethodSpec",
    "BenchRow",
    "method_specs",
    "run_methods",
    "bench",
    "main",
]

EXIT_OK, EXIT_USAGE, EXIT_NOT_CONVERGED = 0, 1, 2


@dataclass(frozen=True)
class MethodSpec:
    label: str
    method: str
    config: SolverConfig


@dataclass(frozen=True)
class BenchRow:
    method: str
    mean_iters: float
    n_nonconverged: int
    n_trials: int


def method_specs(method: str, cfg: SolverConfig, etas: Sequence[float] = ()) -> List[MethodSpec]:
    """Expand ``power|simple|augmented|all`` into runnable specs.

    Several ``etas`` give one augmented entry each, labelled ``augmented_eta<value>``.
    """
    names = ["power", "simple", "augmented"] if method == "all" else [method]
    specs = []
    for name in names:
        if name == "augmented" and len(etas) > 1:
            for eta in etas:
                specs.append(MethodSpec(f"augmented_eta{eta:g}", name, dataclasses.replace(cfg, eta=eta)))
        else:
            specs.append(MethodSpec(name, name, cfg))
    return specs


def run_methods(op: LinearOperator, u0, specs: Sequence[MethodSpec]) -> List[EigenResult]:
    # every method starts from the same vector
    return [solve(s.method, op, u0, s.config) for s in specs]


def _trial(op, specs, n, seed):
    u0 = generators.random_init(n, seed)
    quiet = [dataclasses.replace(s, config=dataclasses.replace(s.config, record_trace=False)) for s in specs]
    return [(r.iterations, r.converged, r.eigenvalue) for r in run_methods(op, u0, quiet)]


def bench(op: LinearOperator, specs: Sequence[MethodSpec], n_trials: int, base_seed: int = 0,
          workers: int = 1, keep_trials: bool = False):
    """Mean iterations over starts ``random_init(n, base_seed + i)``, ``i < n_trials``.

    Non-converged trials count at their iteration cap.  Output order depends
    only on trial index, whatever ``workers`` is.  With ``keep_trials`` the
    raw ``(iterations, converged, eigenvalue)`` tuples per trial are returned too.
    """
    if n_trials < 1:
        raise EigextrapError("n_trials must be at least 1")
    seeds = [base_seed + i for i in range(n_trials)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            trials = list(pool.map(lambda s: _trial(op, specs, op.n, s), seeds))
    else:
        trials = [_trial(op, specs, op.n, s) for s in seeds]
    rows = []
    for j, spec in enumerate(specs):
        iters = [t[j][0] for t in trials]
        failed = sum(1 for t in trials if not t[j][1])
        rows.append(BenchRow(spec.label, sum(iters) / n_trials, failed, n_trials))
    return (rows, trials) if keep_trials else rows


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("problem")
    src.add_argument("--gen", choices=sorted(generators.GENERATORS))
    src.add_argument("--t", type=float, default=1.0, help="parameter of the nonnormal family")
    src.add_argument("--mtx", type=Path, help="Matrix Market file")
    src.add_argument("--shift", type=float)
    src.add_argument("--stiffness", type=Path)
    src.add_argument("--mass", type=Path)
    common.add_argument("--method", choices=["power", "simple", "augmented", "all"], default="all")
    common.add_argument("--tol", type=float, default=1e-7)
    common.add_argument("--max-iter", type=int, default=6000)
    common.add_argument("--m", type=int, default=40, help="power steps before the simple method")
    common.add_argument("--eta", type=float, nargs="+", default=[40.0])
    common.add_argument("--init", choices=["ones", "random"], default="ones")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", type=Path)

    parser = argparse.ArgumentParser(prog="eigextrap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="single solve with trace output")
    b = sub.add_parser("bench", parents=[common], help="average over seeded random starts")
    b.add_argument("--trials", type=int, default=100)
    b.add_argument("--workers", type=int, default=1)
    return parser


class _Usage(Exception):
    pass


def _problem(args):
    """Return ``(operator, shift)``; shift is None outside shift-invert mode."""
    shift_mode = args.shift is not None or args.stiffness is not None or args.mass is not None
    sources = sum(x is not None for x in (args.gen, args.mtx)) + shift_mode
    if sources != 1:
        raise _Usage("give exactly one of --gen, --mtx, or --shift/--stiffness/--mass")
    if shift_mode:
        if args.shift is None or args.stiffness is None or args.mass is None:
            raise _Usage("shift-invert mode needs --shift, --stiffness and --mass")
        K = load_matrix_market(args.stiffness)
        M = load_matrix_market(args.mass)
        return shift_invert_operator(K, M, args.shift), args.shift
    if args.mtx is not None:
        return load_matrix_market(args.mtx).operator(), None
    gen = generators.GENERATORS[args.gen]
    handle = gen(args.t) if args.gen == "nonnormal" else gen()
    return handle.operator(), None


def _trace_path(out: Path, label: str, several: bool) -> Path:
    if not several:
        return out
    return out.with_name(f"{out.stem}_{label}{out.suffix or '.csv'}")


def _summary(label, res: EigenResult, shift):
    line = (f"method={label} converged={str(res.converged).lower()} "
            f"lambda={res.eigenvalue:.17g} iters={res.iterations} resid={res.final_residual:.6e}")
    if shift is not None and res.eigenvalue != 0.0:
        line += f" recovered={shift + 1.0 / res.eigenvalue:.17g}"
    return line


def cmd_run(args, out=sys.stdout) -> int:
    op, shift = _problem(args)
    cfg = SolverConfig(args.tol, args.max_iter, args.m, args.eta[0])
    specs = method_specs(args.method, cfg, args.eta)
    u0 = generators.ones_init(op.n) if args.init == "ones" else generators.random_init(op.n, args.seed)
    results = run_methods(op, u0, specs)
    for spec, res in zip(specs, results):
        if args.out is not None:
            path = _trace_path(args.out, spec.label, len(specs) > 1)
            with path.open("wb") as fh:
                write_trace_csv(res.trace, spec.label, fh)
        print(_summary(spec.label, res, shift), file=out)
    return EXIT_OK if all(r.converged for r in results) else EXIT_NOT_CONVERGED


def cmd_bench(args, out=sys.stdout) -> int:
    if args.trials < 1:
        raise _Usage("--trials must be at least 1")
    if args.init != "random":
        print("note: bench always draws random starts; --init ignored", file=sys.stderr)
    op, _ = _problem(args)
    cfg = SolverConfig(args.tol, args.max_iter, args.m, args.eta[0], record_trace=False)
    rows = bench(op, method_specs(args.method, cfg, args.eta), args.trials, args.seed, args.workers)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["method", "mean_iters", "n_nonconverged", "n_trials"])
    for row in rows:
        writer.writerow([row.method, f"{row.mean_iters:.17g}", row.n_nonconverged, row.n_trials])
    out.write(buf.getvalue())
    if args.out is not None:
        args.out.write_bytes(buf.getvalue().encode("utf-8"))
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        if args.command == "run":
            return cmd_run(args, out)
        return cmd_bench(args, out)
    except (_Usage, EigextrapError, OSError) as exc:
        print(f"eigextrap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
