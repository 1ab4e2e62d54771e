"""Command-line front end.

Subcommands::

    relaqm run <scenario.yaml>        run a scenario, print its report
    relaqm kernel <file.yaml>         transition-kernel tables for family pairs
    relaqm unistochastic <matrix.txt> decide whether |U|^2 = p has a solution
    relaqm lattice-check <dim>        randomized sweep of the question-lattice laws

Exit codes: 0 success, 2 validation error (malformed or rule-violating
input), 3 numeric-check failure.  The environment variable RELAQM_SEED
provides a default seed; an explicit --seed flag wins over it, and both win
over a seed stored in a scenario file.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np
import yaml

from .errors import (
    DescriptionUnavailable,
    NotDoublyStochastic,
    ParseError,
    RelaqmError,
    ValidationError,
)
from .hilbert import OPT_ATOL
from .kernels import (
    kernel_from_families,
    phase_fix,
    triangle_criterion_3x3,
    unistochastic_search,
    verify_double_stochastic,
)
from .questions import (
    Question,
    implies,
    join,
    meet,
    negate,
    orthomodular_check,
    random_question,
    same_question,
)
from .scenario import emit_report, load_scenario, resolve_family, run

__all__ = ["main"]

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3


def _add_common(parser: argparse.ArgumentParser, tolerance: float) -> None:
    parser.add_argument("--seed", type=int, default=None,
                        help="override the default seed (RELAQM_SEED, then 0)")
    parser.add_argument("--format", choices=("table", "structured"),
                        default="table", help="stdout report format")
    parser.add_argument("--tolerance", type=float, default=tolerance,
                        help=f"numeric acceptance tolerance (default {tolerance:g})")


def _env_seed() -> int | None:
    raw = os.environ.get("RELAQM_SEED")
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError as exc:
        raise ValidationError("BadSeed", f"RELAQM_SEED={raw!r} is not an integer") from exc


def _effective_seed(flag: int | None, fallback: int | None = None) -> int | None:
    if flag is not None:
        return flag
    env = _env_seed()
    if env is not None:
        return env
    return fallback


def _cmd_run(args) -> int:
    sc = load_scenario(args.scenario)
    report = run(sc, seed=_effective_seed(args.seed))
    sys.stdout.write(emit_report(report, format=args.format))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(emit_report(report, format="structured"))
    worst = 0.0
    for entry in report.entries:
        for ent in entry.get("entangled", []):
            worst = max(worst, ent["marginal_agreement"])
    if report.violations:
        sys.stderr.write("report linter found untagged states\n")
        return EXIT_NUMERIC
    if worst > args.tolerance:
        sys.stderr.write(
            f"cross-observer marginal agreement {worst:.3g} exceeds "
            f"tolerance {args.tolerance:g}\n")
        return EXIT_NUMERIC
    return EXIT_OK


def _cmd_kernel(args) -> int:
    with open(args.file, "r", encoding="utf-8") as fh:
        try:
            doc = yaml.safe_load(fh.read())
        except yaml.YAMLError as exc:
            raise ParseError(f"not a well-formed document: {exc}") from exc
    if not isinstance(doc, dict) or "dim" not in doc:
        raise ParseError("kernel file needs a 'dim' field")
    dim = doc["dim"]
    declared = {}
    for name, raw in (doc.get("families") or {}).items():
        basis = np.array([[complex(*x) if isinstance(x, list) else complex(x)
                           for x in row] for row in raw])
        declared[name] = basis
    pairs = doc.get("pairs") or [["computational", "fourier"]]
    out_lines = []
    worst = 0.0
    for a_name, b_name in pairs:
        fam_a = resolve_family(a_name, dim, declared)
        fam_b = resolve_family(b_name, dim, declared)
        kernel = kernel_from_families(fam_a, fam_b)
        check = verify_double_stochastic(kernel.p)
        worst = max(worst, check.max_violation)
        out_lines.append(f"kernel {a_name} <- {b_name} (dim {dim}), "
                         f"max violation {check.max_violation:.3g}")
        for row in kernel.p:
            out_lines.append("  " + "  ".join(f"{x:.6f}" for x in row))
    sys.stdout.write("\n".join(out_lines) + "\n")
    return EXIT_OK if worst <= args.tolerance else EXIT_NUMERIC


def _cmd_unistochastic(args) -> int:
    p = np.loadtxt(args.matrix, ndmin=2)
    check = verify_double_stochastic(p)
    sys.stdout.write(f"doubly stochastic check: {check}\n")
    try:
        result = unistochastic_search(p, seed=_effective_seed(args.seed, 0),
                                      n_starts=args.starts, max_iters=args.iters)
    except NotDoublyStochastic as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_VALIDATION
    sys.stdout.write(f"residual: {result.residual:.6g}\n")
    sys.stdout.write(f"verdict: {result.verdict}\n")
    if p.shape == (3, 3):
        analytic = triangle_criterion_3x3(p)
        sys.stdout.write(f"triangle criterion (3x3): "
                         f"{'satisfied' if analytic else 'violated'}\n")
        if analytic != result.accepted(args.tolerance) and result.verdict != "inconclusive":
            sys.stderr.write("search verdict disagrees with the analytic criterion\n")
            return EXIT_NUMERIC
    if result.accepted(args.tolerance):
        u = phase_fix(result.U)
        sys.stdout.write("realizing unitary (gauge-fixed):\n")
        for row in u:
            sys.stdout.write("  " + "  ".join(f"{x.real:+.6f}{x.imag:+.6f}i"
                                              for x in row) + "\n")
        return EXIT_OK
    return EXIT_NUMERIC


def _lattice_laws(dim: int, trials: int, rng: np.random.Generator):
    """Randomized checks of the subspace-lattice laws; yields (law, failures)."""
    fails = {"commutativity": 0, "associativity": 0, "de_morgan": 0,
             "double_negation": 0, "complement": 0, "orthomodular": 0}
    for _ in range(trials):
        ranks = rng.integers(0, dim + 1, size=3)
        a, b, c = (random_question(dim, int(r), rng) for r in ranks)
        if not same_question(join(a, b), join(b, a)):
            fails["commutativity"] += 1
        if not same_question(meet(a, b), meet(b, a)):
            fails["commutativity"] += 1
        if not same_question(join(join(a, b), c), join(a, join(b, c))):
            fails["associativity"] += 1
        if not same_question(negate(join(a, b)), meet(negate(a), negate(b))):
            fails["de_morgan"] += 1
        if not same_question(negate(negate(a)), a):
            fails["double_negation"] += 1
        if not (same_question(join(a, negate(a)), Question.always(dim))
                and same_question(meet(a, negate(a)), Question.never(dim))):
            fails["complement"] += 1
        small = random_question(dim, int(rng.integers(0, dim)), rng)
        extension = join(small, random_question(dim, int(rng.integers(0, dim)), rng))
        if not implies(small, extension) or not orthomodular_check(small, extension):
            fails["orthomodular"] += 1
    return fails


def _cmd_lattice_check(args) -> int:
    if args.dim < 2:
        raise ValidationError("InvalidDimension", f"dim must be >= 2, got {args.dim}")
    rng = np.random.default_rng(_effective_seed(args.seed, 0))
    fails = _lattice_laws(args.dim, args.trials, rng)
    bad = 0
    for law, count in fails.items():
        status = "pass" if count == 0 else f"FAIL ({count}/{args.trials})"
        sys.stdout.write(f"{law:16s} {status}\n")
        bad += count
    return EXIT_OK if bad == 0 else EXIT_NUMERIC


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="relaqm",
        description="Observer-relative quantum scenarios, question lattices, "
                    "and transition kernels.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario file")
    p_run.add_argument("scenario", help="scenario document (YAML)")
    p_run.add_argument("--out", default=None,
                       help="also write the structured report to this path")
    _add_common(p_run, tolerance=1e-9)

    p_kernel = sub.add_parser("kernel", help="family-pair kernel tables")
    p_kernel.add_argument("file", help="kernel request document (YAML)")
    _add_common(p_kernel, tolerance=1e-9)

    p_uni = sub.add_parser("unistochastic",
                           help="search for a unitary with |U|^2 = p")
    p_uni.add_argument("matrix", help="whitespace-separated rows of reals")
    p_uni.add_argument("--starts", type=int, default=64)
    p_uni.add_argument("--iters", type=int, default=500)
    _add_common(p_uni, tolerance=OPT_ATOL)

    p_lat = sub.add_parser("lattice-check", help="random sweep of lattice laws")
    p_lat.add_argument("dim", type=int)
    p_lat.add_argument("--trials", type=int, default=200)
    _add_common(p_lat, tolerance=1e-9)

    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "kernel": _cmd_kernel,
        "unistochastic": _cmd_unistochastic,
        "lattice-check": _cmd_lattice_check,
    }
    try:
        return handlers[args.command](args)
    except (ParseError, ValidationError, DescriptionUnavailable) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION
    except RelaqmError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
