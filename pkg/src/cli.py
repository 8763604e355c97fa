"""
Command-line dispatcher.

Every subcommand writes its artifacts plus run_config.json under the output
directory; `--config run_config.json` alone replays a saved run.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import catalog, export, verify
from .cartan import cartan_trajectory, estimate_rate, regime_classify, regime_report
from .config import Settings, load_settings, load_settings_file
from .designs import (
    PermutationGate,
    extract_quantum_design,
    format_design_grid,
    format_quantum_design,
    permutation_duality,
    permutation_to_KL,
)
from .equivalence import (
    Measure,
    compare_histograms,
    enumerate_dual_permutation_classes,
    sample_product_entanglement,
)
from .errors import (
    DimensionError,
    DualkitError,
    EntangledColumn,
    MeasureMismatch,
    NotAPermutation,
    RankDeficient,
    UnknownGate,
)
from .linalg import RngStream, sample_cue
from .maps import MapKind, StopReason, StopRule, Target, iterate, sample_block_dual, sample_diagonal_dual
from .measures import classify_duality, measure_set

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

_NUMERIC_ERRORS = (RankDeficient, EntangledColumn)
_USAGE_ERRORS = (DimensionError, UnknownGate, NotAPermutation, MeasureMismatch, OSError, ValueError)


def _triple(text: str) -> tuple[float, float, float]:
    try:
        values = tuple(float(v) for v in text.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected c1,c2,c3, got {text!r}") from None
    if len(values) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated values, got {text!r}")
    return values


def _count(text: str) -> int:
    """Accepts 100000 and 1e5."""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value < 1 or value != int(value):
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='dualkit',
        description='Dual-unitary and 2-unitary gates: catalog, maps, Cartan analysis, designs and LU classes',
    )
    parser.add_argument('--seed', type=int, default=None, help='Master RNG seed (default: settings / DUALKIT_SEED)')
    parser.add_argument('--workers', type=int, default=None, help='Worker threads for sampling and scans')
    parser.add_argument('--out-dir', type=Path, default=None, help='Directory for artifacts (default: output)')
    parser.add_argument('--tol', dest='global_tol', type=float, default=None,
                        help='Classification tolerance (default 1e-8)')
    parser.add_argument('--config', type=Path, default=None,
                        help='Replay a saved run_config.json (its settings, and its command when none is given)')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='-v for INFO, -vv for DEBUG')

    sub = parser.add_subparsers(dest='command')

    p = sub.add_parser('catalog', help='Write a named gate as a matrix file')
    p.add_argument('name', nargs='?', help='Catalog name (SWAP3, P16, O16, ...)')
    p.add_argument('--d', type=int, default=None, help='Local dimension for sized families')
    p.add_argument('--c', type=float, default=None, help='Angle for XXX')
    p.add_argument('--phase-seed', type=int, default=None, help='Enphasing seed for P16_ENPHASED')
    p.add_argument('-o', '--output', default=None, help="Output path; '-' prints to stdout only")
    p.add_argument('--list', action='store_true', help='List catalog names')

    p = sub.add_parser('classify', help='Duality flags and entanglement measures of a matrix')
    p.add_argument('file', help="Matrix file, or '-' for stdin")

    p = sub.add_parser('iterate', help='Iterate a map from a seed unitary')
    p.add_argument('--map', dest='kind', default='MR', help='MR, MGamma, MGammaR, MR_stochastic, MGammaR_stochastic')
    seed_group = p.add_mutually_exclusive_group()
    seed_group.add_argument('--seed-cue', action='store_true', help='CUE seed (default)')
    seed_group.add_argument('--seed-file', default=None, help='Seed matrix file')
    seed_group.add_argument('--ensemble', choices=('diagonal', 'block'), default=None,
                            help='Seed from the diagonal or block-diagonal dual ensemble')
    p.add_argument('--d', type=int, default=2, help='Local dimension of a sampled seed')
    p.add_argument('--target', choices=[t.value for t in Target], default='dual')
    p.add_argument('--tol', type=float, default=1e-8, help='Target defect')
    p.add_argument('--max-iters', type=int, default=10000)
    p.add_argument('--polish-iters', type=int, default=100)
    p.add_argument('--store-every', type=int, default=1)

    p = sub.add_parser('cartan', help='Iterate the two-qubit map on Cartan coordinates')
    p.add_argument('--seed', dest='point', type=_triple, required=True, help='c1,c2,c3')
    p.add_argument('--steps', type=int, default=100)

    p = sub.add_parser('regime', help='Convergence regime of a Cartan seed')
    p.add_argument('--seed', dest='point', type=_triple, required=True, help='c1,c2,c3')

    p = sub.add_parser('distribution', help='Entanglement distribution over Haar product inputs')
    p.add_argument('file', help="Matrix file, or '-' for stdin")
    p.add_argument('--N', dest='samples', type=_count, default=100_000)
    p.add_argument('--measure', default='vn', help='vn or linear')
    p.add_argument('--bins', type=int, default=100)
    p.add_argument('-o', '--output', default=None, help='Histogram CSV path')

    p = sub.add_parser('compare', help='KS comparison of two saved histograms')
    p.add_argument('first')
    p.add_argument('second')
    p.add_argument('--alpha', type=float, default=None)

    p = sub.add_parser('enumerate', help='Entangling classes of dual permutations')
    p.add_argument('--d', type=int, required=True)
    p.add_argument('--budget', type=_count, default=None, help='Sample budget for d ≥ 4')

    p = sub.add_parser('design', help='Classical or quantum design of a gate')
    p.add_argument('file', help="Matrix file, permutation file (--permutation), or '-'")
    p.add_argument('--permutation', action='store_true', help='Read a one-line permutation file')
    p.add_argument('--ame', action='store_true', help='Also write the AME coefficients')

    p = sub.add_parser('verify', help='Run the acceptance suite')
    p.add_argument('--suite', choices=('paper', 'reference'), default='paper',
                   help='Suite to run; reference is an alias of paper')
    p.add_argument('--only', default=None, help='Comma-separated criteria, e.g. A1,A3')
    p.add_argument('--extended', action='store_true', help='Include long-running criteria')

    return parser


def _configure_logging(verbosity: int):
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')


def _settings_for(args) -> Settings:
    base = load_settings_file(args.config) if args.config else load_settings()
    return base.with_overrides(
        seed=args.seed,
        workers=args.workers,
        output_dir=args.out_dir,
        classify_tol=args.global_tol,
    )


def _params(args) -> dict:
    skip = {'config', 'verbose', 'seed', 'workers', 'out_dir', 'global_tol'}
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k not in skip}


# ---------------------------------------------------------------------------
# Commands

def cmd_catalog(args, settings: Settings) -> int:
    if args.list or not args.name:
        print('\n'.join(catalog.known_names()))
        return EXIT_OK
    U = catalog.named_gate(args.name, d=args.d, c=args.c, seed=args.phase_seed)
    if args.output == '-':
        sys.stdout.write(export.format_matrix(U))
        return EXIT_OK
    path = Path(args.output) if args.output else settings.output_dir / f"{args.name.upper()}.txt"
    export.write_matrix(U, path)
    sys.stdout.write(export.format_matrix(U))
    logger.info("wrote %s", path)
    return EXIT_OK


def cmd_classify(args, settings: Settings) -> int:
    U = export.read_matrix(args.file)
    flags = classify_duality(U, tol=settings.classify_tol)
    m = measure_set(U)
    print(f"{flags.label()}, ep={m.ep:.6g}")
    print(f"  d={m.d}  E(U)={m.e_op:.10f}  E(US)={m.e_op_swapped:.10f}  ep={m.ep:.10f}  gt={m.gt:.10f}")
    print(f"  dual={flags.dual} t_dual={flags.t_dual} two_unitary={flags.two_unitary} self_dual={flags.self_dual}")
    print(f"  defects: dual={flags.dual_defect:.3e} t_dual={flags.t_dual_defect:.3e} "
          f"self_dual={flags.self_dual_defect:.3e}")
    return EXIT_OK


def cmd_iterate(args, settings: Settings) -> int:
    kind = MapKind.parse(args.kind)
    rng = RngStream(settings.seed)
    seed_stream, kick_stream = rng.split(2)
    if args.seed_file:
        U0 = export.read_matrix(args.seed_file)
    elif args.ensemble == 'diagonal':
        U0 = sample_diagonal_dual(args.d, seed_stream)
    elif args.ensemble == 'block':
        U0 = sample_block_dual(args.d, seed_stream)
    else:
        U0 = sample_cue(args.d * args.d, seed_stream)

    stop = StopRule(
        max_iters=args.max_iters,
        target_defect=args.tol,
        target=Target(args.target),
        store_every=args.store_every,
        polish_iters=args.polish_iters,
    )
    traj = iterate(kind, U0, stop, kick_stream if kind.stochastic else None)
    out = settings.output_dir
    export.write_trajectory_csv(traj, out / 'trajectory.csv')
    export.write_matrix(traj.final, out / 'final.txt')
    last = traj.last
    print(f"{kind.value}: {traj.stop_reason.value} after {traj.iterations} iterations "
          f"(dual defect {last.dual_defect:.3e}, t-dual defect {last.t_dual_defect:.3e}, ep {last.ep:.6f})")
    if traj.note:
        print(f"  {traj.note}")
    return EXIT_NUMERIC if traj.stop_reason is StopReason.RANK_DEFICIENT else EXIT_OK


def cmd_cartan(args, settings: Settings) -> int:
    points = cartan_trajectory(args.point, args.steps)
    path = export.write_cartan_csv(points, settings.output_dir / 'cartan.csv')
    last = points[-1]
    print(f"after {args.steps} steps: ({last.c1:.10f}, {last.c2:.10f}, {last.c3:.10f})")
    rate = estimate_rate(points)
    print(f"  fits: {', '.join(rate.kinds)}")
    print(regime_report([regime_classify(args.point, tol=settings.equality_tol)]))
    logger.info("wrote %s", path)
    return EXIT_OK


def cmd_regime(args, settings: Settings) -> int:
    print(regime_report([regime_classify(args.point, tol=settings.equality_tol)]))
    return EXIT_OK


def cmd_distribution(args, settings: Settings) -> int:
    U = export.read_matrix(args.file)
    hist = sample_product_entanglement(U, args.samples, Measure.parse(args.measure),
                                       RngStream(settings.seed), workers=settings.workers)
    hist.label = str(args.file)
    path = Path(args.output) if args.output else settings.output_dir / 'histogram.csv'
    export.write_histogram(hist, path, bins=args.bins)
    print(f"{hist.samples} samples of {hist.measure.value}: mean {hist.mean:.6f}, std {hist.std:.6f} -> {path}")
    return EXIT_OK


def cmd_compare(args, settings: Settings) -> int:
    h1, h2 = export.read_histogram(args.first), export.read_histogram(args.second)
    verdict = compare_histograms(h1, h2, alpha=args.alpha if args.alpha is not None else settings.ks_alpha)
    outcome = 'distinguishable (LU-inequivalent)' if verdict.distinguishable else 'not distinguishable'
    print(f"D={verdict.statistic:.6f} threshold={verdict.threshold:.6f} alpha={verdict.alpha:g} "
          f"N=({verdict.sample_sizes[0]}, {verdict.sample_sizes[1]}): {outcome}")
    return EXIT_OK


def cmd_enumerate(args, settings: Settings) -> int:
    table = enumerate_dual_permutation_classes(args.d, budget=args.budget, rng=RngStream(settings.seed))
    path = export.write_class_table(table, settings.output_dir / f"classes_d{args.d}.csv")
    print(export.format_class_table(table))
    logger.info("wrote %s", path)
    return EXIT_OK


def cmd_design(args, settings: Settings) -> int:
    if args.permutation:
        P = export.read_permutation(args.file)
        U = P.dense()
    else:
        U = export.read_matrix(args.file)
        try:
            P = PermutationGate.from_dense(U)
        except NotAPermutation:
            P = None

    out = settings.output_dir
    if P is not None:
        K, L = permutation_to_KL(P)
        flags = permutation_duality(P)
        print(f"permutation {P}: {flags.label()}")
        for name, table in (('K', K), ('L', L)):
            print(name)
            print(format_design_grid(table))
        export.write_design_grids(K, L, out / 'design.txt')
    else:
        design = extract_quantum_design(U, settings.product_tol, settings.overlap_tol)
        print(f"quantum design d={design.d}: cardinalities {design.cardinalities}, dual={design.dual}")
        text = format_quantum_design(design)
        print(text)
        (out / 'design.txt').parent.mkdir(parents=True, exist_ok=True)
        (out / 'design.txt').write_text(text + '\n', encoding='utf-8')
    if args.ame:
        export.write_ame_coefficients(U, out / 'ame.txt')
    return EXIT_OK


def cmd_verify(args, settings: Settings) -> int:
    only = args.only.split(',') if args.only else None
    results = verify.run_suite(only=only, extended=args.extended, settings=settings)
    print(verify.format_results(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


COMMANDS = {
    'catalog': cmd_catalog,
    'classify': cmd_classify,
    'iterate': cmd_iterate,
    'cartan': cmd_cartan,
    'regime': cmd_regime,
    'distribution': cmd_distribution,
    'compare': cmd_compare,
    'enumerate': cmd_enumerate,
    'design': cmd_design,
    'verify': cmd_verify,
}

# print-only commands
_NO_SIDECAR = {'classify', 'regime', 'compare'}


def _without_config(argv: Sequence[str]) -> list[str]:
    out, skip = [], False
    for arg in argv:
        if skip:
            skip = False
        elif arg == '--config':
            skip = True
        elif not arg.startswith('--config='):
            out.append(arg)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    _configure_logging(args.verbose)

    if args.command is None:
        if args.config is None:
            parser.print_help()
            return EXIT_USAGE
        saved = export.read_run_config(args.config)
        replay = saved.get('params', {}).get('argv')
        if not replay:
            print(f"error: {args.config} holds no command to replay", file=sys.stderr)
            return EXIT_USAGE
        return main(['--config', str(args.config)] + list(replay))

    try:
        settings = _settings_for(args)
        code = COMMANDS[args.command](args, settings)
        if args.command not in _NO_SIDECAR:
            params = _params(args)
            params['argv'] = _without_config(argv)
            export.write_run_config(settings, args.command, params, settings.output_dir / 'run_config.json')
        return code
    except _NUMERIC_ERRORS as e:
        print(f"error: {e.describe()}", file=sys.stderr)
        return EXIT_NUMERIC
    except DualkitError as e:
        print(f"error: {e.describe()}", file=sys.stderr)
        return EXIT_USAGE
    except _USAGE_ERRORS as e:
        print(f"error: {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
