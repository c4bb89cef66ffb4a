"""Command line entry point: ``qshell <command> [options]``.

Exit status: 0 on success, 1 for an unknown dataset id, 2 for usage
errors and for ``compare`` runs that leave predictions unsupported.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .compare import DEFAULT_ROW_WINDOW, MODES, compare, render_report
from .datasets import DatasetNotFound, experiments, get_dataset, load_dataset, registry
from .scan import (
    MIN_PARTICLES,
    PAPER_TAU,
    TABLE_E_CUT,
    ScanError,
    ScanGrid,
    q_shell_table,
    result_to_csv,
    result_to_json,
    run_scan,
    stability_report,
    stability_to_dict,
)
from .shells import DEFAULT_THRESHOLD, FORMATS, fmt3, render_table
from .spectrum import Model, SpectrumError, enumerate_levels

log = logging.getLogger("qshell")

EXIT_NOT_FOUND = 1
EXIT_SPURIOUS = 2


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0 or v == float("inf"):
        raise argparse.ArgumentTypeError(f"must be a positive number: {text!r}")
    return v


def _finite(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if v != v or v in (float("inf"), float("-inf")):
        raise argparse.ArgumentTypeError(f"must be finite: {text!r}")
    return v


def _range(text: str) -> tuple[float, float, int]:
    """lo:hi:steps, or a single value meaning lo:lo:1."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            v = float(parts[0])
            return (v, v, 1)
        if len(parts) == 3:
            lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
            if lo > hi or steps < 1 or (steps == 1 and lo != hi):
                raise ValueError
            return (lo, hi, steps)
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected lo:hi:steps, got {text!r}")


def _model_args(p):
    p.add_argument("--tau", type=_finite, default=PAPER_TAU, help="deformation, q = exp(tau) (default %(default)s)")
    p.add_argument("--threshold", type=_positive, default=DEFAULT_THRESHOLD,
                   help="minimum gap closing a shell (default %(default)s)")
    p.add_argument("--e-cut", type=_positive, default=TABLE_E_CUT, help="energy cut (default %(default)s)")


def _ref_args(p, default_help):
    p.add_argument("--refs", default=None, help=f"comma-separated dataset ids ({default_help})")
    p.add_argument("--dataset-file", action="append", default=[], metavar="PATH",
                   help="extra dataset JSON file; may be repeated")
    p.add_argument("--mode", choices=MODES, default="row", help="matching rule (default %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qshell", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="diagnostics on stderr")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="list single-particle levels of a model")
    p.add_argument("--model", choices=[m.value for m in Model], default=Model.Q_EXACT.value)
    p.add_argument("--tau", type=_finite, default=PAPER_TAU)
    p.add_argument("--mu-prime", type=float, default=None, help="Nilsson l^2 strength (required for nilsson)")
    p.add_argument("--e-cut", type=_positive, default=TABLE_E_CUT)
    p.add_argument("--format", choices=FORMATS, default="markdown")

    p = sub.add_parser("table", help="shell table with cumulative occupancy and gaps")
    _model_args(p)
    p.add_argument("--format", choices=FORMATS, default="markdown")

    p = sub.add_parser("magic", help="magic numbers only")
    _model_args(p)
    p.add_argument("--format", choices=FORMATS, default="markdown")

    p = sub.add_parser("compare", help="compare predicted magic numbers with datasets")
    _model_args(p)
    _ref_args(p, "default: all experiments")
    p.add_argument("--slack", type=float, default=0.0, help="strict mode: extra tolerance")
    p.add_argument("--row-window", type=float, default=DEFAULT_ROW_WINDOW,
                   help="row mode: relative window (default %(default)s)")
    p.add_argument("--format", choices=FORMATS, default="markdown")

    p = sub.add_parser("scan", help="sweep tau and threshold")
    p.add_argument("--tau", type=_range, default=(PAPER_TAU, PAPER_TAU, 1), metavar="LO:HI:STEPS")
    p.add_argument("--threshold", type=_range, default=(DEFAULT_THRESHOLD, DEFAULT_THRESHOLD, 1),
                   metavar="LO:HI:STEPS")
    p.add_argument("--e-cut", type=_positive, default=None,
                   help=f"fixed energy cut (default: cover {MIN_PARTICLES} particles at each tau)")
    p.add_argument("--min-particles", type=int, default=MIN_PARTICLES)
    p.add_argument("--weight", type=float, default=1.0, help="penalty per spurious prediction")
    p.add_argument("--workers", type=int, default=None)
    _ref_args(p, "default: all experiments")
    p.add_argument("--stability", default=None, metavar="TARGET",
                   help="'paper' or comma-separated magic numbers; report the matching region")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("datasets", help="list or show reference datasets")
    p.add_argument("id", nargs="?", default=None)
    p.add_argument("--dataset-file", action="append", default=[], metavar="PATH")
    p.add_argument("--format", choices=FORMATS, default="markdown")
    return parser


def _datasets(args):
    extra = [load_dataset(p) for p in args.dataset_file]
    return registry(extra)


def _references(args):
    all_ds = _datasets(args)
    if args.refs is None:
        return experiments(all_ds)
    return [get_dataset(i.strip(), all_ds) for i in args.refs.split(",") if i.strip()]


def _paper_magic():
    return q_shell_table().magic.values


def cmd_spectrum(args, out):
    if args.model == Model.NILSSON.value and args.mu_prime is None:
        raise _Usage("--mu-prime is required for the nilsson model")
    levels = enumerate_levels(args.model, args.e_cut, tau=args.tau, mu_prime=args.mu_prime)
    levels.sort(key=lambda lv: (lv.energy, lv.n, lv.l))
    if args.format == "json":
        out.write(json.dumps([{"n": lv.n, "l": lv.l, "energy": lv.energy, "degeneracy": lv.degeneracy}
                              for lv in levels], indent=2) + "\n")
    elif args.format == "csv":
        out.write("n,l,energy,degeneracy\n")
        for lv in levels:
            out.write(f"{lv.n},{lv.l},{fmt3(lv.energy)},{lv.degeneracy}\n")
    else:
        out.write("| n | l | E(n,l) | 2(2l+1) |\n|---:|---:|---:|---:|\n")
        for lv in levels:
            out.write(f"| {lv.n} | {lv.l} | {fmt3(lv.energy)} | {lv.degeneracy} |\n")
    return 0


def cmd_table(args, out):
    out.write(render_table(q_shell_table(args.tau, args.threshold, args.e_cut), args.format))
    return 0


def cmd_magic(args, out):
    magic = q_shell_table(args.tau, args.threshold, args.e_cut).magic.values
    if args.format == "json":
        out.write(json.dumps(list(magic)) + "\n")
    elif args.format == "csv":
        out.write("magic\n" + "".join(f"{m}\n" for m in magic))
    else:
        out.write(" ".join(map(str, magic)) + "\n")
    return 0


def cmd_compare(args, out):
    refs = _references(args)
    magic = q_shell_table(args.tau, args.threshold, args.e_cut).magic
    report = compare(magic, refs, mode=args.mode, slack=args.slack, row_window=args.row_window)
    out.write(render_report(report, args.format))
    return 0 if not report.spurious else EXIT_SPURIOUS


def cmd_scan(args, out):
    refs = _references(args)
    grid = ScanGrid(args.tau, args.threshold, e_cut=args.e_cut, min_particles=args.min_particles,
                    mode=args.mode, spurious_weight=args.weight)
    result = run_scan(grid, refs, workers=args.workers)
    region = None
    if args.stability:
        if args.stability == "paper":
            target = _paper_magic()
        else:
            try:
                target = tuple(int(x) for x in args.stability.split(","))
            except ValueError:
                raise _Usage(f"bad --stability target {args.stability!r}") from None
        region = stability_report(result, target, anchor=(PAPER_TAU, DEFAULT_THRESHOLD))

    if args.format == "json":
        payload = json.loads(result_to_json(result))
        if region is not None:
            payload["stability"] = stability_to_dict(region)
        out.write(json.dumps(payload, indent=2) + "\n")
        return 0
    out.write(result_to_csv(result))
    if region is not None:
        out.write("\n")
        out.write("region_tau,region_threshold\n")
        for t, h in region.region:
            out.write(f"{t!r},{h!r}\n")
        out.write("\n")
        out.write("boundary_tau,boundary_threshold,added,removed\n")
        for b in region.boundary:
            out.write(f"{b.tau!r},{b.threshold!r},{' '.join(map(str, b.added))},{' '.join(map(str, b.removed))}\n")
    return 0


def cmd_datasets(args, out):
    all_ds = _datasets(args)
    shown = [get_dataset(args.id, all_ds)] if args.id else all_ds
    if args.format == "json":
        out.write(json.dumps([ds.to_dict() for ds in shown], indent=2, ensure_ascii=False) + "\n")
    elif args.format == "csv":
        out.write("id,kind,n,sigma,weak\n")
        for ds in shown:
            for e in ds.entries:
                out.write(f"{ds.id},{ds.kind},{e.value},{'' if e.sigma is None else e.sigma},{int(e.weak)}\n")
    else:
        for ds in shown:
            vals = [(f"{e.value}±{e.sigma}" if e.sigma else str(e.value)) for e in ds.entries]
            vals = [f"({v})" if e.weak else v for v, e in zip(vals, ds.entries)]
            out.write(f"{ds.id} [{ds.kind}] {ds.source}\n  {' '.join(vals)}\n")
    return 0


class _Usage(Exception):
    pass


COMMANDS = {
    "spectrum": cmd_spectrum,
    "table": cmd_table,
    "magic": cmd_magic,
    "compare": cmd_compare,
    "scan": cmd_scan,
    "datasets": cmd_datasets,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    log.debug("qshell %s", __version__)
    try:
        return COMMANDS[args.command](args, out)
    except DatasetNotFound as exc:
        print(f"qshell: {exc.args[0]}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except _Usage as exc:
        parser.error(str(exc))
    except (SpectrumError, ScanError) as exc:
        print(f"qshell: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        parser.error(str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
