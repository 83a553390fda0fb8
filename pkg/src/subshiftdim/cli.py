"""Command-line interface.

Commands read a JSON system document (``-`` for stdin) and write machine
output to stdout; diagnostics go to stderr. Exit codes: 2 bad input,
3 empty language, 4 numerical non-convergence, 5 enumeration cap.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .documents import ReportDocument, SystemDocument, digest, dumps
from .errors import InputError, SubshiftDimError
from .geometry import (
    DEFAULT_BURN_IN,
    attractor_points,
    box_count_dimension,
    geometric_scales,
    render_cloud,
    write_csv,
)
from .pressure import (
    DEFAULT_ROOT_TOL,
    PressureFunction,
    boundedness_diagnostics,
    dimension_bounds,
)
from .selftest import run_selftest
from .spectral import DEFAULT_EIG_TOL, DEFAULT_MAX_ITER
from .symbolic import DEFAULT_WORD_CAP, enumerate_allowed_words

log = logging.getLogger("subshiftdim")


def _load(path: str) -> tuple[SystemDocument, bytes]:
    if path == "-":
        data = sys.stdin.buffer.read()
    else:
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from None
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        raise InputError(f"{path} is not UTF-8") from None
    return SystemDocument.from_json(text), data


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text + "\n")


def _parse_scales(spec: str):
    try:
        base, first, last = spec.split(":")
        return geometric_scales(float(base), int(first), int(last))
    except ValueError:
        raise InputError(f"--scales expects BASE:FIRST:LAST, got {spec!r}") from None


def _setting(args, doc: SystemDocument, name: str, default):
    value = getattr(args, name, None)
    if value is not None:
        return value
    return doc.settings.get(name, default)


def cmd_bounds(args) -> int:
    doc, raw = _load(args.input)
    start = time.perf_counter()
    report = dimension_bounds(doc.presentation, doc.contractions, root_tol=args.root_tol,
                              eig_tol=args.eig_tol, max_iter=args.max_iter)
    diagnostics = None
    if args.diagnostics:
        if report.irreducible:
            diagnostics = tuple(boundedness_diagnostics(doc.presentation, doc.contractions,
                                                        report.h, report.H, args.diagnostics))
        else:
            log.warning("diagnostics skipped: the presentation is reducible")
    for flag in report.flags:
        log.warning("note: %s", flag)
    result = ReportDocument(report, digest(raw), time.perf_counter() - start,
                            diagnostics=diagnostics)
    _emit(dumps(result.to_dict()), args.out)
    return 0


def cmd_words(args) -> int:
    doc, _ = _load(args.input)
    words = enumerate_allowed_words(doc.presentation, args.n, cap=args.word_cap)
    if args.count_only:
        _emit(str(len(words)), args.out)
    else:
        _emit("\n".join(doc.alphabet.format(w) for w in words), args.out)
    return 0


def cmd_pressure(args) -> int:
    doc, _ = _load(args.input)
    pf = PressureFunction(doc.presentation, doc.contractions, side=args.side, method=args.method,
                          n=args.n, eig_tol=args.eig_tol, max_iter=args.max_iter)
    _emit(f"{pf(args.t):.17g}", args.out)
    return 0


def _cloud(args, doc: SystemDocument):
    ifs = doc.ifs
    if ifs is None:
        raise InputError("this command needs an 'ifs' section in the input")
    count = int(_setting(args, doc, "points", 100_000))
    seed = int(_setting(args, doc, "seed", 0))
    burn_in = int(_setting(args, doc, "burn_in", DEFAULT_BURN_IN))
    return attractor_points(ifs, doc.presentation, count, burn_in, seed, subshift=args.input)


def cmd_estimate(args) -> int:
    doc, _ = _load(args.input)
    cloud = _cloud(args, doc)
    scales = _parse_scales(_setting(args, doc, "scales", "2:2:7"))
    fit = box_count_dimension(cloud, scales)
    report = dimension_bounds(doc.presentation, doc.contractions, root_tol=args.root_tol,
                              eig_tol=args.eig_tol)
    slack = float(_setting(args, doc, "slack", 0.05))
    if args.csv:
        write_csv(cloud, args.csv)
    out = {
        "estimate": fit.estimate,
        "r_squared": fit.r_squared,
        "table": [[float(r), int(n), bool(used)]
                  for r, n, used in zip(fit.scales, fit.counts, fit.fitted)],
        "h": report.h,
        "H": report.H,
        "slack": slack,
        "inside_bounds": report.h - slack <= fit.estimate <= report.H + slack,
        "points": cloud.count,
        "seed": cloud.seed,
        "burn_in": cloud.burn_in,
        "osc_assumed": True,
    }
    _emit(dumps(out), args.out)
    return 0


def cmd_render(args) -> int:
    doc, _ = _load(args.input)
    cloud = _cloud(args, doc)
    size = str(_setting(args, doc, "size", "512"))
    try:
        width, height = (int(v) for v in size.lower().split("x")) if "x" in size.lower() else (
            int(size), int(size))
    except ValueError:
        raise InputError(f"--size expects N or WxH, got {size!r}") from None
    path = render_cloud(cloud, width, height, args.out)
    log.info("wrote %s", path)
    return 0


def cmd_selftest(args) -> int:
    results = run_selftest()
    for name, ok, detail in results:
        sys.stdout.write(f"{'PASS' if ok else 'FAIL'} {name}: {detail}\n")
    passed = sum(ok for _, ok, _ in results)
    sys.stdout.write(f"{passed}/{len(results)} checks passed\n")
    return 0 if passed == len(results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subshiftdim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, numeric=True):
        p.add_argument("input", help="system document (JSON), '-' for stdin")
        p.add_argument("-o", "--out", help="write output here instead of stdout")
        if numeric:
            p.add_argument("--root-tol", type=float, default=DEFAULT_ROOT_TOL)
            p.add_argument("--eig-tol", type=float, default=DEFAULT_EIG_TOL)
            p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER,
                           help="power-iteration step cap")
        p.add_argument("--word-cap", type=int, default=DEFAULT_WORD_CAP)

    p = sub.add_parser("bounds", help="lower/upper dimension bounds h, H")
    common(p)
    p.add_argument("--diagnostics", type=int, metavar="N_MAX", default=0,
                   help="include word sums at h and H for n = 1..N_MAX")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("words", help="list allowed words of length n")
    common(p, numeric=False)
    p.add_argument("n", type=int)
    p.add_argument("--count-only", action="store_true")
    p.set_defaults(func=cmd_words)

    p = sub.add_parser("pressure", help="evaluate the pressure function at t")
    common(p)
    p.add_argument("t", type=float)
    p.add_argument("--side", choices=("lower", "upper"), default="lower")
    p.add_argument("--method", choices=("spectral", "truncated"), default="spectral")
    p.add_argument("--n", type=int, help="word length for --method truncated")
    p.set_defaults(func=cmd_pressure)

    for name, func, text in (("estimate", cmd_estimate, "box-counting estimate of the subfractal"),
                             ("render", cmd_render, "render the subfractal as a PGM image")):
        p = sub.add_parser(name, help=text)
        common(p)
        p.add_argument("--points", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--burn-in", dest="burn_in", type=int)
        if name == "estimate":
            p.add_argument("--scales", help="BASE:FIRST:LAST, box sizes BASE^-FIRST..BASE^-LAST")
            p.add_argument("--slack", type=float)
            p.add_argument("--csv", help="also write the points as CSV")
        else:
            p.add_argument("--size", help="N or WxH pixels (default 512)")
        p.set_defaults(func=func)
        if name == "render":
            p.set_defaults(out=None)
            for action in p._actions:
                if action.dest == "out":
                    action.required = True

    p = sub.add_parser("selftest", help="run built-in invariant checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except SubshiftDimError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.exit_code
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
