"""Command line front end: ``qtlr inpaint | denoise | qtsvd | bench``.

Exit codes: 0 on success, 2 on bad configuration or input, 3 when an inner
SVD fails numerically.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
import time

import numpy as np

from . import io as qio
from .errors import NumericalFailure, QTLRError
from .metrics import psnr_per_frame, ssim_per_frame, SSIM_WINDOW
from .qtproduct import transformed_singular_values
from .quaternion import QTensor
from .solvers import (
    AdmmSchedule,
    CompletionProblem,
    RpcaProblem,
    auto_lambda,
    lrqtc,
    trpca_nc,
)
from .surrogates import ProxConfig, Surrogate, default_gamma
from .synthetic import dense_perturbation, tucker_tensor, low_qt_rank_tensor, sparse_corruption
from .transforms import TransformSet

log = logging.getLogger("qtlr")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on its own; route it through ConfigError instead
    def error(self, message):
        raise ConfigError(message)


def _floats(text: str) -> tuple:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _ints(text: str) -> tuple:
    return tuple(int(v) for v in text.split(",") if v.strip())


def _sizes(text: str) -> tuple:
    return tuple(tuple(int(d) for d in s.lower().split("x")) for s in text.split(",") if s.strip())


def _add_common(p):
    p.add_argument("--config", help="file of 'key = value' lines; flags given explicitly win")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: $QTLR_THREADS or 1)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--verbose", "-v", action="store_true")


def _add_surrogate(p):
    p.add_argument("--surrogate", default="geman", choices=["geman", "laplace", "log", "wnn", "sp", "wsp"])
    p.add_argument("--gamma", type=float, default=None, help="default 3*max(H, W)")
    p.add_argument("--p", type=float, default=0.5, help="exponent for sp / wsp")
    p.add_argument("--weights", type=_floats, default=None, help="comma list for wnn / wsp")
    p.add_argument("--dc-iters", type=int, default=10)


def _add_schedule(p, max_iter):
    p.add_argument("--beta0", type=float, default=1e-2)
    p.add_argument("--rho", type=float, default=1.1)
    p.add_argument("--beta-max", type=float, default=1e4)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=max_iter)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qtlr", description="Low-rank quaternion tensor recovery.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    ap.commands = sub.choices

    p = sub.add_parser("inpaint", help="fill missing pixels by low-rank completion")
    _add_common(p)
    p.add_argument("--input", required=True, help="PNG frame directory or .qten file")
    p.add_argument("--missing", type=float, default=0.5,
                   help="fraction of pixels removed per frame (the 'sample rate' of the literature)")
    _add_surrogate(p)
    p.add_argument("--rank", choices=["tucker", "tt"], default="tucker")
    p.add_argument("--alpha", type=_floats, default=None, help="comma list of mode weights summing to 1")
    p.add_argument("--paper-literal-p-update", action="store_true",
                   help="unweighted numerator in the P-update (printed variant)")
    _add_schedule(p, 25)
    p.add_argument("--out", default=None, help="output frame directory or .qten file")
    p.add_argument("--report", default=None, help="per-frame metric CSV")
    p.add_argument("--iterations", default=None, help="per-iteration diagnostics CSV")
    p.add_argument("--summary", default=None, help="JSON run summary")

    p = sub.add_parser("denoise", help="split into low-rank and sparse parts")
    _add_common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--noise", choices=["gaussian", "salt"], default="salt")
    p.add_argument("--level", type=float, default=0.1)
    p.add_argument("--lambda", dest="lam", default="auto", help="float or 'auto' = 1/sqrt(max(H,W)*T)")
    p.add_argument("--transform", choices=["identity", "dct", "rand"], default="dct")
    _add_surrogate(p)
    _add_schedule(p, 100)
    p.add_argument("--out", default=None)
    p.add_argument("--report", default=None)
    p.add_argument("--iterations", default=None)
    p.add_argument("--summary", default=None)

    p = sub.add_parser("qtsvd", help="singular values of every transformed frontal slice")
    _add_common(p)
    p.add_argument("--input", required=True, help=".qten file or PNG frame directory")
    p.add_argument("--transform", choices=["identity", "dct", "rand"], default="dct")
    p.add_argument("--dump-singular-values", required=True, metavar="CSV")

    p = sub.add_parser("bench", help="run solvers on seeded synthetic problems")
    _add_common(p)
    p.add_argument("--suite", choices=["synthetic"], default="synthetic")
    p.add_argument("--sizes", type=_sizes, default=((20, 20, 20),), help="comma list like 20x20x20,16x16x8")
    p.add_argument("--seeds", type=_ints, default=(7,), help="comma list of seeds")
    p.add_argument("--missing", type=float, default=0.5)
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--timing", action="store_true",
                   help="fill the seconds column (makes the report run-dependent)")
    p.add_argument("--report", required=True)
    return ap


def _parse(argv):
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "config", None):
        conf = qio.read_config(args.config)
        sp = ap.commands[args.command]
        known = {a.dest: a for a in sp._actions}
        defaults = {}
        for k, v in conf.items():
            k = "lam" if k == "lambda" else k
            if k not in known or k in ("config", "help"):
                raise ConfigError(f"unknown config key {k!r} for {args.command}")
            a = known[k]
            if a.const is True and a.nargs == 0:
                defaults[k] = v.lower() in ("1", "true", "yes", "on")
            else:
                try:
                    defaults[k] = a.type(v) if a.type else v
                except ValueError as exc:
                    raise ConfigError(f"bad value for {k}: {exc}") from None
                if a.choices and defaults[k] not in a.choices:
                    raise ConfigError(f"{k} must be one of {list(a.choices)}")
        sp.set_defaults(**defaults)
        args = ap.parse_args(argv)
    return args


def _surrogate(args, shape) -> Surrogate:
    gamma = args.gamma if args.gamma is not None else default_gamma(shape)
    return Surrogate(args.surrogate, gamma=gamma, p=args.p, weights=args.weights)


def _schedule(args) -> AdmmSchedule:
    return AdmmSchedule(beta0=args.beta0, rho=args.rho, beta_max=args.beta_max, tol=args.tol, max_iter=args.max_iter)


def _frame_rows(truth, est, method, seconds, data_range=255.0):
    ps = psnr_per_frame(truth, est)
    if min(truth.shape[:2]) >= SSIM_WINDOW:
        ss = ssim_per_frame(truth, est, data_range)
    else:
        log.warning("frames smaller than the SSIM window; ssim column left empty")
        ss = [None] * len(ps)
    return [
        {"frame": t, "psnr_db": float(p), "ssim": None if s is None else float(s), "method": method, "seconds": seconds}
        for t, (p, s) in enumerate(zip(ps, ss))
    ]


def _config_dict(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("verbose",)}


def cmd_inpaint(args) -> int:
    X = qio.load_tensor(args.input)
    mask = qio.make_mask(X.shape, args.missing, seed=args.seed)
    O = QTensor._wrap(np.where(mask, X.data, 0.0))
    prob = CompletionProblem(O, mask, _surrogate(args, X.shape), alpha=args.alpha, rank=args.rank,
                             prox=ProxConfig(max_iter=args.dc_iters))
    t0 = time.perf_counter()
    P, rep = lrqtc(prob, _schedule(args), truth=X, workers=args.threads,
                   paper_literal_p_update=args.paper_literal_p_update)
    secs = time.perf_counter() - t0
    log.info("inpaint: %d iterations (%s)", rep.iterations, rep.stop_reason)
    method = f"lrqtc_{'nctr' if args.rank == 'tucker' else 'ncttr'}:{prob.surrogate.kind}"
    _emit(args, X, P, rep, method, secs)
    return EXIT_OK


def cmd_denoise(args) -> int:
    X = qio.load_tensor(args.input)
    if X.ndim < 3:
        X = QTensor._wrap(X.data[..., None])
    noisy = qio.add_noise(X, args.noise, args.level, seed=args.seed)
    lam = auto_lambda(X.shape) if str(args.lam) == "auto" else float(args.lam)
    T = TransformSet.for_tensor(args.transform, X.shape, seed=args.seed)
    prob = RpcaProblem(noisy, lam, _surrogate(args, X.shape), T, prox=ProxConfig(max_iter=args.dc_iters))
    t0 = time.perf_counter()
    Q, S, rep = trpca_nc(prob, _schedule(args), truth=X, workers=args.threads)
    secs = time.perf_counter() - t0
    log.info("denoise: %d iterations (%s)", rep.iterations, rep.stop_reason)
    _emit(args, X, Q, rep, f"trpca_nc:{prob.surrogate.kind}:{args.transform}", secs)
    return EXIT_OK


def _emit(args, truth, est, rep, method, secs):
    if args.out:
        qio.save_tensor(est, args.out)
    if args.report:
        qio.write_report(_frame_rows(truth, est, method, secs), args.report)
    if args.iterations:
        qio.write_iterations(rep, args.iterations)
    if args.summary:
        qio.write_summary(_config_dict(args), rep, args.summary)


def cmd_qtsvd(args) -> int:
    X = qio.load_tensor(args.input)
    if X.ndim < 3:
        X = QTensor._wrap(X.data[..., None])
    T = TransformSet.for_tensor(args.transform, X.shape, seed=args.seed)
    sv = transformed_singular_values(X, T, workers=args.threads)
    flat = sv.reshape(sv.shape[0], -1, order="F")
    with open(args.dump_singular_values, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(("slice", "index", "singular_value"))
        for s in range(flat.shape[1]):
            for i in range(flat.shape[0]):
                w.writerow((s, i, repr(float(flat[i, s]))))
    return EXIT_OK


def bench_rows(size, seed, missing=0.5, rank=2, threads=None, timing=False) -> list:
    """Completion (geman vs unit-weight nuclear) and RPCA rows for one synthetic instance."""
    rows = []
    tag = f"{'x'.join(map(str, size))}:seed={seed}"

    X = dense_perturbation(tucker_tensor(size, (rank,) * len(size), seed=seed), 0.1, seed=seed + 1)
    mask = qio.make_mask(size, missing, seed=seed + 2)
    O = QTensor._wrap(np.where(mask, X.data, 0.0))
    peak = float(X.modulus().max())
    for kind in ("geman", "wnn"):
        s = Surrogate(kind, gamma=default_gamma(size))
        t0 = time.perf_counter()
        P, _ = lrqtc(CompletionProblem(O, mask, s), AdmmSchedule(), workers=threads)
        secs = time.perf_counter() - t0 if timing else None
        rows += _frame_rows(X, P, f"lrqtc_nctr:{kind}:{tag}", secs, peak)

    if len(size) >= 3:
        T = TransformSet.for_tensor("dct", size)
        L = low_qt_rank_tensor(size, min(3, min(size[:2])), T, seed=seed, scale=8.0)
        E, _ = sparse_corruption(size, 0.05, 80.0, seed=seed + 3)
        peak = float(L.modulus().max())
        for kind in ("geman", "wnn"):
            s = Surrogate(kind, gamma=default_gamma(size))
            t0 = time.perf_counter()
            Q, _, _ = trpca_nc(RpcaProblem(L + E, auto_lambda(size), s, T), AdmmSchedule(), workers=threads)
            secs = time.perf_counter() - t0 if timing else None
            rows += _frame_rows(L, Q, f"trpca_nc:{kind}:dct:{tag}", secs, peak)
    return rows


def cmd_bench(args) -> int:
    rows = []
    for size in args.sizes:
        if len(size) < 2:
            raise ConfigError(f"size {size} needs at least two modes")
        for seed in args.seeds:
            rows += bench_rows(size, seed, args.missing, args.rank, args.threads, args.timing)
    qio.write_report(rows, args.report)
    return EXIT_OK


COMMANDS = {"inpaint": cmd_inpaint, "denoise": cmd_denoise, "qtsvd": cmd_qtsvd, "bench": cmd_bench}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = _parse(argv)
    except ConfigError as exc:
        print(f"qtlr: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QTLRError as exc:
        print(f"qtlr: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except NumericalFailure as exc:
        print(f"qtlr: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, QTLRError, OSError, ValueError) as exc:
        print(f"qtlr: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
