"""Command-line interface.

Subcommands: frames, sample, verify pair, bounds, smoothing, distance,
experiment. Seeds given on the command line are overridden by the MG_SEED
environment variable when it is set.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

import numpy as np

from . import bodies, frames, gauss, harness, metrics, stein
from .core import ConstantsConfig, resolve_seed, resolve_seeds, substream

PAIR_TOLERANCE = 1e-10


def _csv(values) -> str:
    cells = []
    for v in values:
        if v is None:
            cells.append("")
        elif isinstance(v, str):
            cells.append(v)
        elif isinstance(v, (int, np.integer)):
            cells.append(str(int(v)))
        else:
            cells.append(f"{float(v):.17g}")
    return ",".join(cells)


def _build_frame(kind: str, n: int, k: int, seed: int, stream_id: int = 0) -> frames.Frame:
    if kind == "haar":
        return frames.haar_frame(n, k, substream(resolve_seed(seed), stream_id))
    if kind == "walsh":
        return frames.walsh_frame(n, k)
    if kind == "coordinate":
        return frames.coordinate_frame(n, k)
    raise ValueError(f"unknown frame kind {kind!r}")


def _body_and_geom(args) -> tuple[bodies.BodySpec, bodies.SimplexGeometry | None]:
    spec = bodies.parse_body_kind(args.body, args.n, getattr(args, "p", None))
    geom = bodies.regular_simplex(args.n) if spec.kind == "simplex" else None
    return spec, geom


def _cmd_frames(args) -> int:
    frame = _build_frame(args.kind, args.n, args.k, args.seed)
    fun = frames.frame_functionals(frame)
    print(_csv([frame.kind, frame.n, frame.k, fun.l4_sum, fun.l3_sum,
                fun.simplex_quartic, fun.simplex_cubic]))
    return 0


def _cmd_sample(args) -> int:
    spec, geom = _body_and_geom(args)
    batch = bodies.sample_body(spec, substream(resolve_seed(args.seed), 0), args.count, geom=geom)
    np.savetxt(args.out, batch.points, fmt="%.17g", delimiter=",")
    return 0


def _cmd_verify_pair(args) -> int:
    spec, geom = _body_and_geom(args)
    frame = _build_frame(args.frame, args.n, args.k, args.seed, stream_id=1)
    pair = stein.PairSpec(body=spec, frame=frame, geom=geom)
    stream = substream(resolve_seed(args.seed), 0)
    worst_lin = worst_sec = 0.0
    pts = bodies.sample_body(spec, stream, args.samples, geom=geom).points
    for x in pts:
        res = stein.conditional_checks(x, pair)
        worst_lin = max(worst_lin, res.linearity_residual)
        worst_sec = max(worst_sec, res.second_moment_residual)
    ok = worst_lin < PAIR_TOLERANCE and worst_sec < PAIR_TOLERANCE
    print(f"linearity_residual={worst_lin:.3e}")
    print(f"second_moment_residual={worst_sec:.3e}")
    print(f"{'PASS' if ok else 'FAIL'} (tolerance {PAIR_TOLERANCE:g}, {args.samples} samples)")
    return 0 if ok else 1


def _bound_row(report: stein.BoundReport) -> str:
    c = report.constants_used
    return _csv([report.source, report.d1_bound, report.dtv_bound, report.d2_bound,
                 c.C_tv_multi, c.c_smooth, c.C_tv_simplex1d])


def _cmd_bounds(args) -> int:
    constants = ConstantsConfig.from_json(args.constants) if args.constants else ConstantsConfig()
    spec, geom = _body_and_geom(args)
    frame = _build_frame(args.frame, args.n, args.k, args.seed)
    print(_bound_row(stein.theorem_bounds(frame, geom, constants)))
    if spec.kind == "simplex" and args.k == 1:
        print(_bound_row(stein.theorem_bounds(frame, geom, constants, theorem="thm3")))
    return 0


def _cmd_smoothing(args) -> int:
    f = gauss.shipped_density(args.density)
    result = gauss.convolve_l1(f, args.t)
    bound = 2.0 * np.sqrt(2.0) * args.t
    print(_csv([args.density, args.t, result.distance, bound, result.distance / bound]))
    return 0


def _cmd_distance(args) -> int:
    spec, geom = _body_and_geom(args)
    seed = resolve_seed(args.seed)
    frame = _build_frame(args.frame, args.n, args.k, seed)
    batch = bodies.sample_body(spec, substream(seed, 0), args.samples, geom=geom)
    w = frames.project(frame, batch.points)
    if args.metric == "w1":
        if args.k == 1:
            est = metrics.w1_1d(w[:, 0])
        else:
            est = metrics.w1_sliced(w, harness.SLICED_DIRECTIONS, substream(seed, 1))
    elif args.metric == "ks":
        if args.k != 1:
            raise SystemExit("ks is a one-dimensional estimator; use k=1")
        est = metrics.ks_1d(w[:, 0])
    else:
        if args.k != 1:
            raise SystemExit("tv is a one-dimensional estimator; use k=1")
        est = metrics.tv_hist_1d(w[:, 0])
    print(_csv([est.metric, est.value, est.se_or_bias_note, est.count, est.k]))
    return 0


def _cmd_experiment(args) -> int:
    config = harness.ExperimentConfig.from_json(args.config)
    config = replace(config, seeds=resolve_seeds(config.seeds))
    if args.constants:
        config = replace(config, constants=ConstantsConfig.from_json(args.constants))
    rows = harness.run_experiment(config, measure_runtime=args.timing)
    harness.emit_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="margauss",
        description="Gaussian approximation of marginals of symmetric convex bodies",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("frames", help="print frame functionals as a CSV row")
    p.add_argument("--kind", required=True, choices=["walsh", "haar", "coordinate"])
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_frames)

    p = sub.add_parser("sample", help="write body samples to a CSV file")
    p.add_argument("--body", required=True)
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--count", required=True, type=int)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--p", type=float, default=None, help="exponent for lp-ball bodies")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("verify", help="verification subcommands")
    verify_sub = p.add_subparsers(dest="verify_command", required=True)
    vp = verify_sub.add_parser("pair", help="check the exchangeable-pair conditional identities")
    vp.add_argument("--body", required=True)
    vp.add_argument("--n", required=True, type=int)
    vp.add_argument("--k", required=True, type=int)
    vp.add_argument("--frame", required=True, choices=["walsh", "haar", "coordinate"])
    vp.add_argument("--samples", type=int, default=100)
    vp.add_argument("--seed", type=int, default=0)
    vp.add_argument("--p", type=float, default=None)
    vp.set_defaults(func=_cmd_verify_pair)

    p = sub.add_parser("bounds", help="print closed-form bound rows")
    p.add_argument("--body", required=True)
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--frame", required=True, choices=["walsh", "haar", "coordinate"])
    p.add_argument("--constants", default=None, help="JSON file overriding the constants")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=float, default=None)
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("smoothing", help="L1 mollification distance versus its bound")
    p.add_argument("--density", required=True, choices=list(gauss.DENSITY_NAMES))
    p.add_argument("--t", required=True, type=float)
    p.set_defaults(func=_cmd_smoothing)

    p = sub.add_parser("distance", help="empirical distance of a projected sample to N(0,1)")
    p.add_argument("--metric", required=True, choices=["w1", "ks", "tv"])
    p.add_argument("--body", required=True)
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--frame", required=True, choices=["walsh", "haar", "coordinate"])
    p.add_argument("--samples", required=True, type=int)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--p", type=float, default=None)
    p.set_defaults(func=_cmd_distance)

    p = sub.add_parser("experiment", help="run a sweep from a config file and write CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--constants", default=None, help="JSON file overriding the constants block")
    p.add_argument("--timing", action="store_true",
                   help="record wall-clock runtime_ms (breaks byte-determinism)")
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
