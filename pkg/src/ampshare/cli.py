"""Command-line entry point: ``ampshare {rate,mode-map,sweep,kcell}``.

Exit codes: 0 success, 2 invalid configuration or input, 3 infeasible
geometry.
"""

import argparse
import logging
import sys

from .channel import ChannelGains, InvalidInputError, PowerBudget
from .experiments import (
    SCHEMES,
    ConfigError,
    ExperimentSpec,
    format_rate_row,
    load_config,
    render_csv,
    run_kcell,
    run_mode_map,
    run_rate,
    run_sweep,
)
from .geometry import Direction, InfeasibleGeometryError, read_layout, two_user_channel

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GEOMETRY = 3

log = logging.getLogger("ampshare")


def _floats(text, n, name):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise ConfigError(f"--{name}: expected {n} comma-separated numbers") from None
    if len(vals) != n:
        raise ConfigError(f"--{name}: expected {n} values, got {len(vals)}")
    return vals


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output CSV path (default: stdout)")
    common.add_argument("--direction", choices=[d.value for d in Direction])
    common.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override any configuration key")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="ampshare", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="kind", required=True)

    rate = sub.add_parser("rate", parents=[common], help="sum-rate of one two-user channel")
    src = rate.add_mutually_exclusive_group(required=True)
    src.add_argument("--snr", help="snr1,snr2 (linear); requires --inr")
    src.add_argument("--gains", help="g11,g12,g21,g22 (linear power gains)")
    src.add_argument("--layout", help="layout file with one SAP/SUE pair")
    rate.add_argument("--inr", help="inr1,inr2 (linear)")
    rate.add_argument("--powers", default="1,1", help="p1,p2 in mW, with --gains")
    rate.add_argument("--n0", type=float, default=1.0, help="noise power in mW, with --gains")
    rate.add_argument("--scheme", choices=SCHEMES, default="hk")

    mm = sub.add_parser("mode-map", parents=[common], help="interference mode vs MUE position")
    mm.add_argument("--resolution", type=int)

    sw = sub.add_parser("sweep", parents=[common], help="sum-rates as the SAP moves outward")
    sw.add_argument("--steps", type=int)

    kc = sub.add_parser("kcell", parents=[common], help="throughput vs number of small cells")
    kc.add_argument("--kmax", type=int)
    kc.add_argument("--trials", type=int)
    return parser


def _overrides(args):
    out = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    for flag in ("resolution", "steps", "kmax", "trials"):
        value = getattr(args, flag, None)
        if value is not None:
            out[flag] = value
    if args.direction is not None:
        key = {"mode-map": "mode_map_direction", "sweep": "sweep_direction",
               "kcell": "kcell_direction"}.get(args.kind)
        if key:
            out[key] = args.direction
    return out


def _rate_channel(args, cfg):
    if args.snr is not None:
        if args.inr is None:
            raise ConfigError("--snr requires --inr")
        snr1, snr2 = _floats(args.snr, 2, "snr")
        inr1, inr2 = _floats(args.inr, 2, "inr")
        return ChannelGains(g11=snr1, g12=inr1, g21=inr2, g22=snr2), PowerBudget(1.0, 1.0, 1.0)
    if args.gains is not None:
        p1, p2 = _floats(args.powers, 2, "powers")
        return ChannelGains(*_floats(args.gains, 4, "gains")), PowerBudget(p1, p2, args.n0)
    layout = read_layout(args.layout, args.direction or Direction.DOWNLINK)
    return two_user_channel(layout, cfg.network)


def run(args):
    spec = ExperimentSpec(kind=args.kind, overrides=_overrides(args), seed=args.seed, out=args.out)
    if args.workers < 1:
        raise ConfigError("--workers must be at least 1")
    cfg = load_config(args.config, spec.overrides)
    extra = [("experiment", spec.kind), ("seed", spec.seed)]

    if spec.kind == "rate":
        gains, budget = _rate_channel(args, cfg)
        row = run_rate(gains, budget, args.scheme, cfg.grid_n)
        extra.append(("scheme", args.scheme))
        text = render_csv(cfg, ["mode", "p1p", "p2p", "sum_rate"], [format_rate_row(row)], extra)
    elif spec.kind == "mode-map":
        rows = run_mode_map(cfg, workers=args.workers)
        text = render_csv(cfg, ["x", "y", "mode"], rows, extra)
    elif spec.kind == "sweep":
        rows = run_sweep(cfg, workers=args.workers)
        text = render_csv(cfg, ["d", "mode", "r_hk", "r_etw", "r_tin", "r_orth"], rows, extra)
    else:
        rows = run_kcell(cfg, seed=spec.seed, workers=args.workers)
        text = render_csv(cfg, ["K", "r_ass_mean", "r_orth_mean", "r_tin_mean"], rows, extra)

    if spec.out:
        with open(spec.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        run(args)
    except InfeasibleGeometryError as exc:
        log.error("%s", exc)
        return EXIT_GEOMETRY
    except (ConfigError, InvalidInputError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
