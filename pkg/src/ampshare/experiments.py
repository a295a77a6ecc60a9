"""Experiment harness: single-channel rate probes, mode maps, SAP sweeps and
K-small-cell throughput runs, all emitted as deterministic CSV.

Every CSV starts with a ``#`` block listing the resolved configuration,
followed by a plain header row and the data rows.  Parallel runs compute
each point from its own inputs (and per-trial seeds), so output does not
depend on the worker count.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from ._backend import classify_many
from .channel import InterferenceMode, InvalidInputError, split_sum_rate
from .geometry import (
    Direction,
    NetworkConfig,
    NetworkLayout,
    Position,
    link_matrix,
    network_throughput,
    pair_budget,
    place_saps_grid,
    place_sue,
    two_user_channel,
)
from .optimizer import (
    DEFAULT_GRID_N,
    baseline_rates,
    brute_force_split,
    etw_split,
    optimize,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ExperimentSpec",
    "SCHEMES",
    "parse_config_text",
    "load_config",
    "format_number",
    "render_csv",
    "run_rate",
    "mode_map_layout",
    "run_mode_map",
    "sweep_layout",
    "run_sweep",
    "kcell_layout",
    "kcell_baselines",
    "run_kcell",
]

SCHEMES = ("hk", "etw", "tin", "orthogonal", "oracle")
KINDS = ("rate", "mode-map", "sweep", "kcell")


class ConfigError(ValueError):
    """Unknown key or unparsable value in a configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    network: NetworkConfig = field(default_factory=NetworkConfig)
    # SUE offset angles are measured from the SAP's outward radial direction
    sue_offset_m: float = 40.0
    sue_offset_angle_deg: float = 0.0
    sap_x_m: float = 200.0
    sap_y_m: float = 200.0
    mode_map_sue_angle_deg: float = 90.0
    mode_map_direction: str = "downlink"
    resolution: int = 101
    sweep_mue_distance_m: float = 70.0
    sweep_mue_angle_deg: float = 10.0
    sweep_sap_angle_deg: float = 0.0
    sweep_direction: str = "uplink"
    d_min_m: float = 35.0
    d_max_m: float = 500.0
    steps: int = 200
    kcell_direction: str = "downlink"
    mue_distance_fraction: float = 2.0 / 3.0
    kmax: int = 10
    trials: int = 100
    grid_n: int = DEFAULT_GRID_N

    def items(self):
        """Every effective setting as sorted ``(key, value)`` pairs."""
        out = [(f.name, getattr(self.network, f.name)) for f in fields(NetworkConfig)]
        out += [(f.name, getattr(self, f.name)) for f in fields(self) if f.name != "network"]
        return sorted(out)


_NETWORK_KEYS = {f.name for f in fields(NetworkConfig)}
_SCENARIO_FIELDS = {f.name: f for f in fields(ExperimentConfig) if f.name != "network"}
_DIRECTION_KEYS = ("mode_map_direction", "sweep_direction", "kcell_direction")
_INT_KEYS = ("resolution", "steps", "kmax", "trials", "grid_n")


@dataclass
class ExperimentSpec:
    kind: str
    overrides: dict = field(default_factory=dict)
    seed: int = 0
    out: str = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if not (isinstance(self.seed, int) and self.seed >= 0):
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}")


def _coerce(key, raw):
    if key in _DIRECTION_KEYS:
        try:
            return Direction(str(raw).strip().lower()).value
        except ValueError:
            raise ConfigError(f"{key}: expected 'downlink' or 'uplink', got {raw!r}") from None
    try:
        if key in _INT_KEYS:
            value = int(raw)
        else:
            value = float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: cannot parse {raw!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{key}: value must be finite")
    return value


def parse_config_text(text):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        out[key] = value
    return out


def load_config(path=None, overrides=None):
    """Defaults, then the config file, then ``overrides`` (CLI flags)."""
    raw = {}
    if path is not None:
        try:
            with open(path) as fh:
                raw.update(parse_config_text(fh.read()))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
    raw.update(overrides or {})
    net_kw, scen_kw = {}, {}
    for key, value in raw.items():
        if key in _NETWORK_KEYS:
            net_kw[key] = _coerce(key, value)
        elif key in _SCENARIO_FIELDS:
            scen_kw[key] = _coerce(key, value)
        else:
            raise ConfigError(f"unknown configuration key {key!r}")
    try:
        cfg = ExperimentConfig(network=NetworkConfig(**net_kw), **scen_kw)
    except InvalidInputError as exc:
        raise ConfigError(str(exc)) from None
    _validate(cfg)
    return cfg


def _validate(cfg):
    for key in ("resolution", "steps"):
        if getattr(cfg, key) < 2:
            raise ConfigError(f"{key} must be at least 2")
    for key in ("kmax", "trials"):
        if getattr(cfg, key) < 1:
            raise ConfigError(f"{key} must be at least 1")
    if cfg.grid_n < 2:
        raise ConfigError("grid_n must be at least 2")
    if not 0 < cfg.d_min_m < cfg.d_max_m:
        raise ConfigError("need 0 < d_min_m < d_max_m")
    if cfg.sue_offset_m <= 0:
        raise ConfigError("sue_offset_m must be positive")
    if not 0 < cfg.mue_distance_fraction <= 1:
        raise ConfigError("mue_distance_fraction must lie in (0, 1]")


def format_number(v):
    return format(float(v), ".6g")


def render_csv(cfg, columns, rows, extra=()):
    lines = ["# resolved-config"]
    for key, value in list(extra) + cfg.items():
        shown = format_number(value) if isinstance(value, float) else value
        lines.append(f"# {key} = {shown}")
    lines.append(",".join(columns))
    for row in rows:
        if isinstance(row, str):
            lines.append(row)
            continue
        lines.append(",".join(format_number(v) if isinstance(v, float) else str(v) for v in row))
    return "\n".join(lines) + "\n"


def _map(fn, items, workers):
    """Ordered map, optionally across processes."""
    items = list(items)
    if workers is None or workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    chunk = max(1, len(items) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunk))


# -- single-channel probe ---------------------------------------------------


def run_rate(gains, budget, scheme="hk", grid_n=DEFAULT_GRID_N):
    """Return ``(mode, p1p, p2p, sum_rate)`` for one scheme on one channel."""
    if scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {scheme!r}; choose from {', '.join(SCHEMES)}")
    if scheme == "hk":
        res = optimize(gains, budget)
        return res.mode, res.split.p1p, res.split.p2p, res.sum_rate
    if scheme == "oracle":
        res = brute_force_split(gains, budget, grid_n)
        return res.mode, res.split.p1p, res.split.p2p, res.sum_rate
    mode = optimize(gains, budget).mode
    if scheme == "etw":
        split = etw_split(gains, budget)
        return mode, split.p1p, split.p2p, split_sum_rate(gains, budget, split)
    tin, orth = baseline_rates(gains, budget)
    # both baselines send a single full-power layer per user
    return mode, budget.p1, budget.p2, tin if scheme == "tin" else orth


def format_rate_row(row):
    mode, p1p, p2p, rate = row
    return f"{mode.value},{format_number(p1p)},{format_number(p2p)},{rate:.4f}"


# -- mode maps --------------------------------------------------------------


def _sue_for(sap, cfg, angle_deg):
    base = math.atan2(sap.y, sap.x) if (sap.x or sap.y) else 0.0
    ang = base + math.radians(angle_deg)
    return Position(sap.x + cfg.sue_offset_m * math.cos(ang), sap.y + cfg.sue_offset_m * math.sin(ang))


def mode_map_layout(cfg, mue, direction=None):
    sap = Position(cfg.sap_x_m, cfg.sap_y_m)
    return NetworkLayout(
        mue=mue,
        saps=(sap,),
        sues=(_sue_for(sap, cfg, cfg.mode_map_sue_angle_deg),),
        direction=direction or cfg.mode_map_direction,
    )


def _mode_map_row(args):
    cfg, direction, y, xs = args
    net = cfg.network
    budgets, valid = [], []
    for x in xs:
        mue = Position(x, y)
        layout = mode_map_layout(cfg, mue, direction)
        ok = net.min_mbs_distance_m <= mue.radius <= net.cell_radius_m
        ok = ok and all(mue.distance_to(p) > 0 for p in (*layout.saps, *layout.sues))
        valid.append(ok)
        if ok:
            pb = pair_budget(layout, net, 1)
            budgets.append((pb.snr_m, pb.snr_s, pb.inr_m, pb.inr_s))
    codes = iter(classify_many(*np.array(budgets).T)) if budgets else iter(())
    return [
        (x, y, InterferenceMode.from_code(int(next(codes))).value if ok else "invalid")
        for x, ok in zip(xs, valid)
    ]


def run_mode_map(cfg, direction=None, resolution=None, workers=1):
    """Classify the MUE position over a square grid covering the cell.

    Points outside the annulus, or on top of the SAP/SUE, are ``invalid``.
    Rows are ``(x, y, mode)``, ``y`` outer and ``x`` inner.
    """
    direction = Direction(direction or cfg.mode_map_direction).value
    n = resolution or cfg.resolution
    if n < 2:
        raise ConfigError("resolution must be at least 2")
    r = cfg.network.cell_radius_m
    axis = [float(v) for v in np.linspace(-r, r, n)]
    rows = _map(_mode_map_row, [(cfg, direction, y, axis) for y in axis], workers)
    return [cell for row in rows for cell in row]


# -- SAP sweep --------------------------------------------------------------


def sweep_layout(cfg, d, direction=None):
    ang = math.radians(cfg.sweep_sap_angle_deg)
    sap = Position(d * math.cos(ang), d * math.sin(ang))
    mang = math.radians(cfg.sweep_mue_angle_deg)
    mue = Position(cfg.sweep_mue_distance_m * math.cos(mang), cfg.sweep_mue_distance_m * math.sin(mang))
    return NetworkLayout(
        mue=mue, saps=(sap,), sues=(_sue_for(sap, cfg, cfg.sue_offset_angle_deg),),
        direction=direction or cfg.sweep_direction,
    )


def _sweep_point(args):
    cfg, direction, d = args
    gains, budget = two_user_channel(sweep_layout(cfg, d, direction), cfg.network)
    hk = optimize(gains, budget)
    etw = split_sum_rate(gains, budget, etw_split(gains, budget))
    tin, orth = baseline_rates(gains, budget)
    return (d, hk.mode.value, hk.sum_rate, etw, tin, orth)


def run_sweep(cfg, direction=None, steps=None, workers=1):
    """Move the SAP (and its SUE) outward from ``d_min_m`` to ``d_max_m``.

    Rows are ``(d, mode, r_hk, r_etw, r_tin, r_orth)``.
    """
    direction = Direction(direction or cfg.sweep_direction).value
    n = steps or cfg.steps
    if n < 2:
        raise ConfigError("steps must be at least 2")
    ds = [float(v) for v in np.linspace(cfg.d_min_m, cfg.d_max_m, n)]
    return _map(_sweep_point, [(cfg, direction, d) for d in ds], workers)


# -- K small cells ----------------------------------------------------------


def kcell_layout(cfg, k, seed, trial, direction=None):
    """Random layout for one trial; the stream is keyed by ``(seed, k, trial)``."""
    net = cfg.network
    rng = np.random.default_rng([seed, k, trial])
    saps = place_saps_grid(net, k, rng)
    sues = [place_sue(s, net, rng) for s in saps]
    theta = rng.uniform(0.0, 2.0 * math.pi)
    r = cfg.mue_distance_fraction * net.cell_radius_m
    mue = Position(r * math.cos(theta), r * math.sin(theta))
    return NetworkLayout(mue=mue, saps=tuple(saps), sues=tuple(sues),
                         direction=direction or cfg.kcell_direction)


def kcell_baselines(layout, config):
    """Return ``(orthogonal, tin)`` network throughput of a K-cell layout.

    Orthogonal: the macro link gets one half of the time interference-free,
    all small cells share the other half and see each other as noise.
    TIN: everyone transmits at once and treats all interference as noise.
    """
    G, powers, n0 = link_matrix(layout, config)
    rx = G * powers[np.newaxis, :]
    n = len(powers)
    orth = 0.5 * math.log2(1 + rx[0, 0] / n0)
    tin = math.log2(1 + rx[0, 0] / (rx[0, 1:].sum() + n0))
    for k in range(1, n):
        small_int = rx[k, 1:].sum() - rx[k, k]
        orth += 0.5 * math.log2(1 + rx[k, k] / (small_int + n0))
        tin += math.log2(1 + rx[k, k] / (small_int + rx[k, 0] + n0))
    return orth, tin


def _kcell_trial(args):
    cfg, direction, seed, k, trial = args
    layout = kcell_layout(cfg, k, seed, trial, direction)
    ass = network_throughput(layout, cfg.network).total
    orth, tin = kcell_baselines(layout, cfg.network)
    return ass, orth, tin


def run_kcell(cfg, seed=0, direction=None, kmax=None, trials=None, workers=1):
    """Mean ASS / orthogonal / TIN throughput for K = 1..kmax.

    Rows are ``(K, r_ass_mean, r_orth_mean, r_tin_mean)``.
    """
    direction = Direction(direction or cfg.kcell_direction).value
    kmax = kmax or cfg.kmax
    trials = trials or cfg.trials
    # fail before spawning work if K cannot fit on the grid
    place_saps_grid(cfg.network, kmax, 0)
    tasks = [(cfg, direction, seed, k, t) for k in range(1, kmax + 1) for t in range(trials)]
    results = _map(_kcell_trial, tasks, workers)
    rows = []
    for k in range(1, kmax + 1):
        chunk = np.array(results[(k - 1) * trials:k * trials])
        rows.append((k, *(float(math.fsum(chunk[:, c]) / trials) for c in range(3))))
    return rows
