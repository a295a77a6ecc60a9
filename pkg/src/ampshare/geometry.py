"""Macro-cell / small-cell geometry, link budgets and the K-cell rate rules.

Index 0 is the macro link (MBS and MUE); indices 1..K are the SAP/SUE
pairs.  Channel gains are deterministic path loss; a link uses the macro
formula when the MBS is one of its ends and the small-cell formula
otherwise, in both directions.
"""

import enum
import math
from dataclasses import dataclass, fields
from typing import NamedTuple, Tuple

import numpy as np

from .channel import (
    ChannelGains,
    InterferenceMode,
    InvalidInputError,
    LinkBudget,
    PowerBudget,
    classify_mode,
)

__all__ = [
    "InfeasibleGeometryError",
    "LinkKind",
    "Direction",
    "Position",
    "NetworkConfig",
    "NetworkLayout",
    "PairBudget",
    "Throughput",
    "dbm_to_mw",
    "path_loss_db",
    "channel_gain",
    "calibrate_noise",
    "validate_layout",
    "link_matrix",
    "pair_budget",
    "pair_mode",
    "pair_rates",
    "network_throughput",
    "two_user_channel",
    "grid_points",
    "place_saps_grid",
    "place_sue",
    "read_layout",
    "write_layout",
]

MBS = (0.0, 0.0)
MAX_SUE_ATTEMPTS = 10_000


class InfeasibleGeometryError(RuntimeError):
    """The requested placement cannot be realised inside the cell."""


class LinkKind(enum.Enum):
    MBS_TO_UE = "mbs"
    SAP_TO_UE = "sap"


class Direction(enum.Enum):
    DOWNLINK = "downlink"
    UPLINK = "uplink"


class Position(NamedTuple):
    x: float
    y: float

    def distance_to(self, other):
        return math.hypot(self.x - other[0], self.y - other[1])

    @property
    def radius(self):
        return math.hypot(self.x, self.y)


@dataclass(frozen=True)
class NetworkConfig:
    mbs_power_dbm: float = 46.0
    sap_power_dbm: float = 30.0
    ue_power_dbm: float = 23.0
    cell_radius_m: float = 500.0
    edge_snr_db: float = 5.0
    small_cell_radius_m: float = 60.0
    min_mbs_distance_m: float = 35.0
    grid_spacing_m: float = 120.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (math.isfinite(v) and v > 0):
                raise InvalidInputError(f"{f.name} must be positive, got {v!r}")


@dataclass(frozen=True)
class NetworkLayout:
    mue: Position
    saps: Tuple[Position, ...]
    sues: Tuple[Position, ...]
    direction: Direction = Direction.DOWNLINK

    def __post_init__(self):
        object.__setattr__(self, "mue", Position(*self.mue))
        object.__setattr__(self, "saps", tuple(Position(*p) for p in self.saps))
        object.__setattr__(self, "sues", tuple(Position(*p) for p in self.sues))
        object.__setattr__(self, "direction", Direction(self.direction))
        if len(self.saps) < 1:
            raise InvalidInputError("layout needs at least one SAP/SUE pair")
        if len(self.saps) != len(self.sues):
            raise InvalidInputError(
                f"{len(self.saps)} SAPs but {len(self.sues)} SUEs; they must pair up"
            )
        for p in (self.mue, *self.saps, *self.sues):
            if not (math.isfinite(p.x) and math.isfinite(p.y)):
                raise InvalidInputError(f"non-finite coordinate {p}")

    @property
    def k(self):
        return len(self.saps)


@dataclass(frozen=True)
class PairBudget:
    snr_m: float
    inr_m: float
    snr_s: float
    inr_s: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (math.isfinite(v) and v >= 0):
                raise InvalidInputError(f"{f.name} must be finite and >= 0, got {v!r}")

    def as_link_budget(self):
        """Two-user view with the macro link as user 1."""
        return LinkBudget(snr1=self.snr_m, snr2=self.snr_s, inr1=self.inr_m, inr2=self.inr_s)


class Throughput(NamedTuple):
    r_m: float
    per_sue: Tuple[float, ...]
    total: float


def dbm_to_mw(dbm):
    return 10.0 ** (dbm / 10.0)


def path_loss_db(link_kind, distance_m):
    if not (math.isfinite(distance_m) and distance_m > 0):
        raise InvalidInputError(f"distance must be positive, got {distance_m!r}")
    if LinkKind(link_kind) is LinkKind.MBS_TO_UE:
        return 15.3 + 37.6 * math.log10(distance_m)
    return 30.6 + 36.7 * math.log10(distance_m)


def channel_gain(link_kind, distance_m):
    return 10.0 ** (-path_loss_db(link_kind, distance_m) / 10.0)


def calibrate_noise(config):
    """Noise power (dBm) giving the configured SNR for an MBS link at the cell edge."""
    edge_pl = path_loss_db(LinkKind.MBS_TO_UE, config.cell_radius_m)
    return config.mbs_power_dbm - edge_pl - config.edge_snr_db


def validate_layout(layout, config):
    """Check placement constraints: annulus around the MBS, SUE inside its small cell."""
    r_min, r_max = config.min_mbs_distance_m, config.cell_radius_m
    for name, p in [("MUE", layout.mue)] + [("SAP", s) for s in layout.saps] + [
        ("SUE", s) for s in layout.sues
    ]:
        if not r_min <= p.radius <= r_max:
            raise InvalidInputError(
                f"{name} at {tuple(p)} is {p.radius:.3f} m from the MBS, "
                f"outside [{r_min}, {r_max}]"
            )
    for k, (sap, sue) in enumerate(zip(layout.saps, layout.sues), start=1):
        if sap.distance_to(sue) > config.small_cell_radius_m:
            raise InvalidInputError(
                f"SUE {k} is {sap.distance_to(sue):.3f} m from its SAP "
                f"(small-cell radius {config.small_cell_radius_m})"
            )


def link_matrix(layout, config):
    """Return ``(G, P, n0_mw)`` for the layout's transmitters and receivers.

    ``G[r, t]`` is the power gain from transmitter ``t`` to receiver ``r`` and
    ``P[t]`` the transmit power in mW.  Downlink transmitters are the base
    stations and receivers the users; uplink swaps the roles.
    """
    users = [layout.mue, *layout.sues]
    stations = [Position(*MBS), *layout.saps]
    n = len(users)
    dist = np.empty((n, n))
    for a, bs in enumerate(stations):
        for b, ue in enumerate(users):
            dist[a, b] = bs.distance_to(ue)
    # station-by-user gain, kind fixed by the station
    gain = np.empty((n, n))
    for a in range(n):
        kind = LinkKind.MBS_TO_UE if a == 0 else LinkKind.SAP_TO_UE
        for b in range(n):
            gain[a, b] = channel_gain(kind, dist[a, b])
    if layout.direction is Direction.DOWNLINK:
        G = gain.T
        powers = np.full(n, dbm_to_mw(config.sap_power_dbm))
        powers[0] = dbm_to_mw(config.mbs_power_dbm)
    else:
        G = gain
        powers = np.full(n, dbm_to_mw(config.ue_power_dbm))
    return G, powers, dbm_to_mw(calibrate_noise(config))


def _pair_budget(G, powers, n0, k):
    rx_power = G * powers[np.newaxis, :]
    others = [j for j in range(1, len(powers)) if j != k]
    den_m = rx_power[0, others].sum() + n0
    den_s = rx_power[k, others].sum() + n0
    return PairBudget(
        snr_m=rx_power[0, 0] / den_m,
        inr_m=rx_power[0, k] / den_m,
        snr_s=rx_power[k, k] / den_s,
        inr_s=rx_power[k, 0] / den_s,
    )


def pair_budget(layout, config, k):
    """SNR/INR quadruple of the macro link paired with small cell ``k`` (1-based).

    The other small cells count as noise.
    """
    if not 1 <= k <= layout.k:
        raise InvalidInputError(f"pair index {k} outside 1..{layout.k}")
    G, powers, n0 = link_matrix(layout, config)
    return _pair_budget(G, powers, n0, k)


def pair_mode(pb):
    return classify_mode(pb.as_link_budget())


def pair_rates(pb):
    """Single-layer rates ``(r_m, r_s)`` of one macro/small-cell pair.

    Weak pairs fall back to treating interference as noise.  In the strong
    regime both layers are decoded everywhere and the macro user takes the
    largest rate the MAC intersection allows.
    """
    log2 = math.log2
    sm, im, ss, is_ = pb.snr_m, pb.inr_m, pb.snr_s, pb.inr_s
    mode = pair_mode(pb)
    if mode is InterferenceMode.VERY_STRONG:
        return log2(1 + sm), log2(1 + ss)
    if mode is InterferenceMode.STRONG:
        r_m = min(log2(1 + sm), log2(1 + is_))
        r_s = min(log2(1 + sm + im), log2(1 + ss + is_)) - r_m
        r_s = min(max(r_s, 0.0), min(log2(1 + ss), log2(1 + im)))
        return r_m, r_s
    if mode is InterferenceMode.MIXED1:
        return log2(1 + sm), min(log2(1 + ss / (1 + is_)), log2(1 + im / (1 + sm)))
    if mode is InterferenceMode.MIXED2:
        return min(log2(1 + sm / (1 + im)), log2(1 + is_ / (1 + ss))), log2(1 + ss)
    return log2(1 + sm / (1 + im)), log2(1 + ss / (1 + is_))


def network_throughput(layout, config):
    """MBS rate is the smallest per-pair macro rate; SUE rates add up."""
    G, powers, n0 = link_matrix(layout, config)
    pairs = [pair_rates(_pair_budget(G, powers, n0, k)) for k in range(1, layout.k + 1)]
    r_m = min(r for r, _ in pairs)
    per_sue = tuple(r for _, r in pairs)
    return Throughput(r_m, per_sue, r_m + sum(per_sue))


def two_user_channel(layout, config):
    """Physical two-user channel (user 1 = macro link) of a single-pair layout."""
    if layout.k != 1:
        raise InvalidInputError(f"two-user channel needs exactly one pair, got {layout.k}")
    G, powers, n0 = link_matrix(layout, config)
    gains = ChannelGains(g11=G[0, 0], g12=G[0, 1], g21=G[1, 0], g22=G[1, 1])
    return gains, PowerBudget(p1=powers[0], p2=powers[1], n0=n0)


def grid_points(config):
    """Intersections of the SAP grid (anchored at the MBS) inside the annulus."""
    step = config.grid_spacing_m
    n = int(config.cell_radius_m // step) + 1
    pts = []
    for i in range(-n, n + 1):
        for j in range(-n, n + 1):
            p = Position(i * step, j * step)
            if config.min_mbs_distance_m <= p.radius <= config.cell_radius_m:
                pts.append(p)
    return pts


def place_saps_grid(config, k, rng_seed):
    """Draw ``k`` distinct grid intersections uniformly without replacement.

    ``rng_seed`` is anything :func:`numpy.random.default_rng` accepts,
    including an existing generator.
    """
    pts = grid_points(config)
    if k < 1:
        raise InvalidInputError(f"K must be at least 1, got {k}")
    if k > len(pts):
        raise InfeasibleGeometryError(f"K={k} exceeds the {len(pts)} available grid points")
    rng = np.random.default_rng(rng_seed)
    idx = rng.choice(len(pts), size=k, replace=False)
    return [pts[i] for i in idx]


def place_sue(sap, config, rng_seed):
    """Uniform point in the small-cell disk, at least 1 m from the SAP."""
    rng = np.random.default_rng(rng_seed)
    sap = Position(*sap)
    r_small = config.small_cell_radius_m
    for _ in range(MAX_SUE_ATTEMPTS):
        r = r_small * math.sqrt(rng.uniform())
        theta = rng.uniform(0.0, 2.0 * math.pi)
        p = Position(sap.x + r * math.cos(theta), sap.y + r * math.sin(theta))
        if r >= 1.0 and config.min_mbs_distance_m <= p.radius <= config.cell_radius_m:
            return p
    raise InfeasibleGeometryError(f"no valid SUE position around SAP {tuple(sap)}")


def read_layout(path, direction=Direction.DOWNLINK):
    """Parse ``node_type x y`` lines (MUE, SAP, SUE); ``#`` starts a comment."""
    mue, saps, sues = None, [], []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise InvalidInputError(f"{path}:{lineno}: expected 'node_type x y'")
            kind = parts[0].upper()
            try:
                pos = Position(float(parts[1]), float(parts[2]))
            except ValueError:
                raise InvalidInputError(f"{path}:{lineno}: bad coordinate") from None
            if kind == "MUE":
                if mue is not None:
                    raise InvalidInputError(f"{path}:{lineno}: second MUE")
                mue = pos
            elif kind == "SAP":
                saps.append(pos)
            elif kind == "SUE":
                sues.append(pos)
            else:
                raise InvalidInputError(f"{path}:{lineno}: unknown node type {parts[0]!r}")
    if mue is None:
        raise InvalidInputError(f"{path}: no MUE line")
    return NetworkLayout(mue=mue, saps=tuple(saps), sues=tuple(sues), direction=direction)


def write_layout(layout, path):
    with open(path, "w") as fh:
        fh.write(f"MUE {layout.mue.x!r} {layout.mue.y!r}\n")
        for sap, sue in zip(layout.saps, layout.sues):
            fh.write(f"SAP {sap.x!r} {sap.y!r}\n")
            fh.write(f"SUE {sue.x!r} {sue.y!r}\n")
