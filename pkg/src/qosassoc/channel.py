"""Two-tier topology generation, large-scale propagation, SINR and rates.

Base stations are indexed macro first, then pico. All matrices are laid out
``(n_bs, n_users)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import SPEED_OF_LIGHT, ScenarioConfig
from .exceptions import ConfigurationError, DomainError

MACRO, PICO = 0, 1
_SQRT3 = np.sqrt(3.0)


@dataclass(frozen=True)
class PropagationParams:
    """Per-tier propagation constants, indexed by tier (0 = macro, 1 = pico)."""

    wavelength: float = SPEED_OF_LIGHT / 2.0e9
    ref_distance: tuple[float, float] = (50.0, 1.0)
    exponent: tuple[float, float] = (3.0, 3.5)
    shadowing_std_db: tuple[float, float] = (8.0, 10.0)

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ConfigurationError("wavelength must be > 0")
        if min(self.ref_distance) <= 0:
            raise ConfigurationError("reference distances must be > 0")
        if min(self.shadowing_std_db) < 0:
            raise ConfigurationError("shadowing std must be >= 0")

    @classmethod
    def from_config(cls, cfg: ScenarioConfig) -> "PropagationParams":
        return cls(
            wavelength=cfg.wavelength,
            ref_distance=(cfg.ref_distance_macro, cfg.ref_distance_pico),
            exponent=(cfg.pathloss_exp_macro, cfg.pathloss_exp_pico),
            shadowing_std_db=(cfg.shadowing_std_macro_db, cfg.shadowing_std_pico_db),
        )


@dataclass(frozen=True)
class Region:
    """Union of the macrocells: flat-top hexagons or axis-aligned squares."""

    layout: str
    centers: np.ndarray
    radius: float

    def contains(self, points) -> np.ndarray:
        return self.cell_of(points) >= 0

    def cell_of(self, points) -> np.ndarray:
        """Index of the first cell containing each point, -1 if none."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        rel = pts[:, None, :] - self.centers[None, :, :]
        inside = _inside_cell(rel, self.radius, self.layout)
        idx = np.argmax(inside, axis=1)
        return np.where(inside.any(axis=1), idx, -1)


def _inside_cell(rel, radius, layout):
    ax, ay = np.abs(rel[..., 0]), np.abs(rel[..., 1])
    tol = 1e-9 * radius
    if layout == "hex":
        return (ay <= _SQRT3 / 2 * radius + tol) & (_SQRT3 * ax + ay <= _SQRT3 * radius + tol)
    return (ax <= radius + tol) & (ay <= radius + tol)


@dataclass(frozen=True)
class Topology:
    macro_sites: np.ndarray
    pico_sites: np.ndarray
    users: np.ndarray
    tx_power_macro: float
    tx_power_pico: float
    region: Region
    # macrocell index of every pico and user
    pico_cell: np.ndarray = field(repr=False)
    user_cell: np.ndarray = field(repr=False)

    @property
    def n_macro(self) -> int:
        return len(self.macro_sites)

    @property
    def n_bs(self) -> int:
        return len(self.macro_sites) + len(self.pico_sites)

    @property
    def n_users(self) -> int:
        return len(self.users)

    @property
    def bs_sites(self) -> np.ndarray:
        return np.vstack([self.macro_sites, self.pico_sites.reshape(-1, 2)])

    @property
    def bs_tier(self) -> np.ndarray:
        return np.r_[np.full(self.n_macro, MACRO), np.full(len(self.pico_sites), PICO)]

    @property
    def tx_power_dbm(self) -> np.ndarray:
        return np.where(self.bs_tier == MACRO, self.tx_power_macro, self.tx_power_pico)

    def distances(self) -> np.ndarray:
        diff = self.bs_sites[:, None, :] - self.users[None, :, :]
        return np.hypot(diff[..., 0], diff[..., 1])


@dataclass(frozen=True)
class ChannelRealization:
    gains: np.ndarray
    shadowing_db: np.ndarray
    seed: int


@dataclass(frozen=True)
class RateMatrix:
    """Long-term achievable rates ``R[n, k]`` in Kbps."""

    rates: np.ndarray
    subband_width_khz: float = 180.0

    @property
    def shape(self):
        return self.rates.shape


def grid_centers(n: int, radius: float, layout: str = "hex") -> np.ndarray:
    """First ``n`` macro sites of a regular grid centred on the origin.

    Hex sites are taken ring by ring (neighbour spacing ``sqrt(3) * radius``),
    square sites row-major on a ``ceil(sqrt(n))`` wide lattice of pitch
    ``2 * radius``.
    """
    if layout == "hex":
        axial = [(0, 0)]
        ring = 1
        dirs = [(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)]
        while len(axial) < n:
            q, r = -ring, ring  # start at direction 4 scaled by ring
            for dq, dr in dirs:
                for _ in range(ring):
                    axial.append((q, r))
                    q, r = q + dq, r + dr
            ring += 1
        qr = np.array(axial[:n], dtype=float)
        x = 1.5 * radius * qr[:, 0]
        y = _SQRT3 * radius * (qr[:, 1] + qr[:, 0] / 2)
        return np.column_stack([x, y])
    if layout == "square":
        cols = int(np.ceil(np.sqrt(n)))
        rows = int(np.ceil(n / cols))
        idx = np.arange(n)
        x = 2 * radius * (idx % cols - (cols - 1) / 2)
        y = 2 * radius * (idx // cols - (rows - 1) / 2)
        return np.column_stack([x, y])
    raise ConfigurationError(f"unknown layout {layout!r}")


def _sample_in_cell(rng, center, radius, layout, count):
    out = np.empty((0, 2))
    half_h = _SQRT3 / 2 * radius if layout == "hex" else radius
    while len(out) < count:
        need = count - len(out)
        cand = rng.uniform((-radius, -half_h), (radius, half_h), size=(2 * need + 4, 2))
        keep = cand[_inside_cell(cand, radius, layout)]
        out = np.vstack([out, keep[:need]])
    return out + center


def generate_topology(config: ScenarioConfig, seed, users_per_macrocell: int | None = None) -> Topology:
    """Macro sites on the fixed grid, picos and users i.i.d. uniform per macrocell.

    ``users_per_macrocell`` overrides the config's first density point.
    """
    if not config.cell_radius > 0:
        raise ConfigurationError("cell_radius must be > 0")
    upm = config.users_per_macrocell[0] if users_per_macrocell is None else int(users_per_macrocell)
    if upm < 1 or config.picos_per_macrocell < 0:
        raise ConfigurationError("invalid user or pico count")
    rng = np.random.default_rng(seed)
    centers = grid_centers(config.n_macro, config.cell_radius, config.layout)
    picos, users = [], []
    for c in centers:
        picos.append(_sample_in_cell(rng, c, config.cell_radius, config.layout,
                                     config.picos_per_macrocell))
        users.append(_sample_in_cell(rng, c, config.cell_radius, config.layout, upm))
    cells = np.arange(config.n_macro)
    return Topology(
        macro_sites=centers,
        pico_sites=np.vstack(picos).reshape(-1, 2),
        users=np.vstack(users),
        tx_power_macro=config.tx_power_macro_dbm,
        tx_power_pico=config.tx_power_pico_dbm,
        region=Region(config.layout, centers, config.cell_radius),
        pico_cell=np.repeat(cells, config.picos_per_macrocell),
        user_cell=np.repeat(cells, upm),
    )


def path_loss_db(d, tier: int, params: PropagationParams, clamp: bool = False):
    """``20 log10(4 pi d / lambda) + 10 n log10(d / d0)`` for the given tier.

    With ``clamp=True`` distances below the tier's reference distance are
    raised to it; otherwise any ``d <= 0`` raises :class:`DomainError`.
    """
    d = np.asarray(d, dtype=float)
    d0 = params.ref_distance[tier]
    if clamp:
        d = np.maximum(d, d0)
    elif np.any(~(d > 0)):
        raise DomainError("distance must be > 0")
    free_space = 20.0 * np.log10(4.0 * np.pi * d / params.wavelength)
    return free_space + 10.0 * params.exponent[tier] * np.log10(d / d0)


def realize_channel(topology: Topology, params: PropagationParams, seed) -> ChannelRealization:
    """Path loss plus lognormal shadowing drawn with the transmitter tier's std."""
    dist = topology.distances()
    tier = topology.bs_tier
    pl = np.empty_like(dist)
    for t in (MACRO, PICO):
        rows = tier == t
        if rows.any():
            pl[rows] = path_loss_db(dist[rows], t, params, clamp=True)
    rng = np.random.default_rng(seed)
    std = np.asarray(params.shadowing_std_db)[tier][:, None]
    shadow = rng.standard_normal(dist.shape) * std
    gains = 10.0 ** (-(pl + shadow) / 10.0)
    return ChannelRealization(gains=gains, shadowing_db=shadow, seed=seed)


def dbm_to_mw(dbm):
    return 10.0 ** (np.asarray(dbm, dtype=float) / 10.0)


def subband_power_mw(total_dbm, n_subbands: int):
    """Equal split of the BS power over its subbands."""
    return dbm_to_mw(total_dbm) / n_subbands


def noise_power_mw(density_dbm_hz: float = -174.0, width_khz: float = 180.0) -> float:
    return float(dbm_to_mw(density_dbm_hz + 10.0 * np.log10(width_khz * 1e3)))


def compute_sinr(gains, powers, noise) -> np.ndarray:
    """SINR of every BS-user link with all other BSs as full-power interferers."""
    g = gains.gains if isinstance(gains, ChannelRealization) else np.asarray(gains, dtype=float)
    p = np.asarray(powers, dtype=float).reshape(-1, 1)
    received = p * g
    interference = np.maximum(received.sum(axis=0, keepdims=True) - received, 0.0)
    return received / (interference + noise)


def compute_rate(sinr, W: float = 180.0) -> np.ndarray:
    """Shannon rate in Kbps over one subband of width ``W`` kHz."""
    return W * np.log2(1.0 + np.asarray(sinr, dtype=float))


def effective_rate(rbar, epsilon: float = 1e-6, subband_width_khz: float = 180.0) -> RateMatrix:
    """Floor rates at ``epsilon`` so that their logarithm stays finite."""
    if not epsilon > 0:
        raise DomainError("epsilon must be > 0")
    return RateMatrix(np.maximum(np.asarray(rbar, dtype=float), epsilon), subband_width_khz)


def rates_for(topology: Topology, channel: ChannelRealization, config: ScenarioConfig) -> RateMatrix:
    """Full rate pipeline for one realization: SINR, Shannon rate, floor."""
    powers = subband_power_mw(topology.tx_power_dbm, config.n_subbands)
    noise = noise_power_mw(config.noise_density_dbm_hz, config.subband_khz)
    sinr = compute_sinr(channel, powers, noise)
    return effective_rate(compute_rate(sinr, config.subband_khz), config.rate_floor_kbps,
                          config.subband_khz)
