"""Scenario geometry, pathloss, and stochastic channel generation.

Default values reproduce the simulated downlink: a BS at (0, 0, 10) m with
N_B antennas, a RIS at (100, 0, 10) m with N_R reflecting elements, and
K + 1 single-antenna users drawn uniformly in a circle of radius 5 m at
height 1.5 m.  K "strong" users have a usable direct BS link; one "weak"
user is reachable essentially only via the RIS (its direct link carries an
extra 60 dB of pathloss).

All fading channels are divided by the noise standard deviation at
generation, so the per-user transmit power enters downstream SINR and SE
expressions directly (unit noise).  The BS-RIS link is a deterministic
rank-one LOS channel G = sqrt(L_G * N_B) * a b^H whose pathloss L_G stays
physical (it multiplies the already-normalized RIS-user channels).

Matrix rows follow the broadcast-channel convention: row k of a channel
matrix stores the Hermitian-transposed user channel h_k^H.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .linalg import check_finite

# Dedicated substream tag for frozen user positions; replication substreams
# use the replication index, which stays far below this value.
POSITION_STREAM = 0x706F73


def db_to_lin(x_db) -> float:
    """Convert dB to linear scale (also maps -inf dB to exactly 0)."""
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def pathloss_db(model, distance_m) -> float:
    """Logarithmic pathloss alpha + beta * log10(d / m) in dB.

    Args:
        model: (alpha, beta) with beta the printed 10*log10 coefficient,
            e.g. (30, 22) for the LOS BS-RIS link.
        distance_m: distance in meters, > 0.
    """
    alpha, beta = model
    d = np.asarray(distance_m, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    return alpha + beta * np.log10(d)


def steering_vector(n: int, angle: float, norm: str = "unit") -> np.ndarray:
    """Half-wavelength ULA steering vector with entries exp(j*pi*m*cos(angle)).

    Args:
        n: number of elements, >= 1.
        angle: AoA/AoD in radians.
        norm: "unit" scales to ||v|| = 1, "sqrt_n" keeps ||v||^2 = n.

    Returns:
        [n] complex vector.
    """
    if n < 1:
        raise ValueError("need at least one element")
    v = np.exp(1j * np.pi * np.arange(n) * np.cos(angle))
    if norm == "unit":
        return v / np.sqrt(n)
    if norm == "sqrt_n":
        return v
    raise ValueError(f"unknown norm {norm!r}")


# =========================================================================
# Scenario configuration
# =========================================================================


@dataclass
class ScenarioConfig:
    """Static scenario parameters (defaults: the simulated downlink above)."""

    n_bs: int = 12
    n_ris: int = 64
    n_strong: int = 3
    bs_pos: tuple = (0.0, 0.0, 10.0)
    ris_pos: tuple = (100.0, 0.0, 10.0)
    user_circle_center: tuple = (95.0, 10.0, 1.5)
    user_circle_radius: float = 5.0
    ptx_dbm: float = 30.0
    noise_dbm: float = -110.0
    weak_extra_loss_db: float = 60.0
    # Extra pathloss applied to every direct BS-user link (0 in the base
    # scenario; 20 dB in the RIS-element sweep that exhibits saturation).
    direct_extra_loss_db: float = 0.0
    pl_direct: tuple = (35.1, 36.7)
    pl_ris_user: tuple = (37.51, 22.0)
    pl_los: tuple = (30.0, 22.0)
    aoa: float = np.pi / 2
    aod: float = np.pi / 2
    # Total power is split uniformly over "k+1" users (the weak user gets a
    # share) or over "k" strong users only.
    power_divisor: str = "k+1"
    freeze_positions: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.n_bs < self.n_strong + 1:
            raise ValueError(
                f"n_bs = {self.n_bs} must be at least n_strong + 1 = "
                f"{self.n_strong + 1} for zero-forcing feasibility"
            )
        if self.n_ris < 1:
            raise ValueError("n_ris must be at least 1")
        if self.user_circle_radius <= 0:
            raise ValueError("user_circle_radius must be positive")
        if self.power_divisor not in ("k+1", "k"):
            raise ValueError(f"unknown power_divisor {self.power_divisor!r}")

    @property
    def n_users(self) -> int:
        return self.n_strong + 1

    def p_bar(self) -> float:
        """Per-user transmit power in mW (noise-normalized SE convention)."""
        div = self.n_users if self.power_divisor == "k+1" else self.n_strong
        return db_to_lin(self.ptx_dbm) / div

    def with_updates(self, **kwargs) -> "ScenarioConfig":
        return replace(self, **kwargs)


@dataclass
class PathlossSet:
    """Linear channel gains for one set of user positions.

    L_d and L_r are noise-normalized (divided by sigma^2); L_G is the
    physical BS-RIS gain.  Index K (last) is the weak user; its L_d entry
    already contains the weak-user extra loss.
    """

    L_d: np.ndarray  # [K+1]
    L_r: np.ndarray  # [K+1]
    L_G: float


@dataclass
class ChannelRealization:
    """One fading draw of all channels (rows are h^H, noise-normalized)."""

    H_d_strong: np.ndarray  # [K, N_B] strong users' direct channels
    h_d_weak: np.ndarray  # [N_B] weak user's attenuated direct channel
    H_r: np.ndarray  # [K+1, N_R] RIS-user channels
    a: np.ndarray  # [N_R] RIS-side steering, ||a||^2 = N_R
    b: np.ndarray  # [N_B] BS-side steering, ||b|| = 1
    L_G: float  # physical linear BS-RIS pathloss
    H_c: np.ndarray  # [K+1, N_R] cascaded channels sqrt(L_G N_B) h_r^H diag(a)
    pathlosses: PathlossSet = None
    positions: np.ndarray = None  # [K+1, 3] user positions in meters


@dataclass
class CovarianceSet:
    """Per-user channel covariances (i.i.d. Rayleigh: scaled identities)."""

    R_d: list = field(default_factory=list)  # K strong direct covariances
    R_r: list = field(default_factory=list)  # K+1 RIS-user covariances
    R_c: list = field(default_factory=list)  # K+1 cascaded covariances


# =========================================================================
# Sampling
# =========================================================================


def rep_rng(seed: int, rep: int) -> np.random.Generator:
    """Counter-based substream for replication `rep` of a seeded run."""
    return np.random.default_rng([seed, rep])


def position_rng(seed: int) -> np.random.Generator:
    """Dedicated substream for frozen user positions."""
    return np.random.default_rng([seed, POSITION_STREAM])


def draw_user_positions(cfg: ScenarioConfig, rng: np.random.Generator) -> np.ndarray:
    """Uniform positions in the user circle, [K+1, 3] in meters."""
    n = cfg.n_users
    r = cfg.user_circle_radius * np.sqrt(rng.uniform(size=n))
    phi = rng.uniform(0.0, 2.0 * np.pi, size=n)
    pos = np.tile(np.asarray(cfg.user_circle_center, dtype=float), (n, 1))
    pos[:, 0] += r * np.cos(phi)
    pos[:, 1] += r * np.sin(phi)
    return pos


def nominal_pathlosses(cfg: ScenarioConfig, positions: np.ndarray) -> PathlossSet:
    """Linear gains for given user positions (L_d/L_r noise-normalized)."""
    bs = np.asarray(cfg.bs_pos, dtype=float)
    ris = np.asarray(cfg.ris_pos, dtype=float)
    d_bs = np.linalg.norm(positions - bs, axis=1)
    d_ris = np.linalg.norm(positions - ris, axis=1)
    sigma2 = db_to_lin(cfg.noise_dbm)

    L_d_db = pathloss_db(cfg.pl_direct, d_bs) + cfg.direct_extra_loss_db
    L_d_db = L_d_db + np.append(np.zeros(cfg.n_strong), cfg.weak_extra_loss_db)
    L_d = db_to_lin(-L_d_db) / sigma2
    L_r = db_to_lin(-pathloss_db(cfg.pl_ris_user, d_ris)) / sigma2
    L_G = float(db_to_lin(-pathloss_db(cfg.pl_los, np.linalg.norm(ris - bs))))
    return PathlossSet(L_d=L_d, L_r=L_r, L_G=L_G)


def _cn_matrix(rng, rows, cols, row_var):
    """[rows, cols] i.i.d. CN(0, row_var[k]) entries, one variance per row."""
    z = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    return np.sqrt(np.asarray(row_var)[:, None] / 2.0) * z


def sample_realization(
    cfg: ScenarioConfig,
    rng: np.random.Generator,
    positions: np.ndarray = None,
) -> ChannelRealization:
    """Draw one i.i.d. Rayleigh realization of all channels.

    User positions are redrawn from `rng` unless `positions` is supplied
    (frozen-position runs pass the same array for every draw).
    """
    if positions is None:
        positions = draw_user_positions(cfg, rng)
    pl = nominal_pathlosses(cfg, positions)

    H_d_all = _cn_matrix(rng, cfg.n_users, cfg.n_bs, pl.L_d)
    H_r = _cn_matrix(rng, cfg.n_users, cfg.n_ris, pl.L_r)
    a = steering_vector(cfg.n_ris, cfg.aoa, norm="sqrt_n")
    b = steering_vector(cfg.n_bs, cfg.aod, norm="unit")
    H_c = np.sqrt(pl.L_G * cfg.n_bs) * H_r * a[None, :]
    return ChannelRealization(
        H_d_strong=H_d_all[: cfg.n_strong],
        h_d_weak=H_d_all[cfg.n_strong],
        H_r=H_r,
        a=a,
        b=b,
        L_G=pl.L_G,
        H_c=H_c,
        pathlosses=pl,
        positions=positions,
    )


def build_covariances(cfg: ScenarioConfig, a: np.ndarray, pl: PathlossSet) -> CovarianceSet:
    """Covariances of direct, RIS-user, and cascaded channels.

    Under i.i.d. Rayleigh fading R_d,k and R_r,k are scaled identities and
    the cascaded covariance is R_c,k = diag(a*) R_r,k diag(a) * L_G * N_B,
    which collapses to L_r,k * L_G * N_B * I because |a_n| = 1.
    """
    a = check_finite(a, "a").ravel()
    Da = np.diag(a)
    R_d = [pl.L_d[k] * np.eye(cfg.n_bs) for k in range(cfg.n_strong)]
    R_r = [pl.L_r[k] * np.eye(cfg.n_ris) for k in range(cfg.n_users)]
    R_c = [Da.conj().T @ R @ Da * pl.L_G * cfg.n_bs for R in R_r]
    return CovarianceSet(R_d=R_d, R_r=R_r, R_c=R_c)
