"""Cavity eigenmodes and the dimensionless stress-tensor components they source.

Two mode families are supported: the fundamental (0,1,1) mode, whose
time-averaged stress tensor is expressed through four trigonometric
functions f1..f4 of the transverse coordinates, and the high-index
(0,1,M) mode in the large-M limit, where only the 00/33 components
survive (plus rapidly oscillating 11/22 terms that average out).

All stress values are dimensionless, in units of n*hbar*Omega/V.
Coordinates (xi, eta, zeta) are the box coordinates rescaled to [0, pi].
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

# Below this index the dropped 1/M corrections to the (0,1,M) stress
# tensor are no longer clearly negligible.
LARGE_M_WARN_THRESHOLD = 64


@dataclass(frozen=True)
class ModeIndices:
    """Wave-vector indices (l_x, l_y, l_z) and polarization of a box mode.

    At most one index may be zero (and not all), otherwise the mode
    function vanishes identically.  If no polarization is given, a unit
    vector transverse to k is chosen automatically.
    """

    l_x: int
    l_y: int
    l_z: int
    polarization: tuple[float, float, float] | None = None

    def __post_init__(self):
        ls = (self.l_x, self.l_y, self.l_z)
        if any(l < 0 for l in ls):
            raise ValueError(f"mode indices must be non-negative, got {ls}")
        n_zero = sum(1 for l in ls if l == 0)
        if n_zero > 1:
            raise ValueError(f"at most one mode index may be zero, got {ls}")
        if self.polarization is None:
            object.__setattr__(self, "polarization", self._auto_polarization())
        e = np.asarray(self.polarization, dtype=float)
        norm = float(np.linalg.norm(e))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"polarization must be a unit vector, |e|={norm}")
        if abs(float(e @ np.asarray(ls, dtype=float))) > 1e-12 * max(ls):
            raise ValueError("polarization must be transverse to k")

    def _auto_polarization(self) -> tuple[float, float, float]:
        if self.l_x == 0:
            return (1.0, 0.0, 0.0)
        if self.l_y == 0:
            return (0.0, 1.0, 0.0)
        if self.l_z == 0:
            return (0.0, 0.0, 1.0)
        norm = math.hypot(self.l_y, self.l_x)
        return (self.l_y / norm, -self.l_x / norm, 0.0)

    @property
    def index_norm(self) -> float:
        """sqrt(l_x^2 + l_y^2 + l_z^2)."""
        return math.sqrt(self.l_x**2 + self.l_y**2 + self.l_z**2)


def mode_frequency(mode: ModeIndices, length: float, c: float) -> float:
    """Angular frequency Omega = c*|k| with k_i = l_i*pi/L."""
    if length <= 0:
        raise ValueError("cavity length must be positive")
    return c * math.pi / length * mode.index_norm


def mode_function(mode: ModeIndices, point, length: float) -> np.ndarray:
    """Mode function v(r) at a point (xi, eta, zeta) in [0, pi]^3.

    Normalized so that the integral of |v|^2 over the box is one: the
    prefactor is sqrt(8/V) with V = L^3, except that a zero index turns
    its sin^2 factor (mean 1/2) into cos^2(0) = 1 and halves the norm.
    """
    xi, eta, zeta = point
    n_zero = sum(1 for l in (mode.l_x, mode.l_y, mode.l_z) if l == 0)
    norm = math.sqrt(2.0 ** (3 - n_zero) / length**3)
    ex, ey, ez = mode.polarization
    lx, ly, lz = mode.l_x, mode.l_y, mode.l_z
    vx = ex * np.cos(lx * xi) * np.sin(ly * eta) * np.sin(lz * zeta)
    vy = ey * np.sin(lx * xi) * np.cos(ly * eta) * np.sin(lz * zeta)
    vz = ez * np.sin(lx * xi) * np.sin(ly * eta) * np.cos(lz * zeta)
    return norm * np.array([vx, vy, vz])


# -- dimensionless stress components for the (0,1,1) mode -------------------

def f1(eta, zeta):
    """t00 of the (011) mode."""
    return 2.0 - np.cos(2.0 * eta) - np.cos(2.0 * zeta)


def f2(eta, zeta):
    """t11 of the (011) mode."""
    return np.cos(2.0 * eta) + np.cos(2.0 * zeta) - 2.0 * np.cos(2.0 * eta) * np.cos(2.0 * zeta)


def f3(eta, zeta):
    """t22 of the (011) mode."""
    return 1.0 - 2.0 * np.cos(2.0 * zeta) + np.cos(2.0 * zeta) * np.cos(2.0 * eta)


def f3_tilde(eta, zeta):
    """t33 of the (011) mode: f3 with eta and zeta swapped."""
    return f3(zeta, eta)


def f4(eta, zeta):
    """t23 = t32 of the (011) mode."""
    return np.sin(2.0 * eta) * np.sin(2.0 * zeta)


class StressTensor:
    """Evaluator for the dimensionless expectation stress tensor t^{mu nu}.

    Values are relative to n*hbar*Omega/V.  Pure functions of (eta, zeta);
    there is no xi dependence inside the cavity, and the tensor vanishes
    outside.
    """

    MODE_011 = "mode011"
    MODE_01M = "mode01M"

    def __init__(self, kind: str, big_m: int | None = None):
        if kind not in (self.MODE_011, self.MODE_01M):
            raise ValueError(f"unknown stress-tensor kind {kind!r}")
        if kind == self.MODE_01M:
            if big_m is None or big_m < 2:
                raise ValueError("large-M stress tensor requires M >= 2")
            if big_m < LARGE_M_WARN_THRESHOLD:
                warnings.warn(
                    f"large-M stress form used with M={big_m}; dropped "
                    f"corrections are of order 1/M",
                    stacklevel=2,
                )
        self.kind = kind
        self.big_m = big_m

    def component(self, mu: int, nu: int, eta, zeta):
        """t^{mu nu}(eta, zeta), with mu, nu in 0..3."""
        if not (0 <= mu <= 3 and 0 <= nu <= 3):
            raise ValueError("tensor indices must be in 0..3")
        eta = np.asarray(eta, dtype=float)
        zeta = np.asarray(zeta, dtype=float)
        key = (min(mu, nu), max(mu, nu))
        if self.kind == self.MODE_011:
            table = {
                (0, 0): f1,
                (1, 1): f2,
                (2, 2): f3,
                (3, 3): f3_tilde,
                (2, 3): f4,
            }
            fn = table.get(key)
            if fn is None:
                return np.zeros(np.broadcast(eta, zeta).shape)
            return fn(eta, zeta)
        m = self.big_m
        base = 4.0 * np.sin(eta) ** 2
        if key in ((0, 0), (3, 3)):
            return base + np.zeros(np.broadcast(eta, zeta).shape)
        if key == (1, 1):
            return base * np.cos(2.0 * m * zeta)
        if key == (2, 2):
            return -base * np.cos(2.0 * m * zeta)
        return np.zeros(np.broadcast(eta, zeta).shape)

    def trace(self, eta, zeta):
        """-t00 + t11 + t22 + t33; identically zero for the e.m. field."""
        return (
            -self.component(0, 0, eta, zeta)
            + self.component(1, 1, eta, zeta)
            + self.component(2, 2, eta, zeta)
            + self.component(3, 3, eta, zeta)
        )

    def divergence(self, eta, zeta) -> np.ndarray:
        """Spatial divergence d_j t^{ij} from the analytic partials.

        Valid in the open interior (0, pi)^2; nothing depends on xi.
        """
        eta = np.asarray(eta, dtype=float)
        zeta = np.asarray(zeta, dtype=float)
        zero = np.zeros(np.broadcast(eta, zeta).shape)
        if self.kind == self.MODE_011:
            # row 1: t11 is xi-independent and t12 = t13 = 0
            d_eta_f3 = -2.0 * np.sin(2.0 * eta) * np.cos(2.0 * zeta)
            d_zeta_f4 = 2.0 * np.sin(2.0 * eta) * np.cos(2.0 * zeta)
            d_eta_f4 = 2.0 * np.cos(2.0 * eta) * np.sin(2.0 * zeta)
            d_zeta_f3t = -2.0 * np.cos(2.0 * eta) * np.sin(2.0 * zeta)
            return np.array([zero, d_eta_f3 + d_zeta_f4, d_eta_f4 + d_zeta_f3t])
        m = self.big_m
        # the oscillatory t22 term carries the only surviving partial;
        # its non-vanishing divergence reflects the dropped 1/M corrections
        d_eta_t22 = -4.0 * np.sin(2.0 * eta) * np.cos(2.0 * m * zeta)
        return np.array([zero, d_eta_t22, zero])


def stress_components_011() -> StressTensor:
    """Stress tensor of the (0,1,1) mode."""
    return StressTensor(StressTensor.MODE_011)


def stress_components_01M(big_m: int) -> StressTensor:
    """Large-M stress tensor of the (0,1,M) mode; rejects M < 2."""
    return StressTensor(StressTensor.MODE_01M, big_m=big_m)
