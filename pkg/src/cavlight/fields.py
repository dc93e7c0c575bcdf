"""Metric perturbation and directional light-speed deviation fields.

All point values and maps are dimensionless: for the (011) mode in
units of the amplitude P, for the (01M) mode in units of P as well,
with the mode index M already multiplied in.  The field equation in
box coordinates reduces to a Poisson equation, so every component is a
kernel convolution of one stress source; ``laplacian_residual``
verifies the solution against -4*pi times its source.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import modes
from .fieldmap import FieldMap, GridSpec
from .greens import DEFAULT_SPEC, QuadratureSpec, QuadResult, SourceFunction, convolve_point

PI = math.pi

SRC_F1 = SourceFunction(modes.f1, "f1")
SRC_F2 = SourceFunction(modes.f2, "f2")
SRC_F3 = SourceFunction(modes.f3, "f3")
SRC_F3_TILDE = SourceFunction(modes.f3_tilde, "f3_tilde")
SRC_F4 = SourceFunction(modes.f4, "f4")


def _unit(eta, zeta):
    return np.ones(np.broadcast(eta, zeta).shape)


def _four_sin2_eta(eta, zeta):
    return 4.0 * np.sin(eta) ** 2 + np.zeros(np.broadcast(eta, zeta).shape)


SRC_UNIT = SourceFunction(_unit, "unit")
SRC_LARGE_M = SourceFunction(_four_sin2_eta, "4sin2eta")

G_SOURCES = (SRC_F1, SRC_F2, SRC_F3, SRC_F3_TILDE, SRC_F4)

MIN_LARGE_M = 8

METRIC_COMPONENTS = ("h00", "h11", "h22", "h33", "h23")

# which stress source each metric component solves against
COMPONENT_SOURCES = {
    "h00": SRC_F1,
    "h11": SRC_F2,
    "h22": SRC_F3,
    "h33": SRC_F3_TILDE,
    "h23": SRC_F4,
}


@dataclass(frozen=True)
class GIntegrals:
    """The five convolution integrals of the (011) stress sources at a point."""

    g1: float
    g2: float
    g3: float
    g3_tilde: float
    g4: float
    error: float
    converged: bool

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.g1, self.g2, self.g3, self.g3_tilde, self.g4)


@dataclass(frozen=True)
class MetricPerturbation:
    """Metric components at a point, in units of P; trace-free by construction."""

    h00: float
    h11: float
    h22: float
    h33: float
    h23: float
    mode_kind: str
    error: float
    converged: bool

    @property
    def trace(self) -> float:
        return -self.h00 + self.h11 + self.h22 + self.h33


def g_integrals(point, spec: QuadratureSpec = DEFAULT_SPEC) -> GIntegrals:
    """Convolutions of f1, f2, f3, f3_tilde, f4 at one point."""
    results = [convolve_point(src, point, spec) for src in G_SOURCES]
    return GIntegrals(
        *(r.value for r in results),
        error=sum(r.error for r in results),
        converged=all(r.converged for r in results),
    )


def metric_011(point, spec: QuadratureSpec = DEFAULT_SPEC) -> MetricPerturbation:
    """Metric perturbation of the (011) mode at a point, per unit P."""
    g = g_integrals(point, spec)
    return MetricPerturbation(
        h00=0.5 * (g.g1 + g.g2 + g.g3 + g.g3_tilde),
        h11=0.5 * (g.g1 + g.g2 - g.g3 - g.g3_tilde),
        h22=0.5 * (g.g1 - g.g2 + g.g3 - g.g3_tilde),
        h33=0.5 * (g.g1 - g.g2 + g.g3_tilde - g.g3),
        h23=g.g4,
        mode_kind=modes.StressTensor.MODE_011,
        error=g.error,
        converged=g.converged,
    )


def h_tilde(point, spec: QuadratureSpec = DEFAULT_SPEC) -> QuadResult:
    """The reduced large-M profile: convolution of 4*sin^2(eta')."""
    return convolve_point(SRC_LARGE_M, point, spec)


def metric_01M(
    point, big_m: int, spec: QuadratureSpec = DEFAULT_SPEC
) -> MetricPerturbation:
    """Large-M metric perturbation at a point, per unit P (M multiplied in)."""
    if big_m < MIN_LARGE_M:
        raise ValueError(f"large-M metric requires M >= {MIN_LARGE_M}")
    r = h_tilde(point, spec)
    h = big_m * r.value
    return MetricPerturbation(
        h00=h,
        h11=0.0,
        h22=0.0,
        h33=h,
        h23=0.0,
        mode_kind=modes.StressTensor.MODE_01M,
        error=big_m * r.error,
        converged=r.converged,
    )


def delta_c_01M_gsum(point, big_m: int, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Alternative large-M deviation -M*(g1+g2+g3+g3_tilde)/4, per unit P.

    Kept alongside the canonical -h00/2 route because the two reduced
    integrands (2 - cos 2eta' - cos 2zeta' vs 4 sin^2 eta') differ; see
    README.  Not used by the field pipeline.
    """
    g = g_integrals(point, spec)
    return -big_m * (g.g1 + g.g2 + g.g3 + g.g3_tilde) / 4.0


def lightspeed_field(metric: MetricPerturbation, measured: bool = False):
    """Directional relative light-speed deviations (x, y, z) from a metric.

    Default is the coordinate speed along locally straight paths,
    -(h00 + hii)/2.  With ``measured`` the clock-eigentime value
    -h00 - hii/2 is returned instead.
    """
    if measured:
        return (
            -metric.h00 - 0.5 * metric.h11,
            -metric.h00 - 0.5 * metric.h22,
            -metric.h00 - 0.5 * metric.h33,
        )
    return (
        -0.5 * (metric.h00 + metric.h11),
        -0.5 * (metric.h00 + metric.h22),
        -0.5 * (metric.h00 + metric.h33),
    )


def _metric_chunk(args):
    pts, big_m, spec = args
    n_cols = 7  # five components + error + converged
    out = np.empty((len(pts), n_cols))
    for i, p in enumerate(pts):
        if big_m is None:
            m = metric_011(p, spec)
        else:
            m = metric_01M(p, big_m, spec)
        out[i] = (m.h00, m.h11, m.h22, m.h33, m.h23, m.error, float(m.converged))
    return out


def metric_grid(
    grid: GridSpec,
    spec: QuadratureSpec = DEFAULT_SPEC,
    big_m: int | None = None,
    threads: int = 0,
) -> FieldMap:
    """Metric components plus light-speed deviations on a grid.

    big_m = None selects the (011) mode; otherwise the large-M mode.
    Node order is fixed, so output is bit-identical for any worker count.
    """
    pts = grid.points()
    workers = os.cpu_count() or 1 if threads == 0 else threads
    if workers > 1 and len(pts) > 8:
        n_chunks = min(len(pts), workers * 4)
        chunks = np.array_split(pts, n_chunks)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_metric_chunk, [(c, big_m, spec) for c in chunks]))
        flat = np.concatenate(parts)
    else:
        flat = _metric_chunk((pts, big_m, spec))

    shape = grid.shape
    comp = {name: flat[:, i].reshape(shape) for i, name in enumerate(METRIC_COMPONENTS)}
    h00, h11, h22, h33 = comp["h00"], comp["h11"], comp["h22"], comp["h33"]
    comp["dcx"] = -0.5 * (h00 + h11)
    comp["dcy"] = -0.5 * (h00 + h22)
    comp["dcz"] = -0.5 * (h00 + h33)
    kind = modes.StressTensor.MODE_011 if big_m is None else modes.StressTensor.MODE_01M
    return FieldMap(
        grid=grid,
        components=comp,
        errors=flat[:, 5].reshape(shape),
        converged=flat[:, 6].reshape(shape).astype(bool),
        units="per-P",
        provenance={"kind": "metric", "mode": kind, "M": big_m},
    )


@dataclass(frozen=True)
class ResidualStats:
    """Discrete-Laplacian residual of a field map against its source."""

    max_relative: float
    mean_relative: float
    spacing: float
    points: int


MAX_RESIDUAL_SPACING = PI / 32


def laplacian_residual(field: FieldMap, amplitude: float = 1.0) -> ResidualStats:
    """Compare the 7-point Laplacian of each metric component to -4*pi
    times its stress source.

    ``amplitude`` scales both sides (the physical P for n photons); a
    zero amplitude therefore gives a zero residual.  Requires a uniform
    interior grid (strictly inside (0, pi)^3) with spacing at most
    pi/32.  Residuals are normalized by the largest source magnitude
    over the compared nodes.
    """
    if amplitude == 0.0:
        return ResidualStats(0.0, 0.0, field.grid.spacings()[0], 0)
    dx, dy, dz = field.grid.spacings()
    if min(dx, dy, dz) <= 0:
        raise ValueError("residual check needs a 3D grid (counts >= 3 per axis)")
    if abs(dx - dy) > 1e-12 or abs(dx - dz) > 1e-12:
        raise ValueError("residual check needs an isotropic grid")
    if dx > MAX_RESIDUAL_SPACING * (1 + 1e-9):
        raise ValueError(f"grid too coarse: spacing {dx:.4g} > pi/32")
    for i in range(3):
        vals = field.grid.axis_values(i)
        if vals[0] <= 0.0 or vals[-1] >= PI:
            raise ValueError("residual grid must lie strictly inside the cavity")

    xs = field.grid.axis_values(0)
    ys = field.grid.axis_values(1)
    zs = field.grid.axis_values(2)
    eta, zeta = np.meshgrid(ys[1:-1], zs[1:-1], indexing="ij")

    mode_kind = field.provenance.get("mode", modes.StressTensor.MODE_011)
    if mode_kind == modes.StressTensor.MODE_011:
        stress = modes.stress_components_011()
        scale = 1.0
        comp_index = {"h00": (0, 0), "h11": (1, 1), "h22": (2, 2), "h33": (3, 3), "h23": (2, 3)}
    else:
        big_m = field.provenance.get("M")
        stress = modes.stress_components_01M(big_m)
        scale = float(big_m)
        comp_index = {"h00": (0, 0), "h33": (3, 3)}

    residuals = []
    norm = 0.0
    for name, (mu, nu) in comp_index.items():
        h = field.components[name]
        lap = (
            h[2:, 1:-1, 1:-1]
            + h[:-2, 1:-1, 1:-1]
            + h[1:-1, 2:, 1:-1]
            + h[1:-1, :-2, 1:-1]
            + h[1:-1, 1:-1, 2:]
            + h[1:-1, 1:-1, :-2]
            - 6.0 * h[1:-1, 1:-1, 1:-1]
        ) / dx**2
        target = -4.0 * PI * scale * stress.component(mu, nu, eta, zeta)[None, :, :]
        target = np.broadcast_to(target, lap.shape)
        residuals.append(np.abs(lap - target))
        norm = max(norm, float(np.max(np.abs(target))))
    res = np.concatenate([r.ravel() for r in residuals])
    if norm == 0.0:
        # zero source: residual is absolute
        return ResidualStats(float(res.max(initial=0.0)), float(res.mean() if res.size else 0.0), dx, res.size)
    return ResidualStats(float(res.max() / norm), float(res.mean() / norm), dx, res.size)
