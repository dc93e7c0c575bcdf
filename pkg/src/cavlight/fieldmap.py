"""Grid specification and named field arrays with per-point error estimates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

AxisRange = tuple[float, float, int]


@dataclass(frozen=True)
class GridSpec:
    """Rectilinear evaluation grid in box coordinates (units of pi).

    Each axis is (start, stop, count).  A single-point axis (count 1)
    pins that coordinate, which is how planar slices are expressed.
    """

    xi: AxisRange = (-np.pi, 2.0 * np.pi, 48)
    eta: AxisRange = (-np.pi, 2.0 * np.pi, 48)
    zeta: AxisRange = (-np.pi, 2.0 * np.pi, 48)

    def __post_init__(self):
        for name, (start, stop, count) in zip(("xi", "eta", "zeta"), self.axes):
            if count < 1:
                raise ValueError(f"{name} axis needs at least one point")
            if not (np.isfinite(start) and np.isfinite(stop)):
                raise ValueError(f"{name} axis range must be finite")
            if count > 1 and stop <= start:
                raise ValueError(f"{name} axis range must be increasing")

    @property
    def axes(self) -> tuple[AxisRange, AxisRange, AxisRange]:
        return (self.xi, self.eta, self.zeta)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.xi[2], self.eta[2], self.zeta[2])

    def axis_values(self, i: int) -> np.ndarray:
        start, stop, count = self.axes[i]
        if count == 1:
            return np.array([start])
        return np.linspace(start, stop, count)

    def points(self) -> np.ndarray:
        """All grid nodes as an (N, 3) array, xi-major order."""
        xs, ys, zs = (self.axis_values(i) for i in range(3))
        grid = np.stack(np.meshgrid(xs, ys, zs, indexing="ij"), axis=-1)
        return grid.reshape(-1, 3)

    def spacings(self) -> tuple[float, float, float]:
        out = []
        for start, stop, count in self.axes:
            out.append((stop - start) / (count - 1) if count > 1 else 0.0)
        return tuple(out)


@dataclass
class FieldMap:
    """Named component arrays on a grid, with provenance and error estimates.

    Components are dimensionless, in units of the amplitude P (tagged in
    ``units``).  ``errors`` is the summed absolute quadrature error
    estimate per node; ``converged`` flags nodes where the target
    tolerance was reached.
    """

    grid: GridSpec
    components: dict[str, np.ndarray]
    errors: np.ndarray
    converged: np.ndarray
    units: str = "per-P"
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        shape = self.grid.shape
        for name, arr in self.components.items():
            if arr.shape != shape:
                raise ValueError(f"component {name!r} shape {arr.shape} != grid {shape}")
        if self.errors.shape != shape or self.converged.shape != shape:
            raise ValueError("error/convergence array shape does not match grid")
        if not self.units:
            raise ValueError("units tag is required")

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))
