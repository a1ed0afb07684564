"""Centred second-order spatial operators with ghost-node boundary closure.

Two ghost layers back every stencil.  For symmetric (no-flux) walls the
fields are reflected evenly, which makes every odd derivative vanish
exactly at the wall nodes; periodic grids carry a duplicated endpoint
(node 0 and node N-1 are the same physical point) and wrap around it.

``div_flux`` is the conservative outer derivative used for every flux
group of the evolution equations.  Its ghost rule for a flux array F is
F[-1] = 2*F[0] - F[1] (antisymmetric about the boundary value), which
makes the trapezoidal grid sum of div_flux(F) telescope exactly to
F[N-1] - F[0]: zero for wall-vanishing fluxes and for periodic fluxes,
while a constant F still differentiates to exactly zero everywhere.
"""

from __future__ import annotations

import numpy as np

from .core import BoundaryKind, Grid, State


class StencilOps:
    """Derivative and integral operators bound to one grid."""

    def __init__(self, grid: Grid):
        self.grid = grid
        self.dx = grid.dx

    def _check(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        if f.shape != (self.grid.n_nodes,):
            raise ValueError(
                f"expected array of length {self.grid.n_nodes}, got shape {f.shape}"
            )
        return f

    def _pad(self, f) -> np.ndarray:
        """Extend by two ghost nodes per side; length n_nodes + 4."""
        f = self._check(f)
        if self.grid.boundary is BoundaryKind.NO_FLUX_SYMMETRIC:
            left = (f[2], f[1])
            right = (f[-2], f[-3])
        else:
            left = (f[-3], f[-2])
            right = (f[1], f[2])
        return np.concatenate((left, f, right))

    # Field derivatives at the nodes, length n_nodes.

    def d1(self, f) -> np.ndarray:
        p = self._pad(f)
        return (p[3:-1] - p[1:-3]) / (2.0 * self.dx)

    def d2(self, f) -> np.ndarray:
        p = self._pad(f)
        return (p[3:-1] - 2.0 * p[2:-2] + p[1:-3]) / self.dx**2

    def d3(self, f) -> np.ndarray:
        p = self._pad(f)
        return (p[4:] - 2.0 * p[3:-1] + 2.0 * p[1:-3] - p[:-4]) / (2.0 * self.dx**3)

    # Halo variants: values/derivatives on nodes -1..N (length n_nodes + 2),
    # used to build nested fluxes like (tension * eta_xx)_x at every node.

    def halo(self, f) -> np.ndarray:
        return self._pad(f)[1:-1]

    def halo_d1(self, f) -> np.ndarray:
        p = self._pad(f)
        return (p[2:] - p[:-2]) / (2.0 * self.dx)

    def halo_d2(self, f) -> np.ndarray:
        p = self._pad(f)
        return (p[2:] - 2.0 * p[1:-1] + p[:-2]) / self.dx**2

    def d1_center(self, fh) -> np.ndarray:
        """Centred derivative of a halo array; result lives on the nodes."""
        fh = np.asarray(fh, dtype=float)
        if fh.shape != (self.grid.n_nodes + 2,):
            raise ValueError(
                f"expected halo array of length {self.grid.n_nodes + 2}, got {fh.shape}"
            )
        return (fh[2:] - fh[:-2]) / (2.0 * self.dx)

    def div_flux(self, flux) -> np.ndarray:
        """Conservative d/dx of a nodal flux array (see module docstring)."""
        flux = self._check(flux)
        if self.grid.boundary is BoundaryKind.NO_FLUX_SYMMETRIC:
            left = 2.0 * flux[0] - flux[1]
            right = 2.0 * flux[-1] - flux[-2]
        else:
            left = flux[-2]
            right = flux[1]
        ext = np.concatenate(((left,), flux, (right,)))
        return (ext[2:] - ext[:-2]) / (2.0 * self.dx)

    def integrate(self, f) -> float:
        """Trapezoidal integral over the domain."""
        f = self._check(f)
        return self.dx * (f.sum() - 0.5 * (f[0] + f[-1]))


def film_mass(state: State, grid: Grid) -> float:
    """Total film volume: trapezoidal integral of eta."""
    return StencilOps(grid).integrate(state.eta)


def surfactant_mass(state: State, grid: Grid) -> float:
    """Total surfactant: integral of gamma * sqrt(1 + eta_x^2).

    The root factor converts concentration per unit of free surface into
    concentration per unit of substrate.
    """
    ops = StencilOps(grid)
    slope = ops.d1(state.eta)
    return ops.integrate(state.gamma * np.sqrt(1.0 + slope**2))
