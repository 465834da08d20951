"""Pointwise residuals of the limit eigenvalue PDE on the sign-regime
partition of m*u.

Sign convention: inf_laplacian computes <D^2u grad u, grad u>, so the
residual expressions use -inf_laplacian directly. Nodes where centered
stencils straddle a ridge or an unresolved curvature spike are EXCLUDED;
viscosity residuals are only meaningful where a smooth test function could
touch the field.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import ScalarField
from .weight import WeightField

POS, NEG, ZERO, EXCLUDED = 1, -1, 0, 9

# Fixed slope-jump threshold fraction for genuine ridges, and the
# h-dependent curvature guard constant (h^{2/3} scaling keeps the surviving
# stencil error at O(h); a fixed fraction stalls at O(sqrt(h)) near conical
# apexes).
KINK_FRACTION = 0.2
CURVATURE_GUARD = 0.5
DEFAULT_C_TOL = 4.0


@dataclass(frozen=True)
class CheckOpts:
    kink_tol: float | None = None   # absolute slope-jump threshold; None = auto
    c_tol: float = DEFAULT_C_TOL    # regime tolerance is c_tol * h
    eps_regime: float | None = None  # |m u| threshold; None = auto


@dataclass(frozen=True)
class ViscosityReport:
    max_residual: dict
    counts: dict
    excluded: int
    tolerance: float
    passes: dict
    boundary_max: float

    def to_record(self) -> dict:
        return {
            "max_residual": self.max_residual,
            "counts": self.counts,
            "excluded": self.excluded,
            "tolerance": self.tolerance,
            "passes": self.passes,
            "boundary_max": self.boundary_max,
        }


def _stencils(u: np.ndarray, h: float):
    ux = np.zeros_like(u)
    uy = np.zeros_like(u)
    uxx = np.zeros_like(u)
    uyy = np.zeros_like(u)
    uxy = np.zeros_like(u)
    ux[1:-1, :] = (u[2:, :] - u[:-2, :]) / (2 * h)
    uy[:, 1:-1] = (u[:, 2:] - u[:, :-2]) / (2 * h)
    uxx[1:-1, :] = (u[2:, :] - 2 * u[1:-1, :] + u[:-2, :]) / h ** 2
    uyy[:, 1:-1] = (u[:, 2:] - 2 * u[:, 1:-1] + u[:, :-2]) / h ** 2
    uxy[1:-1, 1:-1] = (u[2:, 2:] - u[2:, :-2] - u[:-2, 2:] + u[:-2, :-2]) / (4 * h ** 2)
    return ux, uy, uxx, uyy, uxy


def inf_laplacian(u: ScalarField) -> ScalarField:
    """<D^2u grad u, grad u> by centered 3x3 stencils; zero on the index rim."""
    h = u.grid.h
    ux, uy, uxx, uyy, uxy = _stencils(u.u, h)
    out = ux * ux * uxx + 2 * ux * uy * uxy + uy * uy * uyy
    out[0, :] = out[-1, :] = 0.0
    out[:, 0] = out[:, -1] = 0.0
    return ScalarField(u.grid, out)


def excluded_nodes(u: np.ndarray, h: float, kink_tol: float | None = None) -> np.ndarray:
    """Ridge/kink detector: one-sided first differences disagreeing by more
    than the threshold in either axis mark the node as excluded."""
    fx = np.zeros_like(u)
    bx = np.zeros_like(u)
    fy = np.zeros_like(u)
    by = np.zeros_like(u)
    fx[:-1, :] = (u[1:, :] - u[:-1, :]) / h
    bx[1:, :] = (u[1:, :] - u[:-1, :]) / h
    fy[:, :-1] = (u[:, 1:] - u[:, :-1]) / h
    by[:, 1:] = (u[:, 1:] - u[:, :-1]) / h
    lip = max(np.abs(fx).max(), np.abs(fy).max())
    if kink_tol is None:
        if lip == 0.0:
            return np.zeros(u.shape, dtype=bool)
        height = np.abs(u).max()
        scale = height / lip  # natural length of the field
        kink_tol = min(KINK_FRACTION, CURVATURE_GUARD * (h / scale) ** (2 / 3)) * lip
    return (np.abs(fx - bx) > kink_tol) | (np.abs(fy - by) > kink_tol)


def regime_labels(u: ScalarField, w: WeightField,
                  opts: CheckOpts | None = None) -> np.ndarray:
    """Per-node labels over the inside set: POS/NEG/ZERO/EXCLUDED.

    ZERO requires the node and its full 8-neighborhood to have |m u| under
    the threshold (interior-of-set approximation); borderline nodes that
    fail that test are excluded, as are ridge nodes.
    """
    opts = opts or CheckOpts()
    inside = w.mask.inside
    h = u.grid.h
    # centered 3x3 stencils are only meaningful where the full neighborhood
    # is inside; rim-adjacent nodes read Dirichlet-truncated values
    core = np.zeros_like(inside)
    c9 = inside[1:-1, 1:-1].copy()
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            c9 &= inside[1 + dx:inside.shape[0] - 1 + dx,
                         1 + dy:inside.shape[1] - 1 + dy]
    core[1:-1, 1:-1] = c9
    mu = w.m * u.u
    eps = opts.eps_regime
    if eps is None:
        eps = 1e-12 * max(np.abs(mu).max(), 1.0)
    small = np.abs(mu) <= eps
    small_nbhd = np.zeros_like(small)
    c = small[1:-1, 1:-1].copy()
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            c &= small[1 + dx:small.shape[0] - 1 + dx,
                       1 + dy:small.shape[1] - 1 + dy]
    small_nbhd[1:-1, 1:-1] = c

    labels = np.full(u.u.shape, EXCLUDED, dtype=int)
    labels[core & (mu > eps)] = POS
    labels[core & (mu < -eps)] = NEG
    labels[core & small & small_nbhd] = ZERO
    kink = excluded_nodes(u.u, h, opts.kink_tol)
    labels[kink] = EXCLUDED
    labels[~core] = EXCLUDED
    return labels


def check(u: ScalarField, lam: float, w: WeightField,
          opts: CheckOpts | None = None) -> ViscosityReport:
    """Sup of the applicable residual per regime, against tolerance c_tol*h.

    POS:  |min(-D_inf u, |grad u| - lam*u)|
    NEG:  |max(-D_inf u, -|grad u| - lam*u)|
    ZERO: |D_inf u|
    """
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    opts = opts or CheckOpts()
    h = u.grid.h
    labels = regime_labels(u, w, opts)
    dinf = inf_laplacian(u).u
    ux, uy, *_ = _stencils(u.u, h)
    gn = np.hypot(ux, uy)
    res_pos = np.abs(np.minimum(-dinf, gn - lam * u.u))
    res_neg = np.abs(np.maximum(-dinf, -gn - lam * u.u))
    res_zero = np.abs(dinf)

    tol = opts.c_tol * h
    max_residual, counts, passes = {}, {}, {}
    for name, lab, res in (("pos", POS, res_pos),
                           ("neg", NEG, res_neg),
                           ("zero", ZERO, res_zero)):
        sel = labels == lab
        counts[name] = int(sel.sum())
        mx = float(res[sel].max()) if sel.any() else 0.0
        max_residual[name] = mx
        passes[name] = bool(mx <= tol)
    excluded = int(((labels == EXCLUDED) & w.mask.inside).sum())
    boundary_max = float(np.abs(u.u[~w.mask.inside]).max())
    return ViscosityReport(max_residual=max_residual, counts=counts,
                           excluded=excluded, tolerance=tol, passes=passes,
                           boundary_max=boundary_max)
