"""Mollifiers, discrete convolution and the Littlewood-Paley square function.

The filters are built from a smooth bump ``phi0`` (unit integral) as

    psi_j = 2^{jn} phi0(2^j x),   phi_j = psi_j - psi_{j-1}  (j >= 1),

so that ``phi0 + phi_1 + ... + phi_J = psi_J`` telescopes exactly.  The
level-0 term of the square function uses ``phi0`` by default; setting
``level0="phi"`` uses ``phi = psi_0 - psi_{-1}`` instead, which kills
constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve as _sp_convolve

from .exponent import Exponent
from .grid import Grid, GridFunction
from .modular import luxemburg_norm

__all__ = [
    "FilterBank", "build_filterbank", "bump", "convolve", "square_function",
    "sf_equivalence", "SFRecord", "DIRECT_LIMIT",
]

DIRECT_LIMIT = 1024
_REF_CELLS = 256


def bump(r2):
    """``exp(-1/(1-r^2))`` for ``r^2 < 1``, zero outside; ``r2`` is ``|x/r|^2``."""
    r2 = np.asarray(r2, dtype=float)
    inside = r2 < 1
    out = np.zeros(r2.shape)
    out[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
    return out


def _centered_grid(dim, half_cells, h):
    n = 2 * half_cells + 1
    e = (np.arange(n + 1) - half_cells - 0.5) * h
    return Grid([e] * dim)


def _radial_r2(grid, radius):
    return grid.center_norms() ** 2 / radius ** 2


def _h(grid: Grid) -> float:
    hs = grid.spacing
    if not all(math.isclose(h, hs[0], rel_tol=1e-12) for h in hs):
        raise ValueError("grid spacing differs between axes")
    return hs[0]


@dataclass(frozen=True)
class FilterBank:
    """Filters for the square function on one grid spacing.

    Attributes
    ----------
    phi0, phi : GridFunction
        Reference bump (unit integral, radius ``radius``) and the mean-zero
        difference ``phi0(x) - 2^{-n} phi0(x/2)``, on a fine centred grid.
    dilations : tuple of GridFunction
        ``phi_j = 2^{jn} phi(2^j x)`` for ``j = 1..J``, each on the reference
        grid shrunk by ``2^{-j}``, so its samples are exact rescalings.
    kernels : tuple of GridFunction
        Convolution kernels on the target spacing: index 0 is the level-0
        filter, index ``j`` is ``phi_j``.
    psi_J : GridFunction
        ``2^{Jn} phi0(2^J x)`` on the target spacing.
    """

    phi0: GridFunction
    phi: GridFunction
    J: int
    dilations: tuple
    kernels: tuple
    psi_J: GridFunction
    spacing: float
    radius: float
    level0: str = "phi0"

    @property
    def dim(self) -> int:
        return self.phi0.grid.dim


def _scaled_bump(dim, radius, h, half_cells):
    """Unit-mass samples of ``bump(|x|/radius)`` on a centred grid."""
    g = _centered_grid(dim, half_cells, h)
    v = bump(_radial_r2(g, radius))
    mass = math.fsum(v.ravel()) * h ** dim
    if not mass > 0:
        raise ValueError("bump is not resolved by the grid")
    return v / mass


def build_filterbank(grid: Grid, J: int = 8, radius: float = 1.0,
                     level0: str = "phi0") -> FilterBank:
    """Filters for ``grid`` (uniform) up to level ``J``.

    Raises ``ValueError`` when ``psi_J`` has fewer than 8 cells across its
    support, i.e. ``2 radius 2^{-J} < 8 h``.
    """
    if J < 0:
        raise ValueError("J must be >= 0")
    if level0 not in ("phi0", "phi"):
        raise ValueError("level0 must be 'phi0' or 'phi'")
    if not grid.is_uniform:
        raise ValueError("filter banks need a uniform grid")
    n = grid.dim
    h = _h(grid)
    if 2 * radius * 2.0 ** -J < 8 * h * (1 - 1e-12):
        raise ValueError(f"grid too coarse for level J={J}: need h <= {radius * 2.0 ** -J / 4}")

    # reference filters on a fine centred grid covering supp phi (radius 2r)
    href = 2 * radius / _REF_CELLS
    half = _REF_CELLS + 1
    gref = _centered_grid(n, half, href)
    p0 = bump(_radial_r2(gref, radius))
    p0 = p0 / (math.fsum(p0.ravel()) * href ** n)
    wide = bump(_radial_r2(gref, 2 * radius))
    wide = wide / (math.fsum(wide.ravel()) * href ** n)
    phi0 = GridFunction(gref, p0)
    phi = GridFunction(gref, p0 - wide)
    dil = []
    for j in range(1, J + 1):
        gj = _centered_grid(n, half, href * 2.0 ** -j)
        dil.append(GridFunction(gj, phi.values * 2.0 ** (j * n)))

    # kernels on the target spacing; psi_{-1} is only needed for level0="phi"
    reach = 2 * radius if level0 == "phi" else radius
    K = int(math.ceil(reach / h)) + 1
    j0 = -1 if level0 == "phi" else 0
    psi = {j: _scaled_bump(n, radius * 2.0 ** -j, h, K) for j in range(j0, J + 1)}
    kg = _centered_grid(n, K, h)
    first = psi[0] if level0 == "phi0" else psi[0] - psi[-1]
    kernels = [GridFunction(kg, first)]
    kernels += [GridFunction(kg, psi[j] - psi[j - 1]) for j in range(1, J + 1)]
    return FilterBank(phi0, phi, J, tuple(dil), tuple(kernels), GridFunction(kg, psi[J]),
                      float(h), float(radius), level0)


def _origin_index(grid: Grid):
    h = _h(grid)
    idx = []
    for ax in range(grid.dim):
        m = grid.midpoints[ax]
        c = int(np.argmin(np.abs(m)))
        if abs(m[c]) > 1e-9 * h:
            raise ValueError("kernel grid must have a cell centred at the origin")
        idx.append(c)
    return tuple(idx)


def convolve(f: GridFunction, g: GridFunction, method: str = "auto") -> GridFunction:
    """``(f * g)_i = h^n sum_k f_k g_{i-k+c}`` on the grid of ``f``.

    ``c`` is the index of the cell of ``g``'s grid centred at the origin, so
    ``g`` acts as a kernel and ``f`` is extended by zero outside its grid.
    ``method`` is "direct", "fft" or "auto" (direct below
    :data:`DIRECT_LIMIT` cells).
    """
    gf, gg = f.grid, g.grid
    if gf.dim != gg.dim or not (gf.is_uniform and gg.is_uniform):
        raise ValueError("convolution needs uniform grids of equal dimension")
    h = _h(gf)
    if not math.isclose(h, _h(gg), rel_tol=1e-12):
        raise ValueError(f"spacing mismatch: {h} vs {_h(gg)}")
    c = _origin_index(gg)
    if method == "auto":
        method = "direct" if gf.ncells < DIRECT_LIMIT else "fft"
    if method not in ("direct", "fft"):
        raise ValueError(f"unknown method {method!r}")
    full = _sp_convolve(f.values, g.values, mode="full", method=method)
    sl = tuple(slice(ci, ci + n) for ci, n in zip(c, gf.shape))
    return GridFunction(gf, full[sl] * h ** gf.dim)


def square_function(f: GridFunction, fb: FilterBank, method: str = "auto") -> GridFunction:
    """Cellwise ``(sum_{j=0}^{J} |k_j * f|^2)^{1/2}`` with the bank's kernels."""
    if not math.isclose(_h(f.grid), fb.spacing, rel_tol=1e-12):
        raise ValueError("filter bank was built for a different spacing")
    acc = np.zeros(f.grid.shape)
    for k in fb.kernels:
        acc += convolve(f, k, method).values ** 2
    return GridFunction(f.grid, np.sqrt(acc))


@dataclass(frozen=True)
class SFRecord:
    c_low: float
    c_high: float
    low_witness: str
    high_witness: str
    ratios: tuple


def sf_equivalence(p: Exponent, fb: FilterBank, family, budget: int = 50,
                   seed: int = 0) -> SFRecord:
    """Range of ``||S f||_p / ||f||_p`` over a test family.

    ``family`` is a :func:`~varlp.families.make_family` spec or a list of
    functions; at most ``budget`` functions are used.
    """
    from .families import make_family

    fs = make_family(p.grid, family, seed, p) if isinstance(family, dict) else list(family)
    fs = fs[:budget]
    if not fs:
        raise ValueError("empty family")
    r = []
    for f in fs:
        nf = luxemburg_norm(f, p)
        if nf == 0:
            raise ValueError("family contains a zero function")
        r.append(luxemburg_norm(square_function(f, fb), p) / nf)
    r = np.array(r)
    lo, hi = int(np.argmin(r)), int(np.argmax(r))
    return SFRecord(float(r[lo]), float(r[hi]), f"f{lo}", f"f{hi}", tuple(r.tolist()))
