"""Numerical toolkit for variable-exponent Lebesgue spaces L^{p(.)}.

Grids and piecewise-constant functions, exponents, Luxemburg norms,
maximal and averaging operators, boundedness-condition probes, the
Littlewood-Paley square function, and a reproducible experiment harness.
"""

from .grid import (Cube, DyadicFamily, Grid, GridFunction, Partition, dyadic_cubes,
                   enum_cubes, integrate, make_grid, make_partition, uniform_grid)
from .exponent import (Exponent, build_exponent, conjugate_exponent, lerner_exponent,
                       lerner_grid, lerner_p0)
from .modular import luxemburg_norm, modular, seq_norm
from .maximal import MaximalSpec, averaging, cz_decompose, maximal

__version__ = "0.1.0"

__all__ = [
    "Cube", "DyadicFamily", "Grid", "GridFunction", "Partition", "dyadic_cubes",
    "enum_cubes", "integrate", "make_grid", "make_partition", "uniform_grid",
    "Exponent", "build_exponent", "conjugate_exponent", "lerner_exponent",
    "lerner_grid", "lerner_p0", "luxemburg_norm", "modular", "seq_norm",
    "MaximalSpec", "averaging", "cz_decompose", "maximal", "__version__",
]
