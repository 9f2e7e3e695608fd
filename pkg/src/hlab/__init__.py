"""hlab: a numerical workbench for weighted Hardy spaces of the unit disk.

Functions on the disk are truncated Taylor coefficient vectors, operators
are dense compressions in the monomial basis, and every theorem-level claim
is checked as finite-truncation evidence with its tolerance attached.
"""

__version__ = "0.1.0"

from .weights import (  # noqa: E402
    GrowthClass,
    WeightSequence,
    bergman,
    beta,
    classify_growth,
    constant,
    dirichlet,
    flipbergman,
    invert,
    lift,
    logrecip,
    parse_weight,
    powerlog,
    sobolev,
    tabulated,
)
from .series import (  # noqa: E402
    BlaschkeProduct,
    MobiusMap,
    PowerSeries,
    blaschke_series,
    mobius_series,
    mul,
    parse_symbol,
)

__all__ = [
    "__version__",
    "GrowthClass",
    "WeightSequence",
    "bergman",
    "beta",
    "classify_growth",
    "constant",
    "dirichlet",
    "flipbergman",
    "invert",
    "lift",
    "logrecip",
    "parse_weight",
    "powerlog",
    "sobolev",
    "tabulated",
    "BlaschkeProduct",
    "MobiusMap",
    "PowerSeries",
    "blaschke_series",
    "mobius_series",
    "mul",
    "parse_symbol",
]
