"""hahnlog: exact arithmetic, logarithms and symbolic Lebesgue integration
on truncated Hahn series fields of finite archimedean rank.

The layers, bottom up:

* :mod:`hahnlog.scalars` — rational polynomials in named constants with
  interval-refined comparison;
* :mod:`hahnlog.valuegroup` — finitely generated ordered value groups under
  the antilexicographic order, with archimedean indices and validated
  order-preserving embeddings;
* :mod:`hahnlog.hahnfield` — truncated generalized power series with exact
  field operations, leading decompositions, rational powers and the partial
  logarithm / exponential;
* :mod:`hahnlog.polyring` — the ordered polynomial ring receiving the
  logarithms, with its three-step sign algorithm;
* :mod:`hahnlog.logarithm` — sections, logarithmic data, the induced
  logarithm, preimages and affine connections between data;
* :mod:`hahnlog.constructible` — guarded expression trees, lifting and
  evaluation at series points;
* :mod:`hahnlog.measure` — closed-form antiderivatives of log-power terms,
  interval integrals, cylinder-region measures and iterated integration;
* :mod:`hahnlog.cli` — the batch command line (``hahnlog log | connect |
  integrate | measure``).
"""

from .errors import (
    CatalogueError,
    DomainError,
    HahnlogError,
    IndeterminateCancellation,
    NotInImage,
    NotRepresentable,
    OutOfCatalogue,
    OutsideDomain,
    ParseError,
    UndecidedComparison,
    ZeroToPrecision,
)
from .hahnfield import (
    DEFAULT_TRUNCATION,
    HahnSeries,
    LeadingDecomposition,
    compare_series,
    eq_to_precision,
    parse_series,
    partial_exp,
    partial_log,
)
from .logarithm import (
    AffineMap,
    ConnectionReport,
    LogDatum,
    NotEquivalent,
    Section,
    connection,
    connection_with_report,
)
from .polyring import INFINITY, InfinityMark, PolyElem, parse_poly, poly_compare
from .scalars import (
    Ordering,
    RatInterval,
    SymbolicReal,
    adjoin,
    compare,
    evaluate,
    log_of_rational,
    log_prime,
    parse_scalar,
    rational_power,
    root_constant,
)
from .valuegroup import EmbeddingMatrix, GroupElement, ValueGroup

__version__ = "0.1.0"

__all__ = [
    "AffineMap",
    "CatalogueError",
    "ConnectionReport",
    "DEFAULT_TRUNCATION",
    "DomainError",
    "EmbeddingMatrix",
    "GroupElement",
    "HahnSeries",
    "HahnlogError",
    "INFINITY",
    "IndeterminateCancellation",
    "InfinityMark",
    "LeadingDecomposition",
    "LogDatum",
    "NotEquivalent",
    "NotInImage",
    "NotRepresentable",
    "Ordering",
    "OutOfCatalogue",
    "OutsideDomain",
    "ParseError",
    "PolyElem",
    "RatInterval",
    "Section",
    "SymbolicReal",
    "UndecidedComparison",
    "ValueGroup",
    "ZeroToPrecision",
    "adjoin",
    "compare",
    "compare_series",
    "connection",
    "connection_with_report",
    "eq_to_precision",
    "evaluate",
    "log_of_rational",
    "log_prime",
    "parse_poly",
    "parse_scalar",
    "parse_series",
    "partial_exp",
    "partial_log",
    "poly_compare",
    "rational_power",
    "root_constant",
]
