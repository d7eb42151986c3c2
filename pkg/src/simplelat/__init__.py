"""Simple lattices of square-free level: Weil representations, dimension
formulas, vector-valued Eisenstein series, singular-weight searches,
Borcherds products and their sum expansions."""

__version__ = "0.1.0"

from .genus import (
    DiscriminantForm,
    GenusSymbol,
    JordanComponent,
    LatticeDiscriminant,
    exists_even_lattice,
    format_genus_symbol,
    parse_genus_symbol,
    realize,
)
from .qseries import EtaQuotientSpec, QSeries, eta_quotient, format_qseries, parse_qseries

__all__ = [
    "DiscriminantForm",
    "EtaQuotientSpec",
    "GenusSymbol",
    "JordanComponent",
    "LatticeDiscriminant",
    "QSeries",
    "eta_quotient",
    "exists_even_lattice",
    "format_genus_symbol",
    "format_qseries",
    "parse_genus_symbol",
    "parse_qseries",
    "realize",
]
