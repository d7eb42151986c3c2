"""Principal parts and the search for Borcherds products of singular weight.

The weight of the product attached to a principal part is
-(1/4) sum c(g, m) q(g, -m) with q the Eisenstein coefficients of weight
1 + n/2.  For non-negative principal parts every term contributes a
non-negative amount, so singular-weight principal parts are the solutions of a
bounded knapsack problem.  Terms with q = 0 ("neutral" terms) change neither
the weight nor the divisor; they are reported and set to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .dimensions import is_simple
from .eisenstein import EisensteinProvider, ElementClass, ProviderUnavailable, provider_for
from .genus import DiscriminantForm, GenusSymbol, format_genus_symbol


class PrincipalPart:
    """Finite map (element index, m < 0) -> non-negative integer, symmetric under g -> -g."""

    def __init__(self, D: DiscriminantForm, terms: Mapping[tuple[int, Fraction], int]):
        self.D = D
        norms = D.norm_numerators(D.elements())
        neg = np.asarray(D.index(D.neg(D.elements())))
        clean: dict[tuple[int, Fraction], int] = {}
        for (g, m), c in terms.items():
            g, m = int(g), Fraction(m)
            if c == 0:
                continue
            if int(c) != c or c < 0:
                raise ValueError("principal part coefficients must be non-negative integers")
            if m >= 0:
                raise ValueError("principal part exponents must be negative")
            if (m - Fraction(int(norms[g]), D.level)).denominator != 1:
                raise ValueError(f"exponent {m} is not congruent to Q(gamma) mod 1")
            clean[(g, m)] = int(c)
        for (g, m), c in clean.items():
            if clean.get((int(neg[g]), m), 0) != c:
                raise ValueError("principal part is not symmetric under gamma -> -gamma")
        self.terms = dict(sorted(clean.items()))

    @classmethod
    def from_coordinates(cls, D: DiscriminantForm, terms: Mapping[tuple[tuple[int, ...], Fraction], int]) -> "PrincipalPart":
        return cls(D, {(int(D.index(np.array(g))), m): c for (g, m), c in terms.items()})

    def items(self):
        return self.terms.items()

    def __eq__(self, other):
        return isinstance(other, PrincipalPart) and self.terms == other.terms

    def __len__(self):
        return len(self.terms)

    def to_json(self) -> list[dict]:
        X = self.D.elements()
        return [{"gamma": [int(v) for v in X[g]], "m": str(m), "c": c} for (g, m), c in self.terms.items()]


def _element_class(provider: EisensteinProvider, D: DiscriminantForm, g: int) -> ElementClass:
    x = D.element(g)
    is_zero = not np.any(x)
    q = D.q_value(x)
    for cls in provider.classes():
        if cls.is_zero == is_zero and (is_zero or cls.norm == q):
            return cls
    raise ProviderUnavailable(f"no Eisenstein class for element {x.tolist()}")


def product_weight(sym: GenusSymbol, pp: PrincipalPart) -> Fraction:
    """-(1/4) sum c(g, m) q(g, -m)."""
    if not pp.terms:
        return Fraction(0)
    provider = provider_for(sym)
    total = Fraction(0)
    for (g, m), c in pp.items():
        cls = _element_class(provider, pp.D, g)
        total += c * provider.q(cls, -m)
    return -total / 4


def obstruction_check(sym: GenusSymbol, pp: PrincipalPart | None = None) -> dict:
    """Whether pp is the principal part of a weakly holomorphic form.

    Symmetry and integrality are enforced by ``PrincipalPart``; the remaining
    condition is orthogonality to cusp forms of weight 1 + n/2, vacuous when
    that space is zero.
    """
    if is_simple(sym):
        return {"status": "ok", "certificate": "dim S_{1+n/2} = 0"}
    return {"status": "unavailable", "certificate": "cusp form basis not computed for non-simple lattices"}


@dataclass
class ProductCandidate:
    terms: dict  # (class key, m) -> total coefficient over orbits of that class
    weight: Fraction
    singular: bool
    realizations: dict = field(default_factory=dict)  # (class key, m) -> number of orbits available
    representative: PrincipalPart | None = None

    def to_json(self) -> dict:
        return {
            "terms": [{"class": k, "m": str(m), "c": c} for (k, m), c in sorted(self.terms.items(), key=lambda t: (t[0][0], t[0][1]))],
            "weight": str(self.weight),
            "singular": self.singular,
            "principal_part": self.representative.to_json() if self.representative is not None else None,
        }


@dataclass
class SearchReport:
    genus: str
    singular_weight: Fraction
    candidates: list[ProductCandidate]
    neutral_terms: list[tuple[str, Fraction]]
    pruning_certificate: list[dict]
    searched_classes: tuple[str, ...]
    complete: bool
    notes: list[str]

    def to_json(self) -> dict:
        return {
            "genus": self.genus,
            "singular_weight": str(self.singular_weight),
            "candidates": [c.to_json() for c in self.candidates],
            "neutral_terms": [{"class": k, "m": str(m)} for k, m in self.neutral_terms],
            "pruning_certificate": self.pruning_certificate,
            "searched_classes": list(self.searched_classes),
            "complete": self.complete,
            "notes": self.notes,
        }


def _representative(provider: EisensteinProvider, D: DiscriminantForm, terms: dict) -> PrincipalPart:
    """An explicit principal part realizing class-level terms, one orbit per unit."""
    X = D.elements()
    norms = D.norm_numerators(X)
    neg = np.asarray(D.index(D.neg(X)))
    out: dict[tuple[int, Fraction], int] = {}
    by_key = {c.key: c for c in provider.classes()}
    for (key, m), c in sorted(terms.items()):
        cls = by_key[key]
        if cls.is_zero:
            cands = [0]
        else:
            cands = [g for g in range(D.order) if g and Fraction(int(norms[g]), D.level) == cls.norm and g <= neg[g]]
        g = cands[0]
        out[(g, m)] = out.get((g, m), 0) + c
        out[(int(neg[g]), m)] = out[(g, m)]
    return PrincipalPart(D, out)


def search_singular(sym: GenusSymbol, m_floor: Fraction | int = -4) -> SearchReport:
    """All non-negative principal parts (up to O(D), neutral terms removed)
    whose Borcherds product has weight n/2 - 1."""
    provider = provider_for(sym)
    m_floor = Fraction(m_floor)
    if m_floor >= 0:
        raise ValueError("m_floor must be negative")
    n = sym.signature[1]
    target = Fraction(n, 2) - 1
    items = []
    neutral = []
    notes = []
    cert = []
    for cls in provider.classes():
        if cls.key not in provider.searchable_classes:
            continue
        exps = provider.exponents(cls, m_floor)
        for m in exps:
            q = provider.q(cls, -m)
            if q > 0:
                raise AssertionError("positive Eisenstein coefficient breaks the knapsack argument")
            w = -Fraction(cls.orbit_size) * q / 4
            if w == 0:
                neutral.append((cls.key, m))
            elif w <= target:
                items.append(((cls.key, m), w, cls.orbits))
        # every exponent below m_floor contributes more than the target
        deeper = (exps[-1] - 1) if exps else provider.first_exponent(cls)
        floor = provider.magnitude_floor(cls, -deeper)
        bound = Fraction(cls.orbit_size) * floor / 4
        cert.append({"class": cls.key, "beyond": str(deeper), "weight_lower_bound": str(bound), "exceeds_target": bound > target})
        if not bound > target:
            notes.append(f"terms of class {cls.key} below m = {m_floor} are not certified heavier than the target")
    if neutral:
        notes.append("neutral terms (q = 0) change neither the weight nor the divisor; they are set to 0")
    if provider.partial:
        notes.append("only gamma = 0 terms are searchable here; gamma != 0 coefficients are not available")

    solutions = []

    def dfs(i: int, remaining: Fraction, chosen: dict):
        if remaining == 0:
            solutions.append(dict(chosen))
            return
        if i == len(items):
            return
        key, w, _ = items[i]
        cmax = int(remaining // w)
        for c in range(cmax, -1, -1):
            if c:
                chosen[key] = c
            dfs(i + 1, remaining - c * w, chosen)
            chosen.pop(key, None)

    dfs(0, target, {})
    candidates = []
    D = sym.form
    for sol in solutions:
        rep = _representative(provider, D, sol)
        candidates.append(ProductCandidate(sol, target, True, {k: o for k, _, o in items if k in sol}, rep))
    complete = all(c["exceeds_target"] for c in cert) and not provider.partial
    return SearchReport(format_genus_symbol(sym), target, candidates, neutral, cert, provider.searchable_classes, complete, notes)
