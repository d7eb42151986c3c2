"""Exhaustive search for simple lattices of signature (2, n) and square-free level.

The search space is bounded by frontiers on the level N and the order |D|
(one pair of bounds per n).  For n >= 8 only |D| is bounded, so n itself is
scanned up to ``n_max``; beyond that a tail bound certifies dim S > 0:
at k = 1 + n/2 one has c = +1 and alpha_3 + alpha_4 <= d, so

    dim S >= d (k - 7)/12 - sqrt|D^2|/4 - (1 + sqrt|D^3|)/(3 sqrt 3),

which is positive once k exceeds ``tail_weight(D)``.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import isqrt, prod
from typing import Iterator

from sympy import primerange

from .dimensions import dim_report, form_data
from .genus import (
    GenusSymbol,
    JordanComponent,
    exists_even_lattice,
    format_genus_symbol,
    parse_genus_symbol,
    satisfies_milgram,
)

# the fifteen genus symbols of the classification, in table order
EXPECTED_SIMPLE = (
    "II_(2,10)()",
    "II_(2,18)()",
    "II_(2,26)()",
    "II_(2,6)(2_II^-2)",
    "II_(2,6)(2_II^-4)",
    "II_(2,6)(2_II^-6)",
    "II_(2,10)(2_II^+2)",
    "II_(2,4)(3^+1)",
    "II_(2,4)(3^-3)",
    "II_(2,4)(3^+5)",
    "II_(2,8)(3^-1)",
    "II_(2,6)(5^+1)",
    "II_(2,4)(2_II^+2 3^+1)",
    "II_(2,4)(2_II^+4 3^+1)",
    "II_(2,8)(7^+1)",
)


@dataclass(frozen=True)
class SearchFrontier:
    n_max: int = 34
    order_bound_large: int = 45  # n >= 8: |D| < 45
    level_bound_6: int = 33  # n = 6: N < 33 or |D| < 137
    order_bound_6: int = 137
    level_bound_4: int = 101  # n = 4: N < 101 or |D| < 3277
    order_bound_4: int = 3277

    def bounds(self, n: int) -> tuple[int | None, int]:
        """(level bound or None, order bound) for signature (2, n)."""
        if n == 4:
            return self.level_bound_4, self.order_bound_4
        if n == 6:
            return self.level_bound_6, self.order_bound_6
        return None, self.order_bound_large

    def dims(self) -> list[int]:
        return list(range(4, self.n_max + 1, 2))


def _rank_choices(p: int, cap: int) -> range:
    return range(2, cap + 1, 2) if p == 2 else range(1, cap + 1)


def _symbols_by_order(bound: int, cap: int) -> Iterator[tuple[JordanComponent, ...]]:
    """All component tuples with |D| < bound and p-ranks <= cap."""
    primes = list(primerange(2, bound))

    def rec(i: int, acc: int, comps: tuple):
        yield comps
        for j in range(i, len(primes)):
            p = primes[j]
            if acc * p >= bound:
                break
            for rk in _rank_choices(p, cap):
                if acc * p**rk >= bound:
                    break
                for s in (1, -1):
                    yield from rec(j + 1, acc * p**rk, comps + (JordanComponent(p, rk, s),))

    yield from rec(0, 1, ())


def _symbols_by_level(bound: int, cap: int) -> Iterator[tuple[JordanComponent, ...]]:
    """All component tuples with level N < bound and p-ranks <= cap."""
    primes = list(primerange(2, bound))

    def rec(i: int, acc: int, comps: tuple):
        yield comps
        for j in range(i, len(primes)):
            p = primes[j]
            if acc * p >= bound:
                break
            for rk in _rank_choices(p, cap):
                for s in (1, -1):
                    yield from rec(j + 1, acc * p, comps + (JordanComponent(p, rk, s),))

    yield from rec(0, 1, ())


def enumerate_candidates(frontier: SearchFrontier = SearchFrontier(), n: int | None = None) -> Iterator[GenusSymbol]:
    """Genus symbols of signature (2, n) inside the frontier that pass the
    Milgram congruence and the existence conditions, without repetition."""
    for m in ([n] if n is not None else frontier.dims()):
        level_bound, order_bound = frontier.bounds(m)
        cap = m + 2
        seen = set()
        sources = [_symbols_by_order(order_bound, cap)]
        if level_bound is not None:
            sources.append(_symbols_by_level(level_bound, cap))
        for src in sources:
            for comps in src:
                if comps in seen:
                    continue
                seen.add(comps)
                sym = GenusSymbol((2, m), comps)
                if satisfies_milgram(sym) and exists_even_lattice(sym):
                    yield sym


def tail_weight(components: tuple[JordanComponent, ...]) -> Fraction:
    """A rational K with dim S_{k} > 0 for all k > K (at c = +1)."""
    fd = form_data(tuple(components))
    d = Fraction(fd.order + fd.order2, 2)
    # rational upper bounds for the square roots
    s2 = isqrt(fd.order2) + (0 if isqrt(fd.order2) ** 2 == fd.order2 else 1)
    s3 = isqrt(fd.order3) + (0 if isqrt(fd.order3) ** 2 == fd.order3 else 1)
    inv_3sqrt3 = Fraction(1, 5)  # 1/(3 sqrt 3) = 0.19245... < 1/5
    return 7 + 12 * (Fraction(s2, 4) + (1 + s3) * inv_3sqrt3) / d


@dataclass
class ClassificationResult:
    simple: list[tuple[int, str, int, int]]  # (level, symbol, n, dim_S)
    examined: dict[int, int]
    certificate: list[dict]
    frontier: dict
    seconds: float = 0.0
    notes: list[str] = field(default_factory=list)

    def symbols(self) -> list[str]:
        return [s for _, s, _, _ in self.simple]

    def manifest(self) -> dict:
        return {
            "frontier": self.frontier,
            "examined": {str(k): v for k, v in self.examined.items()},
            "simple_count": len(self.simple),
            "certificate": self.certificate,
            "seconds": round(self.seconds, 3),
            "notes": self.notes,
        }


def _classify_dim(args) -> tuple[int, int, list[tuple[int, str, int, int]]]:
    frontier, n, levels = args
    k = 1 + n // 2
    hits = []
    count = 0
    for sym in enumerate_candidates(frontier, n):
        if levels is not None and sym.level not in levels:
            continue
        count += 1
        rep = dim_report(sym, k)
        if rep.dim_S == 0:
            hits.append((sym.level, format_genus_symbol(sym), n, 0))
    return n, count, hits


def _certificate(frontier: SearchFrontier, simple: list[tuple[int, str, int, int]], levels) -> tuple[list[dict], list[str]]:
    """For every D of the |D|-bounded regime: last simple n, and the tail bound."""
    notes = []
    cert = []
    k_max = 1 + frontier.n_max // 2
    hits: dict[tuple, list[int]] = {}
    for _, s, n, _ in simple:
        hits.setdefault(parse_genus_symbol(s).components, []).append(n)
    for comps in _symbols_by_order(frontier.order_bound_large, frontier.n_max + 2):
        if levels is not None and prod(c.p for c in comps) not in levels:
            continue
        K = tail_weight(comps)
        # largest admissible n beyond n_max is n_max + 2 at least; admissible n
        # have fixed residue mod 8, so every k > k_max is covered iff K < k_max + 1
        covered = K < k_max + 1
        entry = {
            "discriminant": " ".join(str(c) for c in comps) or "trivial",
            "simple_n": sorted(n for n in hits.get(comps, []) if n >= 8),
            "tail_weight": str(K),
            "tail_certified": covered,
        }
        if not covered:
            notes.append(f"tail bound {float(K):.2f} exceeds k = {k_max + 1} for {entry['discriminant']}")
        cert.append(entry)
    return cert, notes


def classify_simple(frontier: SearchFrontier = SearchFrontier(), threads: int = 1, levels=None) -> ClassificationResult:
    """All simple lattices inside the frontier, with the n > n_max certificate."""
    t0 = time.perf_counter()
    levels = set(levels) if levels is not None else None
    jobs = [(frontier, n, levels) for n in frontier.dims()]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(_classify_dim, jobs))
    else:
        results = [_classify_dim(j) for j in jobs]
    simple = sorted((h for _, _, hs in results for h in hs), key=lambda h: (h[0], h[2], h[1]))
    examined = {n: c for n, c, _ in sorted(results)}
    cert, notes = _certificate(frontier, simple, levels)
    return ClassificationResult(simple, examined, cert, asdict(frontier), time.perf_counter() - t0, notes)
