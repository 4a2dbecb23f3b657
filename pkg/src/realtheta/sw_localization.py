"""Truncated mod-2 characteristic class algebra and localization at a fixed locus.

Polynomials live in ``Z_2[g_1, ..., g_m]`` with graded generators and are
truncated above a fixed total degree.  A polynomial is a frozenset of
exponent tuples, so addition is symmetric difference.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

__all__ = [
    "GradedRing",
    "GradedZ2Poly",
    "binom_mod2",
    "inverse_total_class",
    "tensor_line_expansion",
    "LocalizationInput",
    "localize",
    "codim_one_formula",
    "pair_on_circles",
    "codim_one_parity_check",
]

DEFAULT_TRUNCATION = 8


def binom_mod2(m: int, j: int) -> int:
    """``C(m, j) mod 2`` by Lucas: odd iff the bits of ``j`` are a subset of those of ``m``."""
    if j < 0 or m < 0 or j > m:
        return 0
    return 1 if (m & j) == j else 0


@dataclass(frozen=True)
class GradedRing:
    names: tuple
    degrees: tuple
    truncation: int = DEFAULT_TRUNCATION

    def __post_init__(self):
        if len(self.names) != len(self.degrees) or len(set(self.names)) != len(self.names):
            raise ValueError("need distinct generator names with one degree each")
        if any(d <= 0 for d in self.degrees):
            raise ValueError("generator degrees must be positive")

    @classmethod
    def build(cls, gens: Mapping[str, int], truncation: int = DEFAULT_TRUNCATION) -> "GradedRing":
        return cls(tuple(gens), tuple(gens.values()), truncation)

    def degree(self, mono: tuple) -> int:
        return sum(e * d for e, d in zip(mono, self.degrees))

    def index(self, name: str) -> int:
        return self.names.index(name)

    @property
    def one(self) -> "GradedZ2Poly":
        return GradedZ2Poly(self, frozenset({(0,) * len(self.names)}))

    @property
    def zero(self) -> "GradedZ2Poly":
        return GradedZ2Poly(self, frozenset())

    def gen(self, name: str) -> "GradedZ2Poly":
        e = [0] * len(self.names)
        e[self.index(name)] = 1
        return GradedZ2Poly(self, frozenset({tuple(e)})).truncate()

    def total(self, names: Sequence[str]) -> "GradedZ2Poly":
        """``1 + sum of the named generators``."""
        out = self.one
        for n in names:
            out = out + self.gen(n)
        return out


@dataclass(frozen=True)
class GradedZ2Poly:
    ring: GradedRing
    terms: frozenset = field(default_factory=frozenset)

    def truncate(self, N: Optional[int] = None) -> "GradedZ2Poly":
        N = self.ring.truncation if N is None else N
        return GradedZ2Poly(self.ring, frozenset(m for m in self.terms if self.ring.degree(m) <= N))

    def _check(self, other: "GradedZ2Poly"):
        if other.ring != self.ring:
            raise ValueError("polynomials live in different rings")

    def __add__(self, other: "GradedZ2Poly") -> "GradedZ2Poly":
        self._check(other)
        return GradedZ2Poly(self.ring, self.terms ^ other.terms)

    __sub__ = __add__

    def __mul__(self, other) -> "GradedZ2Poly":
        if isinstance(other, int):
            return self if other % 2 else self.ring.zero
        self._check(other)
        N = self.ring.truncation
        acc: set = set()
        for a in self.terms:
            da = self.ring.degree(a)
            for b in other.terms:
                if da + self.ring.degree(b) > N:
                    continue
                m = tuple(x + y for x, y in zip(a, b))
                acc ^= {m}
        return GradedZ2Poly(self.ring, frozenset(acc))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "GradedZ2Poly":
        out = self.ring.one
        for _ in range(k):
            out = out * self
        return out

    def homogeneous(self, deg: int) -> "GradedZ2Poly":
        return GradedZ2Poly(self.ring, frozenset(m for m in self.terms if self.ring.degree(m) == deg))

    def constant(self) -> int:
        return 1 if (0,) * len(self.ring.names) in self.terms else 0

    def is_zero(self) -> bool:
        return not self.terms

    def max_degree(self) -> int:
        return max((self.ring.degree(m) for m in self.terms), default=-1)

    def split_power(self, name: str) -> dict:
        """``{j: c_j}`` with ``self = sum_j c_j * name^j`` and ``c_j`` free of ``name``."""
        i = self.ring.index(name)
        out: dict = {}
        for m in self.terms:
            j = m[i]
            rest = m[:i] + (0,) + m[i + 1:]
            out.setdefault(j, set()).symmetric_difference_update({rest})
        return {j: GradedZ2Poly(self.ring, frozenset(v)) for j, v in sorted(out.items()) if v}

    def monomials(self) -> list:
        return sorted(self.terms, key=lambda m: (self.ring.degree(m), m))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in self.monomials():
            factors = []
            for name, e in zip(self.ring.names, m):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            parts.append("*".join(factors) or "1")
        return " + ".join(parts)


def inverse_total_class(w: GradedZ2Poly) -> GradedZ2Poly:
    """``w^{-1}`` up to truncation; in characteristic 2 it is ``sum_k (w - 1)^k``."""
    if w.constant() != 1:
        raise ValueError("total class must have constant term 1")
    x = w + w.ring.one
    out = w.ring.one
    power = w.ring.one
    for _ in range(w.ring.truncation):
        power = power * x
        if power.is_zero():
            break
        out = out + power
    return out


def tensor_line_expansion(r: int, w_F: GradedZ2Poly, x: str) -> GradedZ2Poly:
    """Total class of ``F (x) chi`` for ``F`` of rank ``r`` and ``w_1(chi) = x``.

    Degree ``i`` part: ``sum_j C(r - j, i - j) w_j(F) x^{i - j}``, where
    ``w_j(F)`` is the degree-``j`` part of ``w_F``.
    """
    ring = w_F.ring
    xg = ring.gen(x)
    if ring.degrees[ring.index(x)] != 1:
        raise ValueError("line class must have degree 1")
    N = ring.truncation
    parts = [w_F.homogeneous(j) for j in range(N + 1)]
    out = ring.zero
    for i in range(N + 1):
        for j in range(i + 1):
            # C(m, 0) = 1 for every m, so w_i(F) itself always appears
            if i == j or binom_mod2(r - j, i - j):
                out = out + parts[j] * xg ** (i - j)
    return out.truncate()


@dataclass(frozen=True)
class LocalizationInput:
    """Data at the fixed locus ``X^iota`` of codimension ``k`` in ``X^n``.

    ``monomial`` maps ``i`` to the exponent of ``w_{2i}`` in the Stiefel-Whitney
    monomial of the underlying real bundle of a rank-``r`` complex bundle.
    """

    n: int
    k: int
    r: int
    w_E_fix: GradedZ2Poly
    w_N: GradedZ2Poly
    monomial: Mapping[int, int]
    x: str = "x"

    def __post_init__(self):
        if self.n % 2:
            raise ValueError("ambient dimension must be even")
        deg = sum(2 * i * e for i, e in self.monomial.items())
        if deg != self.n:
            raise ValueError(f"monomial has degree {deg}, expected {self.n}")
        if not 0 <= self.k <= self.n:
            raise ValueError("codimension out of range")
        if self.w_N.max_degree() > self.k:
            raise ValueError("normal bundle class has terms above its rank")
        if self.w_E_fix.ring != self.w_N.ring:
            raise ValueError("classes live in different rings")


def localize(inp: LocalizationInput) -> GradedZ2Poly:
    """Degree ``n - k`` class on ``X^iota`` whose pairing gives the Stiefel-Whitney number.

    Expands the monomial in ``w(E) w(E (x) chi)``, collects powers of
    ``x = w_1(chi)`` and pushes forward with ``x^{k + l} -> s_l(N)`` where
    ``s = w(N)^{-1}``.
    """
    total = inp.w_E_fix * tensor_line_expansion(inp.r, inp.w_E_fix, inp.x)
    mono = total.ring.one
    for i, e in sorted(inp.monomial.items()):
        mono = mono * total.homogeneous(2 * i) ** e
    s = inverse_total_class(inp.w_N)
    out = total.ring.zero
    for j, coef in mono.split_power(inp.x).items():
        if j < inp.k:
            continue
        out = out + coef * s.homogeneous(j - inp.k)
    out = out.homogeneous(inp.n - inp.k)
    # no x may survive
    if any(m[total.ring.index(inp.x)] for m in out.terms):
        raise AssertionError("line class survived the pushforward")
    return out


def codim_one_formula(r: int, truncation: int = DEFAULT_TRUNCATION) -> tuple[GradedZ2Poly, GradedZ2Poly]:
    """``(localized w_2, w_1(E) + C(r, 2) w_1(N))`` in a common ring."""
    gens = {f"w{j}E": j for j in range(1, r + 1)}
    gens["w1N"] = 1
    gens["x"] = 1
    ring = GradedRing.build(gens, truncation)
    wE = ring.total([f"w{j}E" for j in range(1, r + 1)])
    wN = ring.total(["w1N"])
    got = localize(LocalizationInput(2, 1, r, wE, wN, {1: 1}))
    expected = ring.gen("w1E") + ring.gen("w1N") * binom_mod2(r, 2)
    return got, expected


def pair_on_circles(expr: GradedZ2Poly, values: Sequence[Mapping[str, int]]) -> int:
    """Pair a degree-1 class with the fundamental classes of a union of circles.

    ``values[i][name]`` is the pairing of a degree-1 generator with circle
    ``i``.  Products of degree-1 classes vanish on a circle.
    """
    total = 0
    for circle in values:
        for m in expr.terms:
            if expr.ring.degree(m) != 1:
                raise ValueError("only degree-1 classes pair with circles")
            name = expr.ring.names[m.index(1)]
            total += int(circle.get(name, 0))
    return total % 2


def codim_one_parity_check(c, rank: int = 1) -> bool:
    """``d mod 2`` against the localized ``w_2`` paired with the real circles.

    ``c`` is a curve class with degree ``d`` and circle values ``w``; the
    normal bundle of each real circle is trivial.
    """
    got, _ = codim_one_formula(rank)
    values = [{"w1E": wi, "w1N": 0} for wi in c.w]
    return pair_on_circles(got, values) == c.d % 2
