"""Seifert matrices of the Stallings knots K_n, Alexander polynomials and related bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Sequence

IntMatrix = List[List[int]]


class LaurentPoly:
    """Integer Laurent polynomial in t, stored as exponent -> nonzero coefficient."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[int, int] = None):
        self._c: Dict[int, int] = {int(e): int(a) for e, a in (coeffs or {}).items() if a}

    @classmethod
    def const(cls, a: int) -> "LaurentPoly":
        return cls({0: a})

    @classmethod
    def monomial(cls, e: int, a: int = 1) -> "LaurentPoly":
        return cls({e: a})

    @classmethod
    def t(cls) -> "LaurentPoly":
        return cls({1: 1})

    @property
    def coeffs(self) -> Dict[int, int]:
        return dict(self._c)

    def is_zero(self) -> bool:
        return not self._c

    @property
    def min_exp(self) -> int:
        return min(self._c)

    @property
    def max_exp(self) -> int:
        return max(self._c)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        return isinstance(other, LaurentPoly) and self._c == other._c

    def __hash__(self) -> int:
        return hash(frozenset(self._c.items()))

    def _lift(self, other) -> "LaurentPoly":
        return LaurentPoly.const(other) if isinstance(other, int) else other

    def __add__(self, other) -> "LaurentPoly":
        other = self._lift(other)
        out = dict(self._c)
        for e, a in other._c.items():
            out[e] = out.get(e, 0) + a
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -a for e, a in self._c.items()})

    def __sub__(self, other) -> "LaurentPoly":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "LaurentPoly":
        return self._lift(other) - self

    def __mul__(self, other) -> "LaurentPoly":
        other = self._lift(other)
        out: Dict[int, int] = {}
        for e1, a1 in self._c.items():
            for e2, a2 in other._c.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + a1 * a2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            raise ValueError("negative powers are only defined for monomials")
        out = LaurentPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def exact_div(self, other: "LaurentPoly") -> "LaurentPoly":
        """Quotient when ``other`` divides ``self`` exactly in Z[t, t^-1]; ValueError otherwise."""
        other = self._lift(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        rem = LaurentPoly(self._c)
        quot: Dict[int, int] = {}
        lead_e, lead_a = other.max_exp, other._c[other.max_exp]
        span = other.max_exp - other.min_exp
        while not rem.is_zero():
            if rem.max_exp - rem.min_exp < span:
                raise ValueError("polynomial division is not exact")
            e = rem.max_exp
            q, r = divmod(rem._c[e], lead_a)
            if r:
                raise ValueError("polynomial division is not exact over Z")
            quot[e - lead_e] = q
            rem = rem - LaurentPoly.monomial(e - lead_e, q) * other
        return LaurentPoly(quot)

    def __call__(self, x):
        """Evaluate at ``x``; negative exponents of an integer give a Fraction."""
        if isinstance(x, int):
            x = Fraction(x)
        total = sum(a * x**e for e, a in self._c.items()) if self._c else 0
        if isinstance(total, Fraction) and total.denominator == 1:
            return int(total)
        return total

    def shift(self, k: int) -> "LaurentPoly":
        return LaurentPoly({e + k: a for e, a in self._c.items()})

    def reflect(self) -> "LaurentPoly":
        """p(t^-1)."""
        return LaurentPoly({-e: a for e, a in self._c.items()})

    def is_symmetric(self) -> bool:
        return self == self.reflect()

    def symmetrize(self) -> "LaurentPoly":
        """Multiply by +-t^k so that p(t) = p(t^-1) and p(1) = 1."""
        if self.is_zero():
            raise ValueError("cannot symmetrize the zero polynomial")
        total = self.min_exp + self.max_exp
        if total % 2:
            raise ValueError(f"{self} has odd span and no symmetric normalization")
        out = self.shift(-total // 2)
        if not out.is_symmetric():
            raise ValueError(f"{self} is not symmetric up to a unit")
        value = sum(out._c.values())
        if value not in (1, -1):
            raise ValueError(f"{self} evaluates to {value} at t=1, not a unit")
        return out * value

    def to_dict(self) -> Dict[str, int]:
        return {str(e): self._c[e] for e in sorted(self._c)}

    @classmethod
    def from_dict(cls, data: Mapping[str, int]) -> "LaurentPoly":
        return cls({int(e): int(a) for e, a in data.items()})

    def __str__(self) -> str:
        if not self._c:
            return "0"
        parts: List[str] = []
        for e in sorted(self._c):
            a = self._c[e]
            mag = abs(a)
            if e == 0:
                body = str(mag)
            else:
                var = "t" if e == 1 else f"t^{e}"
                body = var if mag == 1 else f"{mag}*{var}"
            if not parts:
                parts.append(body if a > 0 else f"-{body}")
            else:
                parts.append(f"{'+' if a > 0 else '-'} {body}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"


def _check_square(V: Sequence[Sequence[int]]) -> int:
    size = len(V)
    if any(len(row) != size for row in V):
        raise ValueError("matrix must be square")
    return size


def seifert_Kn(n: int) -> IntMatrix:
    return [
        [1, -1, 0, 0],
        [0, n + 1, -n, 0],
        [0, -n, n - 1, 0],
        [0, 0, 1, -1],
    ]


def connected_sum(mats: Sequence[Sequence[Sequence[int]]]) -> IntMatrix:
    """Block-diagonal Seifert matrix of a connected sum."""
    if not mats:
        raise ValueError("need at least one matrix")
    sizes = [_check_square(m) for m in mats]
    total = sum(sizes)
    out = [[0] * total for _ in range(total)]
    offset = 0
    for m, size in zip(mats, sizes):
        for i in range(size):
            for j in range(size):
                out[offset + i][offset + j] = int(m[i][j])
        offset += size
    return out


def knot_genus(V: Sequence[Sequence[int]]) -> int:
    size = _check_square(V)
    if size % 2:
        raise ValueError("Seifert matrix of a knot has even size")
    return size // 2


def determinant(M: List[List[LaurentPoly]]) -> LaurentPoly:
    """Fraction-free (Bareiss) determinant over Z[t, t^-1]."""
    size = len(M)
    if size == 0:
        return LaurentPoly.const(1)
    A = [list(row) for row in M]
    sign = 1
    prev = LaurentPoly.const(1)
    for k in range(size - 1):
        if A[k][k].is_zero():
            swap = next((i for i in range(k + 1, size) if not A[i][k].is_zero()), None)
            if swap is None:
                return LaurentPoly()
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]).exact_div(prev)
        prev = A[k][k]
    return A[-1][-1] * sign


def alexander(V: Sequence[Sequence[int]]) -> LaurentPoly:
    """Symmetrized det(V - t V^T) with Delta(1) = 1."""
    size = _check_square(V)
    t = LaurentPoly.t()
    M = [[LaurentPoly.const(V[i][j]) - t * V[j][i] for j in range(size)] for i in range(size)]
    det = determinant(M)
    if det.is_zero():
        raise ValueError("det(V - tV^T) vanishes; V is not a knot Seifert matrix")
    return det.symmetrize()


def alexander_for(m: Iterable[int]) -> LaurentPoly:
    return alexander(connected_sum([seifert_Kn(k) for k in m]))


def expected_alexander(summands: int) -> LaurentPoly:
    """(t^2 - t + 1)^(2 * summands), symmetrized."""
    base = LaurentPoly({2: 1, 1: -1, 0: 1})
    return (base ** (2 * summands)).symmetrize()


def second_module_presentation(n: int) -> List[List[LaurentPoly]]:
    cyc = LaurentPoly({2: 1, 1: -1, 0: 1})
    return [[cyc, LaurentPoly.monomial(1, n)], [LaurentPoly(), cyc]]


@dataclass(frozen=True)
class FibrationData:
    summands: int
    knot_genus: int
    fiber_genus: int
    critical_points: int

    def to_dict(self) -> dict:
        return {
            "summands": self.summands,
            "knot_genus": self.knot_genus,
            "fiber_genus": self.fiber_genus,
            "critical_points": self.critical_points,
        }


def fibration_data(n: int) -> FibrationData:
    if n < 1:
        raise ValueError("need at least one summand")
    return FibrationData(n, 2 * n, 4 * n + 1, 16 * n + 24)

