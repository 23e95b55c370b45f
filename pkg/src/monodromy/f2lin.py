"""Linear and bilinear algebra over GF(2) for surface homology.

Classes in H_1(Sigma_N; Z/2) are stored as Python ints used as bitsets.
Coordinate ``2*(i-1)`` holds the ``a_i`` coefficient and ``2*(i-1)+1``
the ``b_i`` coefficient, so the fixed ordered basis is
``(a_1, b_1, a_2, b_2, ..., a_N, b_N)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

MAX_GENUS = 64

_EVEN_MASK = sum(1 << (2 * k) for k in range(2 * MAX_GENUS))


class GenusMismatch(ValueError):
    pass


def _check_genus(genus: int) -> None:
    if not isinstance(genus, int) or genus < 1:
        raise ValueError(f"genus must be a positive integer, got {genus!r}")
    if genus > MAX_GENUS:
        raise ValueError(f"genus {genus} exceeds supported maximum {MAX_GENUS}")


def _swap_ab(bits: int) -> int:
    """Exchange every (a_i, b_i) coordinate pair."""
    return ((bits & _EVEN_MASK) << 1) | ((bits >> 1) & _EVEN_MASK)


def bit_index(kind: str, i: int) -> int:
    if kind == "a":
        return 2 * (i - 1)
    if kind == "b":
        return 2 * (i - 1) + 1
    raise ValueError(f"unknown basis letter {kind!r}")


_TERM = re.compile(r"^([ab])(\d+)$")


@dataclass(frozen=True, order=False)
class HomologyClass:
    """A mod-2 homology class on the closed surface of genus ``genus``."""

    genus: int
    bits: int = 0

    def __post_init__(self) -> None:
        _check_genus(self.genus)
        if self.bits < 0 or self.bits >> (2 * self.genus):
            raise ValueError(f"bits {self.bits:#x} do not fit genus {self.genus}")

    @classmethod
    def zero(cls, genus: int) -> "HomologyClass":
        return cls(genus, 0)

    @classmethod
    def a(cls, i: int, genus: int) -> "HomologyClass":
        if not 1 <= i <= genus:
            raise ValueError(f"a_{i} does not exist on genus {genus}")
        return cls(genus, 1 << bit_index("a", i))

    @classmethod
    def b(cls, i: int, genus: int) -> "HomologyClass":
        if not 1 <= i <= genus:
            raise ValueError(f"b_{i} does not exist on genus {genus}")
        return cls(genus, 1 << bit_index("b", i))

    @classmethod
    def unit(cls, k: int, genus: int) -> "HomologyClass":
        """The k-th vector (0-based) of the ordered standard basis."""
        return cls(genus, 1 << k)

    @classmethod
    def from_coords(cls, coords: Sequence[int], genus: Optional[int] = None) -> "HomologyClass":
        if genus is None:
            if len(coords) % 2:
                raise ValueError("coordinate vector must have even length")
            genus = len(coords) // 2
        if len(coords) != 2 * genus:
            raise ValueError(f"expected {2 * genus} coordinates, got {len(coords)}")
        bits = 0
        for k, c in enumerate(coords):
            if c not in (0, 1):
                raise ValueError(f"coordinate {c!r} is not a bit")
            bits |= c << k
        return cls(genus, bits)

    @classmethod
    def parse(cls, text: str, genus: Optional[int] = None) -> "HomologyClass":
        """Parse ``g5:0101000000`` or ``a1+b2@5`` (``@N`` optional if genus given)."""
        text = text.strip()
        if text.startswith("g") and ":" in text:
            head, body = text[1:].split(":", 1)
            g = int(head)
            if genus is not None and genus != g:
                raise GenusMismatch(f"class {text!r} has genus {g}, expected {genus}")
            if len(body) != 2 * g or set(body) - {"0", "1"}:
                raise ValueError(f"malformed bit string in {text!r}")
            return cls.from_coords([int(ch) for ch in body], g)
        body = text
        if "@" in text:
            body, tail = text.rsplit("@", 1)
            g = int(tail)
            if genus is not None and genus != g:
                raise GenusMismatch(f"class {text!r} has genus {g}, expected {genus}")
            genus = g
        if genus is None:
            raise ValueError(f"no genus given for {text!r}")
        bits = 0
        body = body.replace(" ", "")
        if body not in ("", "0"):
            for term in body.split("+"):
                m = _TERM.match(term)
                if not m:
                    raise ValueError(f"cannot parse term {term!r} in {text!r}")
                i = int(m.group(2))
                if not 1 <= i <= genus:
                    raise ValueError(f"{term} does not exist on genus {genus}")
                bits ^= 1 << bit_index(m.group(1), i)
        return cls(genus, bits)

    @property
    def dim(self) -> int:
        return 2 * self.genus

    @property
    def coords(self) -> Tuple[int, ...]:
        return tuple((self.bits >> k) & 1 for k in range(self.dim))

    def is_zero(self) -> bool:
        return self.bits == 0

    def support(self) -> List[int]:
        return [k for k in range(self.dim) if (self.bits >> k) & 1]

    def restrict(self, indices: Iterable[int]) -> Tuple[int, ...]:
        return tuple((self.bits >> k) & 1 for k in indices)

    def bitstring(self) -> str:
        return f"g{self.genus}:" + "".join(str(c) for c in self.coords)

    def labeled(self) -> str:
        terms = []
        for k in self.support():
            terms.append(("a" if k % 2 == 0 else "b") + str(k // 2 + 1))
        return ("+".join(terms) or "0") + f"@{self.genus}"

    def __add__(self, other: "HomologyClass") -> "HomologyClass":
        if not isinstance(other, HomologyClass):
            return NotImplemented
        if other.genus != self.genus:
            raise GenusMismatch(f"genus {self.genus} vs {other.genus}")
        return HomologyClass(self.genus, self.bits ^ other.bits)

    __sub__ = __add__
    __xor__ = __add__

    def __bool__(self) -> bool:
        return self.bits != 0

    def __str__(self) -> str:
        return self.bitstring()

    def __repr__(self) -> str:
        return f"HomologyClass({self.labeled()!r})"


def _same_genus(*classes: HomologyClass) -> int:
    genus = classes[0].genus
    for c in classes[1:]:
        if c.genus != genus:
            raise GenusMismatch(f"genus {genus} vs {c.genus}")
    return genus


def pairing_bits(u: int, v: int) -> int:
    return (u & _swap_ab(v)).bit_count() & 1


def pairing(u: HomologyClass, v: HomologyClass) -> int:
    """Mod-2 intersection number ``sum_i (u.a_i v.b_i + u.b_i v.a_i)``."""
    _same_genus(u, v)
    return pairing_bits(u.bits, v.bits)


def transvect(c: HomologyClass, x: HomologyClass) -> HomologyClass:
    """Action of the Dehn twist along ``c`` on H_1 with Z/2 coefficients."""
    _same_genus(c, x)
    if pairing_bits(x.bits, c.bits):
        return HomologyClass(x.genus, x.bits ^ c.bits)
    return x


class SymplecticMap:
    """A linear map of H_1(Sigma_N; Z/2) preserving the intersection pairing.

    ``columns[k]`` is the image of the k-th standard basis vector.
    """

    __slots__ = ("genus", "columns", "_hash")

    def __init__(self, genus: int, columns: Sequence[int], check: bool = True):
        _check_genus(genus)
        columns = tuple(int(c) for c in columns)
        if len(columns) != 2 * genus:
            raise ValueError(f"expected {2 * genus} columns, got {len(columns)}")
        for col in columns:
            if col < 0 or col >> (2 * genus):
                raise ValueError("column does not fit the genus")
        self.genus = genus
        self.columns = columns
        self._hash = None
        if check and not self._preserves_pairing():
            raise ValueError("matrix does not preserve the intersection pairing")

    def _preserves_pairing(self) -> bool:
        cols = self.columns
        dim = len(cols)
        for i in range(dim):
            for j in range(i + 1, dim):
                expected = 1 if (i // 2 == j // 2) else 0
                if pairing_bits(cols[i], cols[j]) != expected:
                    return False
        return rank_bits(cols, dim) == dim

    @classmethod
    def identity(cls, genus: int) -> "SymplecticMap":
        return cls(genus, [1 << k for k in range(2 * genus)], check=False)

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence[int]]) -> "SymplecticMap":
        """Build from a row-major 0/1 matrix acting on coordinate columns."""
        dim = len(matrix)
        if dim % 2 or any(len(row) != dim for row in matrix):
            raise ValueError("matrix must be square of even size")
        columns = []
        for k in range(dim):
            col = 0
            for r in range(dim):
                if matrix[r][k] & 1:
                    col |= 1 << r
            columns.append(col)
        return cls(dim // 2, columns)

    @property
    def dim(self) -> int:
        return 2 * self.genus

    def matrix(self) -> List[List[int]]:
        dim = self.dim
        return [[(self.columns[k] >> r) & 1 for k in range(dim)] for r in range(dim)]

    def apply_bits(self, bits: int) -> int:
        out = 0
        k = 0
        while bits:
            if bits & 1:
                out ^= self.columns[k]
            bits >>= 1
            k += 1
        return out

    def __call__(self, x: HomologyClass) -> HomologyClass:
        if x.genus != self.genus:
            raise GenusMismatch(f"map genus {self.genus} vs class genus {x.genus}")
        return HomologyClass(self.genus, self.apply_bits(x.bits))

    def __matmul__(self, other: "SymplecticMap") -> "SymplecticMap":
        return compose(self, other)

    def inverse(self) -> "SymplecticMap":
        # For a symplectic M, the k-th coordinate of M^-1 x is <x, M e_k'> with e_k' dual to e_k.
        dim = self.dim
        cols = [0] * dim
        for k in range(dim):
            dual_img = self.columns[k ^ 1]
            for r in range(dim):
                if pairing_bits(1 << r, dual_img):
                    cols[r] |= 1 << k
        return SymplecticMap(self.genus, cols, check=False)

    def is_identity(self) -> bool:
        return all(col == 1 << k for k, col in enumerate(self.columns))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymplecticMap):
            return NotImplemented
        return self.genus == other.genus and self.columns == other.columns

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.genus, self.columns))
        return self._hash

    def __repr__(self) -> str:
        return f"SymplecticMap(genus={self.genus}, columns={[hex(c) for c in self.columns]})"


def is_symplectic(f: SymplecticMap) -> bool:
    return f._preserves_pairing()


def transvection_map(c: HomologyClass) -> SymplecticMap:
    cols = []
    for k in range(c.dim):
        e = 1 << k
        cols.append(e ^ c.bits if pairing_bits(e, c.bits) else e)
    return SymplecticMap(c.genus, cols, check=False)


def compose(f: SymplecticMap, g: SymplecticMap) -> SymplecticMap:
    """``f o g``: apply ``g`` first."""
    if f.genus != g.genus:
        raise GenusMismatch(f"genus {f.genus} vs {g.genus}")
    return SymplecticMap(f.genus, [f.apply_bits(col) for col in g.columns], check=False)


def compose_all(maps: Sequence[SymplecticMap], genus: int) -> SymplecticMap:
    """Compose maps given in application order (first element applied first)."""
    out = SymplecticMap.identity(genus)
    for m in maps:
        out = compose(m, out)
    return out


def rank_bits(rows: Iterable[int], ncols: Optional[int] = None) -> int:
    """Rank over GF(2) of bitset rows (xor basis insertion)."""
    basis: dict = {}
    for row in rows:
        v = row
        while v:
            top = v.bit_length() - 1
            if top in basis:
                v ^= basis[top]
            else:
                basis[top] = v
                break
    return len(basis)


def rank(classes: Sequence[HomologyClass]) -> int:
    if not classes:
        return 0
    _same_genus(*classes)
    return rank_bits(c.bits for c in classes)


def is_basis(classes: Sequence[HomologyClass]) -> bool:
    if not classes:
        return False
    genus = _same_genus(*classes)
    return len(classes) == 2 * genus and rank(classes) == 2 * genus


def coordinate_matrix(basis: Sequence[HomologyClass]) -> List[int]:
    """Columns of the map sending a standard-coordinate vector to its basis coordinates.

    Raises ValueError when ``basis`` is not a basis.
    """
    if not is_basis(basis):
        raise ValueError("classes do not form a basis")
    dim = len(basis)
    # Gauss-Jordan on [basis columns | I], tracked row-wise as (value, combination).
    rows = [(c.bits, 1 << i) for i, c in enumerate(basis)]
    pivots: dict = {}
    for v, comb in rows:
        for bit, (pv, pc) in pivots.items():
            if (v >> bit) & 1:
                v ^= pv
                comb ^= pc
        if not v:
            raise ValueError("classes do not form a basis")
        bit = (v & -v).bit_length() - 1
        for b2, (pv, pc) in list(pivots.items()):
            if (pv >> bit) & 1:
                pivots[b2] = (pv ^ v, pc ^ comb)
        pivots[bit] = (v, comb)
    # Now pivots[k] = (e_k, combination of basis vectors summing to e_k).
    return [pivots[k][1] for k in range(dim)]


def express_in_basis(v: HomologyClass, basis: Sequence[HomologyClass]) -> Tuple[int, ...]:
    cols = coordinate_matrix(basis)
    bits = 0
    for k in range(v.dim):
        if (v.bits >> k) & 1:
            bits ^= cols[k]
    return tuple((bits >> i) & 1 for i in range(len(basis)))


# --- affine systems -------------------------------------------------------------


@dataclass(frozen=True)
class AffineSystem:
    """Equations ``row . x = target`` over GF(2) in ``dim`` unknowns.

    Bit ``k`` of a row (or of a solution) is the coefficient of ``x_{k+1}``.
    """

    dim: int
    rows: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        if self.dim < 0:
            raise ValueError("negative dimension")
        for row, target in self.rows:
            if row < 0 or row >> self.dim or target not in (0, 1):
                raise ValueError(f"malformed equation {(row, target)!r}")

    @classmethod
    def from_lists(cls, dim: int, equations: Sequence[Tuple[Sequence[int], int]]) -> "AffineSystem":
        rows = []
        for coeffs, target in equations:
            if len(coeffs) != dim:
                raise ValueError("coefficient row has wrong length")
            rows.append((sum((c & 1) << k for k, c in enumerate(coeffs)), target & 1))
        return cls(dim, tuple(rows))

    def satisfied_by(self, x: int) -> bool:
        return all((row & x).bit_count() & 1 == t for row, t in self.rows)


@dataclass(frozen=True)
class AffineSolution:
    dim: int
    least: Optional[int]
    kernel: Tuple[int, ...]

    @property
    def status(self) -> str:
        if self.least is None:
            return "empty"
        return "unique" if not self.kernel else "coset"

    @property
    def free_dim(self) -> int:
        return len(self.kernel) if self.least is not None else -1

    def least_coords(self) -> Optional[Tuple[int, ...]]:
        if self.least is None:
            return None
        return tuple((self.least >> k) & 1 for k in range(self.dim))

    def elements(self) -> Iterator[int]:
        if self.least is None:
            return
        for mask in range(1 << len(self.kernel)):
            x = self.least
            for k, vec in enumerate(self.kernel):
                if (mask >> k) & 1:
                    x ^= vec
            yield x


def _lowest_bit(v: int) -> int:
    return (v & -v).bit_length() - 1


def solve_affine(system: AffineSystem) -> AffineSolution:
    """Complete solution set of an affine GF(2) system.

    The returned ``least`` is lexicographically least with ``x_1`` most
    significant; ``kernel`` is the fully reduced basis of the homogeneous
    solutions (pivot = lowest coordinate).
    """
    dim = system.dim
    aug_bit = 1 << dim
    pivots: dict = {}
    for row, target in system.rows:
        v = row | (target << dim)
        for bit, pv in pivots.items():
            if (v >> bit) & 1:
                v ^= pv
        if v & (aug_bit - 1) == 0:
            if v:
                return AffineSolution(dim, None, ())
            continue
        bit = _lowest_bit(v)
        for b2 in list(pivots):
            if (pivots[b2] >> bit) & 1:
                pivots[b2] ^= v
        pivots[bit] = v
    free = [k for k in range(dim) if k not in pivots]
    particular = 0
    for bit, pv in pivots.items():
        if pv >> dim:
            particular |= 1 << bit
    kernel = []
    for f in free:
        vec = 1 << f
        for bit, pv in pivots.items():
            if (pv >> f) & 1:
                vec |= 1 << bit
        kernel.append(vec)
    # Reduce kernel so each vector's lowest coordinate is unique to it.
    reduced: List[int] = []
    for vec in kernel:
        for r in reduced:
            if (vec >> _lowest_bit(r)) & 1:
                vec ^= r
        if vec:
            low = _lowest_bit(vec)
            reduced = [r ^ vec if (r >> low) & 1 else r for r in reduced]
            reduced.append(vec)
    reduced.sort(key=_lowest_bit)
    least = particular
    for vec in reduced:
        if (least >> _lowest_bit(vec)) & 1:
            least ^= vec
    return AffineSolution(dim, least, tuple(reduced))


# --- vectorized helpers ------------------------------------------------------------


def all_classes_array(genus: int) -> np.ndarray:
    return np.arange(1 << (2 * genus), dtype=np.uint64)


def apply_columns_array(columns: Sequence[int], values: np.ndarray) -> np.ndarray:
    out = np.zeros_like(values, dtype=np.uint64)
    for k, col in enumerate(columns):
        sel = ((values >> np.uint64(k)) & np.uint64(1)).astype(bool)
        out[sel] ^= np.uint64(col)
    return out


def swap_ab_array(values: np.ndarray, genus: int) -> np.ndarray:
    mask = np.uint64(_EVEN_MASK & ((1 << (2 * genus)) - 1))
    return ((values & mask) << np.uint64(1)) | ((values >> np.uint64(1)) & mask)


def pairing_array(values: np.ndarray, c: int, genus: int) -> np.ndarray:
    """Pairing of each entry of ``values`` with the fixed class bitset ``c``."""
    swapped = np.uint64(_swap_ab(c))
    return (np.bitwise_count(values & swapped) & np.uint8(1)).astype(np.uint8)


def transvect_array(c: int, values: np.ndarray, genus: int) -> np.ndarray:
    hit = pairing_array(values, c, genus).astype(bool)
    out = values.copy()
    out[hit] ^= np.uint64(c)
    return out
