"""Humphries graphs and the mod-2 Euler number chi_Gamma.

For a basis gamma_1..gamma_{2N} of H_1(Sigma_N; Z/2) the graph has an edge
where the mod-2 intersection number is 1.  A class with support S in that
basis has chi = |S| + #(edges inside S) mod 2, which is the Euler
characteristic of the union of the half-edge stars of the vertices in S.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .f2lin import (
    GenusMismatch,
    HomologyClass,
    SymplecticMap,
    apply_columns_array,
    coordinate_matrix,
    is_basis,
    pairing_array,
    pairing_bits,
    swap_ab_array,
)

MEMBER_POSSIBLE = "member_possible"
EXCLUDED = "excluded"

EXHAUSTIVE_DIM = 20
DEFAULT_SAMPLES = 100_000
DEFAULT_SEED = 20150

Labeled = Tuple[str, HomologyClass]


@dataclass(frozen=True, eq=False)
class HumphriesGraph:
    labels: Tuple[str, ...]
    basis: Tuple[HomologyClass, ...]
    adjacency: Tuple[int, ...]  # row i as a bitset over vertex indices
    _coord_cols: Tuple[int, ...]

    @property
    def genus(self) -> int:
        return self.basis[0].genus

    @property
    def size(self) -> int:
        return len(self.basis)

    def edges(self) -> List[Tuple[int, int]]:
        return [
            (i, j)
            for i in range(self.size)
            for j in range(i + 1, self.size)
            if (self.adjacency[i] >> j) & 1
        ]

    def adjacent(self, i: int, j: int) -> int:
        return (self.adjacency[i] >> j) & 1

    def support_bits(self, v: HomologyClass) -> int:
        """Coordinates of ``v`` in the graph basis, as a bitset over vertices."""
        if v.genus != self.genus:
            raise GenusMismatch(f"class genus {v.genus} vs graph genus {self.genus}")
        out = 0
        bits = v.bits
        k = 0
        while bits:
            if bits & 1:
                out ^= self._coord_cols[k]
            bits >>= 1
            k += 1
        return out

    def support(self, v: HomologyClass) -> List[int]:
        s = self.support_bits(v)
        return [i for i in range(self.size) if (s >> i) & 1]

    def chi_of_support(self, s: int) -> int:
        inside = 0
        rest = s
        while rest:
            i = (rest & -rest).bit_length() - 1
            inside += (self.adjacency[i] & s).bit_count()
            rest &= rest - 1
        return (s.bit_count() + inside // 2) & 1

    def chi(self, v: HomologyClass) -> int:
        return self.chi_of_support(self.support_bits(v))

    def chi_array(self, values: np.ndarray) -> np.ndarray:
        """Vectorized chi over an array of class bitsets (genus <= 32)."""
        dim = self.size
        values = np.asarray(values, dtype=np.uint64)
        coords = np.zeros_like(values)
        for shift, table in self._byte_tables():
            coords ^= table[(values >> np.uint64(shift)) & np.uint64(0xFF)]
        total = np.bitwise_count(coords).astype(np.int64)
        inside = np.zeros(values.shape, dtype=np.int64)
        one = np.uint64(1)
        for i in range(dim):
            bit = ((coords >> np.uint64(i)) & one).astype(np.int64)
            inside += bit * np.bitwise_count(coords & np.uint64(self.adjacency[i]))
        return ((total + inside // 2) & 1).astype(np.uint8)

    def _byte_tables(self) -> List[Tuple[int, np.ndarray]]:
        """Per input byte, the coordinate image of all 256 byte values."""
        cached = self.__dict__.get("_tables")
        if cached is not None:
            return cached
        tables = []
        for shift in range(0, self.size, 8):
            cols = list(self._coord_cols[shift : shift + 8]) + [0] * 8
            table = np.zeros(256, dtype=np.uint64)
            for byte in range(1, 256):
                low = byte & -byte
                table[byte] = table[byte ^ low] ^ np.uint64(cols[low.bit_length() - 1])
            tables.append((shift, table))
        object.__setattr__(self, "_tables", tables)
        return tables

    def chi_table(self, items: Iterable[Labeled]) -> List[Tuple[str, int]]:
        return [(label, self.chi(cls)) for label, cls in items]

    def report(self, items: Optional[Iterable[Labeled]] = None) -> dict:
        out = {
            "vertices": [
                {"label": lbl, "class": cls.bitstring()} for lbl, cls in zip(self.labels, self.basis)
            ],
            "edges": [[i, j] for i, j in self.edges()],
        }
        if items is not None:
            out["chi"] = [{"label": lbl, "chi": chi} for lbl, chi in self.chi_table(items)]
        return out


def _normalize_basis(basis: Sequence[Union[HomologyClass, Labeled]]) -> Tuple[List[str], List[HomologyClass]]:
    labels, classes = [], []
    for k, item in enumerate(basis):
        if isinstance(item, HomologyClass):
            labels.append(f"v{k + 1}")
            classes.append(item)
        else:
            lbl, cls = item
            labels.append(str(lbl))
            classes.append(cls)
    return labels, classes


def build_graph(basis: Sequence[Union[HomologyClass, Labeled]]) -> HumphriesGraph:
    labels, classes = _normalize_basis(basis)
    if not classes or not is_basis(classes):
        raise ValueError("Humphries graph needs a basis of H_1(Sigma; Z/2)")
    dim = len(classes)
    adjacency = []
    for i in range(dim):
        row = 0
        for j in range(dim):
            if i != j and pairing_bits(classes[i].bits, classes[j].bits):
                row |= 1 << j
        adjacency.append(row)
    return HumphriesGraph(tuple(labels), tuple(classes), tuple(adjacency), tuple(coordinate_matrix(classes)))


def chi(graph: HumphriesGraph, v: HomologyClass) -> int:
    return graph.chi(v)


def _require_vectorizable(genus: int) -> None:
    if genus > 32:
        raise ValueError(f"vectorized checks support genus <= 32, got {genus}")


def _check_vectors(genus: int, seed: int, samples: int) -> Tuple[np.ndarray, bool]:
    _require_vectorizable(genus)
    dim = 2 * genus
    if dim <= EXHAUSTIVE_DIM:
        return np.arange(1 << dim, dtype=np.uint64), True
    units = [1 << k for k in range(dim)]
    fixed = set(units)
    for i in range(dim):
        for j in range(i + 1, dim):
            fixed.add(units[i] | units[j])
    sampled = _random_classes(np.random.default_rng(seed), dim, samples)
    vals = np.concatenate([np.array(sorted(fixed), dtype=np.uint64), sampled])
    return vals, False


@dataclass(frozen=True)
class ChiCheck:
    preserved: bool
    exhaustive: bool
    checked: int
    seed: int
    witness: Optional[HomologyClass] = None


def check_preserves_chi(
    graph: HumphriesGraph,
    f: SymplecticMap,
    seed: int = DEFAULT_SEED,
    samples: int = DEFAULT_SAMPLES,
) -> ChiCheck:
    """Test chi(f(v)) == chi(v), exhaustively when 2N <= 20."""
    if f.genus != graph.genus:
        raise GenusMismatch(f"map genus {f.genus} vs graph genus {graph.genus}")
    vals, exhaustive = _check_vectors(graph.genus, seed, samples)
    before = graph.chi_array(vals)
    after = graph.chi_array(apply_columns_array(f.columns, vals))
    bad = np.nonzero(before != after)[0]
    witness = None
    if bad.size:
        witness = HomologyClass(graph.genus, int(vals[bad[0]]))
    return ChiCheck(bad.size == 0, exhaustive, int(vals.size), seed, witness)


def preserves_chi(graph: HumphriesGraph, f: SymplecticMap, seed: int = DEFAULT_SEED) -> bool:
    return check_preserves_chi(graph, f, seed).preserved


def twist_in_group_obstruction(graph: HumphriesGraph, w: HomologyClass) -> str:
    """``excluded`` when chi(w) = 0: T_w then moves chi, so it is not generated by chi = 1 twists."""
    if w.is_zero():
        raise ValueError("zero class has no nonseparating representative")
    return MEMBER_POSSIBLE if graph.chi(w) else EXCLUDED


# --- identity checks used by the verification suite ------------------------------------


@dataclass(frozen=True)
class QuadraticCheck:
    mode: str  # "all-pairs", "all-by-generators" or "sampled"
    checked: int
    violations: int
    seed: int


def check_quadratic_refinement(
    graph: HumphriesGraph, seed: int = DEFAULT_SEED, samples: int = DEFAULT_SAMPLES
) -> QuadraticCheck:
    """Count violations of chi(u+v) = chi(u) + chi(v) + <u, v>.

    For 2N <= 10 every pair is checked.  For 2N <= 20 every u is paired with
    every standard basis vector, which implies the identity for all pairs by
    induction on the weight of v.  Beyond that, ``samples`` random pairs.
    """
    genus = graph.genus
    _require_vectorizable(genus)
    dim = 2 * genus
    if dim <= EXHAUSTIVE_DIM:
        us = np.arange(1 << dim, dtype=np.uint64)
        chi_u = graph.chi_array(us)
        if dim <= 10:
            mode = "all-pairs"
            vs_list = range(1 << dim)
            chi_v_all = chi_u
        else:
            mode = "all-by-generators"
            vs_list = [1 << k for k in range(dim)]
            chi_v_all = None
        violations = 0
        checked = 0
        for v in vs_list:
            chi_v = int(chi_v_all[v]) if chi_v_all is not None else graph.chi_of_support(
                graph.support_bits(HomologyClass(genus, v))
            )
            lhs = chi_u[us ^ np.uint64(v)] if mode == "all-pairs" else graph.chi_array(us ^ np.uint64(v))
            rhs = chi_u ^ np.uint8(chi_v) ^ pairing_array(us, v, genus)
            violations += int(np.count_nonzero(lhs != rhs))
            checked += us.size
        return QuadraticCheck(mode, checked, violations, seed)
    rng = np.random.default_rng(seed)
    us = _random_classes(rng, dim, samples)
    vs = _random_classes(rng, dim, samples)
    lhs = graph.chi_array(us ^ vs)
    pair = (np.bitwise_count(us & swap_ab_array(vs, genus)) & np.uint8(1)).astype(np.uint8)
    rhs = graph.chi_array(us) ^ graph.chi_array(vs) ^ pair
    return QuadraticCheck("sampled", samples, int(np.count_nonzero(lhs != rhs)), seed)


def check_transport_law(
    graph: HumphriesGraph,
    twists: Sequence[HomologyClass],
    seed: int = DEFAULT_SEED,
    samples: int = DEFAULT_SAMPLES,
) -> QuadraticCheck:
    """Count violations of chi(T_c v) = chi(v) + <c, v>(chi(c) + 1) for each c in ``twists``."""
    genus = graph.genus
    _require_vectorizable(genus)
    dim = 2 * genus
    if dim <= EXHAUSTIVE_DIM:
        vs = np.arange(1 << dim, dtype=np.uint64)
        mode = "exhaustive"
    else:
        vs = _random_classes(np.random.default_rng(seed), dim, samples)
        mode = "sampled"
    chi_v = graph.chi_array(vs)
    violations = 0
    for c in twists:
        hit = pairing_array(vs, c.bits, genus)
        moved = vs ^ (hit.astype(np.uint64) * np.uint64(c.bits))
        expected = chi_v ^ (hit & np.uint8(graph.chi(c) ^ 1))
        violations += int(np.count_nonzero(graph.chi_array(moved) != expected))
    return QuadraticCheck(mode, int(vs.size) * len(twists), violations, seed)


def _random_classes(rng: np.random.Generator, dim: int, count: int) -> np.ndarray:
    lo = rng.integers(0, 1 << min(dim, 32), size=count, dtype=np.uint64)
    if dim > 32:
        hi = rng.integers(0, 1 << (dim - 32), size=count, dtype=np.uint64)
        lo = lo | (hi << np.uint64(32))
    return lo


def half_edge_euler(graph: HumphriesGraph, support: Iterable[int]) -> int:
    """Euler characteristic of the union of half-edge stars, by counting cells.

    Independent of the closed form in ``chi_of_support``: vertices are the
    selected graph vertices plus one midpoint per edge touching them; each
    half edge is a 1-cell.
    """
    chosen = set(support)
    vertices = set((("v", i) for i in chosen))
    cells = 0
    for i, j in graph.edges():
        touched = [x for x in (i, j) if x in chosen]
        if touched:
            vertices.add(("m", i, j))
            cells += len(touched)
    return len(vertices) - cells
