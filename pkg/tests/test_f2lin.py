import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monodromy.curves import default_catalog
from monodromy.f2lin import (
    AffineSystem,
    GenusMismatch,
    HomologyClass,
    SymplecticMap,
    compose,
    compose_all,
    coordinate_matrix,
    express_in_basis,
    is_basis,
    is_symplectic,
    pairing,
    pairing_array,
    rank,
    solve_affine,
    transvect,
    transvect_array,
    transvection_map,
)

A = HomologyClass.a
B = HomologyClass.b


def oracle_pairing(u: HomologyClass, v: HomologyClass) -> int:
    """Sum over handles of u.a*v.b + u.b*v.a, read off the coordinate tuples."""
    cu, cv = u.coords, v.coords
    return sum(cu[2 * i] * cv[2 * i + 1] + cu[2 * i + 1] * cv[2 * i] for i in range(u.genus)) % 2


def span_size(classes):
    """Size of the span by brute-force enumeration of all subset sums."""
    seen = set()
    for mask in range(1 << len(classes)):
        acc = 0
        for k, c in enumerate(classes):
            if (mask >> k) & 1:
                acc ^= c.bits
        seen.add(acc)
    return len(seen)


def classes(genus):
    return st.integers(0, (1 << (2 * genus)) - 1).map(lambda bits: HomologyClass(genus, bits))


genera = st.integers(1, 6)


@st.composite
def triples(draw):
    g = draw(genera)
    return draw(classes(g)), draw(classes(g)), draw(classes(g))


# --- text forms -------------------------------------------------------------------------------


def test_parse_bitstring_and_labeled_forms_agree():
    x = HomologyClass.parse("g5:0101000000")
    assert x == B(1, 5) + B(2, 5)
    assert HomologyClass.parse("b1+b2@5") == x
    assert HomologyClass.parse("a1+b2", genus=3) == A(1, 3) + B(2, 3)
    assert HomologyClass.parse("0@4").is_zero()


@given(classes(5))
def test_text_round_trip(x):
    assert HomologyClass.parse(x.bitstring()) == x
    assert HomologyClass.parse(x.labeled()) == x


def test_parse_rejects_bad_input():
    with pytest.raises(ValueError):
        HomologyClass.parse("g2:101")
    with pytest.raises(ValueError):
        HomologyClass.parse("a7@3")
    with pytest.raises(GenusMismatch):
        HomologyClass.parse("g2:1010", genus=3)


def test_genus_mismatch_on_addition_and_pairing():
    with pytest.raises(GenusMismatch):
        A(1, 2) + A(1, 3)
    with pytest.raises(GenusMismatch):
        pairing(A(1, 2), A(1, 3))


# --- pairing ------------------------------------------------------------------------------------


def test_pairing_examples():
    assert pairing(A(1, 1), B(1, 1)) == 1
    assert pairing(A(1, 2), A(2, 2)) == 0
    cat = default_catalog(1)
    assert pairing(cat["B1"], cat["B2"]) == 0


@given(triples())
def test_pairing_matches_coordinate_oracle(t):
    u, v, _ = t
    assert pairing(u, v) == oracle_pairing(u, v)


@given(triples())
def test_pairing_bilinear_alternating(t):
    u, v, w = t
    assert pairing(u + v, w) == pairing(u, w) ^ pairing(v, w)
    assert pairing(u, u) == 0
    assert pairing(u, v) == pairing(v, u)


@given(classes(5).filter(lambda x: not x.is_zero()))
def test_nondegenerate(w):
    assert any(pairing(w, HomologyClass.unit(k, 5)) for k in range(10))


# --- transvections ---------------------------------------------------------------------------


def test_transvection_examples():
    assert transvect(B(1, 1), A(1, 1)) == A(1, 1) + B(1, 1)
    assert transvect(A(1, 2), A(2, 2)) == A(2, 2)
    genus = 2
    steps = [B(1, genus), A(1, genus), B(2, genus), A(2, genus)]
    P = compose_all([transvection_map(c) for c in steps], genus)
    assert P(A(1, genus)) == B(1, genus)
    assert P(B(2, genus)) == A(2, genus) + B(2, genus)
    # same map built right-to-left with compose
    P2 = compose(
        transvection_map(A(2, genus)),
        compose(transvection_map(B(2, genus)), compose(transvection_map(A(1, genus)), transvection_map(B(1, genus)))),
    )
    assert P == P2


def test_transvection_map_matrix_forms():
    assert transvection_map(HomologyClass.zero(3)).is_identity()
    T = transvection_map(A(1, 1))
    assert T(A(1, 1)) == A(1, 1)
    assert T(B(1, 1)) == A(1, 1) + B(1, 1)
    assert T.matrix() == [[1, 1], [0, 1]]


@given(triples())
def test_transvection_properties(t):
    c, u, v = t
    assert transvect(c, transvect(c, u)) == u
    assert pairing(transvect(c, u), transvect(c, v)) == pairing(u, v)
    T = transvection_map(c)
    assert is_symplectic(T)
    assert compose(T, T).is_identity()


@settings(max_examples=50)
@given(st.lists(classes(3), min_size=1, max_size=6), st.lists(classes(3), min_size=1, max_size=6))
def test_compose_and_inverse(cs, ds):
    f = compose_all([transvection_map(c) for c in cs], 3)
    g = compose_all([transvection_map(d) for d in ds], 3)
    fg = compose(f, g)
    assert is_symplectic(fg)
    assert compose(fg, SymplecticMap.identity(3)) == fg
    assert compose(fg, fg.inverse()).is_identity()
    for k in range(6):
        e = HomologyClass.unit(k, 3)
        assert fg(e) == f(g(e))


def test_symplectic_constructor_rejects_non_symplectic():
    with pytest.raises(ValueError):
        SymplecticMap.from_matrix([[1, 0], [0, 0]])
    with pytest.raises(ValueError):
        SymplecticMap.from_matrix([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 1], [1, 0, 0, 1]])


# --- rank and bases -------------------------------------------------------------------------


def test_basis_examples():
    std = [A(i, 5) for i in range(1, 6)] + [B(i, 5) for i in range(1, 6)]
    assert is_basis(std)
    cat = default_catalog(1)
    labels = ["B1", "B2", "B3", "B4", "b3", "a3", "a1", "a2", "b1", "b2"]
    assert is_basis([cat[x] for x in labels])
    repeated = [cat[x] for x in labels[:-1]] + [cat["B1"]]
    assert not is_basis(repeated)
    assert rank([]) == 0


@settings(max_examples=80)
@given(st.lists(classes(3), max_size=8))
def test_rank_matches_span_enumeration(cs):
    assert 2 ** rank(cs) == span_size(cs)


@settings(max_examples=40)
@given(st.permutations(list(range(8))), classes(4))
def test_express_in_basis_round_trip(perm, v):
    genus = 4
    basis = [HomologyClass.unit(k, genus) for k in perm]
    # mix the basis to make it non-trivial
    basis = [basis[0]] + [basis[i] + basis[i - 1] for i in range(1, 8)]
    coords = express_in_basis(v, basis)
    acc = HomologyClass.zero(genus)
    for c, b in zip(coords, basis):
        if c:
            acc = acc + b
    assert acc == v
    assert len(coordinate_matrix(basis)) == 8


def test_coordinate_matrix_rejects_dependent_set():
    with pytest.raises(ValueError):
        coordinate_matrix([A(1, 1), A(1, 1)])


# --- affine systems -----------------------------------------------------------------------------


def test_affine_examples():
    sol = solve_affine(AffineSystem.from_lists(2, [([1, 0], 1)]))
    assert sol.status == "coset" and sol.free_dim == 1
    assert sol.least_coords() == (1, 0)
    empty = solve_affine(AffineSystem.from_lists(1, [([1], 0), ([1], 1)]))
    assert empty.status == "empty"
    assert list(empty.elements()) == []
    unique = solve_affine(AffineSystem.from_lists(2, [([1, 1], 1), ([0, 1], 1)]))
    assert unique.status == "unique" and unique.least_coords() == (0, 1)


@st.composite
def systems(draw):
    dim = draw(st.integers(0, 7))
    rows = draw(st.lists(st.tuples(st.integers(0, (1 << dim) - 1), st.integers(0, 1)), max_size=9))
    return AffineSystem(dim, tuple(rows))


def _lex_key(x: int, dim: int):
    return tuple((x >> k) & 1 for k in range(dim))


@settings(max_examples=200)
@given(systems())
def test_solve_affine_matches_brute_force(system):
    dim = system.dim
    brute = sorted((x for x in range(1 << dim) if system.satisfied_by(x)), key=lambda x: _lex_key(x, dim))
    sol = solve_affine(system)
    if not brute:
        assert sol.status == "empty"
        return
    assert sorted(sol.elements()) == sorted(brute)
    assert sol.least == brute[0]
    assert 2**sol.free_dim == len(brute)


# --- vectorized helpers --------------------------------------------------------------------


def test_vectorized_helpers_match_scalar():
    genus = 3
    values = np.arange(1 << 6, dtype=np.uint64)
    for c in (A(1, genus) + B(3, genus), B(2, genus), HomologyClass(genus, 0b101101)):
        hits = pairing_array(values, c.bits, genus)
        moved = transvect_array(c.bits, values, genus)
        for v in range(1 << 6):
            x = HomologyClass(genus, v)
            assert hits[v] == pairing(x, c)
            assert int(moved[v]) == transvect(c, x).bits


def test_all_pairs_small_genus_exhaustive():
    genus = 2
    allc = [HomologyClass(genus, b) for b in range(16)]
    for u, v in itertools.product(allc, repeat=2):
        assert pairing(u, v) == oracle_pairing(u, v)
