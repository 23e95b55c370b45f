import copy
import itertools
import random

import pytest

from monodromy.curves import default_catalog
from monodromy.f2lin import HomologyClass, is_basis, transvection_map
from monodromy.humphries import build_graph, check_preserves_chi
from monodromy.distinguish import (
    DISTINCT,
    INCONCLUSIVE,
    CertificateFormatError,
    ParityVector,
    distinguish,
    family_report,
    find_witness,
    membership_pattern,
    parity_basis,
    parity_graph,
    recheck,
    representatives,
    solve_parity_conditions,
    subordinate,
    word_verdict,
)
from monodromy.words import eta, random_hurwitz_sequence, surgery_word

PARITIES = [(0, 0), (1, 0), (0, 1), (1, 1)]


def test_parity_vector():
    pv = ParityVector.from_params([(3, -2), (0, 1)])
    assert pv.bits == (1, 0, 0, 1)
    assert pv.index == 1 + 8
    assert pv.block(2) == (0, 1)
    with pytest.raises(ValueError):
        ParityVector((1, 0, 1))


def test_parity_basis_examples():
    assert [x for x, _ in parity_basis((1, 0))] == ["B1", "B2", "B3", "B4", "b3", "a3", "e1", "e2", "f1", "f2"]
    basis = parity_basis((1, 0, 0, 0))
    labels = [x for x, _ in basis]
    assert len(basis) == 18
    assert labels[10:] == ["e1", "e2", "f1", "f2", "a3", "a4", "b3", "b4"]
    with pytest.raises(ValueError):
        parity_basis((1, 0), default_catalog(2))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_every_parity_basis_is_a_basis_with_cd_excluded(n):
    cat = default_catalog(n)
    for idx in range(4**n):
        parity = [(idx >> k) & 1 for k in range(2 * n)]
        basis = parity_basis(parity, cat)
        assert is_basis([c for _, c in basis])
        g = build_graph(basis)
        for j in range(1, n + 1):
            assert g.chi(cat[f"c{2 * j}"]) == 0
            assert g.chi(cat[f"d{2 * j - 1}"]) == 0


def test_subordinate_examples():
    word = surgery_word([(1, 0)])
    table, ok = subordinate(word, parity_basis((1, 0)))
    assert ok and all(chi == 1 for _, chi in table) and len(table) == 40
    _, ok = subordinate(word, parity_basis((0, 0)))
    assert not ok
    sq = eta(2) + eta(2)
    for parity in PARITIES:
        assert subordinate(sq, parity_graph(parity))[1]


def expected_witness(left, right):
    diff = ((left[0] - right[0]) % 2, (left[1] - right[1]) % 2)
    return "B2" if diff == (1, 1) else "B1"


@pytest.mark.parametrize("left,right", [(l, r) for l in PARITIES for r in PARITIES if l != r])
def test_witness_follows_parity_difference(left, right):
    w = find_witness(surgery_word([right]), parity_graph(left))
    assert w is not None
    assert w.label == f"Phi({expected_witness(left, right)})@(p={right[0]},q={right[1]})"
    assert w.position == (22 if expected_witness(left, right) == "B1" else 23)


def test_witness_examples():
    w = find_witness(surgery_word([(0, 1)]), parity_graph((1, 0)))
    assert w.label.startswith("Phi(B2)")
    w = find_witness(surgery_word([(0, 0)]), parity_graph((1, 1)))
    assert w.label.startswith("Phi(B2)")
    assert find_witness(surgery_word([(2, 0)]), parity_graph((0, 0))) is None


def test_distinguish_examples():
    assert distinguish([(1, 0)], [(0, 1)]).verdict == DISTINCT
    cert = distinguish([(2, 0)], [(0, 0)])
    assert cert.verdict == INCONCLUSIVE and cert.witness is None
    cert = distinguish([(1, 0), (0, 0)], [(0, 0), (0, 0)])
    assert cert.verdict == DISTINCT
    assert cert.witness["label"].split("@")[0] in {"Phi(B1)", "Phi(B2)", "Phi(B3)", "Phi(B4)"}
    with pytest.raises(ValueError):
        distinguish([(1, 0)], [(0, 0), (0, 0)])


def test_family_examples():
    rep = family_report([0])
    assert len(rep.representatives) == 2 and len(rep.pairs) == 1 and rep.ok
    rep = family_report([3, -2])
    assert rep.representatives == representatives([3, -2])
    assert len(rep.pairs) == 6 and rep.distinct_count == 4 and rep.ok


def test_family_n3():
    rep = family_report([1, 1, 1])
    assert len(rep.representatives) == 8 and len(rep.pairs) == 28
    assert rep.ok and rep.distinct_count == 8
    for _, _, cert in rep.pairs:
        assert recheck(cert.data) == []


def test_family_report_is_deterministic():
    assert family_report([2, 5]).to_dict() == family_report([2, 5]).to_dict()


@pytest.mark.parametrize("left,right", [(l, r) for l in PARITIES for r in PARITIES if l < r])
def test_certificates_are_sound(left, right):
    for a, b in ((left, right), (right, left)):
        cert = distinguish([a], [b])
        assert cert.verdict == DISTINCT
        assert recheck(cert.data) == []
        data = cert.data
        genus = data["genus"]
        graph = build_graph([HomologyClass.parse(x["class"], genus) for x in data["basis"]])
        w = HomologyClass.parse(data["witness"]["class"], genus)
        result = check_preserves_chi(graph, transvection_map(w))
        assert not result.preserved


def test_verdict_stable_under_hurwitz_moves_and_even_shifts():
    rng = random.Random(17)
    for left, right in itertools.permutations(PARITIES, 2):
        basis = parity_graph(left)
        lw = random_hurwitz_sequence(surgery_word([left]), 30, rng)
        rw = random_hurwitz_sequence(surgery_word([right]), 30, rng)
        assert word_verdict(lw, rw, basis) == DISTINCT
        shifted = (right[0] + 4, right[1] - 2)
        assert distinguish([left], [shifted]).verdict == DISTINCT
    same = parity_graph((1, 1))
    lw = random_hurwitz_sequence(surgery_word([(1, 1)]), 30, rng)
    rw = random_hurwitz_sequence(surgery_word([(3, -1)]), 30, rng)
    assert word_verdict(lw, rw, same) == INCONCLUSIVE


# --- recheck under corruption -------------------------------------------------------------


@pytest.fixture(scope="module")
def cert_data():
    return distinguish([(1, 0)], [(0, 1)]).data


def _flip(bitstring: str, k: int) -> str:
    head, body = bitstring.split(":")
    bits = list(body)
    bits[k] = "1" if bits[k] == "0" else "0"
    return head + ":" + "".join(bits)


def test_recheck_detects_flipped_chi(cert_data):
    bad = copy.deepcopy(cert_data)
    bad["left_letters"][5]["chi"] ^= 1
    assert recheck(bad)


def test_recheck_detects_zeroed_witness(cert_data):
    bad = copy.deepcopy(cert_data)
    bad["witness"]["class"] = "g5:" + "0" * 10
    failures = recheck(bad)
    assert any("zero" in f for f in failures)


def test_recheck_detects_basis_bit_flip(cert_data):
    bad = copy.deepcopy(cert_data)
    bad["basis"][0]["class"] = _flip(bad["basis"][0]["class"], 1)
    assert recheck(bad)


def test_recheck_detects_edge_toggle(cert_data):
    bad = copy.deepcopy(cert_data)
    bad["edges"] = bad["edges"][1:]
    assert any(f.startswith("edges") for f in recheck(bad))


def test_recheck_detects_letter_tampering(cert_data):
    bad = copy.deepcopy(cert_data)
    bad["left_letters"][30]["class"] = _flip(bad["left_letters"][30]["class"], 0)
    assert recheck(bad)


def test_recheck_rejects_malformed(cert_data):
    bad = copy.deepcopy(cert_data)
    del bad["basis"]
    with pytest.raises(CertificateFormatError):
        recheck(bad)
    bad = copy.deepcopy(cert_data)
    bad["witness"]["class"] = "nonsense"
    with pytest.raises(CertificateFormatError):
        recheck(bad)


# --- parity conditions ----------------------------------------------------------------------


# chi of (a1, a2, b1, b2) in the four bases
TABLE = {(0, 0): (1, 1, 1, 1), (1, 0): (0, 0, 0, 0), (0, 1): (0, 0, 1, 1), (1, 1): (1, 1, 0, 0)}


@pytest.mark.parametrize("parity", PARITIES)
def test_membership_table(parity):
    m = membership_pattern(parity)
    assert (m["a1"], m["a2"], m["b1"], m["b2"]) == TABLE[parity]


def _conditions_hold(chi, ep, eq):
    """Each listed set must contain an even number of chi = 0 classes; c2, d1 count as chi = 0."""

    def zeros(labels, cd):
        return sum(1 - chi[x] for x in labels) + cd

    return (
        zeros(["b1", "b2", "a1", "a2"], 0) % 2 == 0
        and zeros(["b1", "b2", "a2"], ep + eq) % 2 == 0
        and zeros(["b2", "a1", "a2"], ep) % 2 == 0
        and zeros(["b2"], ep) % 2 == 0
        and zeros(["a2"], ep + eq) % 2 == 0
    )


@pytest.mark.parametrize("parity", PARITIES)
def test_parity_conditions_unique_by_exhaustive_search(parity):
    solutions = []
    for values in itertools.product((0, 1), repeat=4):
        chi = dict(zip(("a1", "a2", "b1", "b2"), values))
        if _conditions_hold(chi, *parity):
            solutions.append(chi)
    assert len(solutions) == 1
    sol = solve_parity_conditions(parity)
    assert sol.status == "unique" and sol.values == solutions[0]
    assert sol.values == membership_pattern(parity)


def test_parity_conditions_unique_n2():
    cat = default_catalog(2)
    for idx in range(16):
        parity = [(idx >> k) & 1 for k in range(4)]
        sol = solve_parity_conditions(parity)
        assert sol.status == "unique"
        assert sol.values == membership_pattern(parity, cat)
