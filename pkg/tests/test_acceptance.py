"""Acceptance criteria 1-9, each timed and reported on one line."""

import copy
import itertools
import json
import random

from monodromy.alexinv import LaurentPoly, alexander, connected_sum, fibration_data, seifert_Kn
from monodromy.cli import main
from monodromy.curves import default_catalog
from monodromy.distinguish import (
    DISTINCT,
    distinguish,
    family_report,
    membership_pattern,
    parity_graph,
    recheck,
    word_verdict,
)
from monodromy.humphries import check_quadratic_refinement, check_transport_law
from monodromy.words import eta, group_signature, knot_monodromy, random_hurwitz_sequence, surgery_word

from oracles import closed_form

PARITIES = [(0, 0), (1, 0), (0, 1), (1, 1)]
FAMILIES = [(3, -2), (1, 1, 1)]


def cyclotomic_power(k: int) -> LaurentPoly:
    """(t^2 - t + 1)^k shifted to be symmetric, built by repeated multiplication."""
    base = LaurentPoly({-1: 1, 0: -1, 1: 1})
    out = LaurentPoly({0: 1})
    for _ in range(k):
        out = out * base
    return out


def test_criterion_1_alexander(criterion):
    with criterion(1, "Alexander polynomials of K_n and connected sums", limit=1.0):
        target = cyclotomic_power(2)
        for n in range(-10, 11):
            assert alexander(seifert_Kn(n)) == target
        rng = random.Random(1)
        for length in range(1, 5):
            m = [rng.randint(-10, 10) for _ in range(length)]
            assert alexander(connected_sum([seifert_Kn(k) for k in m])) == cyclotomic_power(2 * length)


def test_criterion_2_eta_identity(criterion):
    with criterion(2, "eta(g)^2 acts trivially for g in {2,4,6}", limit=1.0):
        for g in (2, 4, 6):
            assert (eta(g) + eta(g)).product().is_identity()


def test_criterion_3_equation_regression(criterion):
    with criterion(3, "closed-form images of every B_k for n<=3 and all parities", limit=5.0):
        for n in (1, 2, 3):
            cat = default_catalog(n)
            for idx in range(4**n):
                parity = [(idx >> k) & 1 for k in range(2 * n)]
                phi = knot_monodromy([(parity[2 * i], parity[2 * i + 1]) for i in range(n)], cat)
                for k in range(4 * n + 2):
                    assert phi(cat[f"B{k}"]) == closed_form(cat, n, k, parity), (n, parity, k)


# chi of (a1, a2, b1, b2): all in, all out, only b's in, only a's in
MEMBERSHIP = {(0, 0): (1, 1, 1, 1), (1, 0): (0, 0, 0, 0), (0, 1): (0, 0, 1, 1), (1, 1): (1, 1, 0, 0)}


def test_criterion_4_genus5_table(criterion):
    with criterion(4, "membership table of the four genus-5 bases and 6 distinct pairs", limit=1.0):
        cat = default_catalog(1)
        for parity in PARITIES:
            g = parity_graph(parity, cat)
            m = membership_pattern(parity, cat)
            assert (m["a1"], m["a2"], m["b1"], m["b2"]) == MEMBERSHIP[parity]
            assert g.chi(cat["B0"]) == 1
            assert g.chi(cat["c2"]) == 0 and g.chi(cat["d1"]) == 0
        for left, right in itertools.combinations(PARITIES, 2):
            assert distinguish([left], [right], cat).verdict == DISTINCT


def test_criterion_5_families(criterion):
    with criterion(5, "2^n pairwise distinct groups for m=(3,-2) and m=(1,1,1)", limit=30.0):
        for m in FAMILIES:
            rep = family_report(m)
            n = len(m)
            assert len(rep.representatives) == 2**n
            assert len(rep.pairs) == 2**n * (2**n - 1) // 2
            assert all(cert.verdict == DISTINCT for _, _, cert in rep.pairs)
            assert rep.distinct_count == 2**n


def _family_bases():
    out = [tuple(p) for p in PARITIES]
    for m in FAMILIES:
        for rep in family_report(m).representatives:
            out.append(tuple(x & 1 for pq in rep for x in pq))
    return sorted(set(out), key=lambda p: (len(p), p))


def test_criterion_6_quadratic_suite(criterion):
    with criterion(6, "quadratic refinement and transport law on every basis used"):
        modes = set()
        for parity in _family_bases():
            n = len(parity) // 2
            cat = default_catalog(n)
            g = parity_graph(parity, cat)
            q = check_quadratic_refinement(g)
            modes.add(q.mode)
            assert q.violations == 0, parity
            twists = list(g.basis) + [cat[f"c{2 * j}"] for j in range(1, n + 1)]
            twists += [cat[f"d{2 * j - 1}"] for j in range(1, n + 1)]
            assert {g.chi(c) for c in twists} == {0, 1}
            assert check_transport_law(g, twists, samples=20_000).violations == 0
        assert modes == {"all-pairs", "all-by-generators", "sampled"}


def test_criterion_7_hurwitz_robustness(criterion):
    with criterion(7, "100 random Hurwitz sequences leave product, orbits and verdicts unchanged", limit=30.0):
        rng = random.Random(2024)
        graphs = {p: parity_graph(p) for p in PARITIES}
        words = {p: surgery_word([p]) for p in PARITIES}
        signatures = {p: group_signature(w, list(graphs.values())) for p, w in words.items()}
        baseline = {
            (l, r): word_verdict(words[l], words[r], graphs[l]) for l in PARITIES for r in PARITIES
        }
        for k in range(100):
            p = PARITIES[k % 4]
            moved = random_hurwitz_sequence(words[p], rng.randint(1, 50), rng)
            assert moved.product() == words[p].product()
            assert group_signature(moved, list(graphs.values())) == signatures[p]
            for other in PARITIES:
                assert word_verdict(moved, words[other], graphs[p]) == baseline[(p, other)]
                assert word_verdict(words[other], moved, graphs[other]) == baseline[(other, p)]


def test_criterion_8_counts(criterion):
    with criterion(8, "word lengths 16n+24 and fiber genus 4n+1 for n<=4"):
        assert (fibration_data(1).fiber_genus, fibration_data(1).critical_points) == (5, 40)
        assert (fibration_data(2).fiber_genus, fibration_data(2).critical_points) == (9, 56)
        for n in range(1, 5):
            word = surgery_word([(0, 1)] * n)
            assert len(word) == 16 * n + 24 == fibration_data(n).critical_points
            assert word.genus == 4 * n + 1 == fibration_data(n).fiber_genus


def _flip_bit(bitstring: str, k: int) -> str:
    head, body = bitstring.split(":")
    return f"{head}:{body[:k]}{'1' if body[k] == '0' else '0'}{body[k + 1:]}"


def test_criterion_9_certificates(criterion, tmp_path, capsys):
    with criterion(9, "certificates recheck and three single-bit corruptions are caught"):
        certs = [distinguish([l], [r]) for l, r in itertools.permutations(PARITIES, 2)]
        for m in FAMILIES:
            certs += [cert for _, _, cert in family_report(m).pairs]
        for cert in certs:
            assert recheck(cert.data) == []

        path = tmp_path / "cert.json"
        assert main(["distinguish", "--n", "1", "--left", "1,0", "--right", "0,1", "--format", "json", "--out", str(path)]) == 0
        original = json.loads(path.read_text())
        assert main(["recheck", str(path)]) == 0

        def chi_bit(d):
            d["left_letters"][7]["chi"] ^= 1

        def witness_bit(d):
            d["witness"]["class"] = "g5:" + "0" * 10

        def basis_bit(d):
            d["basis"][4]["class"] = _flip_bit(d["basis"][4]["class"], 0)

        for mutate in (chi_bit, witness_bit, basis_bit):
            bad = copy.deepcopy(original)
            mutate(bad)
            path.write_text(json.dumps(bad))
            assert main(["recheck", str(path)]) == 3, mutate.__name__
        capsys.readouterr()
