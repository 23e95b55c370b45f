"""Parity bases, subordination, witnesses and re-checkable certificates.

A certificate shows that every twist of the left factorization has
chi = 1 for a Humphries graph (so the left monodromy group preserves chi)
while some twist of the right factorization has chi = 0 (so it moves chi
and cannot lie in that group).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import __version__
from .curves import CurveCatalog, default_catalog
from .f2lin import AffineSystem, HomologyClass, is_basis, pairing, rank, solve_affine, transvect
from .humphries import HumphriesGraph, build_graph
from .words import (
    ORDER,
    Params,
    TwistLetter,
    TwistWord,
    normalize_params,
    parities,
    surgery_word,
)

FORMAT_VERSION = 1
DISTINCT = "distinct_groups"
INCONCLUSIVE = "inconclusive"

SEMANTICS = (
    "Monodromy groups are compared for one fixed generic fiber. Distinct groups for a fixed "
    "fiber imply the factorizations are not Hurwitz equivalent, hence the fibrations are "
    "nonisomorphic. That implication is assumed here, not re-proved."
)

Labeled = Tuple[str, HomologyClass]


class CertificateFormatError(ValueError):
    pass


@dataclass(frozen=True)
class ParityVector:
    bits: Tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.bits) % 2 or not self.bits or any(b not in (0, 1) for b in self.bits):
            raise ValueError(f"bad parity vector {self.bits!r}")

    @classmethod
    def from_params(cls, params: Params) -> "ParityVector":
        return cls(parities(normalize_params(params)))

    @property
    def n(self) -> int:
        return len(self.bits) // 2

    @property
    def index(self) -> int:
        return sum(b << i for i, b in enumerate(self.bits))

    def block(self, i: int) -> Tuple[int, int]:
        return self.bits[2 * i - 2], self.bits[2 * i - 1]


def _as_parity(parity) -> ParityVector:
    if isinstance(parity, ParityVector):
        return parity
    return ParityVector(tuple(int(b) & 1 for b in parity))


_BLOCK_CHOICE = {
    (0, 0): ("a", "a", "b", "b"),
    (1, 0): ("e", "e", "f", "f"),
    (0, 1): ("e", "e", "b", "b"),
    (1, 1): ("a", "a", "f", "f"),
}


def parity_basis(parity, catalog: Optional[CurveCatalog] = None) -> List[Labeled]:
    """B_1..B_{4n}, b_{2n+1}, a_{2n+1}, then four a/e, b/f classes per summand."""
    parity = _as_parity(parity)
    n = parity.n
    cat = catalog if catalog is not None else default_catalog(n)
    if cat.summands != n:
        raise ValueError(f"catalog built for n={cat.summands}, parity vector has n={n}")
    g = 2 * n
    labels = [f"B{k}" for k in range(1, 4 * n + 1)] + [f"b{g + 1}", f"a{g + 1}"]
    for i in range(1, n + 1):
        kinds = _BLOCK_CHOICE[parity.block(i)]
        idx = (2 * i - 1, 2 * i, 2 * i - 1, 2 * i)
        labels += [f"{k}{j}" for k, j in zip(kinds, idx)]
    basis = [(lbl, cat[lbl]) for lbl in labels]
    if not is_basis([c for _, c in basis]):
        raise ValueError("parity basis is not a basis; catalog relations are broken")
    return basis


def parity_graph(parity, catalog: Optional[CurveCatalog] = None) -> HumphriesGraph:
    return build_graph(parity_basis(parity, catalog))


def _graph(basis_or_graph) -> HumphriesGraph:
    if isinstance(basis_or_graph, HumphriesGraph):
        return basis_or_graph
    return build_graph(basis_or_graph)


def subordinate(word: TwistWord, basis_or_graph) -> Tuple[List[Tuple[str, int]], bool]:
    graph = _graph(basis_or_graph)
    table = graph.chi_table((x.label, x.cls) for x in word.letters)
    return table, all(chi == 1 for _, chi in table)


@dataclass(frozen=True)
class Witness:
    position: int  # 1-based letter position in the word
    label: str
    cls: HomologyClass
    partner: HomologyClass


def find_witness(word: TwistWord, basis_or_graph) -> Optional[Witness]:
    """First nonzero letter with chi = 0, paired with the first unit vector meeting it oddly."""
    graph = _graph(basis_or_graph)
    for pos, letter in enumerate(word.letters, 1):
        w = letter.cls
        if w.is_zero() or graph.chi(w):
            continue
        for k in range(w.dim):
            u = HomologyClass.unit(k, w.genus)
            if pairing(w, u):
                return Witness(pos, letter.label, w, u)
    return None


@dataclass
class Certificate:
    data: Dict

    @property
    def verdict(self) -> str:
        return self.data["verdict"]

    @property
    def witness(self) -> Optional[Dict]:
        return self.data.get("witness")

    def to_json(self) -> str:
        return json.dumps(self.data, indent=2) + "\n"

    def recheck(self) -> List[str]:
        return recheck(self.data)


def _verdict(sub: bool, witness: Optional[Witness]) -> str:
    return DISTINCT if sub and witness is not None else INCONCLUSIVE


def word_verdict(left: TwistWord, right: TwistWord, basis_or_graph) -> str:
    """Verdict for arbitrary factorizations against a fixed basis."""
    graph = _graph(basis_or_graph)
    _, sub = subordinate(left, graph)
    return _verdict(sub, find_witness(right, graph) if sub else None)


def _params_list(params) -> List[List[int]]:
    return [[p, q] for p, q in params]


def distinguish(
    left: Params, right: Params, catalog: Optional[CurveCatalog] = None, seed: int = 0
) -> Certificate:
    left = normalize_params(left)
    right = normalize_params(right)
    if len(left) != len(right):
        raise ValueError(f"left has {len(left)} summands, right has {len(right)}")
    n = len(left)
    cat = catalog if catalog is not None else default_catalog(n)
    left_parity = ParityVector.from_params(left)
    basis = parity_basis(left_parity, cat)
    graph = build_graph(basis)
    left_word = surgery_word(left, cat)
    right_word = surgery_word(right, cat)
    table, sub = subordinate(left_word, graph)
    witness = find_witness(right_word, graph) if sub else None
    verdict = _verdict(sub, witness)
    data = {
        "format_version": FORMAT_VERSION,
        "tool": "monodromy",
        "version": __version__,
        "semantics": SEMANTICS,
        "order": ORDER,
        "n": n,
        "genus": cat.ambient_genus,
        "left": {"params": _params_list(left), "parity": list(left_parity.bits)},
        "right": {
            "params": _params_list(right),
            "parity": list(ParityVector.from_params(right).bits),
        },
        "basis_index": left_parity.index,
        "basis": [{"label": lbl, "class": c.bitstring()} for lbl, c in basis],
        "edges": [[i, j] for i, j in graph.edges()],
        "left_letters": [
            {"label": x.label, "class": x.cls.bitstring(), "chi": chi}
            for x, (_, chi) in zip(left_word.letters, table)
        ],
        "right_letters": [{"label": x.label, "class": x.cls.bitstring()} for x in right_word.letters],
        "witness": None,
        "verdict": verdict,
        "catalog_hash": cat.fingerprint(),
        "seed": seed,
    }
    if witness is not None:
        moved = transvect(witness.cls, witness.partner)
        data["witness"] = {
            "position": witness.position,
            "label": witness.label,
            "class": witness.cls.bitstring(),
            "chi": graph.chi(witness.cls),
            "partner": witness.partner.bitstring(),
            "pairing": pairing(witness.cls, witness.partner),
            "partner_chi": graph.chi(witness.partner),
            "image_chi": graph.chi(moved),
        }
    return Certificate(data)


def _parse(text, genus: int, where: str) -> HomologyClass:
    try:
        return HomologyClass.parse(str(text), genus)
    except (ValueError, TypeError) as exc:
        raise CertificateFormatError(f"{where}: {exc}") from exc


def _product_is_identity(classes: Sequence[HomologyClass], genus: int) -> bool:
    word = TwistWord(genus, tuple(TwistLetter("x", c) for c in classes))
    return word.product().is_identity()


def recheck(data: Dict) -> List[str]:
    """Re-validate a certificate from its embedded data alone; returns failed assertions.

    Raises CertificateFormatError when required fields are missing or unparsable.
    """
    try:
        if data["format_version"] != FORMAT_VERSION:
            raise CertificateFormatError(f"unsupported format_version {data['format_version']!r}")
        genus = int(data["genus"])
        basis_raw = data["basis"]
        edges_raw = data["edges"]
        left_raw = data["left_letters"]
        right_raw = data["right_letters"]
        verdict = data["verdict"]
        witness = data.get("witness")
        basis = [_parse(x["class"], genus, f"basis[{k}]") for k, x in enumerate(basis_raw)]
        left = [(_parse(x["class"], genus, f"left_letters[{k}]"), int(x["chi"])) for k, x in enumerate(left_raw)]
        right = [_parse(x["class"], genus, f"right_letters[{k}]") for k, x in enumerate(right_raw)]
        edges = {tuple(sorted((int(i), int(j)))) for i, j in edges_raw}
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, CertificateFormatError):
            raise
        raise CertificateFormatError(f"malformed certificate: {exc!r}") from exc
    if verdict not in (DISTINCT, INCONCLUSIVE):
        raise CertificateFormatError(f"unknown verdict {verdict!r}")

    failures: List[str] = []
    if len(basis) != 2 * genus or rank(basis) != 2 * genus:
        failures.append(f"basis: {len(basis)} classes of rank {rank(basis)}, need {2 * genus}")
        return failures
    actual_edges = {
        (i, j) for i in range(len(basis)) for j in range(i + 1, len(basis)) if pairing(basis[i], basis[j])
    }
    if actual_edges != edges:
        diff = sorted(actual_edges ^ edges)
        failures.append(f"edges: stored edge list differs from pairings at {diff[:5]}")
    graph = build_graph(basis)
    for k, (cls, chi) in enumerate(left):
        if graph.chi(cls) != chi:
            failures.append(f"left_letters[{k}]: stored chi {chi}, recomputed {graph.chi(cls)}")
    if not _product_is_identity([c for c, _ in left], genus):
        failures.append("left_letters: product of twists is not the identity on H_1")
    if not _product_is_identity(right, genus):
        failures.append("right_letters: product of twists is not the identity on H_1")

    all_one = all(chi == 1 for _, chi in left)
    if verdict == DISTINCT:
        if not all_one:
            failures.append("verdict: left word has a stored chi = 0 letter")
        if not witness:
            failures.append("verdict: distinct_groups without a witness")
            return failures
    if witness:
        try:
            pos = int(witness["position"])
            w = _parse(witness["class"], genus, "witness.class")
            u = _parse(witness["partner"], genus, "witness.partner")
            stored = {k: int(witness[k]) for k in ("chi", "pairing", "partner_chi", "image_chi")}
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, CertificateFormatError):
                raise
            raise CertificateFormatError(f"malformed witness: {exc!r}") from exc
        if not 1 <= pos <= len(right) or right[pos - 1] != w:
            failures.append(f"witness: class is not letter {pos} of the right word")
        if w.is_zero():
            failures.append("witness: class is zero")
        if graph.chi(w) != 0 or stored["chi"] != 0:
            failures.append(f"witness: chi stored {stored['chi']}, recomputed {graph.chi(w)}, need 0")
        if pairing(w, u) != 1 or stored["pairing"] != 1:
            failures.append(f"witness: pairing with partner stored {stored['pairing']}, recomputed {pairing(w, u)}")
        moved = transvect(w, u)
        if graph.chi(u) != stored["partner_chi"] or graph.chi(moved) != stored["image_chi"]:
            failures.append("witness: stored partner/image chi do not recompute")
        if graph.chi(u) == graph.chi(moved):
            failures.append("witness: twist does not change chi of the partner")
    return failures


# --- families ------------------------------------------------------------------------------


def representatives(m: Sequence[int]) -> List[Tuple[Tuple[int, int], ...]]:
    """All choices of (m_i, 0) or (m_i - 1, 1) per summand."""
    if not m:
        raise ValueError("need at least one summand")
    choices = [((mi, 0), (mi - 1, 1)) for mi in m]
    return [tuple(c) for c in itertools.product(*choices)]


@dataclass
class FamilyReport:
    m: Tuple[int, ...]
    representatives: List[Tuple[Tuple[int, int], ...]]
    pairs: List[Tuple[int, int, Certificate]] = field(default_factory=list)

    @property
    def failures(self) -> List[Tuple[int, int]]:
        return [(i, j) for i, j, cert in self.pairs if cert.verdict != DISTINCT]

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def distinct_count(self) -> int:
        """Number of classes after merging representatives joined by an inconclusive pair."""
        parent = list(range(len(self.representatives)))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, j in self.failures:
            parent[find(i)] = find(j)
        return len({find(i) for i in range(len(parent))})

    def to_dict(self) -> dict:
        return {
            "m": list(self.m),
            "fiber_genus": 4 * len(self.m) + 1,
            "representatives": [_params_list(r) for r in self.representatives],
            "distinct_count": self.distinct_count,
            "expected": 2 ** len(self.m),
            "ok": self.ok,
            "pairs": [
                {"left": i, "right": j, "verdict": cert.verdict, "certificate": cert.data}
                for i, j, cert in self.pairs
            ],
        }


def family_report(m: Sequence[int], catalog: Optional[CurveCatalog] = None) -> FamilyReport:
    m = tuple(int(x) for x in m)
    reps = representatives(m)
    cat = catalog if catalog is not None else default_catalog(len(m))
    report = FamilyReport(m, reps)
    for i, j in itertools.combinations(range(len(reps)), 2):
        report.pairs.append((i, j, distinguish(reps[i], reps[j], cat)))
    return report


# --- parity conditions ------------------------------------------------------------------------


def _condition_rows(n: int, parity: ParityVector) -> List[Tuple[List[str], int]]:
    """Conditions (a)-(e) as (a/b labels, number of c/d classes) pairs.

    Each says an even number of the listed classes has chi = 0, with every
    c/d class assumed to have chi = 0.
    """
    rows = []
    everything = []
    for i in range(1, n + 1):
        everything += [f"a{2 * i - 1}", f"a{2 * i}", f"b{2 * i - 1}", f"b{2 * i}"]
    rows.append((everything, 0))
    for j in range(1, n + 1):
        tail = []
        for i in range(j + 1, n + 1):
            tail += [f"a{2 * i - 1}", f"a{2 * i}", f"b{2 * i - 1}", f"b{2 * i}"]
        ep, eq = parity.block(j)
        a1, a2, b1, b2 = f"a{2 * j - 1}", f"a{2 * j}", f"b{2 * j - 1}", f"b{2 * j}"
        rows.append(([b1, b2, a2] + tail, ep + eq))
        rows.append(([b2, a1, a2] + tail, ep))
        rows.append(([b2] + tail, ep))
        rows.append(([a2] + tail, ep + eq))
    return rows


@dataclass(frozen=True)
class ConditionSolution:
    unknowns: Tuple[str, ...]
    status: str
    free_dim: int
    values: Optional[Dict[str, int]]


def solve_parity_conditions(parity) -> ConditionSolution:
    """Solve the parity conditions for chi of a_i, b_i (i <= 2n) over GF(2)."""
    parity = _as_parity(parity)
    n = parity.n
    unknowns = []
    for i in range(1, 2 * n + 1):
        unknowns += [f"a{i}", f"b{i}"]
    index = {lbl: k for k, lbl in enumerate(unknowns)}
    eqs = []
    for labels, cd in _condition_rows(n, parity):
        row = 0
        for lbl in labels:
            row ^= 1 << index[lbl]
        # zeros = (|S_ab| - sum chi) + cd must be even
        eqs.append((row, (len(labels) + cd) & 1))
    sol = solve_affine(AffineSystem(len(unknowns), tuple(eqs)))
    values = None
    if sol.least is not None:
        values = {lbl: (sol.least >> k) & 1 for k, lbl in enumerate(unknowns)}
    return ConditionSolution(tuple(unknowns), sol.status, sol.free_dim, values)


def membership_pattern(parity, catalog: Optional[CurveCatalog] = None) -> Dict[str, int]:
    """chi of a_i, b_i (i <= 2n) in the graph of the parity basis."""
    parity = _as_parity(parity)
    cat = catalog if catalog is not None else default_catalog(parity.n)
    graph = parity_graph(parity, cat)
    out = {}
    for i in range(1, 2 * parity.n + 1):
        out[f"a{i}"] = graph.chi(cat[f"a{i}"])
        out[f"b{i}"] = graph.chi(cat[f"b{i}"])
    return out
