"""Internal consistency suite run by ``monodromy verify``."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Dict, List, Sequence, Tuple

from .alexinv import alexander, alexander_for, expected_alexander, fibration_data, seifert_Kn
from .curves import default_catalog, tabulated_image, twisted_monodromy, validate
from .distinguish import (
    DISTINCT,
    distinguish,
    membership_pattern,
    parity_graph,
    solve_parity_conditions,
)
from .humphries import DEFAULT_SEED, check_quadratic_refinement, check_transport_law
from .words import eta, knot_monodromy, surgery_word

# chi of (a1, a2, b1, b2) for parity blocks (0,0), (1,0), (0,1), (1,1)
MEMBERSHIP_TABLE: Dict[Tuple[int, int], Tuple[int, int, int, int]] = {
    (0, 0): (1, 1, 1, 1),
    (1, 0): (0, 0, 0, 0),
    (0, 1): (0, 0, 1, 1),
    (1, 1): (1, 1, 0, 0),
}

ONE_SUMMAND_PARITIES = [(0, 0), (1, 0), (0, 1), (1, 1)]


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} {self.name}: {self.detail}"


def all_parities(n: int) -> List[Tuple[int, ...]]:
    return [tuple((idx >> k) & 1 for k in range(2 * n)) for idx in range(4**n)]


def check_eta_identity(genera: Sequence[int] = (2, 4, 6)) -> CheckResult:
    bad = [g for g in genera if not (eta(g) + eta(g)).product().is_identity()]
    return CheckResult("eta-identity", not bad, f"genera {list(genera)}, failing {bad}")


def check_catalogs(ns: Sequence[int] = (1, 2, 3)) -> CheckResult:
    problems = []
    for n in ns:
        problems += [f"n={n} {v}" for v in validate(default_catalog(n))]
    return CheckResult("catalog-relations", not problems, "; ".join(problems[:3]) or f"n in {list(ns)}")


def check_equation_regression(ns: Sequence[int] = (1, 2, 3)) -> CheckResult:
    """Composed monodromy vs closed-form images, on every B_k and every parity vector."""
    mismatches = []
    count = 0
    for n in ns:
        cat = default_catalog(n)
        for parity in all_parities(n):
            composed = twisted_monodromy(cat.classes, n, parity)
            from_word = knot_monodromy([(parity[2 * i], parity[2 * i + 1]) for i in range(n)], cat)
            if composed != from_word:
                mismatches.append(f"n={n} {parity}: word product differs")
            for k in range(4 * n + 2):
                count += 1
                if composed(cat[f"B{k}"]) != tabulated_image(cat.classes, n, k, parity):
                    mismatches.append(f"n={n} {parity} B{k}")
    return CheckResult("equation-regression", not mismatches, f"{count} images; mismatches {mismatches[:3]}")


def check_membership_table() -> CheckResult:
    problems = []
    cat = default_catalog(1)
    for parity in ONE_SUMMAND_PARITIES:
        graph = parity_graph(parity, cat)
        pattern = membership_pattern(parity, cat)
        got = (pattern["a1"], pattern["a2"], pattern["b1"], pattern["b2"])
        if got != MEMBERSHIP_TABLE[parity]:
            problems.append(f"{parity}: chi(a1,a2,b1,b2) = {got}")
        if graph.chi(cat["B0"]) != 1:
            problems.append(f"{parity}: chi(B0) = 0")
        if graph.chi(cat["c2"]) or graph.chi(cat["d1"]):
            problems.append(f"{parity}: chi(c2) or chi(d1) is 1")
        sol = solve_parity_conditions(parity)
        if sol.status != "unique" or sol.values != pattern:
            problems.append(f"{parity}: conditions give {sol.status} {sol.values}")
    for left, right in itertools.permutations(ONE_SUMMAND_PARITIES, 2):
        if left < right and distinguish([left], [right], cat).verdict != DISTINCT:
            problems.append(f"{left} vs {right} inconclusive")
    return CheckResult("membership-table", not problems, "; ".join(problems) or "4 bases, 6 pairs")


def check_parity_conditions(ns: Sequence[int] = (2, 3)) -> CheckResult:
    problems = []
    for n in ns:
        cat = default_catalog(n)
        for parity in all_parities(n):
            sol = solve_parity_conditions(parity)
            graph = parity_graph(parity, cat)
            if sol.status != "unique":
                problems.append(f"{parity}: {sol.status}")
            elif sol.values != membership_pattern(parity, cat):
                problems.append(f"{parity}: graph disagrees with conditions")
            for j in range(1, n + 1):
                if graph.chi(cat[f"c{2 * j}"]) or graph.chi(cat[f"d{2 * j - 1}"]):
                    problems.append(f"{parity}: chi(c/d) = 1 in block {j}")
    return CheckResult("parity-conditions", not problems, "; ".join(problems[:3]) or f"n in {list(ns)}")


def bases_for_families() -> List[Tuple[int, ...]]:
    """Parity vectors whose bases appear in the table and family checks."""
    out = list(ONE_SUMMAND_PARITIES)
    for m in ((3, -2), (1, 1, 1)):
        for choice in itertools.product((0, 1), repeat=len(m)):
            parity = []
            for mi, c in zip(m, choice):
                p, q = (mi, 0) if c == 0 else (mi - 1, 1)
                parity += [p & 1, q & 1]
            out.append(tuple(parity))
    return out


def check_quadratic_suite(seed: int = DEFAULT_SEED) -> CheckResult:
    violations = 0
    modes = set()
    for parity in bases_for_families():
        n = len(parity) // 2
        cat = default_catalog(n)
        graph = parity_graph(parity, cat)
        q = check_quadratic_refinement(graph, seed)
        modes.add(q.mode)
        violations += q.violations
        twists = list(graph.basis)
        for j in range(1, n + 1):
            twists += [cat[f"c{2 * j}"], cat[f"d{2 * j - 1}"]]
        if not any(graph.chi(c) == 0 for c in twists) or not any(graph.chi(c) == 1 for c in twists):
            return CheckResult("quadratic-suite", False, f"{parity}: transport law not exercised in both cases")
        violations += check_transport_law(graph, twists, seed, samples=20_000).violations
    return CheckResult("quadratic-suite", violations == 0, f"violations {violations}, modes {sorted(modes)}")


def check_alexander() -> CheckResult:
    bad = [n for n in range(-10, 11) if alexander(seifert_Kn(n)) != expected_alexander(1)]
    for m in ((0,), (3, -2), (1, 1, 1), (2, -1, 0, 5)):
        if alexander_for(m) != expected_alexander(len(m)):
            bad.append(m)
    return CheckResult("alexander", not bad, f"failing {bad}")


def check_counts(ns: Sequence[int] = (1, 2, 3, 4)) -> CheckResult:
    bad = []
    for n in ns:
        data = fibration_data(n)
        word = surgery_word([(0, 0)] * n)
        if len(word) != data.critical_points or word.genus != data.fiber_genus:
            bad.append(n)
        if not word.product().is_identity():
            bad.append(f"n={n} product")
    return CheckResult("counts", not bad, f"failing {bad}")


def check_certificates() -> CheckResult:
    bad = []
    for left, right in [((1, 0), (0, 1)), ((0, 0), (1, 1)), ((1, 0), (0, 0))]:
        cert = distinguish([left], [right])
        if cert.verdict != DISTINCT or cert.recheck():
            bad.append((left, right))
    return CheckResult("certificates", not bad, f"failing {bad}")


SUITE: List[Callable[[], CheckResult]] = [
    check_eta_identity,
    check_catalogs,
    check_equation_regression,
    check_membership_table,
    check_parity_conditions,
    check_quadratic_suite,
    check_alexander,
    check_counts,
    check_certificates,
]


def run_suite(seed: int = DEFAULT_SEED) -> List[CheckResult]:
    out = []
    for check in SUITE:
        out.append(check_quadratic_suite(seed) if check is check_quadratic_suite else check())
    return out
