"""Named curve classes on the genus 4n+1 fiber and the Stallings-curve solver.

The fiber is Sigma_{2g+1} with g = 2n.  Knot summand ``j`` lives on the
block of coordinates (a_{2j-1}, b_{2j-1}, a_{2j}, b_{2j}).
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .f2lin import (
    MAX_GENUS,
    AffineSystem,
    HomologyClass,
    SymplecticMap,
    bit_index,
    compose_all,
    is_basis,
    pairing,
    solve_affine,
    transvection_map,
)

log = logging.getLogger(__name__)

FORMAT_VERSION = 1

STANDARD = "standard"
RELATION = "relation"
SOLVED = "solved"
CONFIGURED = "configured"


class CatalogError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CurveCatalog:
    summands: int
    classes: Mapping[str, HomologyClass]
    provenance: Mapping[str, str]
    notes: Tuple[str, ...] = ()

    @property
    def knot_genus(self) -> int:
        return 2 * self.summands

    @property
    def ambient_genus(self) -> int:
        return 4 * self.summands + 1

    def __getitem__(self, label: str) -> HomologyClass:
        try:
            return self.classes[label]
        except KeyError:
            raise KeyError(f"catalog has no curve {label!r}") from None

    def __contains__(self, label: str) -> bool:
        return label in self.classes

    def block_coords(self, j: int) -> List[int]:
        return block_coords(j)

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "summands": self.summands,
            "classes": {k: self.classes[k].bitstring() for k in sorted(self.classes)},
            "provenance": {k: self.provenance[k] for k in sorted(self.provenance)},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def block_coords(j: int) -> List[int]:
    """Bit indices of (a_{2j-1}, b_{2j-1}, a_{2j}, b_{2j})."""
    return [
        bit_index("a", 2 * j - 1),
        bit_index("b", 2 * j - 1),
        bit_index("a", 2 * j),
        bit_index("b", 2 * j),
    ]


def expected_labels(n: int) -> List[str]:
    g = 2 * n
    N = 2 * g + 1
    labels = [f"a{i}" for i in range(1, N + 1)] + [f"b{i}" for i in range(1, N + 1)]
    labels += [f"B{j}" for j in range(0, 2 * g + 2)]
    labels += [f"e{i}" for i in range(1, g + 1)] + [f"f{i}" for i in range(1, g + 1)]
    labels.append("bprime")
    labels += [f"c{2 * j}" for j in range(1, n + 1)] + [f"d{2 * j - 1}" for j in range(1, n + 1)]
    return labels


def _relation_classes(n: int) -> Dict[str, HomologyClass]:
    g = 2 * n
    N = 2 * g + 1
    a = {i: HomologyClass.a(i, N) for i in range(1, N + 1)}
    b = {i: HomologyClass.b(i, N) for i in range(1, N + 1)}
    out: Dict[str, HomologyClass] = {}
    for i in range(1, g + 1):
        odd = b[i] + b[2 * g + 2 - i]
        for k in range(i, 2 * g + 3 - i):
            odd = odd + a[k]
        out[f"B{2 * i - 1}"] = odd
        out[f"B{2 * i}"] = odd + a[i] + a[2 * g + 2 - i]
    out[f"B{2 * g + 1}"] = a[g + 1]
    b0 = a[g + 1]
    for j in range(1, 2 * g + 1):
        b0 = b0 + out[f"B{j}"]
    out["B0"] = b0
    for i in range(1, g + 1):
        out[f"e{i}"] = a[i] + a[g + 1]
        out[f"f{i}"] = b[i] + b[g + 1]
    return out


def block_monodromy(classes: Mapping[str, HomologyClass], j: int, genus: int) -> SymplecticMap:
    """Untwisted factor T_{a_{2j}}^-1 o T_{b_{2j}}^-1 o T_{a_{2j-1}} o T_{b_{2j-1}}."""
    order = [f"b{2 * j - 1}", f"a{2 * j - 1}", f"b{2 * j}", f"a{2 * j}"]
    return compose_all([transvection_map(classes[lbl]) for lbl in order], genus)


def carrier_map(classes: Mapping[str, HomologyClass], j: int, genus: int) -> SymplecticMap:
    """T_{b_{2j-1}}^-1 o T_{b_{2j}} o T_{a_{2j-1}}^-1 o T_{a_{2j}}, which carries c_{2j} to d_{2j-1}."""
    order = [f"a{2 * j}", f"a{2 * j - 1}", f"b{2 * j}", f"b{2 * j - 1}"]
    return compose_all([transvection_map(classes[lbl]) for lbl in order], genus)


def _tail(classes: Mapping[str, HomologyClass], j: int, n: int, genus: int) -> HomologyClass:
    out = HomologyClass.zero(genus)
    for i in range(j + 1, n + 1):
        for lbl in (f"a{2 * i - 1}", f"a{2 * i}", f"b{2 * i - 1}", f"b{2 * i}"):
            out = out + classes[lbl]
    return out


def tabulated_image(
    classes: Mapping[str, HomologyClass], n: int, k: int, parity: Sequence[int]
) -> HomologyClass:
    """Closed-form image of B_k under the knot monodromy, one formula per residue of k mod 4.

    ``parity`` holds (eps_1, ..., eps_{2n}) with eps_{2j-1} = p_j mod 2 and
    eps_{2j} = q_j mod 2.  B_{4n+1} = a_{2n+1} is fixed.
    """
    genus = 4 * n + 1
    cls = classes
    if k == 0:
        out = cls["B0"]
        for i in range(1, n + 1):
            for lbl in (f"a{2 * i - 1}", f"a{2 * i}", f"b{2 * i - 1}", f"b{2 * i}"):
                out = out + cls[lbl]
        return out
    if k == 4 * n + 1:
        return cls[f"B{k}"]
    if not 1 <= k <= 4 * n:
        raise ValueError(f"B_{k} does not exist for n={n}")
    j, r = divmod(k - 1, 4)
    j += 1
    ep, eq = parity[2 * j - 2] & 1, parity[2 * j - 1] & 1
    a1, a2 = cls[f"a{2 * j - 1}"], cls[f"a{2 * j}"]
    b1, b2 = cls[f"b{2 * j - 1}"], cls[f"b{2 * j}"]
    zero = HomologyClass.zero(genus)
    cterm = cls[f"c{2 * j}"] if ep else zero
    dterm = cls[f"d{2 * j - 1}"] if eq else zero
    if r == 0:
        body = b1 + b2 + a2 + cterm + dterm
    elif r == 1:
        body = b2 + a1 + a2 + cterm
    elif r == 2:
        body = b2 + cterm
    else:
        body = a2 + cterm + dterm
    return cls[f"B{k}"] + body + _tail(cls, j, n, genus)


def twisted_monodromy(
    classes: Mapping[str, HomologyClass], n: int, parity: Sequence[int]
) -> SymplecticMap:
    """prod_i T_{d_{2i-1}}^{q_i} o T_{c_{2i}}^{p_i} o (untwisted block factor), exponents mod 2."""
    genus = 4 * n + 1
    maps = []
    for j in range(1, n + 1):
        maps.append(block_monodromy(classes, j, genus))
        if parity[2 * j - 2] & 1:
            maps.append(transvection_map(classes[f"c{2 * j}"]))
        if parity[2 * j - 1] & 1:
            maps.append(transvection_map(classes[f"d{2 * j - 1}"]))
    return compose_all(maps, genus)


@dataclass(frozen=True)
class StallingsSolution:
    block: int
    system: AffineSystem
    candidates: Tuple[Tuple[HomologyClass, HomologyClass], ...]

    @property
    def chosen(self) -> Tuple[HomologyClass, HomologyClass]:
        return self.candidates[0]

    @property
    def unique(self) -> bool:
        return len(self.candidates) == 1


def _block_key(cls: HomologyClass, coords: Sequence[int]) -> Tuple[int, ...]:
    # Lex order on (a_{2j-1}, b_{2j-1}, a_{2j}, b_{2j}), first coordinate most significant.
    return cls.restrict(coords)


def _agrees_with_table(classes: Mapping[str, HomologyClass], n: int, j: int) -> bool:
    for ep in (0, 1):
        for eq in (0, 1):
            parity = [0] * (2 * n)
            parity[2 * j - 2], parity[2 * j - 1] = ep, eq
            phi = twisted_monodromy(classes, n, parity)
            for k in range(0, 4 * n + 2):
                if phi(classes[f"B{k}"]) != tabulated_image(classes, n, k, parity):
                    return False
    return True


def solve_stallings_block(classes: Mapping[str, HomologyClass], n: int, j: int) -> StallingsSolution:
    """All block-supported (c_{2j}, d_{2j-1}) consistent with the tabulated images.

    Linear constraints <P(B_k), c> and <P(B_k), W c> (P untwisted monodromy,
    W the carrier map) cut out an affine coset; each element is then checked
    against the full table for the four parities of block ``j``.
    """
    genus = 4 * n + 1
    coords = block_coords(j)
    untwisted = twisted_monodromy(classes, n, [0] * (2 * n))
    carrier = carrier_map(classes, j, genus)
    block_units = [HomologyClass.unit(k, genus) for k in coords]
    carried_units = [carrier(u) for u in block_units]
    first = 4 * (j - 1)
    rows = []
    for k in range(0, 4 * n + 2):
        image = untwisted(classes[f"B{k}"])
        c_coef = 1 if first + 1 <= k <= first + 4 else 0
        d_coef = 1 if k in (first + 1, first + 4) else 0
        c_row = sum(pairing(image, u) << m for m, u in enumerate(block_units))
        d_row = sum(pairing(image, u) << m for m, u in enumerate(carried_units))
        rows.append((c_row, c_coef))
        rows.append((d_row, d_coef))
    system = AffineSystem(4, tuple(rows))
    sol = solve_affine(system)
    candidates = []
    for x in sol.elements():
        c = HomologyClass.zero(genus)
        for m, u in enumerate(block_units):
            if (x >> m) & 1:
                c = c + u
        if c.is_zero():
            continue
        d = carrier(c)
        trial = dict(classes)
        trial[f"c{2 * j}"] = c
        trial[f"d{2 * j - 1}"] = d
        if _agrees_with_table(trial, n, j):
            candidates.append((c, d))
    candidates.sort(key=lambda cd: _block_key(cd[0], coords))
    return StallingsSolution(j, system, tuple(candidates))


def solve_stallings_classes(
    n: int, classes: Optional[Mapping[str, HomologyClass]] = None
) -> List[StallingsSolution]:
    if classes is None:
        classes = _base_classes(n)
    out = []
    for j in range(1, n + 1):
        sol = solve_stallings_block(classes, n, j)
        if not sol.candidates:
            raise CatalogError(f"no Stallings curve classes for block {j}; relations are inconsistent")
        out.append(sol)
    return out


def _base_classes(n: int, bprime: Optional[HomologyClass] = None) -> Dict[str, HomologyClass]:
    g = 2 * n
    N = 2 * g + 1
    classes: Dict[str, HomologyClass] = {}
    for i in range(1, N + 1):
        classes[f"a{i}"] = HomologyClass.a(i, N)
        classes[f"b{i}"] = HomologyClass.b(i, N)
    classes.update(_relation_classes(n))
    classes["bprime"] = bprime if bprime is not None else classes[f"b{g + 1}"]
    return classes


def build_catalog(n: int, bprime: Optional[HomologyClass] = None) -> CurveCatalog:
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"number of summands must be a positive integer, got {n!r}")
    if 4 * n + 1 > MAX_GENUS:
        raise ValueError(f"n={n} needs genus {4 * n + 1}, beyond the supported {MAX_GENUS}")
    classes = _base_classes(n, bprime)
    provenance = {}
    for label in classes:
        if label[0] in "ab" and label[1:].isdigit():
            provenance[label] = STANDARD
        elif label == "bprime":
            provenance[label] = CONFIGURED
        else:
            provenance[label] = RELATION
    notes = []
    for sol in solve_stallings_classes(n, classes):
        c, d = sol.chosen
        j = sol.block
        classes[f"c{2 * j}"] = c
        classes[f"d{2 * j - 1}"] = d
        tag = SOLVED
        if not sol.unique:
            tag = f"{SOLVED}:least-of-{len(sol.candidates)}"
            msg = f"block {j}: {len(sol.candidates)} Stallings solutions, least chosen"
            log.warning(msg)
            notes.append(msg)
        provenance[f"c{2 * j}"] = tag
        provenance[f"d{2 * j - 1}"] = tag
    catalog = CurveCatalog(n, dict(classes), provenance, tuple(notes))
    problems = validate(catalog)
    if problems:
        raise CatalogError("; ".join(problems))
    return catalog


@lru_cache(maxsize=None)
def default_catalog(n: int) -> CurveCatalog:
    return build_catalog(n)


def validate(catalog: CurveCatalog) -> List[str]:
    """Return the list of violated catalog assertions (empty when valid)."""
    n = catalog.summands
    problems: List[str] = []
    if not isinstance(n, int) or n < 1:
        return [f"summands must be a positive integer, got {n!r}"]
    N = catalog.ambient_genus
    g = catalog.knot_genus
    missing = [lbl for lbl in expected_labels(n) if lbl not in catalog.classes]
    if missing:
        return [f"missing labels: {', '.join(missing)}"]
    extra = sorted(set(catalog.classes) - set(expected_labels(n)))
    if extra:
        problems.append(f"unexpected labels: {', '.join(extra)}")
    bad_genus = [lbl for lbl, c in catalog.classes.items() if c.genus != N]
    if bad_genus:
        return problems + [f"classes not on genus {N}: {', '.join(sorted(bad_genus))}"]
    cls = catalog.classes
    for i in range(1, N + 1):
        if cls[f"a{i}"] != HomologyClass.a(i, N) or cls[f"b{i}"] != HomologyClass.b(i, N):
            problems.append(f"standard: a{i}/b{i} are not the standard unit vectors")
    std = [cls[f"a{i}"] for i in range(1, N + 1)] + [cls[f"b{i}"] for i in range(1, N + 1)]
    if not is_basis(std):
        problems.append("standard: a_i, b_i do not form a basis")
    for i in range(1, g + 1):
        expect = cls[f"b{i}"] + cls[f"b{2 * g + 2 - i}"]
        for k in range(i, 2 * g + 3 - i):
            expect = expect + cls[f"a{k}"]
        if cls[f"B{2 * i - 1}"] != expect:
            problems.append(f"R1: B{2 * i - 1} != a{i}+...+a{2 * g + 2 - i}+b{i}+b{2 * g + 2 - i}")
        if cls[f"B{2 * i}"] != cls[f"B{2 * i - 1}"] + cls[f"a{i}"] + cls[f"a{2 * g + 2 - i}"]:
            problems.append(f"R2: B{2 * i} != B{2 * i - 1}+a{i}+a{2 * g + 2 - i}")
    if cls[f"B{2 * g + 1}"] != cls[f"a{g + 1}"]:
        problems.append(f"R3: B{2 * g + 1} != a{g + 1}")
    b0 = cls[f"a{g + 1}"]
    for j in range(1, 2 * g + 1):
        b0 = b0 + cls[f"B{j}"]
    if cls["B0"] != b0:
        problems.append("R4: B0 != B1+...+B%d+a%d" % (2 * g, g + 1))
    for i in range(1, g + 1):
        if cls[f"e{i}"] != cls[f"a{i}"] + cls[f"a{g + 1}"]:
            problems.append(f"R5: e{i} != a{i}+a{g + 1}")
        if cls[f"f{i}"] != cls[f"b{i}"] + cls[f"b{g + 1}"]:
            problems.append(f"R5: f{i} != b{i}+b{g + 1}")
    if cls["bprime"].is_zero():
        problems.append("bprime: class is zero")
    for j in range(1, n + 1):
        c, d = cls[f"c{2 * j}"], cls[f"d{2 * j - 1}"]
        coords = set(block_coords(j))
        for lbl, x in ((f"c{2 * j}", c), (f"d{2 * j - 1}", d)):
            if x.is_zero():
                problems.append(f"stallings: {lbl} is zero")
            if set(x.support()) - coords:
                problems.append(f"stallings: {lbl} is not supported on block {j}")
        if pairing(c, d):
            problems.append(f"stallings: <c{2 * j}, d{2 * j - 1}> != 0")
        if carrier_map(cls, j, N)(c) != d:
            problems.append(f"stallings: carrier map does not send c{2 * j} to d{2 * j - 1}")
    return problems


def from_dict(data: dict) -> CurveCatalog:
    if data.get("format_version") != FORMAT_VERSION:
        raise CatalogError(f"unsupported catalog format_version {data.get('format_version')!r}")
    try:
        n = int(data["summands"])
        raw = data["classes"]
        provenance = dict(data.get("provenance", {}))
    except (KeyError, TypeError, ValueError) as exc:
        raise CatalogError(f"malformed catalog: {exc}") from exc
    classes = {}
    for label, text in raw.items():
        try:
            classes[label] = HomologyClass.parse(text)
        except ValueError as exc:
            raise CatalogError(f"bad class for {label}: {exc}") from exc
    for label in classes:
        provenance.setdefault(label, CONFIGURED)
    catalog = CurveCatalog(n, classes, provenance)
    problems = validate(catalog)
    if problems:
        raise CatalogError("; ".join(problems))
    return catalog


def load_catalog(path) -> CurveCatalog:
    with open(path, encoding="utf-8") as fh:
        return from_dict(json.load(fh))


def save_catalog(catalog: CurveCatalog, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(catalog.to_json())
