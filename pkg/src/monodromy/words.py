"""Twist words: monodromy factorizations carried on H_1(Sigma; Z/2).

Letters are stored in application order: index 0 is applied first, so a
product written right-to-left as t_{c_n} ... t_{c_1} is stored as
(c_1, ..., c_n).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .curves import CurveCatalog, default_catalog
from .f2lin import (
    GenusMismatch,
    HomologyClass,
    SymplecticMap,
    compose,
    pairing_array,
    pairing_bits,
    transvect,
    transvection_map,
)
from .humphries import EXHAUSTIVE_DIM, HumphriesGraph

ORDER = "application"

Params = Sequence[Tuple[int, int]]


@dataclass(frozen=True)
class TwistLetter:
    label: str
    cls: HomologyClass
    exponent: int = 1

    def __post_init__(self) -> None:
        if self.exponent == 0:
            raise ValueError(f"letter {self.label!r} has exponent 0")

    def to_dict(self) -> dict:
        return {"label": self.label, "class": self.cls.bitstring(), "exp": self.exponent}


@dataclass(frozen=True)
class TwistWord:
    genus: int
    letters: Tuple[TwistLetter, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "letters", tuple(self.letters))
        for letter in self.letters:
            if letter.cls.genus != self.genus:
                raise GenusMismatch(
                    f"letter {letter.label!r} has genus {letter.cls.genus}, word genus {self.genus}"
                )

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, i):
        return self.letters[i]

    def __add__(self, other: "TwistWord") -> "TwistWord":
        if other.genus != self.genus:
            raise GenusMismatch(f"genus {self.genus} vs {other.genus}")
        return TwistWord(self.genus, self.letters + other.letters)

    def classes(self) -> List[HomologyClass]:
        return [x.cls for x in self.letters]

    def is_lefschetz(self) -> bool:
        return all(x.exponent == 1 for x in self.letters)

    def product(self) -> SymplecticMap:
        """The composite map on H_1, first letter applied first; exponents act mod 2."""
        out = SymplecticMap.identity(self.genus)
        for letter in self.letters:
            if letter.exponent % 2:
                out = compose(transvection_map(letter.cls), out)
        return out

    def to_dict(self) -> dict:
        return {
            "format_version": 1,
            "genus": self.genus,
            "order": ORDER,
            "letters": [x.to_dict() for x in self.letters],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "TwistWord":
        if data.get("order", ORDER) != ORDER:
            raise ValueError(f"unsupported letter order {data.get('order')!r}")
        genus = int(data["genus"])
        letters = [
            TwistLetter(str(x["label"]), HomologyClass.parse(x["class"], genus), int(x.get("exp", 1)))
            for x in data["letters"]
        ]
        return cls(genus, tuple(letters))


def _catalog_for(n: int, catalog: Optional[CurveCatalog]) -> CurveCatalog:
    if catalog is None:
        return default_catalog(n)
    if catalog.summands != n:
        raise ValueError(f"catalog built for n={catalog.summands}, needed n={n}")
    return catalog


def eta(g: int, catalog: Optional[CurveCatalog] = None) -> TwistWord:
    """The genus-(2g+1) word t_{B_0} ... t_{B_{2g+1}} t_b^2 t_{b'}^2, in display order."""
    if g < 1:
        raise ValueError("g must be positive")
    if catalog is None:
        if g % 2:
            raise ValueError(f"no default catalog for odd g={g}; supply one")
        catalog = default_catalog(g // 2)
    if catalog.knot_genus != g:
        raise ValueError(f"catalog has knot genus {catalog.knot_genus}, needed {g}")
    letters = [TwistLetter(f"B{j}", catalog[f"B{j}"]) for j in range(0, 2 * g + 2)]
    b = catalog[f"b{g + 1}"]
    letters += [TwistLetter(f"b{g + 1}", b), TwistLetter(f"b{g + 1}", b)]
    letters += [TwistLetter("bprime", catalog["bprime"]), TwistLetter("bprime", catalog["bprime"])]
    return TwistWord(catalog.ambient_genus, tuple(letters))


def normalize_params(params: Iterable) -> Tuple[Tuple[int, int], ...]:
    out = []
    for pair in params:
        p, q = pair
        out.append((int(p), int(q)))
    if not out:
        raise ValueError("need at least one (p, q) pair")
    return tuple(out)


def parities(params: Params) -> Tuple[int, ...]:
    bits: List[int] = []
    for p, q in params:
        bits += [p % 2, q % 2]
    return tuple(bits)


def params_tag(params: Params) -> str:
    params = normalize_params(params)
    if len(params) == 1:
        p, q = params[0]
        return f"(p={p},q={q})"
    return "(" + ",".join(f"p{i}={p},q{i}={q}" for i, (p, q) in enumerate(params, 1)) + ")"


def knot_monodromy_word(params: Params, catalog: Optional[CurveCatalog] = None) -> TwistWord:
    """Letters b_{2i-1}, a_{2i-1}, b_{2i}^-1, a_{2i}^-1, c_{2i}^{p_i}, d_{2i-1}^{q_i} per summand."""
    params = normalize_params(params)
    cat = _catalog_for(len(params), catalog)
    letters = []
    for i, (p, q) in enumerate(params, 1):
        letters.append(TwistLetter(f"b{2 * i - 1}", cat[f"b{2 * i - 1}"], 1))
        letters.append(TwistLetter(f"a{2 * i - 1}", cat[f"a{2 * i - 1}"], 1))
        letters.append(TwistLetter(f"b{2 * i}", cat[f"b{2 * i}"], -1))
        letters.append(TwistLetter(f"a{2 * i}", cat[f"a{2 * i}"], -1))
        if p:
            letters.append(TwistLetter(f"c{2 * i}", cat[f"c{2 * i}"], p))
        if q:
            letters.append(TwistLetter(f"d{2 * i - 1}", cat[f"d{2 * i - 1}"], q))
    return TwistWord(cat.ambient_genus, tuple(letters))


@lru_cache(maxsize=512)
def _monodromy_cached(catalog: CurveCatalog, parity: Tuple[int, ...]) -> SymplecticMap:
    return knot_monodromy_word([(e, f) for e, f in zip(parity[::2], parity[1::2])], catalog).product()


def knot_monodromy(params: Params, catalog: Optional[CurveCatalog] = None) -> SymplecticMap:
    """The knot monodromy extended by the identity, as a map on H_1 (depends on parities only)."""
    params = normalize_params(params)
    cat = _catalog_for(len(params), catalog)
    return _monodromy_cached(cat, parities(params))


def conjugacy_check(n: int, p: int, q: int, catalog: Optional[CurveCatalog] = None) -> bool:
    """Check Phi_{(p,q)} == T_{d_1}^q o Phi_{(n,0)} o T_{d_1}^-q on one summand."""
    if p + q != n:
        raise ValueError(f"p + q = {p + q} differs from n = {n}")
    cat = _catalog_for(1, catalog)
    lhs = knot_monodromy([(p, q)], cat)
    core = knot_monodromy([(n, 0)], cat)
    if q % 2:
        t = transvection_map(cat["d1"])
        core = compose(t, compose(core, t.inverse()))
    return lhs == core


def surgery_word(params: Params, catalog: Optional[CurveCatalog] = None) -> TwistWord:
    """Factorization Phi(eta^2) . eta^2: plain eta^2 letters first, then their Phi-images."""
    params = normalize_params(params)
    n = len(params)
    cat = _catalog_for(n, catalog)
    base = eta(2 * n, cat)
    square = base + base
    phi = knot_monodromy(params, cat)
    tag = params_tag(params)
    mapped = tuple(TwistLetter(f"Phi({x.label})@{tag}", phi(x.cls), x.exponent) for x in square)
    return square + TwistWord(cat.ambient_genus, mapped)


# --- Hurwitz moves and conjugation ------------------------------------------------------


def _twisted_label(by: str, label: str) -> str:
    inverse_tag = f"t^-1[{by}]("
    if label.startswith(inverse_tag) and label.endswith(")"):
        return label[len(inverse_tag):-1]
    return f"t[{by}]({label})"


def _untwisted_label(by: str, label: str) -> str:
    tag = f"t[{by}]("
    if label.startswith(tag) and label.endswith(")"):
        return label[len(tag):-1]
    return f"t^-1[{by}]({label})"


def _check_index(word: TwistWord, i: int) -> None:
    if not 1 <= i < len(word):
        raise IndexError(f"Hurwitz index {i} out of range for word of length {len(word)}")


def hurwitz_move(word: TwistWord, i: int) -> TwistWord:
    """Letters (u, v) at 1-based positions (i, i+1) become (v, t_v(u))."""
    _check_index(word, i)
    u, v = word.letters[i - 1], word.letters[i]
    moved = TwistLetter(_twisted_label(v.label, u.label), transvect(v.cls, u.cls), u.exponent)
    letters = list(word.letters)
    letters[i - 1], letters[i] = v, moved
    return TwistWord(word.genus, tuple(letters))


def inverse_hurwitz_move(word: TwistWord, i: int) -> TwistWord:
    """Letters (u, v) at 1-based positions (i, i+1) become (t_u^-1(v), u)."""
    _check_index(word, i)
    u, v = word.letters[i - 1], word.letters[i]
    moved = TwistLetter(_untwisted_label(u.label, v.label), transvect(u.cls, v.cls), v.exponent)
    letters = list(word.letters)
    letters[i - 1], letters[i] = moved, u
    return TwistWord(word.genus, tuple(letters))


def random_hurwitz_sequence(word: TwistWord, length: int, rng: random.Random) -> TwistWord:
    for _ in range(length):
        i = rng.randrange(1, len(word))
        word = hurwitz_move(word, i) if rng.random() < 0.5 else inverse_hurwitz_move(word, i)
    return word


def conjugate_word(word: TwistWord, f: SymplecticMap) -> TwistWord:
    if f.genus != word.genus:
        raise GenusMismatch(f"map genus {f.genus} vs word genus {word.genus}")
    return TwistWord(word.genus, tuple(replace(x, cls=f(x.cls)) for x in word.letters))


# --- Harer calculus ----------------------------------------------------------------------


def stallings_twist(word: TwistWord, c: HomologyClass, sign: int, label: str = "c") -> TwistWord:
    """Compose the knot monodromy with t_c^{+-1}, i.e. append c as the last-applied letter.

    A letter equal in label and class to the current last letter absorbs the exponent.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if c.genus != word.genus:
        raise GenusMismatch(f"class genus {c.genus} vs word genus {word.genus}")
    letters = list(word.letters)
    if letters and letters[-1].label == label and letters[-1].cls == c:
        total = letters[-1].exponent + sign
        letters.pop()
        if total:
            letters.append(TwistLetter(label, c, total))
    else:
        letters.append(TwistLetter(label, c, sign))
    return TwistWord(word.genus, tuple(letters))


def _embed(x: HomologyClass, images: Sequence[HomologyClass], genus: int) -> HomologyClass:
    out = HomologyClass.zero(genus)
    for k in x.support():
        out = out + images[k]
    return out


def hopf_plumb(
    word: TwistWord,
    c: HomologyClass,
    sign: int,
    embedding: Sequence[HomologyClass] = (),
    label: str = "h",
) -> TwistWord:
    """Plumb a Hopf band with core ``c`` (given on the stabilized surface).

    ``embedding[k]`` is the image of the k-th old basis vector; it must
    preserve the intersection pairing.  A word of genus 0 (empty, the unknot)
    takes an empty embedding.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    genus = c.genus
    if len(embedding) != 2 * word.genus:
        raise ValueError(f"embedding needs {2 * word.genus} images, got {len(embedding)}")
    for img in embedding:
        if img.genus != genus:
            raise GenusMismatch(f"embedding image genus {img.genus} vs target {genus}")
    for i in range(len(embedding)):
        for j in range(i + 1, len(embedding)):
            expected = 1 if i // 2 == j // 2 else 0
            if pairing_bits(embedding[i].bits, embedding[j].bits) != expected:
                raise ValueError("embedding does not preserve the intersection pairing")
    letters = [replace(x, cls=_embed(x.cls, embedding, genus)) for x in word.letters]
    letters.append(TwistLetter(label, c, sign))
    return TwistWord(genus, tuple(letters))


def empty_word(genus: int = 0) -> TwistWord:
    """Word with no letters; genus 0 stands for the disk fiber of the unknot."""
    return TwistWord(genus, ())


# --- group signature ---------------------------------------------------------------------


@dataclass(frozen=True)
class GroupSignature:
    orbit_sizes: Tuple[int, ...]
    chi_closed: Tuple[bool, ...] = ()
    partial: bool = False

    def to_dict(self) -> dict:
        return {
            "orbit_sizes": list(self.orbit_sizes),
            "chi_closed": list(self.chi_closed),
            "partial": self.partial,
        }


def _generators(word: TwistWord) -> List[int]:
    seen = []
    for x in word.letters:
        if x.exponent % 2 and x.cls.bits and x.cls.bits not in seen:
            seen.append(x.cls.bits)
    return seen


def group_signature(
    word: TwistWord,
    graphs: Sequence[HumphriesGraph] = (),
    labeled: Sequence[HomologyClass] = (),
    orbit_limit: int = 1 << 16,
) -> GroupSignature:
    """Orbit partition of H_1(Sigma; Z/2) under the group generated by the letters' transvections.

    For 2N <= 20 all classes are partitioned.  Otherwise only orbits of the
    ``labeled`` classes are explored (each capped at ``orbit_limit``) and
    the signature is flagged partial.
    """
    genus = word.genus
    dim = 2 * genus
    gens = _generators(word)
    closed = tuple(all(g.chi(HomologyClass(genus, c)) == 1 for c in gens) for g in graphs)
    if dim <= EXHAUSTIVE_DIM:
        size = 1 << dim
        nodes = np.arange(size, dtype=np.uint64)
        src, dst = [], []
        for c in gens:
            hit = pairing_array(nodes, c, genus).astype(bool)
            src.append(nodes[hit])
            dst.append(nodes[hit] ^ np.uint64(c))
        if src:
            rows = np.concatenate(src).astype(np.int64)
            cols = np.concatenate(dst).astype(np.int64)
        else:
            rows = cols = np.zeros(0, dtype=np.int64)
        graph = coo_matrix((np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(size, size))
        _, comp = connected_components(graph, directed=False)
        sizes = np.bincount(comp)
        return GroupSignature(tuple(sorted(int(s) for s in sizes)), closed, False)
    sizes = []
    done = set()
    for x in labeled:
        if x.bits in done:
            continue
        orbit = {x.bits}
        frontier = [x.bits]
        while frontier and len(orbit) < orbit_limit:
            v = frontier.pop()
            for c in gens:
                w = v ^ c if pairing_bits(v, c) else v
                if w not in orbit:
                    orbit.add(w)
                    frontier.append(w)
        done |= orbit
        sizes.append(len(orbit))
    return GroupSignature(tuple(sorted(sizes)), closed, True)
