"""Weighted quivers with relations."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .linalg import frac_str

Word = Tuple[str, ...]


class PresentationError(ValueError):
    """Bad quiver input (unknown names, inhomogeneous relations, ...)."""


@dataclass(frozen=True)
class Arrow:
    name: str
    source: str
    target: str
    weight: int


@dataclass(frozen=True)
class Polynomial:
    """A finite rational combination of words, stored sorted and without zeros."""

    terms: Tuple[Tuple[Word, Fraction], ...]

    @classmethod
    def from_dict(cls, d: Mapping[Word, Fraction]) -> "Polynomial":
        return cls(tuple(sorted(((tuple(w), Fraction(c)) for w, c in d.items() if c),
                                key=lambda t: t[0])))

    def as_dict(self) -> Dict[Word, Fraction]:
        return dict(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self):
        return iter(self.terms)


def format_poly(terms: Iterable[Tuple[Word, Fraction]], sep: str = " ", unit: str = "1") -> str:
    """Render a combination of words as e.g. ``a y y + 1/2 a b a - x``."""
    parts = []
    for word, c in terms:
        mono = sep.join(word) if word else unit
        c = Fraction(c)
        sign = "-" if c < 0 else "+"
        a = abs(c)
        body = mono if a == 1 else f"{frac_str(a)} {mono}"
        parts.append((sign, body))
    if not parts:
        return "0"
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


@dataclass(frozen=True)
class WeightedQuiverPresentation:
    vertices: Tuple[str, ...]
    arrows: Tuple[Arrow, ...]
    relations: Tuple[Polynomial, ...] = ()
    marked: Tuple[str, ...] = ()
    _arrow_index: Dict[str, int] = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_arrow_index", {a.name: i for i, a in enumerate(self.arrows)})
        self.validate()

    # -- construction helpers -------------------------------------------------
    @classmethod
    def build(cls, vertices: Sequence[str], arrows: Sequence[Tuple[str, str, str, int]],
              relations: Sequence[Mapping[Word, Fraction]] = (), marked: Sequence[str] = ()):
        arr = tuple(Arrow(n, s, t, int(w)) for n, s, t, w in arrows)
        rels = tuple(Polynomial.from_dict({tuple(k): Fraction(v) for k, v in r.items()}) for r in relations)
        return cls(tuple(vertices), arr, rels, tuple(marked))

    def validate(self) -> None:
        if len(set(self.vertices)) != len(self.vertices):
            raise PresentationError("duplicate vertex name")
        names = [a.name for a in self.arrows]
        if len(set(names)) != len(names):
            raise PresentationError("duplicate arrow name")
        if set(names) & set(self.vertices):
            raise PresentationError("arrow and vertex names must differ")
        vs = set(self.vertices)
        for a in self.arrows:
            if a.source not in vs or a.target not in vs:
                raise PresentationError(f"arrow {a.name} uses an unknown vertex")
            if a.weight < 1:
                raise PresentationError(f"arrow {a.name} has weight {a.weight}; weights must be positive")
        for v in self.marked:
            if v not in vs:
                raise PresentationError(f"marked vertex {v} is not a vertex")
        if len(set(self.marked)) != len(self.marked):
            raise PresentationError("vertex marked twice")
        for k, rel in enumerate(self.relations):
            self.relation_shape(rel, k)

    # -- queries ------------------------------------------------------------
    def arrow(self, name: str) -> Arrow:
        try:
            return self.arrows[self._arrow_index[name]]
        except KeyError:
            raise PresentationError(f"unknown arrow {name}") from None

    def arrow_index(self, name: str) -> int:
        return self._arrow_index[name]

    @property
    def max_arrow_weight(self) -> int:
        return max((a.weight for a in self.arrows), default=0)

    def word_weight(self, word: Word) -> int:
        return sum(self.arrow(a).weight for a in word)

    def word_ends(self, word: Word) -> Tuple[str, str]:
        """Source and target of a nonempty composable word (left to right)."""
        if not word:
            raise PresentationError("empty word has no well-defined ends")
        arrows = [self.arrow(a) for a in word]
        for x, y in zip(arrows, arrows[1:]):
            if x.target != y.source:
                raise PresentationError(f"word {' '.join(word)} is not a path: {x.name} ends at {x.target}, "
                                        f"{y.name} starts at {y.source}")
        return arrows[0].source, arrows[-1].target

    def relation_shape(self, rel: Polynomial, k: int = 0) -> Tuple[str, str, int]:
        if not rel.terms:
            raise PresentationError(f"relation {k + 1} is zero")
        shapes = set()
        weights = {}
        for word, _ in rel.terms:
            if not word:
                raise PresentationError(f"relation {k + 1} contains a vertex idempotent")
            s, t = self.word_ends(word)
            shapes.add((s, t))
            weights[word] = self.word_weight(word)
        if len(shapes) > 1:
            raise PresentationError(f"relation {k + 1} ({format_poly(rel.terms)}) mixes paths with different "
                                    f"endpoints: {sorted(shapes)}")
        if len(set(weights.values())) > 1:
            detail = ", ".join(f"{' '.join(w)}: {wt}" for w, wt in weights.items())
            raise PresentationError(f"relation {k + 1} ({format_poly(rel.terms)}) is not weight-homogeneous "
                                    f"({detail})")
        (s, t), = shapes
        return s, t, next(iter(weights.values()))

    def word_key(self, word: Word) -> Tuple:
        """Monomial order key: longer is larger, then lexicographic in declared arrow order."""
        return (len(word), tuple(self._arrow_index[a] for a in word))

    def with_marked(self, marked: Sequence[str]) -> "WeightedQuiverPresentation":
        return WeightedQuiverPresentation(self.vertices, self.arrows, self.relations, tuple(marked))

    def with_relations(self, relations: Sequence[Polynomial]) -> "WeightedQuiverPresentation":
        return WeightedQuiverPresentation(self.vertices, self.arrows, tuple(relations), self.marked)

    def full_subquiver(self, keep: Sequence[str]) -> "WeightedQuiverPresentation":
        """Delete the vertices outside keep together with every path through them."""
        keep_set = set(keep)
        verts = tuple(v for v in self.vertices if v in keep_set)
        arrows = tuple(a for a in self.arrows if a.source in keep_set and a.target in keep_set)
        alive = {a.name for a in arrows}
        rels = []
        for rel in self.relations:
            d = {w: c for w, c in rel.terms if all(x in alive for x in w)}
            if d:
                rels.append(Polynomial.from_dict(d))
        marked = tuple(v for v in self.marked if v in keep_set)
        return WeightedQuiverPresentation(verts, arrows, tuple(rels), marked)
