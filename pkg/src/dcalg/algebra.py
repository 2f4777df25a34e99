"""Weight-truncated path algebras kQ/(I) with exact normal forms.

The algebra is built weight by weight.  A path of weight w ending in arrow a
is (standard path of weight w - wt(a)) followed by a, so the candidates for
each (source, target, w) block are standard paths of lower weight extended by
one arrow.  The relations contribute u*r for u standard, and a single
elimination per block with the largest monomials as pivots leaves the
standard monomials as basis.  Right multiplication by arrows is recorded as it
goes, and every other product is a composite of those tables.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from .linalg import ONE, ZERO, Eliminator, add_into
from .quiver import PresentationError, Word, WeightedQuiverPresentation, format_poly


class WeightOverflow(ArithmeticError):
    """A product or normal form would need weights beyond the cutoff."""


class Path(NamedTuple):
    source: str
    target: str
    word: Word
    weight: int

    def __str__(self) -> str:
        return " ".join(self.word) if self.word else f"e{self.source}"


Block = Tuple[str, str, int]


class TruncatedAlgebra:
    """kQ/(I) through weight w_max.

    ``basis(i, j, w)`` lists the standard monomials from i to j of weight w in
    increasing monomial order.  Elements are dicts Path -> Fraction.
    """

    def __init__(self, presentation: WeightedQuiverPresentation, w_max: int):
        if w_max < 0:
            raise PresentationError(f"weight cutoff must be nonnegative, got {w_max}")
        self.presentation = presentation
        self.w_max = int(w_max)
        self.support = frozenset(presentation.vertices)
        self._basis: Dict[Block, Tuple[Path, ...]] = {}
        self._rmul: Dict[Tuple[Path, str], Dict[Path, Fraction]] = {}
        self._prod_cache: Dict[Tuple[Path, Path], Dict[Path, Fraction]] = {}
        self._build()

    # -- construction ---------------------------------------------------------
    def _build(self) -> None:
        p = self.presentation
        verts = p.vertices
        for v in verts:
            self._basis[(v, v, 0)] = (Path(v, v, (), 0),)
        rel_shapes = [p.relation_shape(r, k) for k, r in enumerate(p.relations)]
        for w in range(1, self.w_max + 1):
            cands: Dict[Tuple[str, str], List[Path]] = {}
            for a in p.arrows:
                if a.weight > w:
                    continue
                for i in verts:
                    for b in self._basis.get((i, a.source, w - a.weight), ()):
                        cands.setdefault((i, a.target), []).append(
                            Path(i, a.target, b.word + (a.name,), w))
            images: Dict[Tuple[str, str], List[Dict[Word, Fraction]]] = {}
            for rel, (s, t, wr) in zip(p.relations, rel_shapes):
                if wr > w:
                    continue
                for i in verts:
                    for u in self._basis.get((i, s, w - wr), ()):
                        img: Dict[Word, Fraction] = {}
                        for word, c in rel.terms:
                            head = self._apply_word({u: ONE}, word[:-1])
                            last = word[-1]
                            for b, x in head.items():
                                key = b.word + (last,)
                                y = img.get(key, ZERO) + c * x
                                if y:
                                    img[key] = y
                                else:
                                    del img[key]
                        if img:
                            images.setdefault((i, t), []).append(img)
            for (i, j), plist in cands.items():
                plist.sort(key=lambda q: p.word_key(q.word))
                pos = {q.word: n for n, q in enumerate(plist)}
                el = Eliminator()
                for img in images.get((i, j), ()):
                    el.add({pos[k]: c for k, c in img.items()})
                pivots = set(el.rows)
                standard = tuple(q for n, q in enumerate(plist) if n not in pivots)
                if standard:
                    self._basis[(i, j, w)] = standard
                for n, q in enumerate(plist):
                    if n in pivots:
                        red, _ = el.reduce({n: ONE})
                        nf = {plist[m]: c for m, c in red.items()}
                    else:
                        nf = {q: ONE}
                    head = Path(i, self.presentation.arrow(q.word[-1]).source, q.word[:-1],
                                w - self.presentation.arrow(q.word[-1]).weight)
                    self._rmul[(head, q.word[-1])] = nf

    # -- basic queries --------------------------------------------------------
    def basis(self, i: str, j: str, w: int) -> Tuple[Path, ...]:
        if i not in self.support or j not in self.support:
            return ()
        if w > self.w_max:
            raise WeightOverflow(f"weight {w} exceeds cutoff {self.w_max}")
        return self._basis.get((i, j, w), ())

    def blocks(self) -> Iterator[Tuple[Block, Tuple[Path, ...]]]:
        for key in sorted(self._basis, key=self._block_sort):
            i, j, w = key
            if i in self.support and j in self.support:
                yield key, self._basis[key]

    def _block_sort(self, key: Block):
        order = {v: n for n, v in enumerate(self.presentation.vertices)}
        return (key[2], order[key[0]], order[key[1]])

    def dim(self) -> int:
        return sum(len(b) for _, b in self.blocks())

    def dims_by_weight(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for (_, _, w), b in self.blocks():
            out[w] = out.get(w, 0) + len(b)
        return out

    def paths_from(self, i: str, w: int) -> List[Path]:
        """Standard monomials starting at i of weight w, grouped by target in vertex order."""
        out = []
        for j in self.presentation.vertices:
            out.extend(self.basis(i, j, w))
        return out

    def paths_to(self, j: str, w: int) -> List[Path]:
        out = []
        for i in self.presentation.vertices:
            out.extend(self.basis(i, j, w))
        return out

    def idempotent(self, v: str) -> Path:
        if v not in self.support:
            raise PresentationError(f"vertex {v} is not in this algebra")
        return Path(v, v, (), 0)

    # -- arithmetic on dicts ----------------------------------------------------
    def _apply_word(self, vec: Mapping[Path, Fraction], word: Word) -> Dict[Path, Fraction]:
        cur = dict(vec)
        for a in word:
            arrow = self.presentation.arrow(a)
            nxt: Dict[Path, Fraction] = {}
            for q, c in cur.items():
                if q.target != arrow.source:
                    continue
                if q.weight + arrow.weight > self.w_max:
                    raise WeightOverflow(f"product reaches weight {q.weight + arrow.weight} > {self.w_max}")
                add_into(nxt, self._rmul[(q, a)], c)
            cur = nxt
        return cur

    def mul_paths(self, p: Path, q: Path) -> Dict[Path, Fraction]:
        if p.target != q.source:
            return {}
        if p.weight + q.weight > self.w_max:
            raise WeightOverflow(f"product of weight {p.weight + q.weight} exceeds cutoff {self.w_max}")
        key = (p, q)
        got = self._prod_cache.get(key)
        if got is None:
            got = self._apply_word({p: ONE}, q.word)
            self._prod_cache[key] = got
        return got

    def mul(self, x: Mapping[Path, Fraction], y: Mapping[Path, Fraction]) -> Dict[Path, Fraction]:
        out: Dict[Path, Fraction] = {}
        for p, c in x.items():
            for q, d in y.items():
                if p.target == q.source:
                    add_into(out, self.mul_paths(p, q), c * d)
        return out

    def nf_word(self, source: str, word: Word) -> Dict[Path, Fraction]:
        """Normal form of an arbitrary path given as arrow names."""
        pres = self.presentation
        if word:
            s, _ = pres.word_ends(word)
            if s != source:
                raise PresentationError(f"path {' '.join(word)} does not start at {source}")
            if pres.word_weight(word) > self.w_max:
                raise WeightOverflow(f"path {' '.join(word)} has weight beyond cutoff {self.w_max}")
        if source not in self.support:
            return {}
        return self._apply_word({Path(source, source, (), 0): ONE}, word)

    def nf_poly(self, terms: Iterable[Tuple[Word, Fraction]], source: Optional[str] = None) -> Dict[Path, Fraction]:
        out: Dict[Path, Fraction] = {}
        for word, c in terms:
            src = source if not word else self.presentation.word_ends(word)[0]
            if src is None:
                raise PresentationError("an idempotent term needs an explicit vertex")
            add_into(out, self.nf_word(src, word), Fraction(c))
        return out

    # -- element API ------------------------------------------------------------
    def element(self, spec=None, **kw) -> "AlgebraElement":
        """Build an element from a dict of words, a Path dict, or a string like ``"y z - w"``."""
        if spec is None:
            return AlgebraElement(self, {})
        if isinstance(spec, AlgebraElement):
            return spec
        if isinstance(spec, Path):
            return AlgebraElement(self, {spec: ONE})
        if isinstance(spec, str):
            from .dsl import parse_combination
            terms = parse_combination(spec, self.presentation)
            return AlgebraElement(self, self.nf_poly(terms, kw.get("vertex")))
        if isinstance(spec, Mapping):
            if all(isinstance(k, Path) for k in spec):
                return AlgebraElement(self, {k: Fraction(v) for k, v in spec.items() if v})
            return AlgebraElement(self, self.nf_poly(((tuple(k), v) for k, v in spec.items()), kw.get("vertex")))
        raise TypeError(f"cannot build an element from {spec!r}")

    def e(self, v: str) -> "AlgebraElement":
        return AlgebraElement(self, {self.idempotent(v): ONE})

    def one(self) -> "AlgebraElement":
        return AlgebraElement(self, {self.idempotent(v): ONE for v in self.presentation.vertices
                                     if v in self.support})

    def corner(self, vertices: Optional[Sequence[str]] = None) -> "TruncatedAlgebra":
        """View of eAe sharing all tables with this algebra."""
        keep = self.presentation.marked if vertices is None else tuple(vertices)
        if not keep:
            raise PresentationError("cornering needs a nonempty vertex set")
        view = object.__new__(TruncatedAlgebra)
        view.__dict__.update(self.__dict__)
        view.support = frozenset(keep) & self.support
        return view

    def is_standard(self, p: Path) -> bool:
        try:
            return p in self.basis(p.source, p.target, p.weight)
        except WeightOverflow:
            return False


class AlgebraElement:
    """Exact element of a TruncatedAlgebra: a rational combination of paths."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: TruncatedAlgebra, terms: Mapping[Path, Fraction]):
        self.algebra = algebra
        self.terms = {p: Fraction(c) for p, c in terms.items() if c}

    def __add__(self, other):
        out = dict(self.terms)
        add_into(out, _terms(self.algebra, other))
        return AlgebraElement(self.algebra, out)

    def __sub__(self, other):
        out = dict(self.terms)
        add_into(out, _terms(self.algebra, other), -ONE)
        return AlgebraElement(self.algebra, out)

    def __neg__(self):
        return AlgebraElement(self.algebra, {p: -c for p, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return AlgebraElement(self.algebra, {p: c * other for p, c in self.terms.items()})
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return AlgebraElement(self.algebra, {p: c * other for p, c in self.terms.items()})
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, AlgebraElement):
            return normal_form(self).terms == normal_form(other).terms
        if other == 0:
            return not normal_form(self).terms
        return NotImplemented

    def __hash__(self):
        return hash(tuple(sorted(normal_form(self).terms.items(), key=lambda t: (t[0].weight, t[0].word))))

    def is_zero(self) -> bool:
        return not normal_form(self).terms

    def weights(self) -> List[int]:
        return sorted({p.weight for p in self.terms})

    def __repr__(self):
        items = sorted(self.terms.items(), key=lambda t: (t[0].weight, self.algebra.presentation.word_key(t[0].word)))
        return format_poly(((p.word or (f"e{p.source}",), c) for p, c in items))


def _terms(algebra: TruncatedAlgebra, x) -> Dict[Path, Fraction]:
    if isinstance(x, AlgebraElement):
        return x.terms
    return algebra.element(x).terms


def build_truncated_algebra(p: WeightedQuiverPresentation, w_max: int) -> TruncatedAlgebra:
    return TruncatedAlgebra(p, w_max)


def normal_form(x: AlgebraElement) -> AlgebraElement:
    A = x.algebra
    out: Dict[Path, Fraction] = {}
    for p, c in x.terms.items():
        if p.weight > A.w_max:
            raise WeightOverflow(f"element has weight {p.weight} beyond cutoff {A.w_max}")
        if A.is_standard(p):
            add_into(out, {p: ONE}, c)
        else:
            add_into(out, A.nf_word(p.source, p.word), c)
    return AlgebraElement(A, out)


def multiply(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    if x.algebra is not y.algebra and x.algebra.presentation != y.algebra.presentation:
        raise PresentationError("elements belong to different algebras")
    A = x.algebra
    return AlgebraElement(A, A.mul(normal_form(x).terms, normal_form(y).terms))


def corner_algebra(A: TruncatedAlgebra) -> TruncatedAlgebra:
    return A.corner()


def quotient_by_idempotent_ideal(A: TruncatedAlgebra) -> TruncatedAlgebra:
    """A/AeA, built from the full subquiver on the unmarked vertices."""
    pres = A.presentation
    if not pres.marked:
        raise PresentationError("no marked vertices: the quotient is the algebra itself")
    keep = [v for v in pres.vertices if v not in set(pres.marked)]
    return TruncatedAlgebra(pres.full_subquiver(keep).with_marked(()), A.w_max)


def quotient_map(A: TruncatedAlgebra, Q: TruncatedAlgebra, x: Mapping[Path, Fraction]) -> Dict[Path, Fraction]:
    """Canonical surjection A -> A/AeA on normal forms."""
    out: Dict[Path, Fraction] = {}
    keep = set(Q.presentation.vertices)
    for p, c in x.items():
        if p.source not in keep or p.target not in keep:
            continue
        if any(Q.presentation._arrow_index.get(a) is None for a in p.word):
            continue
        verts = [p.source] + [A.presentation.arrow(a).target for a in p.word]
        if any(v not in keep for v in verts):
            continue
        add_into(out, Q.nf_word(p.source, p.word), c)
    return out


def certify_finite(A: TruncatedAlgebra) -> bool:
    L = A.presentation.max_arrow_weight
    for (_, _, w), b in A.blocks():
        if w > A.w_max - L and b:
            return False
    return True
