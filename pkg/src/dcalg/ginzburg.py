"""Superpotentials, cyclic derivatives, Ginzburg dgas and Jacobi algebras."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .linalg import ONE, ZERO, add_into
from .quiver import Polynomial, PresentationError, WeightedQuiverPresentation, Word, format_poly


def canonical_rotation(word: Word, pres: WeightedQuiverPresentation) -> Word:
    idx = [pres.arrow_index(a) for a in word]
    best = min(range(len(word)), key=lambda k: idx[k:] + idx[:k])
    return word[best:] + word[:best]


@dataclass(frozen=True)
class Superpotential:
    """A combination of cycles, each stored by its least rotation."""

    presentation: WeightedQuiverPresentation
    terms: Tuple[Tuple[Word, Fraction], ...]

    @classmethod
    def from_terms(cls, pres: WeightedQuiverPresentation, terms: Iterable[Tuple[Word, Fraction]]) -> "Superpotential":
        acc: Dict[Word, Fraction] = {}
        for w, c in terms:
            w = tuple(w)
            if not w:
                raise PresentationError("a superpotential term must be a nonempty cycle")
            s, t = pres.word_ends(w)
            if s != t:
                raise PresentationError(f"superpotential word {' '.join(w)} is not a cycle")
            add_into(acc, {canonical_rotation(w, pres): Fraction(c)})
        key = lambda t: pres.word_key(t[0])
        return cls(pres, tuple(sorted(acc.items(), key=key)))

    @classmethod
    def parse(cls, pres: WeightedQuiverPresentation, text: str) -> "Superpotential":
        from .dsl import parse_combination
        return cls.from_terms(pres, parse_combination(text, pres))

    def weights(self) -> List[int]:
        return sorted({self.presentation.word_weight(w) for w, _ in self.terms})

    def __str__(self) -> str:
        return format_poly(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def arrows_used(self) -> List[str]:
        used = {a for w, _ in self.terms for a in w}
        return [a.name for a in self.presentation.arrows if a.name in used]


def cyclic_derivative(W: Superpotential, a: str) -> Dict[Word, Fraction]:
    """Sum of v u over every occurrence W = u a v, read cyclically once per occurrence."""
    W.presentation.arrow(a)
    out: Dict[Word, Fraction] = {}
    for w, c in W.terms:
        for k, x in enumerate(w):
            if x == a:
                add_into(out, {w[k + 1:] + w[:k]: c})
    return out


def superpotential_weight(W: Superpotential) -> int:
    ws = W.weights()
    if len(ws) > 1:
        raise PresentationError(f"superpotential is not weight-homogeneous (weights {ws})")
    if not ws:
        raise PresentationError("the zero superpotential has no weight; pass one explicitly")
    return ws[0]


def ginzburg_dga(p: WeightedQuiverPresentation, W: Superpotential, weight: Optional[int] = None,
                 w_bound: Optional[int] = None):
    """The Ginzburg dga of (p, W) as a free dga with positive weights.

    a has degree 0 and weight wt(a); a* runs backwards with degree -1 and
    weight wt(W) - wt(a); z_i is a loop at i of degree -2 and weight wt(W).
    d(a*) = -d_a W and d(z_i) = sum_a e_i [a, a*] e_i.
    """
    from .koszul import FreeDga, Generator, KoszulError
    if W.presentation.arrows != p.arrows:
        raise PresentationError("superpotential lives on a different quiver")
    wW = superpotential_weight(W) if weight is None else weight
    gens, diff = [], {}
    names = {a.name for a in p.arrows} | set(p.vertices)
    star = {}
    for a in p.arrows:
        s = a.name + "*"
        if s in names:
            raise PresentationError(f"generator name {s} clashes with the quiver")
        star[a.name] = s
        if wW - a.weight <= 0:
            raise PresentationError(f"superpotential weight {wW} leaves {s} without positive weight")
    zs = {v: ("z" if len(p.vertices) == 1 else f"z{v}") for v in p.vertices}
    for a in p.arrows:
        gens.append(Generator(a.name, 0, a.weight, a.source, a.target))
    for a in p.arrows:
        gens.append(Generator(star[a.name], -1, wW - a.weight, a.target, a.source))
    for v in p.vertices:
        gens.append(Generator(zs[v], -2, wW, v, v))
    for a in p.arrows:
        der = cyclic_derivative(W, a.name)
        if der:
            diff[star[a.name]] = [(w, -c) for w, c in sorted(der.items())]
    for v in p.vertices:
        terms = []
        for a in p.arrows:
            if a.source == v:
                terms.append(((a.name, star[a.name]), ONE))
            if a.target == v:
                terms.append(((star[a.name], a.name), -ONE))
        if terms:
            diff[zs[v]] = terms
    try:
        G = FreeDga(gens, diff, vertices=p.vertices,
                    window={"abs_weight": wW if w_bound is None else w_bound})
    except KoszulError as exc:
        raise PresentationError(f"superpotential is not weight-compatible: {exc}") from None
    if not G.check_d_squared():
        raise ArithmeticError("d^2 != 0 on the Ginzburg dga")
    return G


GinzburgDga = ginzburg_dga


def jacobi_relations(W: Superpotential) -> List[Polynomial]:
    p = W.presentation
    rels = []
    for a in p.arrows:
        der = cyclic_derivative(W, a.name)
        if der:
            rel = Polynomial.from_dict(der)
            p.relation_shape(rel)        # raises on inhomogeneous derivatives
            rels.append(rel)
    return rels


def jacobi_algebra(p: WeightedQuiverPresentation, W: Superpotential, w_max: int):
    """kQ / (d_a W : a), truncated at w_max."""
    from .algebra import build_truncated_algebra
    q = p.with_relations(jacobi_relations(W))
    return build_truncated_algebra(q, w_max)


def contraction_subquiver(p: WeightedQuiverPresentation, W: Superpotential,
                          keep: Sequence[str]) -> Tuple[WeightedQuiverPresentation, Superpotential]:
    """Full subquiver on keep, with W restricted to the cycles that survive."""
    if not keep:
        raise PresentationError("keep at least one vertex")
    for v in keep:
        if v not in p.vertices:
            raise PresentationError(f"unknown vertex {v}")
    q = p.full_subquiver(keep).with_relations(())
    alive = {a.name for a in q.arrows}
    terms = [(w, c) for w, c in W.terms if all(x in alive for x in w)]
    return q, Superpotential.from_terms(q, terms)


def same_relations(A, B, relations_of_A: Sequence[Polynomial], relations_of_B: Sequence[Polynomial]) -> bool:
    """Whether each list of relations vanishes in the other truncated algebra.

    A and B are truncations of algebras on the same quiver; this makes the
    two ideals agree in every weight below both cutoffs.
    """
    for X, rels in ((B, relations_of_A), (A, relations_of_B)):
        for rel in rels:
            src = X.presentation.word_ends(rel.terms[0][0])[0]
            if X.nf_poly(rel.terms, src):
                return False
    return True


@dataclass
class PresentationMatch:
    """Generator images g -> factor * matched generator making two free dgas equal."""

    matching: Dict[str, str]
    factors: Dict[str, Fraction]

    def lines(self) -> List[str]:
        out = []
        for g, f in self.matching.items():
            c = self.factors[g]
            out.append(f"{g} -> {'' if c == 1 else ('-' if c == -1 else str(c) + ' ')}{f}")
        return out


def match_presentations(G, F, matching: Dict[str, str]) -> Optional[PresentationMatch]:
    """Look for nonzero rationals c_g with g -> c_g f(g) carrying dG onto dF.

    Generators are taken in increasing |weight|.  Those with zero
    differential keep factor 1; every other factor is then forced by a
    single term and checked on all the others.  Bidegrees must agree up to
    an overall sign of the weights.
    """
    if set(matching) != {g.name for g in G.generators} or set(matching.values()) != {f.name for f in F.generators}:
        raise ValueError("matching must be a bijection of generator names")
    flip = G.sign != F.sign
    for g in G.generators:
        f = F.generator(matching[g.name])
        if (g.degree, -g.weight if flip else g.weight) != (f.degree, f.weight):
            return None
    factors: Dict[str, Fraction] = {}
    fidx = {g.name: F.index(matching[g.name]) for g in G.generators}
    for g in sorted(G.generators, key=lambda g: (abs(g.weight), G.index(g.name))):
        dg = G.d_gen(g.name)
        image: Dict = {}
        for w, c in dg.items():
            coef = c
            for i in w:
                coef *= factors[G.generators[i].name]
            add_into(image, {tuple(fidx[G.generators[i].name] for i in w): coef})
        df = F.d_gen(matching[g.name])
        if not image and not df:
            factors[g.name] = ONE
            continue
        if not image or not df or set(image) != set(df):
            return None
        w0 = min(df)
        c = image[w0] / df[w0]
        if any(image[w] != c * df[w] for w in df):
            return None
        factors[g.name] = c
    return PresentationMatch(dict(matching), factors)
