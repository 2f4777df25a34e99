"""Derived quotients A/^L AeA and derived contraction algebras.

The Drinfeld model adjoins h with dh = e.  Its degree -n part is spanned by
words x_0 h x_1 h ... h x_n with x_0 in Ae, x_n in eA and the middle letters
in R = eAe; we store them as tuples of paths meeting at marked vertices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .algebra import Path, TruncatedAlgebra, build_truncated_algebra, certify_finite, quotient_by_idempotent_ideal, quotient_map
from .ainfty import AInfinityStructure, transfer_minimal_model
from .chain import BlockContraction, BlockDga, CohomologyTable, ComplexError, Key, cohomology, end_dga, resolve_simple
from .koszul import FreeDga, koszul_dual
from .linalg import ONE, Eliminator, add_into, frac_str, scaled
from .quiver import PresentationError, WeightedQuiverPresentation


class DerivedQuotientError(ValueError):
    pass


def _chains(A: TruncatedAlgebra, n: int, w: int, middle_nonunit: bool = False) -> List[Tuple[Path, ...]]:
    """Tuples (x_0, ..., x_n) of basis paths meeting at marked vertices, total weight w.

    With middle_nonunit the middle letters have positive weight (the
    normalised complex).
    """
    marked = A.presentation.marked
    verts = A.presentation.vertices
    # states: (last vertex, weight used) -> list of prefixes
    states: Dict[Tuple[str, int], List[Tuple[Path, ...]]] = {}
    for m in marked:
        for w0 in range(w + 1):
            for i in verts:
                for p in A.basis(i, m, w0):
                    states.setdefault((m, w0), []).append((p,))
    for _ in range(n - 1):
        nxt: Dict[Tuple[str, int], List[Tuple[Path, ...]]] = {}
        for (m, used), prefixes in sorted(states.items()):
            for m2 in marked:
                for wk in range(1 if middle_nonunit else 0, w - used + 1):
                    for p in A.basis(m, m2, wk):
                        lst = nxt.setdefault((m2, used + wk), [])
                        lst.extend(pre + (p,) for pre in prefixes)
        states = nxt
    out = []
    for (m, used), prefixes in sorted(states.items()):
        for t in verts:
            for p in A.basis(m, t, w - used):
                out.extend(pre + (p,) for pre in prefixes)
    out.sort(key=lambda c: tuple((p.source, p.target, p.weight, p.word) for p in c))
    return out


class DrinfeldModel(BlockDga):
    """A *_R k[h] with dh = e, through cohomological degree -hdeg_max - 1 and weight w_max.

    Labels of degree -n (n >= 1) are tuples of n + 1 paths; degree-0 labels
    are 1-tuples.  d is the alternating sum of adjacent products and the
    product joins the last letter of one word to the first of the next.
    """

    def __init__(self, A: TruncatedAlgebra, hdeg_max: int, w_max: Optional[int] = None, normalized: bool = False):
        if not A.presentation.marked:
            raise DerivedQuotientError("no marked vertices: the derived quotient is A itself")
        if hdeg_max < 0:
            raise DerivedQuotientError("hdeg_max must be nonnegative")
        self.A = A
        self.hdeg_max = hdeg_max
        self.W = A.w_max if w_max is None else w_max
        if self.W > A.w_max:
            raise DerivedQuotientError(f"weight cutoff {self.W} exceeds the algebra's {A.w_max}")
        self.normalized = normalized
        self.window = {"degree": (-hdeg_max, 0), "weight": (0, self.W)}
        self._basis: Dict[Key, Tuple] = {}
        self._d: Dict = {}

    def keys(self):
        return [(-n, w) for n in range(self.hdeg_max + 1) for w in range(self.W + 1) if self.basis((-n, w))]

    def in_window(self, key):
        return -self.hdeg_max - 1 <= key[0] <= 0 and 0 <= key[1] <= self.W

    def basis(self, key):
        got = self._basis.get(key)
        if got is not None:
            return got
        deg, w = key
        if not self.in_window(key):
            got = ()
        elif deg == 0:
            got = tuple((p,) for i in self.A.presentation.vertices for j in self.A.presentation.vertices
                        for p in self.A.basis(i, j, w))
        else:
            got = tuple(_chains(self.A, -deg, w, self.normalized))
        self._basis[key] = got
        return got

    def d(self, key, lab):
        got = self._d.get(lab)
        if got is not None:
            return got
        out: Dict = {}
        n = len(lab) - 1
        for i in range(n):
            prod = self.A.mul_paths(lab[i], lab[i + 1])
            sign = -1 if i % 2 else 1
            for p, c in prod.items():
                add_into(out, {lab[:i] + (p,) + lab[i + 2:]: sign * c})
        if self.normalized:
            out = {k: v for k, v in out.items() if all(q.weight > 0 for q in k[1:-1])}
        self._d[lab] = out
        return out

    def mul(self, k1, l1, k2, l2):
        if k1[1] + k2[1] > self.W:
            return {}
        out = {}
        for p, c in self.A.mul_paths(l1[-1], l2[0]).items():
            new = l1[:-1] + (p,) + l2[1:]
            if self.normalized and any(q.weight == 0 for q in new[1:-1]):
                continue
            out[new] = c
        return out

    def unit(self):
        return (0, 0), {(self.A.idempotent(v),): ONE for v in self.A.presentation.vertices}

    def label_text(self, lab) -> str:
        return "|".join(" ".join(p.word) for p in lab)


def drinfeld_model(A: TruncatedAlgebra, hdeg_max: int, w_max: Optional[int] = None) -> DrinfeldModel:
    M = DrinfeldModel(A, hdeg_max, w_max)
    from .chain import check_d_squared
    if not check_d_squared(M, [(-n, w) for n in range(1, hdeg_max + 2) for w in range(M.W + 1)]):
        raise ComplexError("d^2 != 0 in the Drinfeld model")
    return M


@dataclass
class DqCohomology:
    table: CohomologyTable
    model: DrinfeldModel
    contraction: BlockContraction
    h0_structure: Dict[Tuple[Key, int, Key, int], Dict[Tuple[Key, int], Fraction]] = field(default_factory=dict)

    def dims_by_degree(self) -> Dict[int, int]:
        return self.table.by_degree()


def dq_cohomology(A: TruncatedAlgebra, hdeg_max: int, w_max: Optional[int] = None) -> DqCohomology:
    """Cohomology of the Drinfeld model in degrees -hdeg_max..0, with H^0 structure constants."""
    M = DrinfeldModel(A, hdeg_max, w_max)
    K = BlockContraction(M)
    tab = cohomology(M, M.keys(), K)
    tab.window = dict(M.window)
    h0 = {}
    zero_keys = [k for k in tab.dims if k[0] == 0 and tab.dims[k]]
    for k1 in zero_keys:
        for i, r1 in enumerate(K.reps(k1)):
            for k2 in zero_keys:
                if k1[1] + k2[1] > M.W:
                    continue
                for j, r2 in enumerate(K.reps(k2)):
                    k3 = (0, k1[1] + k2[1])
                    prod = M.mul_vec(k1, r1, k2, r2)
                    h0[(k1, i, k2, j)] = {(k3, l): c for l, c in K.pi(k3, prod).items()} if prod else {}
    return DqCohomology(tab, M, K, h0)


def h0_matches_quotient(dq: DqCohomology) -> bool:
    """H^0 with its product agrees with A/AeA under the canonical surjection."""
    A = dq.model.A
    Q = quotient_by_idempotent_ideal(A)
    K = dq.contraction
    images = {}
    for key, n in dq.table.dims.items():
        if key[0] != 0:
            continue
        for i, rep in enumerate(K.reps(key)):
            images[(key, i)] = quotient_map(A, Q, {lab[0]: c for lab, c in rep.items()})
    # dimensions and injectivity
    el = Eliminator()
    cols: Dict[Path, int] = {}
    for img in images.values():
        vec = {cols.setdefault(p, len(cols)): c for p, c in img.items()}
        if not el.add(vec)[0]:
            return False
    if len(images) != sum(1 for _, b in Q.blocks() for _ in b if _.weight <= dq.model.W):
        return False
    for (k1, i, k2, j), out in dq.h0_structure.items():
        lhs = Q.mul(images[(k1, i)], images[(k2, j)])
        rhs: Dict = {}
        for lab, c in out.items():
            add_into(rhs, images[lab], c)
        add_into(lhs, rhs, -ONE)
        if lhs:
            return False
    return True


def relative_tor_dims(A: TruncatedAlgebra, n_max: int, w_max: Optional[int] = None) -> Dict[Tuple[int, int], int]:
    """dim Tor_n^R(Ae, eA) per (n, weight) from the normalised relative bar complex.

    B_n = Ae (x)_l Rbar^{(x) n} (x)_l eA with Rbar the positive-weight part of
    R = eAe and l the span of the marked idempotents.  Independent of the
    Drinfeld model code: chains are re-enumerated and d is built directly.
    """
    W = A.w_max if w_max is None else w_max
    marked = A.presentation.marked
    verts = A.presentation.vertices

    def chains(n, w):
        out = []
        # compositions of w into n + 2 parts, middle parts >= 1
        def rec(prefix, vert, used, k):
            if k == n + 1:
                for t in verts:
                    for p in A.basis(vert, t, w - used):
                        out.append(prefix + (p,))
                return
            for m in marked:
                lo = 1 if k > 0 else 0
                for wk in range(lo, w - used + 1):
                    srcs = [vert] if vert is not None else verts
                    for s in srcs:
                        for p in A.basis(s, m, wk):
                            rec(prefix + (p,), m, used + wk, k + 1)
        rec((), None, 0, 0)
        return out

    def boundary(c):
        out: Dict = {}
        for i in range(len(c) - 1):
            for p, x in A.mul_paths(c[i], c[i + 1]).items():
                new = c[:i] + (p,) + c[i + 2:]
                if any(q.weight == 0 for q in new[1:-1]):
                    continue
                add_into(out, {new: (-1 if i % 2 else 1) * x})
        return out

    from .linalg import rank
    dims = {}
    for w in range(W + 1):
        ch = {n: chains(n, w) for n in range(0, n_max + 2)}
        ranks = {}
        for n in range(1, n_max + 2):
            idx = {c: k for k, c in enumerate(ch[n - 1])}
            ranks[n] = rank([{idx[k]: x for k, x in boundary(c).items()} for c in ch[n]])
        for n in range(0, n_max + 1):
            dim = len(ch[n]) - (ranks[n] if n >= 1 else 0) - ranks[n + 1]
            if dim:
                dims[(n, w)] = dim
    return dims


# ---------------------------------------------------------------------------
# marked relations

@dataclass(frozen=True)
class MarkedRelation:
    relation: int
    marks: Tuple[int, ...]                          # split position per monomial
    terms: Tuple[Tuple[Tuple[str, ...], Tuple[str, ...], Fraction], ...]   # (u, v, coefficient)
    source: str
    target: str
    weight: int

    def text(self) -> str:
        parts = []
        for k, (u, v, c) in enumerate(self.terms):
            body = f"{''.join(u)}|{''.join(v)}"
            mag = abs(c)
            coef = "" if mag == 1 else f"{frac_str(mag)} "
            if k == 0:
                parts.append(("-" if c < 0 else "") + coef + body)
            else:
                parts.append(("- " if c < 0 else "+ ") + coef + body)
        return " ".join(parts)

    def recompose(self) -> Dict[Tuple[str, ...], Fraction]:
        out: Dict = {}
        for u, v, c in self.terms:
            add_into(out, {tuple(u) + tuple(v): c})
        return out


@dataclass
class MarkedRelationReport:
    relations: List[MarkedRelation]
    basis: List[MarkedRelation]
    rank: int
    bound: int
    window: Dict


def enumerate_marked_relations(p: WeightedQuiverPresentation) -> List[MarkedRelation]:
    marked = set(p.marked)
    out = []
    for ri, rel in enumerate(p.relations):
        s, t, w = p.relation_shape(rel, ri)
        options = []
        for word, c in rel.terms:
            verts = [p.arrow(word[0]).source] + [p.arrow(a).target for a in word] if word else [s]
            options.append([k for k, v in enumerate(verts) if v in marked])
        if any(not o for o in options):
            continue
        for marks in itertools.product(*options):
            terms = tuple((tuple(word[:k]), tuple(word[k:]), c) for (word, c), k in zip(rel.terms, marks))
            out.append(MarkedRelation(ri, tuple(marks), terms, s, t, w))
    return out


def marking_bound(A: TruncatedAlgebra) -> int:
    """d^2 * l with d = dim A/AeA and l = sum_i prod_j max(1, len_ij - 1)."""
    p = A.presentation
    ell = 0
    for rel in p.relations:
        prod = 1
        for word, _ in rel.terms:
            prod *= max(1, len(word) - 1)
        ell += prod
    Q = quotient_by_idempotent_ideal(A)
    d = Q.dim()
    return d * d * ell


def _marked_vector(A: TruncatedAlgebra, m: MarkedRelation) -> Dict:
    out: Dict = {}
    for u, v, c in m.terms:
        mid = A.presentation.arrow(v[0]).source if v else A.presentation.arrow(u[-1]).target
        uu = A.nf_word(m.source, u) if u else {A.idempotent(mid): ONE}
        vv = A.nf_word(mid, v) if v else {A.idempotent(mid): ONE}
        for p1, c1 in uu.items():
            for p2, c2 in vv.items():
                add_into(out, {(p1, p2): c * c1 * c2})
    return out


def marked_relations(A: TruncatedAlgebra) -> MarkedRelationReport:
    """Marked relations, a reduced basis of the classes they span in H^{-1}, and the rank.

    Classes are taken over A/AeA: each marked relation is also multiplied on
    both sides by the positive-weight basis of A/AeA.  Candidates are tried in
    a fixed order (fewest distinct homotopy moves first) and kept when they
    raise the rank.
    """
    p = A.presentation
    if not p.marked:
        raise DerivedQuotientError("no marked vertices")
    rels = enumerate_marked_relations(p)
    if not rels:
        return MarkedRelationReport([], [], 0, marking_bound(A) if p.relations else 0, {"weight": (0, A.w_max)})
    wmax = max(m.weight for m in rels)
    if wmax > A.w_max:
        raise DerivedQuotientError("relations exceed the weight cutoff")
    M = DrinfeldModel(A, 1, A.w_max)
    K = BlockContraction(M)
    Q = quotient_by_idempotent_ideal(A)
    qpaths = [q for (_, _, w), b in Q.blocks() for q in b if w > 0]
    el = Eliminator()
    cols: Dict = {}
    basis = []
    # order: by relation, then by how far marks sit from the ends
    def order(m: MarkedRelation):
        return (m.relation, sum(min(k, len(u) + len(v) - k) for k, (u, v, _) in zip(m.marks, m.terms)), m.marks)
    for m in sorted(rels, key=order):
        vec = _marked_vector(A, m)
        key = (-1, m.weight)
        lift = {(a, b): c for (a, b), c in vec.items()}
        if M.d_vec(key, lift):
            raise ComplexError(f"marked relation {m.text()} is not a cocycle")
        h = K.pi(key, lift)
        cv = {cols.setdefault((key, i), len(cols)): c for i, c in h.items()}
        if cv and el.add(cv)[0]:
            basis.append(m)
    # extend by A/AeA multiples to get the full span
    span_rank = len(basis)
    for m in rels:
        for left in qpaths:
            for right in [None] + qpaths:
                vec = _marked_vector(A, m)
                lp = A.nf_word(left.source, left.word) if left is not None else None
                out: Dict = {}
                w = m.weight + left.weight + (right.weight if right else 0)
                if w > A.w_max:
                    continue
                for (a, b), c in vec.items():
                    for a2, c2 in A.mul(lp, {a: ONE}).items():
                        bb = {b: ONE} if right is None else A.mul({b: ONE}, A.nf_word(right.source, right.word))
                        for b2, c3 in bb.items():
                            add_into(out, {(a2, b2): c * c2 * c3})
                if not out:
                    continue
                h = K.pi((-1, w), out)
                cv = {cols.setdefault(((-1, w), i), len(cols)): c for i, c in h.items()}
                if cv and el.add(cv)[0]:
                    span_rank += 1
    return MarkedRelationReport(rels, basis, span_rank, marking_bound(A), {"weight": (0, A.w_max)})


# ---------------------------------------------------------------------------
# the derived contraction algebra pipeline

@dataclass
class DcaResult:
    dga: FreeDga
    minimal_model: AInfinityStructure
    ext: CohomologyTable
    window: Dict


def derived_contraction_algebra(p: WeightedQuiverPresentation, vertex: str, w_max: int, hdeg_max: int,
                                arity_max: int, names: Optional[Dict[Key, str]] = None) -> DcaResult:
    """resolve_simple -> end_dga -> transfer_minimal_model -> koszul_dual."""
    if vertex not in p.vertices:
        raise PresentationError(f"unknown vertex {vertex}")
    others = tuple(v for v in p.vertices if v != vertex)
    if set(p.marked) != set(others):
        p = p.with_marked(others)
    A = build_truncated_algebra(p, w_max)
    Q = quotient_by_idempotent_ideal(A)
    if list(Q.presentation.vertices) != [vertex]:
        raise DerivedQuotientError("A/AeA is not local")
    if not certify_finite(Q):
        raise DerivedQuotientError("A/AeA is not finite-dimensional within the weight cutoff")
    return simple_koszul_dual(A, vertex, hdeg_max, arity_max, names)


def simple_koszul_dual(A: TruncatedAlgebra, vertex: str, hdeg_max: int, arity_max: int,
                       names: Optional[Dict[Key, str]] = None) -> DcaResult:
    """Koszul dual of the minimal model of REnd(S) for the simple S at vertex."""
    from .chain import ext_table
    w_max = A.w_max
    C = resolve_simple(A, vertex, hdeg_max)
    E = end_dga(C)
    ext = ext_table(E)
    M = transfer_minimal_model(E, arity_max)
    gen_names = None
    if names:
        gen_names = {}
        for lab in M.labels:
            if lab == M.unit:
                continue
            deg, wt = M.grading[lab]
            nm = names.get((1 - deg, -wt))
            if nm is not None and len(M.block((deg, wt))) == 1:
                gen_names[lab] = nm
        from .koszul import default_generator_names
        fallback = default_generator_names([l for l in M.labels if l != M.unit], M.grading)
        for lab, nm in fallback.items():
            gen_names.setdefault(lab, nm)
    top = max((d for k in range(C.length + 1) for d in C.shifts(k)), default=0)
    # a minimal resolution that stops early, with room below the cutoff for
    # one more arrow, is taken to be the whole resolution
    step = min(a.weight for a in A.presentation.arrows)
    complete = not C.next_shifts and C.length < hdeg_max and top + step <= w_max
    F = koszul_dual(M, names=gen_names, complete=complete)
    window = dict(F.window)
    window.update({"ext_degree": E.window["degree"], "ext_weight": E.window["weight"],
                   "resolution_complete": complete})
    F.window.update(window)
    return DcaResult(F, M, ext, window)


def eta_periodicity_check(T: CohomologyTable, window: Tuple[int, int]) -> bool:
    """dim H^j == dim H^{j-2} for all j <= 0 with j and j - 2 inside window = (deg_lo, deg_hi)."""
    lo, hi = window
    tw = T.window.get("degree") if T.window else None
    if tw is not None and (lo < tw[0] or hi > tw[1]):
        raise DerivedQuotientError(f"window {window} exceeds the certified degrees {tw}")
    dims = T.by_degree()
    for j in range(min(hi, 0), lo + 1, -1):
        if j - 2 < lo:
            break
        if dims.get(j, 0) != dims.get(j - 2, 0):
            return False
    return True


def table_from_dims(dims: Dict[int, int], window: Optional[Tuple[int, int]] = None) -> CohomologyTable:
    """A cohomology table with only per-degree dimensions (weight 0)."""
    d = {(j, 0): n for j, n in dims.items()}
    win = {"degree": window or (min(dims), max(dims))}
    return CohomologyTable(d, {}, win)
