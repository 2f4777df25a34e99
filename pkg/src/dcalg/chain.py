"""Complexes of projectives, minimal resolutions, endomorphism dgas, cohomology.

Conventions.  P_v(d) = e_v A with generator placed in weight d.  A map
P_v(d) -> P_u(d') is left multiplication by some p in e_u A e_v of weight
d - d'.  Matrices are indexed M[target][source] and composition is g.f = G F
with entries multiplied in the algebra.  Cohomological degrees: the term
C^{-k} sits in degree -k, and diffs[k] is the map C^{-k} -> C^{-k+1}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .algebra import Path, TruncatedAlgebra, WeightOverflow
from .linalg import ONE, ZERO, Eliminator, add_into, kernel
from .quiver import PresentationError

Key = Tuple[int, int]           # (cohomological degree, weight)
Entry = Dict[Path, Fraction]
Matrix = List[List[Entry]]


class ComplexError(ArithmeticError):
    """d^2 != 0 or some other broken invariant of a complex."""


# ---------------------------------------------------------------------------
# complexes of projectives

@dataclass
class ProjectiveComplex:
    algebra: TruncatedAlgebra
    terms: Dict[int, List[Tuple[str, int]]]
    diffs: Dict[int, Matrix]
    complete_below: Dict[int, int] = field(default_factory=dict)
    next_shifts: Optional[List[Tuple[str, int]]] = None

    @property
    def length(self) -> int:
        return max((k for k, t in self.terms.items() if t), default=0)

    def shifts(self, k: int) -> List[int]:
        return [d for _, d in self.terms.get(k, [])]

    def describe(self) -> List[str]:
        out = []
        for k in sorted(self.terms):
            parts = [f"P{v}({d})" for v, d in self.terms[k]]
            out.append(f"C^{-k}: " + (" + ".join(parts) if parts else "0"))
        return out


def compose_entries(A: TruncatedAlgebra, G: Matrix, F: Matrix) -> Matrix:
    """G.F, i.e. first F then G."""
    rows = len(G)
    cols = len(F[0]) if F else 0
    mid = len(F)
    out: Matrix = [[{} for _ in range(cols)] for _ in range(rows)]
    for i in range(rows):
        for j in range(cols):
            acc: Entry = {}
            for m in range(mid):
                if G[i][m] and F[m][j]:
                    add_into(acc, A.mul(G[i][m], F[m][j]))
            out[i][j] = acc
    return out


def _entry_homogeneous(e: Entry, weight: int) -> bool:
    return all(p.weight == weight for p in e)


def verify_complex(C: ProjectiveComplex) -> bool:
    """True iff every composite of consecutive differentials vanishes.

    Raises WeightOverflow if a composite cannot be evaluated below the cutoff
    and ComplexError if an entry does not match the declared shifts.
    """
    A = C.algebra
    for k, M in C.diffs.items():
        src, tgt = C.terms.get(k, []), C.terms.get(k - 1, [])
        for t, (u, dt) in enumerate(tgt):
            for s, (v, ds) in enumerate(src):
                e = M[t][s]
                if not _entry_homogeneous(e, ds - dt):
                    raise ComplexError(f"entry ({t},{s}) of d_{k} is not of weight {ds - dt}")
                if any(p.source != u or p.target != v for p in e):
                    raise ComplexError(f"entry ({t},{s}) of d_{k} does not lie in e_{u} A e_{v}")
    for k in sorted(C.diffs):
        if k - 1 in C.diffs and C.terms.get(k) and C.terms.get(k - 2):
            prod = compose_entries(A, C.diffs[k - 1], C.diffs[k])
            if any(e for row in prod for e in row):
                return False
    return True


def complex_from_entries(A: TruncatedAlgebra, terms: Dict[int, List[Tuple[str, int]]],
                         diffs: Dict[int, Sequence[Sequence[str]]]) -> ProjectiveComplex:
    """Build a complex from string entries, e.g. ``{1: [["s", "t"]]}``."""
    mats: Dict[int, Matrix] = {}
    for k, rows in diffs.items():
        src, tgt = terms[k], terms[k - 1]
        M: Matrix = []
        for t, row in enumerate(rows):
            M.append([A.element(txt, vertex=tgt[t][0]).terms if txt.strip() not in ("0", "") else {}
                      for txt in row])
            if len(row) != len(src):
                raise PresentationError(f"row {t} of d_{k} has {len(row)} entries, expected {len(src)}")
        if len(rows) != len(tgt):
            raise PresentationError(f"d_{k} has {len(rows)} rows, expected {len(tgt)}")
        mats[k] = M
    return ProjectiveComplex(A, {k: list(v) for k, v in terms.items()}, mats)


# ---------------------------------------------------------------------------
# minimal resolutions

def _module_basis(A: TruncatedAlgebra, summands: Sequence[Tuple[str, int]], w: int, t: str):
    labels = []
    for i, (v, d) in enumerate(summands):
        if 0 <= w - d <= A.w_max:
            for p in A.basis(v, t, w - d):
                labels.append((i, p))
    return labels


def _apply_matrix(A: TruncatedAlgebra, M: Matrix, i: int, p: Path) -> Dict[Tuple[int, Path], Fraction]:
    out: Dict[Tuple[int, Path], Fraction] = {}
    for r, row in enumerate(M):
        ent = row[i]
        if ent:
            for q, c in A.mul(ent, {p: ONE}).items():
                add_into(out, {(r, q): c})
    return out


def _syzygy_generators(A: TruncatedAlgebra, summands, M: Optional[Matrix], w_max: int):
    """Minimal generators of ker(M) (ker of the augmentation when M is None).

    Returns a list of (vertex, weight, column) in weight order, where column
    maps summand index -> entry.
    """
    verts = A.presentation.vertices
    K: Dict[Tuple[int, str], List[Dict]] = {}
    gens = []
    for w in range(0, w_max + 1):
        for t in verts:
            labels = _module_basis(A, summands, w, t)
            if not labels:
                continue
            if M is None:
                ker = [{lab: ONE} for lab in labels if lab[1].weight > 0]
            else:
                images = []
                for lab in labels:
                    img = _apply_matrix(A, M, lab[0], lab[1])
                    images.append(img)
                idx = {}
                vecs = []
                for img in images:
                    v = {}
                    for key, c in img.items():
                        if key not in idx:
                            idx[key] = len(idx)
                        v[idx[key]] = c
                    vecs.append(v)
                ker = [{labels[j]: c for j, c in kv.items()} for kv in kernel(vecs)]
            if not ker:
                continue
            K[(w, t)] = ker
            pos = {lab: n for n, lab in enumerate(labels)}
            el = Eliminator()
            for a in A.presentation.arrows:
                if a.target != t or a.weight > w:
                    continue
                apath = Path(a.source, a.target, (a.name,), a.weight)
                for g in K.get((w - a.weight, a.source), ()):
                    moved: Dict = {}
                    for (i, p), c in g.items():
                        for q, x in A.mul_paths(p, apath).items():
                            add_into(moved, {pos[(i, q)]: c * x})
                    el.add(moved)
            for g in ker:
                if el.add({pos[lab]: c for lab, c in g.items()})[0]:
                    col: Dict[int, Entry] = {}
                    for (i, p), c in g.items():
                        col.setdefault(i, {})
                        add_into(col[i], {p: c})
                    gens.append((t, w, col))
    return gens


def resolve_simple(A: TruncatedAlgebra, v: str, hdeg_max: int, w_max: Optional[int] = None) -> ProjectiveComplex:
    """Minimal projective resolution of the simple at v, through hdeg_max.

    Every summand of shift <= w_max is found, in every degree, so each term is
    certified complete below weight w_max + 1.  One further syzygy step is
    computed and its generator shifts kept in ``next_shifts``.
    """
    if v not in A.presentation.vertices:
        raise PresentationError(f"unknown vertex {v}")
    if hdeg_max < 0:
        raise PresentationError("hdeg_max must be nonnegative")
    W = A.w_max if w_max is None else w_max
    if W > A.w_max:
        raise WeightOverflow(f"resolution weight {W} exceeds the algebra cutoff {A.w_max}")
    outs = [a.weight for a in A.presentation.arrows if a.source == v]
    if outs and W < min(outs):
        raise WeightOverflow(f"weight cutoff {W} is too small to present the first syzygy; "
                             f"need at least {min(outs)}")
    terms: Dict[int, List[Tuple[str, int]]] = {0: [(v, 0)]}
    diffs: Dict[int, Matrix] = {}
    M: Optional[Matrix] = None
    nxt = None
    for k in range(1, hdeg_max + 2):
        gens = _syzygy_generators(A, terms[k - 1], M, W)
        if k == hdeg_max + 1:
            nxt = [(t, w) for t, w, _ in gens]
            break
        terms[k] = [(t, w) for t, w, _ in gens]
        M = [[col.get(i, {}) for (_, _, col) in gens] for i in range(len(terms[k - 1]))]
        diffs[k] = M
        if not gens:
            nxt = []
            for j in range(k + 1, hdeg_max + 1):
                terms[j] = []
            break
    C = ProjectiveComplex(A, terms, diffs, {k: W + 1 for k in terms}, nxt)
    return C


# ---------------------------------------------------------------------------
# dgas split into (degree, weight) blocks

class BlockDga:
    """Interface for a dga whose (degree, weight) blocks are finite.

    Vectors are dicts label -> Fraction.  ``mul`` returns products that leave
    the computed window as ``None`` rather than as zero.
    """

    def keys(self) -> List[Key]:
        raise NotImplementedError

    def basis(self, key: Key) -> Sequence[Hashable]:
        raise NotImplementedError

    def d(self, key: Key, label) -> Dict:
        raise NotImplementedError

    def mul(self, k1: Key, l1, k2: Key, l2) -> Dict:
        raise NotImplementedError

    def unit(self) -> Optional[Tuple[Key, Dict]]:
        return None

    def in_window(self, key: Key) -> bool:
        raise NotImplementedError

    # generic helpers
    def d_vec(self, key: Key, vec: Dict) -> Dict:
        out: Dict = {}
        for lab, c in vec.items():
            add_into(out, self.d(key, lab), c)
        return out

    def mul_vec(self, k1: Key, v1: Dict, k2: Key, v2: Dict) -> Dict:
        out: Dict = {}
        for a, x in v1.items():
            for b, y in v2.items():
                add_into(out, self.mul(k1, a, k2, b), x * y)
        return out


class MatrixComplex(BlockDga):
    """A plain cochain complex of finite-dimensional spaces (weight 0), no product."""

    def __init__(self, dims: Dict[int, int], diffs: Dict[int, Sequence[Sequence]]):
        self.dims = dict(dims)
        # diffs[j] : degree j -> degree j+1, as a matrix with rows indexed by the target
        self.diffs = {j: [[Fraction(x) for x in row] for row in M] for j, M in diffs.items()}
        for j, M in self.diffs.items():
            if len(M) != self.dims.get(j + 1, 0) or any(len(r) != self.dims.get(j, 0) for r in M):
                raise ComplexError(f"d^{j} has the wrong shape")

    def keys(self):
        return sorted((j, 0) for j, n in self.dims.items() if n)

    def basis(self, key):
        return tuple(range(self.dims.get(key[0], 0))) if key[1] == 0 else ()

    def d(self, key, label):
        M = self.diffs.get(key[0])
        if not M:
            return {}
        return {r: M[r][label] for r in range(len(M)) if M[r][label]}

    def mul(self, k1, l1, k2, l2):
        raise NotImplementedError("a bare complex has no product")

    def in_window(self, key):
        return True


def check_d_squared(X: BlockDga, keys: Optional[Iterable[Key]] = None) -> bool:
    for key in (keys if keys is not None else X.keys()):
        for lab in X.basis(key):
            dd = X.d_vec((key[0] + 1, key[1]), X.d(key, lab))
            if dd:
                return False
    return True


# ---------------------------------------------------------------------------
# homotopy retracts per block

class BlockContraction:
    """Per block, V = B + H + L with d: L -> B an isomorphism.

    sigma sends the i-th cohomology basis vector to its representative, pi
    reads off H-coordinates, and h(b_i) = l_i, h(H) = h(L) = 0, so that
    d h + h d = id - sigma pi and h sigma = pi h = h h = 0.
    """

    def __init__(self, X: BlockDga, preferred: Optional[Dict[Key, List[Dict]]] = None):
        self.X = X
        self.preferred = preferred or {}
        self._cache: Dict[Key, dict] = {}

    def _lifts(self, key: Key):
        """Greedy L in this block and the images d(L) in the next one."""
        c = self._cache.setdefault(key, {})
        if "L" in c:
            return c["L"], c["dL"]
        X = self.X
        nxt = (key[0] + 1, key[1])
        idx: Dict = {}
        el = Eliminator()
        L, dL = [], []
        for lab in X.basis(key):
            img = X.d(key, lab)
            vec = {}
            for k, x in img.items():
                if k not in idx:
                    idx[k] = len(idx)
                vec[idx[k]] = x
            if el.add(vec)[0]:
                L.append(lab)
                dL.append(img)
        c["L"], c["dL"] = L, dL
        return L, dL

    def _split(self, key: Key):
        c = self._cache.setdefault(key, {})
        if "el" in c:
            return c
        X = self.X
        basis = list(X.basis(key))
        pos = {lab: n for n, lab in enumerate(basis)}
        prev = (key[0] - 1, key[1])
        _, B = self._lifts(prev) if X.basis(prev) else ([], [])
        Lprev = self._lifts(prev)[0] if X.basis(prev) else []
        L, _ = self._lifts(key)
        # cocycles
        nxt_idx: Dict = {}
        images = []
        for lab in basis:
            img = X.d(key, lab)
            vec = {}
            for k, x in img.items():
                if k not in nxt_idx:
                    nxt_idx[k] = len(nxt_idx)
                vec[nxt_idx[k]] = x
            images.append(vec)
        Z = kernel(images)
        el = Eliminator(track=True)
        for i, b in enumerate(B):
            el.add({pos[k]: x for k, x in b.items()}, ("B", i))
        H = []
        for vec in self.preferred.get(key, ()):
            if X.d_vec(key, vec):
                raise ComplexError(f"preferred representative in block {key} is not a cocycle")
            if el.add({pos[k]: x for k, x in vec.items()}, ("H", len(H)))[0]:
                H.append(dict(vec))
        for z in Z:
            if len(H) + len(B) == len(Z):
                break
            ok, _ = el.add(dict(z), ("H", len(H)))
            if ok:
                H.append({basis[j]: x for j, x in z.items()})
        for i, lab in enumerate(L):
            el.add({pos[lab]: ONE}, ("L", i))
        if len(el) != len(basis):
            raise ComplexError(f"block {key}: splitting failed ({len(el)} of {len(basis)}); is d^2 = 0?")
        c.update(el=el, pos=pos, H=H, Lprev=Lprev, B=B)
        return c

    def reps(self, key: Key) -> List[Dict]:
        return self._split(key)["H"]

    def dim(self, key: Key) -> int:
        return len(self.reps(key))

    def coords(self, key: Key, vec: Dict) -> Dict:
        """Coordinates of vec along the labels ("B", i), ("H", i), ("L", i)."""
        c = self._split(key)
        pos = c["pos"]
        sol = c["el"].solve({pos[k]: x for k, x in vec.items()})
        if sol is None:
            raise ComplexError(f"vector outside block {key}")
        return sol

    def pi(self, key: Key, vec: Dict) -> Dict[int, Fraction]:
        if not vec:
            return {}
        return {i: x for (kind, i), x in self.coords(key, vec).items() if kind == "H"}

    def sigma(self, key: Key, coords: Dict[int, Fraction]) -> Dict:
        H = self.reps(key)
        out: Dict = {}
        for i, x in coords.items():
            add_into(out, H[i], x)
        return out

    def h(self, key: Key, vec: Dict) -> Dict:
        """Degree -1 homotopy: lands in block (deg - 1, weight)."""
        if not vec:
            return {}
        c = self._split(key)
        Lprev = c["Lprev"]
        out: Dict = {}
        for (kind, i), x in self.coords(key, vec).items():
            if kind == "B":
                add_into(out, {Lprev[i]: ONE}, x)
        return out

    def is_coboundary(self, key: Key, vec: Dict) -> bool:
        return not self.pi(key, vec)


@dataclass
class CohomologyTable:
    dims: Dict[Key, int]
    reps: Dict[Key, List[Dict]]
    window: Dict[str, Tuple[int, int]]

    def total(self) -> int:
        return sum(self.dims.values())

    def by_degree(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for (j, _), n in sorted(self.dims.items()):
            out[j] = out.get(j, 0) + n
        return out

    def hilbert(self) -> Dict[int, int]:
        return {j: n for j, n in self.by_degree().items() if n}

    def nonzero(self) -> Dict[Key, int]:
        return {k: n for k, n in sorted(self.dims.items()) if n}


def cohomology(X: BlockDga, keys: Optional[Iterable[Key]] = None,
               contraction: Optional[BlockContraction] = None) -> CohomologyTable:
    K = contraction or BlockContraction(X)
    keys = sorted(keys if keys is not None else X.keys())
    dims, reps = {}, {}
    for key in keys:
        if not X.basis(key):
            continue
        r = K.reps(key)
        dims[key] = len(r)
        reps[key] = r
    return CohomologyTable(dims, reps, getattr(X, "window", {}))


# ---------------------------------------------------------------------------
# the endomorphism dga of a complex of projectives

class EndomorphismDga(BlockDga):
    """Hom_A(C, C) restricted to weights 0 <= w <= W and hdeg <= L.

    A basis label (j, k, s, t, p) is the map of degree j sending the s-th
    summand of C^{-k} to the t-th summand of C^{-k+j} by left multiplication
    with the path p.  Its weight is d_s - d_t - wt(p), so Ext classes have
    nonnegative weight.  The product is composition f.g = f o g and
    D f = d f - (-1)^{|f|} f d.
    """

    def __init__(self, C: ProjectiveComplex, w_max: Optional[int] = None, hdeg_max: Optional[int] = None):
        self.C = C
        self.A = C.algebra
        self.L = C.length if hdeg_max is None else min(hdeg_max, C.length)
        top = max((d for k in range(self.L + 1) for d in C.shifts(k)), default=0)
        self.W = min(top if w_max is None else w_max, self.A.w_max)
        self._basis: Dict[Key, Tuple] = {}
        self._d: Dict = {}
        self._mul: Dict = {}
        self.window = self._trusted_window()

    def _trusted_window(self):
        """Where E agrees with RHom(S, S).

        The truncated complex has an extra homology module (the next syzygy)
        in degree -L; it only pollutes degrees <= 0 at weights up to
        max shift - smallest next shift.  Degrees 1..L are exact for every
        weight up to the resolution certificate.
        """
        C = self.C
        nxt = C.next_shifts if self.L == C.length else [(v, d) for v, d in C.terms.get(self.L + 1, [])]
        top = max((d for k in range(self.L + 1) for d in C.shifts(k)), default=0)
        junk = top - min(d for _, d in nxt) if nxt else -1
        hi = min(self.W, C.complete_below.get(0, self.W + 1) - 1)
        return {"degree": (0, self.L), "weight": (0, hi), "junk_weight": junk}

    def trusted(self, key: Key) -> bool:
        j, w = key
        dlo, dhi = self.window["degree"]
        wlo, whi = self.window["weight"]
        if not (dlo <= j <= dhi and wlo <= w <= whi):
            return False
        return j >= 1 or w > self.window["junk_weight"]

    def trusted_keys(self) -> List[Key]:
        return [k for k in self.keys() if self.trusted(k)]

    def keys(self):
        return [(j, w) for j in range(-self.L, self.L + 1) for w in range(0, self.W + 1)
                if self.basis((j, w))]

    def in_window(self, key):
        return -self.L <= key[0] <= self.L and 0 <= key[1] <= self.W

    def basis(self, key):
        got = self._basis.get(key)
        if got is not None:
            return got
        j, w = key
        out = []
        if self.in_window(key):
            C, A = self.C, self.A
            for k in range(max(0, j), self.L + 1):
                kt = k - j
                if kt < 0 or kt > self.L:
                    continue
                for s, (vs, ds) in enumerate(C.terms.get(k, [])):
                    for t, (vt, dt) in enumerate(C.terms.get(kt, [])):
                        wt = ds - dt - w
                        if 0 <= wt <= A.w_max:
                            for p in A.basis(vt, vs, wt):
                                out.append((j, k, s, t, p))
        got = tuple(out)
        self._basis[key] = got
        return got

    def label_weight(self, lab) -> int:
        j, k, s, t, p = lab
        return self.C.terms[k][s][1] - self.C.terms[k - j][t][1] - p.weight

    def _compose(self, f, g) -> Dict:
        j1, k1, s1, t1, q = f
        j2, k2, s2, t2, p = g
        if k1 != k2 - j2 or s1 != t2:
            return {}
        out = {}
        for r, c in self.A.mul_paths(q, p).items():
            out[(j1 + j2, k2, s2, t1, r)] = c
        return out

    def mul(self, k1, l1, k2, l2):
        key = (l1, l2)
        got = self._mul.get(key)
        if got is None:
            if k1[1] + k2[1] > self.W:
                got = {}
            else:
                got = self._compose(l1, l2)
            self._mul[key] = got
        return got

    def _dmat(self, k: int) -> Optional[Matrix]:
        return self.C.diffs.get(k)

    def d(self, key, lab):
        got = self._d.get(lab)
        if got is not None:
            return got
        j, k, s, t, p = lab
        C, A = self.C, self.A
        out: Dict = {}
        # d o f : C^{-k} -> C^{-(k-j)} -> C^{-(k-j-1)}
        kt = k - j
        M = self._dmat(kt)
        if M is not None and kt >= 1:
            for r, row in enumerate(M):
                ent = row[t]
                if ent:
                    for q, c in A.mul(ent, {p: ONE}).items():
                        add_into(out, {(j + 1, k, s, r, q): c})
        # f o d : C^{-(k+1)} -> C^{-k} -> C^{-(k-j)}
        M = self._dmat(k + 1)
        if M is not None and k + 1 <= self.L:
            sign = -1 if j % 2 else 1
            for r, ent in enumerate(M[s]):
                if ent:
                    for q, c in A.mul({p: ONE}, ent).items():
                        add_into(out, {(j + 1, k + 1, r, t, q): -sign * c})
        self._d[lab] = out
        return out

    def unit(self):
        vec = {}
        for k in range(self.L + 1):
            for s, (v, _) in enumerate(self.C.terms.get(k, [])):
                vec[(0, k, s, s, Path(v, v, (), 0))] = ONE
        return (0, 0), vec

    def element(self, j: int, components: Dict[Tuple[int, int, int], str]) -> Tuple[Key, Dict]:
        """Build a homogeneous map from entries {(k, s, t): "path text"}."""
        vec: Dict = {}
        key = None
        for (k, s, t), txt in components.items():
            vt = self.C.terms[k - j][t][0]
            e = self.A.element(txt, vertex=vt)
            for p, c in e.terms.items():
                lab = (j, k, s, t, p)
                w = self.label_weight(lab)
                if key is None:
                    key = (j, w)
                elif key != (j, w):
                    raise ComplexError("map is not weight-homogeneous")
                add_into(vec, {lab: c})
        if key is None:
            raise ComplexError("zero map has no well-defined weight")
        return key, vec


def end_dga(C: ProjectiveComplex, w_max: Optional[int] = None, hdeg_max: Optional[int] = None) -> EndomorphismDga:
    if not verify_complex(C):
        raise ComplexError("d^2 != 0 on the input complex")
    return EndomorphismDga(C, w_max, hdeg_max)


def ext_table(E: EndomorphismDga) -> CohomologyTable:
    """Cohomology of E on the trusted blocks.  Degree-0 weight-0 Ext is the
    scalars, so that block is reported as one-dimensional even when the
    truncation adds junk there."""
    tab = cohomology(E, E.trusted_keys())
    if (0, 0) not in tab.dims:
        tab.dims[(0, 0)] = 1
        tab.reps[(0, 0)] = [E.unit()[1]]
    return tab
