"""Free dgas, bar and cobar constructions, Koszul duals.

Everything is bigraded by (cohomological degree, Adams weight) and handled
one block at a time.  A free dga whose generators all have nonzero weight of
one sign has finitely many monomials per weight, which is what makes the
block-by-block linear algebra finite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .ainfty import AInfinityStructure, from_dga
from .chain import BlockContraction, BlockDga, CohomologyTable, ComplexError, Key, cohomology
from .linalg import ONE, add_into, frac_str, rank, scaled


class KoszulError(ValueError):
    pass


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    weight: int
    source: str = "*"
    target: str = "*"


Word = Tuple[int, ...]


class FreeDga(BlockDga):
    """Free (path) algebra on graded generators with a differential.

    Monomials are tuples of generator indices; the idempotent at vertex
    number i is the one-letter tuple (-1 - i,).  ``differential`` maps a
    generator name to a list of (word of names, coefficient).
    """

    def __init__(self, generators: Sequence[Generator], differential: Dict[str, Sequence[Tuple[Sequence[str], Fraction]]],
                 vertices: Optional[Sequence[str]] = None, window: Optional[Dict] = None):
        self.generators = tuple(generators)
        self.vertices = tuple(vertices) if vertices is not None else ("*",)
        self._vidx = {v: i for i, v in enumerate(self.vertices)}
        self._gidx = {g.name: i for i, g in enumerate(self.generators)}
        if len(self._gidx) != len(self.generators):
            raise KoszulError("duplicate generator names")
        ws = {(g.weight > 0) - (g.weight < 0) for g in self.generators}
        if 0 in ws or len(ws) > 1:
            raise KoszulError("generator weights must be nonzero and of one sign")
        self.sign = ws.pop() if ws else -1
        self._diff: Dict[int, Dict[Word, Fraction]] = {}
        for name, terms in differential.items():
            if name not in self._gidx:
                raise KoszulError(f"differential of unknown generator {name}")
            g = self._gidx[name]
            acc: Dict[Word, Fraction] = {}
            for word, c in terms:
                w = tuple(self._gidx[x] for x in word)
                self._check_term(self.generators[g], w)
                add_into(acc, {w: Fraction(c)})
            if acc:
                self._diff[g] = acc
        self.window = dict(window or {})
        self._words: Dict[int, Dict[Tuple[int, int, int], List[Word]]] = {}
        self._basis: Dict[Key, Tuple] = {}
        self._d: Dict = {}

    def _check_term(self, g: Generator, w: Word):
        deg = sum(self.generators[i].degree for i in w)
        wt = sum(self.generators[i].weight for i in w)
        if deg != g.degree + 1 or wt != g.weight:
            raise KoszulError(f"d({g.name}) has a term of bidegree {(deg, wt)}, expected {(g.degree + 1, g.weight)}")
        if w:
            ends = self._ends(w)
            if ends is None or ends != (self._vidx[g.source], self._vidx[g.target]):
                raise KoszulError(f"d({g.name}) has a term with the wrong endpoints")

    # -- monomials -------------------------------------------------------------
    def _ends(self, w: Word) -> Optional[Tuple[int, int]]:
        if len(w) == 1 and w[0] < 0:
            v = -1 - w[0]
            return v, v
        gens = self.generators
        for a, b in zip(w, w[1:]):
            if gens[a].target != gens[b].source:
                return None
        return self._vidx[gens[w[0]].source], self._vidx[gens[w[-1]].target]

    def generator(self, name: str) -> Generator:
        return self.generators[self._gidx[name]]

    def index(self, name: str) -> int:
        return self._gidx[name]

    def idempotent(self, v: str) -> Word:
        return (-1 - self._vidx[v],)

    def _words_of(self, absw: int) -> Dict[Tuple[int, int, int], List[Word]]:
        """Monomials of |weight| absw grouped by (source, target, degree)."""
        got = self._words.get(absw)
        if got is not None:
            return got
        out: Dict[Tuple[int, int, int], List[Word]] = {}
        if absw == 0:
            for i in range(len(self.vertices)):
                out[(i, i, 0)] = [(-1 - i,)]
        else:
            for gi, g in enumerate(self.generators):
                gw = abs(g.weight)
                if gw > absw:
                    continue
                gs, gt = self._vidx[g.source], self._vidx[g.target]
                if gw == absw:
                    out.setdefault((gs, gt, g.degree), []).append((gi,))
                    continue
                for (s, t, deg), words in self._words_of(absw - gw).items():
                    if t != gs:
                        continue
                    lst = out.setdefault((s, gt, deg + g.degree), [])
                    lst.extend(w + (gi,) for w in words)
            for lst in out.values():
                lst.sort()
        self._words[absw] = out
        return out

    def basis(self, key: Key):
        got = self._basis.get(key)
        if got is not None:
            return got
        deg, wt = key
        if wt * self.sign < 0 or (wt == 0 and deg != 0):
            got = ()
        else:
            got = []
            for (s, t, d), words in sorted(self._words_of(abs(wt)).items()):
                if d == deg:
                    got.extend(words)
            got = tuple(got)
        self._basis[key] = got
        return got

    def keys(self) -> List[Key]:
        bound = self.window.get("abs_weight")
        if bound is None:
            raise KoszulError("free dga has no weight bound; pass explicit keys")
        out = set()
        for absw in range(bound + 1):
            for (_, _, deg) in self._words_of(absw):
                out.add((deg, self.sign * absw))
        return sorted(out)

    def degree_of(self, w: Word) -> int:
        return 0 if w[0] < 0 else sum(self.generators[i].degree for i in w)

    def weight_of(self, w: Word) -> int:
        return 0 if w[0] < 0 else sum(self.generators[i].weight for i in w)

    def concat(self, u: Word, v: Word) -> Optional[Word]:
        eu, ev = self._ends(u), self._ends(v)
        if eu is None or ev is None or eu[1] != ev[0]:
            return None
        if u[0] < 0:
            return v
        if v[0] < 0:
            return u
        return u + v

    def mul(self, k1, l1, k2, l2):
        w = self.concat(l1, l2)
        return {w: ONE} if w is not None else {}

    def d(self, key, lab) -> Dict[Word, Fraction]:
        got = self._d.get(lab)
        if got is not None:
            return got
        out: Dict[Word, Fraction] = {}
        if lab[0] >= 0:
            deg = 0
            for pos, g in enumerate(lab):
                dg = self._diff.get(g)
                if dg:
                    sign = -1 if deg % 2 else 1
                    pre, post = lab[:pos], lab[pos + 1:]
                    for w, c in dg.items():
                        add_into(out, {pre + w + post: sign * c})
                deg += self.generators[g].degree
        self._d[lab] = out
        return out

    def d_gen(self, name: str) -> Dict[Word, Fraction]:
        return dict(self._diff.get(self._gidx[name], {}))

    def unit(self):
        vec = {(-1 - i,): ONE for i in range(len(self.vertices))}
        return (0, 0), vec

    def in_window(self, key):
        b = self.window.get("abs_weight")
        return b is None or abs(key[1]) <= b

    # -- presentation helpers ----------------------------------------------------
    def word_text(self, w: Word) -> str:
        if w[0] < 0:
            return f"e_{self.vertices[-1 - w[0]]}"
        parts: List[str] = []
        for name, grp in itertools.groupby(self.generators[i].name for i in w):
            k = len(list(grp))
            parts.append(name if k == 1 else f"{name}^{k}")
        return " ".join(parts)

    def poly_text(self, vec: Dict[Word, Fraction]) -> str:
        if not vec:
            return "0"
        out = []
        for w in sorted(vec, key=lambda w: (len(w), w)):
            c = vec[w]
            sgn = "-" if c < 0 else "+"
            mag = abs(c)
            body = self.word_text(w)
            term = body if mag == 1 else f"{frac_str(mag)} {body}"
            out.append((sgn, term))
        s = " ".join(f"{sg} {t}" for sg, t in out)
        return s[2:] if s.startswith("+ ") else "-" + s[1:]

    def describe(self) -> List[str]:
        lines = []
        for g in self.generators:
            lines.append(f"{g.name}: degree {g.degree}, weight {g.weight}, d = {self.poly_text(self.d_gen(g.name))}")
        return lines

    def renamed(self, names: Dict[str, str]) -> "FreeDga":
        gens = [Generator(names.get(g.name, g.name), g.degree, g.weight, g.source, g.target) for g in self.generators]
        diff = {names.get(g.name, g.name): [(tuple(names.get(self.generators[i].name, self.generators[i].name) for i in w), c)
                                            for w, c in self.d_gen(g.name).items()] for g in self.generators}
        return FreeDga(gens, diff, self.vertices, self.window)

    def rescaled(self, factors: Dict[str, Fraction]) -> "FreeDga":
        """Substitute g -> factor * g for each named generator."""
        def val(w):
            c = ONE
            for i in w:
                c *= Fraction(factors.get(self.generators[i].name, 1))
            return c
        diff = {}
        for g in self.generators:
            f = Fraction(factors.get(g.name, 1))
            diff[g.name] = [(tuple(self.generators[i].name for i in w), c * val(w) / f) for w, c in self.d_gen(g.name).items()]
        return FreeDga(self.generators, diff, self.vertices, self.window)

    def negated_weights(self) -> "FreeDga":
        gens = [Generator(g.name, g.degree, -g.weight, g.source, g.target) for g in self.generators]
        diff = {g.name: [(tuple(self.generators[i].name for i in w), c) for w, c in self.d_gen(g.name).items()]
                for g in self.generators}
        win = dict(self.window)
        return FreeDga(gens, diff, self.vertices, win)

    def check_d_squared(self) -> bool:
        """d(d(g)) = 0 for every generator, expanded exactly."""
        for g in range(len(self.generators)):
            dg = self._diff.get(g, {})
            total: Dict = {}
            for w, c in dg.items():
                add_into(total, self.d(None, w), c)
            if total:
                return False
        return True


FreeDgaPresentation = FreeDga


def free_dga_cohomology(F: FreeDga, deg_min: int, w_bound: int, deg_max: int = 0) -> CohomologyTable:
    """Cohomology dims per (degree, weight) for deg_min <= degree <= deg_max and |weight| <= w_bound."""
    keys = []
    for absw in range(w_bound + 1):
        for deg in range(deg_min, deg_max + 1):
            key = (deg, F.sign * absw)
            if F.basis(key):
                keys.append(key)
    unit = F.unit()
    tab = cohomology(F, keys, BlockContraction(F, {unit[0]: [unit[1]]}))
    tab.window = {"degree": (deg_min, deg_max), "weight": tuple(sorted((0, F.sign * w_bound)))}
    return tab


class CentralXiModel(BlockDga):
    """k[xi] < zeta > with xi central of bidegree (0, -2), zeta of (-1, -2n), d zeta = xi^n.

    Labels are pairs (a, b) for zeta^a xi^b.  Every block is at most one
    dimensional, so its cohomology, k[xi]/xi^n [zeta^2], has no choice of
    representatives.
    """

    def __init__(self, n: int, w_bound: int):
        if n < 1:
            raise KoszulError("n must be positive")
        self.n = n
        self.window = {"abs_weight": w_bound}

    def _label(self, key):
        deg, wt = key
        a = -deg
        rest = -wt - 2 * self.n * a
        if a < 0 or rest < 0 or rest % 2:
            return None
        return (a, rest // 2)

    def basis(self, key):
        lab = self._label(key)
        return (lab,) if lab is not None else ()

    def keys(self):
        out = []
        for absw in range(0, self.window["abs_weight"] + 1, 2):
            for a in range(absw // (2 * self.n) + 1):
                out.append((-a, -absw))
        return sorted(out)

    def in_window(self, key):
        return -key[1] <= self.window["abs_weight"]

    def d(self, key, lab):
        a, b = lab
        if a % 2:
            return {(a - 1, b + self.n): ONE}
        return {}

    def mul(self, k1, l1, k2, l2):
        return {(l1[0] + l2[0], l1[1] + l2[1]): ONE}

    def unit(self):
        return (0, 0), {(0, 0): ONE}


def free_dga_map(F: FreeDga, G: BlockDga, images: Dict[str, Tuple[Key, Dict]]):
    """The algebra map F -> G determined by generator images; returns vec -> vec."""
    img = {F.index(name): v for name, v in images.items()}
    for gi, g in enumerate(F.generators):
        if gi not in img:
            raise KoszulError(f"no image for generator {g.name}")
        key, _ = img[gi]
        if key != (g.degree, g.weight):
            raise KoszulError(f"image of {g.name} has bidegree {key}, expected {(g.degree, g.weight)}")
    one = G.unit()

    def word_image(w: Word):
        if w[0] < 0:
            return one
        key, vec = img[w[0]]
        for gi in w[1:]:
            k2, v2 = img[gi]
            vec = G.mul_vec(key, vec, k2, v2)
            key = (key[0] + k2[0], key[1] + k2[1])
        return key, vec

    def apply(vec: Dict) -> Dict:
        out: Dict = {}
        for w, c in vec.items():
            add_into(out, word_image(w)[1], c)
        return out

    return apply


def check_quasi_isomorphism(F: FreeDga, G: BlockDga, images: Dict[str, Tuple[Key, Dict]],
                            keys: Iterable[Key]) -> bool:
    """Whether the generator-wise map F -> G is a chain map inducing isomorphisms on the given blocks."""
    phi = free_dga_map(F, G, images)
    for g in F.generators:
        key = (g.degree, g.weight)
        if phi(F.d_gen(g.name)) != G.d_vec(key, images[g.name][1]):
            return False
    KF, KG = BlockContraction(F, {F.unit()[0]: [F.unit()[1]]}), BlockContraction(G)
    for key in keys:
        reps = KF.reps(key)
        if len(reps) != KG.dim(key):
            return False
        if rank(KG.pi(key, phi(r)) for r in reps) != len(reps):
            return False
    return True


# ---------------------------------------------------------------------------
# finite augmented dgas

class FiniteDga(BlockDga):
    """A finite-dimensional augmented dga given by tables on a bigraded basis.

    ``unit`` is the label of 1; the other labels span the augmentation ideal.
    """

    def __init__(self, grading: Dict[str, Key], unit: str, products: Dict[Tuple[str, str], Dict[str, Fraction]],
                 differential: Optional[Dict[str, Dict[str, Fraction]]] = None):
        self.grading = dict(grading)
        self.unit_label = unit
        self._mul = {}
        for (a, b), v in products.items():
            self._mul[(a, b)] = {k: Fraction(x) for k, x in v.items() if x}
        for a in self.grading:
            self._mul[(unit, a)] = {a: ONE}
            self._mul[(a, unit)] = {a: ONE}
        self._d = {a: {k: Fraction(x) for k, x in v.items() if x} for a, v in (differential or {}).items()}
        self._blocks: Dict[Key, List[str]] = {}
        for a, key in self.grading.items():
            self._blocks.setdefault(key, []).append(a)

    def keys(self):
        return sorted(self._blocks)

    def basis(self, key):
        return tuple(self._blocks.get(key, ()))

    def d(self, key, lab):
        return dict(self._d.get(lab, {}))

    def mul(self, k1, l1, k2, l2):
        return dict(self._mul.get((l1, l2), {}))

    def unit(self):
        return self.grading[self.unit_label], {self.unit_label: ONE}

    def as_ainfinity(self) -> AInfinityStructure:
        labels = sorted(self.grading, key=lambda a: (a != self.unit_label, self.grading[a], a))
        tables = {1: {}, 2: {}}
        for a in labels:
            if self._d.get(a):
                tables[1][(a,)] = dict(self._d[a])
        for (a, b), v in self._mul.items():
            if v:
                tables[2][(a, b)] = dict(v)
        return AInfinityStructure(labels, self.grading, 2, tables=tables, unit=self.unit_label, minimal=False)

    def check(self) -> bool:
        """d^2 = 0, associativity and the Leibniz rule on basis elements."""
        labs = list(self.grading)
        deg = lambda a: self.grading[a][0]

        def mulv(u, v):
            out = {}
            for a, x in u.items():
                for b, y in v.items():
                    add_into(out, self._mul.get((a, b), {}), x * y)
            return out

        def dv(u):
            out = {}
            for a, x in u.items():
                add_into(out, self._d.get(a, {}), x)
            return out
        for a in labs:
            if dv(dv({a: ONE})):
                return False
            for b in labs:
                lhs = dv(mulv({a: ONE}, {b: ONE}))
                rhs = mulv(dv({a: ONE}), {b: ONE})
                add_into(rhs, mulv({a: ONE}, dv({b: ONE})), -1 if deg(a) % 2 else 1)
                add_into(lhs, rhs, -ONE)
                if lhs:
                    return False
                for c in labs:
                    l = mulv(mulv({a: ONE}, {b: ONE}), {c: ONE})
                    add_into(l, mulv({a: ONE}, mulv({b: ONE}, {c: ONE})), -ONE)
                    if l:
                        return False
        return True

    def is_nilpotent(self) -> bool:
        ideal = [a for a in self.grading if a != self.unit_label]
        power = [{a: ONE} for a in ideal]
        for _ in range(len(ideal) + 1):
            nxt = []
            for u in power:
                for b in ideal:
                    out = {}
                    for a, x in u.items():
                        add_into(out, self._mul.get((a, b), {}), x)
                    if out:
                        nxt.append(out)
            if not nxt:
                return True
            power = nxt
        return False


def truncated_polynomial(n: int, degree: int = 0, weight: int = 1) -> FiniteDga:
    """k[x]/x^n with x in the given bidegree."""
    grading = {f"x{i}" if i else "1": (degree * i, weight * i) for i in range(n)}
    prods = {}
    for i in range(1, n):
        for j in range(1, n):
            if i + j < n:
                sign = -1 if (degree % 2 and i % 2 and j % 2) else 1
                prods[(f"x{i}", f"x{j}")] = {f"x{i + j}": Fraction(sign)} if degree % 2 == 0 else {}
    return FiniteDga(grading, "1", prods)


def dual_numbers_with_exterior(weight_xi: int = 1, weight_eps: int = 1) -> FiniteDga:
    """k[xi]/xi^2 (x) Lambda(eps) with xi in degree 0 and eps in degree -1, zero differential."""
    g = {"1": (0, 0), "xi": (0, weight_xi), "eps": (-1, weight_eps), "xi_eps": (-1, weight_xi + weight_eps)}
    prods = {("xi", "eps"): {"xi_eps": ONE}, ("eps", "xi"): {"xi_eps": ONE}}
    return FiniteDga(g, "1", prods)


def ground_field() -> FiniteDga:
    return FiniteDga({"1": (0, 0)}, "1", {})


# ---------------------------------------------------------------------------
# bar construction

def _bar_sign(args_deg: Sequence[int]) -> int:
    """Sign of b_s(sa_1, ..., sa_s) = +- s m_s(a_1, ..., a_s) with GJ-convention m_s."""
    s = len(args_deg)
    e = sum((s - i) * d for i, d in enumerate(args_deg, 1))
    return -1 if e % 2 else 1


@dataclass
class DgCoalgebraTruncation:
    """A finite conilpotent dg coalgebra: basis, reduced coproduct, differential.

    For a bar construction the basis is words of augmentation-ideal labels,
    the coproduct is deconcatenation and degrees are shifted by -1 per letter.
    """

    grading: Dict[object, Key]
    coproduct: Dict[object, Dict[Tuple[object, object], Fraction]]
    differential: Dict[object, Dict[object, Fraction]]
    window: Dict = field(default_factory=dict)

    def labels(self) -> List:
        return sorted(self.grading, key=lambda w: (self.grading[w][1], len(w) if isinstance(w, tuple) else 0, repr(w)))

    def check_d_squared(self) -> bool:
        for w in self.grading:
            total: Dict = {}
            for u, c in self.differential.get(w, {}).items():
                add_into(total, self.differential.get(u, {}), c)
            if total:
                return False
        return True

    def check_coassociative(self) -> bool:
        for w in self.grading:
            left: Dict = {}
            right: Dict = {}
            for (a, b), c in self.coproduct.get(w, {}).items():
                for (x, y), c2 in self.coproduct.get(a, {}).items():
                    add_into(left, {(x, y, b): c * c2})
                for (x, y), c2 in self.coproduct.get(b, {}).items():
                    add_into(right, {(a, x, y): c * c2})
            if left != right:
                return False
        return True

    def is_conilpotent(self, bound: Optional[int] = None) -> bool:
        """Iterated reduced coproducts vanish after finitely many steps."""
        bound = bound or len(self.grading) + 1
        current = {(w,) for w in self.grading}
        for _ in range(bound):
            nxt = set()
            for t in current:
                for i, piece in enumerate(t):
                    for (a, b) in self.coproduct.get(piece, {}):
                        nxt.add(t[:i] + (a, b) + t[i + 1:])
            if not nxt:
                return True
            current = nxt
        return False


def bar_construction(A, len_max: int, w_max: int) -> DgCoalgebraTruncation:
    """Truncated bar construction of an augmented dga or A-infinity algebra.

    Words (a_1 | ... | a_n) of augmentation-ideal labels with n <= len_max and
    total weight <= w_max; degree sum(|a_i| - 1).
    """
    if isinstance(A, BlockDga) and not isinstance(A, AInfinityStructure):
        if isinstance(A, FiniteDga):
            A = A.as_ainfinity()
        else:
            unit = A.unit()
            A = from_dga(A)
            if unit is None:
                raise KoszulError("bar construction needs an augmentation")
    if A.unit is None:
        raise KoszulError("bar construction needs an augmentation (unit label)")
    ideal = [l for l in A.labels if l != A.unit]
    for l in ideal:
        if A.weight(l) <= 0 and not (A.weight(l) == 0 and len(ideal) < 64):
            raise KoszulError("augmentation ideal must have positive weights (or be tiny in weight 0)")
    words: List[Tuple] = [()]
    grading: Dict = {(): (0, 0)}
    frontier = [()]
    for n in range(1, len_max + 1):
        nxt = []
        for w in frontier:
            wt = sum(A.weight(a) for a in w)
            for a in ideal:
                if wt + A.weight(a) <= w_max:
                    u = w + (a,)
                    nxt.append(u)
                    grading[u] = (sum(A.degree(x) - 1 for x in u), wt + A.weight(a))
        words.extend(nxt)
        frontier = nxt
    coproduct = {}
    for w in words:
        if len(w) >= 2:
            coproduct[w] = {(w[:i], w[i:]): ONE for i in range(1, len(w))}
    diff: Dict = {}
    present = set(grading)
    for w in words:
        out: Dict = {}
        n = len(w)
        for r in range(n):
            for s in range(1, n - r + 1):
                if s > A.arity_max:
                    break
                args = w[r:r + s]
                val = A.op(args)
                if not val:
                    continue
                pre = sum(A.degree(x) - 1 for x in w[:r])
                sign = _bar_sign([A.degree(x) for x in args]) * (-1 if pre % 2 else 1)
                for lab, c in val.items():
                    if lab == A.unit:
                        continue
                    u = w[:r] + (lab,) + w[r + s:]
                    if u in present:
                        add_into(out, {u: sign * c})
        if out:
            diff[w] = out
    del grading[()]
    return DgCoalgebraTruncation(grading, coproduct, diff, {"length": len_max, "weight": w_max})


def _dual_sign(shifted: Sequence[int]) -> int:
    """Sign of (v_1* ... v_n*)(sv_1 | ... | sv_n)."""
    e = 0
    for i in range(len(shifted)):
        for j in range(i + 1, len(shifted)):
            e += shifted[i] * shifted[j]
    return -1 if e % 2 else 1


def default_generator_names(labels, grading) -> Dict:
    out = {}
    for lab in labels:
        deg, wt = grading[lab]
        base = f"e{1 - deg}w{-wt}".replace("-", "m")
        same = [l for l in labels if grading[l] == (deg, wt)]
        if len(same) > 1:
            base += f"_{same.index(lab)}"
        out[lab] = base + "*"
    return out


def koszul_dual(M, arity_max: Optional[int] = None, names: Optional[Dict] = None,
                weight_bound: Optional[int] = None, complete: bool = False) -> FreeDga:
    """The free dga on shifted duals of the augmentation ideal of M.

    d(x*) is minus (-1)^{|x*|} times the dual of the bar differential
    restricted to one-letter outputs.  M may be a minimal model, a finite dga
    or any augmented block dga given with a weight bound.

    ``complete`` says that M's basis is all of it (not a weight truncation);
    then the result is exact in every weight up to the first generator whose
    differential could involve operations beyond the arity cutoff.
    """
    if isinstance(M, FiniteDga):
        M = M.as_ainfinity()
    elif isinstance(M, BlockDga):
        if weight_bound is None:
            raise KoszulError("a weight bound is needed to dualise a block dga")
        unit = M.unit()
        keys = [k for k in M.keys() if abs(k[1]) <= weight_bound] if hasattr(M, "window") and M.window.get("abs_weight") is not None else None
        if keys is None:
            raise KoszulError("block dga without enumerable keys")
        A = from_dga(M, keys, arity_max=2)
        ulab = (unit[0], next(iter(unit[1])))
        if len(unit[1]) != 1:
            raise KoszulError("dualising needs a one-vertex augmented dga")
        A.unit = ulab
        A.minimal = False
        M = A
    if M.unit is None:
        raise KoszulError("Koszul dual needs an augmentation")
    ideal = [l for l in M.labels if l != M.unit]
    signs = {(M.weight(l) > 0) - (M.weight(l) < 0) for l in ideal}
    if 0 in signs or len(signs) > 1:
        raise KoszulError("augmentation-ideal weights must be nonzero and of one sign")
    wsign = signs.pop() if signs else 1
    N = M.arity_max if arity_max is None else min(arity_max, M.arity_max)
    bound = max((abs(M.weight(l)) for l in ideal), default=0)
    if weight_bound is not None:
        bound = min(bound, weight_bound)
    ideal = [l for l in ideal if abs(M.weight(l)) <= bound]
    names = names or default_generator_names(ideal, M.grading)
    gens = [Generator(names[l], 1 - M.degree(l), -M.weight(l)) for l in ideal]
    idx = {l: i for i, l in enumerate(ideal)}
    diff: Dict[str, Dict[Tuple[str, ...], Fraction]] = {names[l]: {} for l in ideal}
    ideal_sorted = sorted(ideal, key=lambda l: abs(M.weight(l)))
    iset = set(ideal)

    def tuples(n, budget):
        if n == 0:
            yield ()
            return
        for l in ideal_sorted:
            w = abs(M.weight(l))
            if w > budget:
                break
            for rest in tuples(n - 1, budget - w):
                yield (l,) + rest

    for n in range(1, N + 1):
        for args in tuples(n, bound):
            val = M.op(args)
            if not val:
                continue
            shifted = [M.degree(a) - 1 for a in args]
            bsign = _bar_sign([M.degree(a) for a in args])
            dsign = _dual_sign(shifted)
            word = tuple(names[a] for a in args)
            for lab, c in val.items():
                if lab not in iset:
                    continue
                xdeg = 1 - M.degree(lab)
                sign = -(-1 if xdeg % 2 else 1) * bsign * dsign
                add_into(diff[names[lab]], {word: sign * c})
    inexact = _arity_gaps(M, ideal, N)
    certified = min(inexact, default=None)
    if certified is not None:
        certified -= 1
    if not complete:
        certified = bound if certified is None else min(certified, bound)
    window = {"generator_weight": bound, "certified_abs_weight": certified, "arity": N,
              "abs_weight": bound if certified is None else certified}
    return FreeDga(gens, {k: list(v.items()) for k, v in diff.items()}, window=window)


def _arity_gaps(M, ideal, N) -> List[int]:
    """|weight| of generators whose differential could involve some m_n with n > N.

    A tuple contributes to d(x*) only if its weights add up to wt(x) and its
    degrees to |x| + n - 2; we search for such tuples of arity > N.
    """
    bidegs = sorted({(M.degree(l), abs(M.weight(l))) for l in ideal})
    if not bidegs:
        return []
    top = max(w for _, w in bidegs)
    wmin = min(w for _, w in bidegs)
    reach: Dict[int, set] = {0: {(0, 0)}}       # arity -> reachable (degree, weight)
    out = set()
    targets = {(M.degree(l), abs(M.weight(l))) for l in ideal}
    for n in range(1, top // wmin + 1):
        cur = set()
        for d0, w0 in reach[n - 1]:
            for d, w in bidegs:
                if w0 + w <= top:
                    cur.add((d0 + d, w0 + w))
        reach[n] = cur
        if n > N:
            for d, w in cur:
                if (d + 2 - n, w) in targets:
                    out.add(w)
    return sorted(out)


# ---------------------------------------------------------------------------
# cobar construction

def cobar_construction(C: DgCoalgebraTruncation) -> FreeDga:
    """Tensor algebra on s^{-1} of the coaugmentation coideal with d_C + d_Omega."""
    if not C.is_conilpotent():
        raise KoszulError("coalgebra is not conilpotent within the truncation")
    labels = C.labels()
    names = {c: f"c{i}" for i, c in enumerate(labels)}
    gens = []
    ws = {C.grading[c][1] for c in labels}
    if 0 in ws:
        raise KoszulError("cobar needs nonzero weights on the coideal")
    for c in labels:
        deg, wt = C.grading[c]
        gens.append(Generator(names[c], deg + 1, wt))
    diff: Dict[str, Dict] = {}
    for c in labels:
        out: Dict = {}
        for u, x in C.differential.get(c, {}).items():
            add_into(out, {(names[u],): -x})
        for (a, b), x in C.coproduct.get(c, {}).items():
            sign = -1 if C.grading[a][0] % 2 else 1
            add_into(out, {(names[a], names[b]): sign * x})
        diff[names[c]] = out
    bound = max((abs(w) for w in ws), default=0)
    return FreeDga(gens, {k: list(v.items()) for k, v in diff.items()}, window={"abs_weight": bound})


# ---------------------------------------------------------------------------
# double dual

@dataclass
class DoubleDualReport:
    dims_a: Dict[Key, int]
    dims_double: Dict[Key, int]
    window: Dict

    @property
    def agree(self) -> bool:
        keys = set(self.dims_a) | set(self.dims_double)
        return all(self.dims_a.get(k, 0) == self.dims_double.get(k, 0) for k in keys)


def double_dual_check(A: FiniteDga, w_bound: int, deg_range: Tuple[int, int] = (-4, 0)) -> DoubleDualReport:
    """Compare H(A) with H(A^!!) per block for |weight| <= w_bound."""
    if not A.is_nilpotent():
        raise KoszulError("augmentation ideal is not nilpotent")
    dual = koszul_dual(A)
    dual.window["abs_weight"] = w_bound
    # A^! is free with negative weights; dualise again through the weight bound.
    double = koszul_dual(dual, weight_bound=w_bound)
    double.window["abs_weight"] = w_bound
    lo, hi = deg_range
    h_a = cohomology(A, [k for k in A.keys() if lo <= k[0] <= hi and abs(k[1]) <= w_bound],
                     BlockContraction(A, {A.unit()[0]: [A.unit()[1]]}))
    h_dd = free_dga_cohomology(double, lo, w_bound, hi)
    da = {k: n for k, n in h_a.dims.items() if n}
    dd = {k: n for k, n in h_dd.dims.items() if n}
    if not double.generators and w_bound >= 0:
        dd = {(0, 0): 1}
    return DoubleDualReport(da, dd, {"degree": deg_range, "abs_weight": w_bound})
