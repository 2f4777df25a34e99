"""A-infinity structures: Stasheff identities, homotopy transfer, Massey products.

Sign conventions: St_n is  sum (-1)^{r+st} m_{r+1+t}(1^r (x) m_s (x) 1^t) = 0,
and inserting elements costs (-1)^{s (|a_1| + ... + |a_r|)}.  Morphisms obey
the matching identity with sign (-1)^{sum_j (q-j)(i_j-1)} on the right and the
Koszul rule for (f_{i_1} (x) ... (x) f_{i_q}).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Hashable, Iterable, Iterator, List, Optional, Sequence, Tuple

from .chain import BlockContraction, BlockDga, ComplexError, Key
from .linalg import ONE, ZERO, Eliminator, add_into, scaled

Label = Hashable


class ArityError(ValueError):
    """An operation was requested beyond what the cutoffs certify."""


class AInfinityStructure:
    """A bigraded space with operations m_1, ..., m_N given on basis tuples.

    ``op(args)`` returns m_n(args) as a dict label -> Fraction.  Operations are
    either explicit tables or computed on demand by a callback and memoised.
    Weights of all non-unit basis elements have a common sign; ``weight_window``
    bounds the weights that are certified.
    """

    def __init__(self, labels: Sequence[Label], grading: Dict[Label, Key], arity_max: int,
                 compute: Optional[Callable[[Tuple], Dict]] = None,
                 tables: Optional[Dict[int, Dict[Tuple, Dict]]] = None,
                 unit: Optional[Label] = None, names: Optional[Dict[Label, str]] = None,
                 weight_window: Optional[Tuple[int, int]] = None, minimal: bool = True,
                 certified_arity: Optional[int] = None):
        self.labels = tuple(labels)
        self.grading = dict(grading)
        self.arity_max = arity_max
        self.certified_arity = arity_max if certified_arity is None else certified_arity
        self._compute = compute
        self._tables = {n: dict(t) for n, t in (tables or {}).items()}
        self.unit = unit
        self.names = dict(names) if names else {lab: default_name(lab, self.grading, self.labels) for lab in self.labels}
        ws = [self.grading[l][1] for l in self.labels]
        self.weight_window = weight_window or (min(ws, default=0), max(ws, default=0))
        self.minimal = minimal
        self._memo: Dict[Tuple, Dict] = {}
        self._by_key: Dict[Key, List[Label]] = {}
        for lab in self.labels:
            self._by_key.setdefault(self.grading[lab], []).append(lab)

    # -- basic access ------------------------------------------------------------
    def degree(self, lab) -> int:
        return self.grading[lab][0]

    def weight(self, lab) -> int:
        return self.grading[lab][1]

    def block(self, key: Key) -> List[Label]:
        return self._by_key.get(key, [])

    def keys(self) -> List[Key]:
        return sorted(self._by_key)

    def in_window(self, w: int) -> bool:
        lo, hi = self.weight_window
        return lo <= w <= hi

    def out_key(self, args: Sequence[Label]) -> Key:
        n = len(args)
        return (sum(self.degree(a) for a in args) + 2 - n, sum(self.weight(a) for a in args))

    def op(self, args: Sequence[Label]) -> Dict:
        args = tuple(args)
        n = len(args)
        if n < 1:
            raise ArityError("operations need at least one input")
        if n > self.arity_max:
            raise ArityError(f"arity {n} exceeds the available arity {self.arity_max}")
        if n in self._tables:
            return self._tables[n].get(args, {})
        got = self._memo.get(args)
        if got is not None:
            return got
        key = self.out_key(args)
        if not self.block(key):
            got = {}
        elif self.unit is not None and self.unit in args and self.minimal:
            got = self._unital(args)
        elif self._compute is None:
            got = {}
        else:
            got = self._compute(args)
        self._memo[args] = got
        return got

    def _unital(self, args):
        if len(args) == 2:
            a, b = args
            return {b: ONE} if a == self.unit else {a: ONE}
        return {}

    def op_vec(self, vecs: Sequence[Dict]) -> Dict:
        """Multilinear extension of op to vectors."""
        out: Dict = {}
        for combo in itertools.product(*(list(v.items()) for v in vecs)):
            c = ONE
            for _, x in combo:
                c *= x
            add_into(out, self.op(tuple(l for l, _ in combo)), c)
        return out

    def table(self, n: int, max_terms: Optional[int] = None) -> Dict[Tuple, Dict]:
        """All nonzero m_n on basis tuples within the weight window."""
        out = {}
        for args in self.tuples(n):
            v = self.op(args)
            if v:
                out[args] = v
        return out

    def tuples(self, n: int, skip_unit: bool = False) -> Iterator[Tuple]:
        """Basis tuples of length n whose partial weight sums stay in the window."""
        labs = [l for l in self.labels if not (skip_unit and l == self.unit)]
        labs.sort(key=lambda l: abs(self.weight(l)))
        lo, hi = self.weight_window

        def rec(prefix, w):
            if len(prefix) == n:
                yield tuple(prefix)
                return
            for l in labs:
                w2 = w + self.weight(l)
                if lo <= w2 <= hi or (w2 == 0):
                    prefix.append(l)
                    yield from rec(prefix, w2)
                    prefix.pop()
                elif abs(w2) > max(abs(lo), abs(hi)):
                    break
        yield from rec([], 0)

    def with_scaled(self, n: int, factor, args: Optional[Tuple] = None) -> "AInfinityStructure":
        """Copy with m_n multiplied by factor (on one tuple, or everywhere)."""
        tables = {}
        for k in range(1, self.arity_max + 1):
            t = self.table(k)
            if k == n:
                t = {a: (scaled(v, Fraction(factor)) if args is None or a == args else v) for a, v in t.items()}
            tables[k] = t
        return AInfinityStructure(self.labels, self.grading, self.arity_max, tables=tables, unit=self.unit,
                                  names=self.names, weight_window=self.weight_window, minimal=self.minimal)

    def named(self, vec: Dict) -> str:
        from .linalg import frac_str
        if not vec:
            return "0"
        parts = []
        for lab in self.labels:
            if lab in vec:
                c = vec[lab]
                parts.append(f"{frac_str(c)}*{self.names[lab]}")
        return " + ".join(parts)


def default_name(lab, grading, labels) -> str:
    deg, wt = grading[lab]
    same = [l for l in labels if grading[l] == (deg, wt)]
    base = f"e{deg}w{wt}".replace("-", "m")
    if len(same) > 1:
        base += f"_{same.index(lab)}"
    return base


# ---------------------------------------------------------------------------
# Stasheff identities

def _koszul(args: Sequence, A: AInfinityStructure, upto: int) -> int:
    return sum(A.degree(a) for a in args[:upto])


def stasheff_defect(A: AInfinityStructure, args: Tuple) -> Dict:
    n = len(args)
    total: Dict = {}
    for r in range(n):
        for s in range(1, n - r + 1):
            t = n - r - s
            u = r + 1 + t
            if u > A.arity_max or s > A.arity_max:
                raise ArityError(f"St_{n} needs m_{max(u, s)}")
            if A.minimal and (s == 1 or u == 1):
                continue
            inner = A.op(args[r:r + s])
            if not inner:
                continue
            sign = (-1) ** (r + s * t) * (-1) ** (s * _koszul(args, A, r))
            for lab, c in inner.items():
                add_into(total, A.op(args[:r] + (lab,) + args[r + s:]), sign * c)
    return total


def check_stasheff(A: AInfinityStructure, arity_max: Optional[int] = None, skip_unit: bool = False,
                   report: Optional[list] = None) -> bool:
    """True iff St_n vanishes on every basis tuple for n <= arity_max.

    St_n involves m_k for k <= n, so arity_max may not exceed A.arity_max.
    """
    N = A.arity_max if arity_max is None else arity_max
    if N > A.arity_max:
        raise ArityError(f"operations are only available through arity {A.arity_max}")
    ok = True
    for n in range(1, N + 1):
        for args in A.tuples(n, skip_unit=skip_unit):
            deg, wt = A.out_key(args)
            if not A.block((deg + 1, wt)):
                continue
            defect = stasheff_defect(A, args)
            if defect:
                ok = False
                if report is not None:
                    report.append((n, args, defect))
                else:
                    return False
    return ok


# ---------------------------------------------------------------------------
# dgas as A-infinity algebras

def from_dga(X: BlockDga, keys: Optional[Iterable[Key]] = None, arity_max: int = 3) -> AInfinityStructure:
    """(X, d, mu, 0, 0, ...) on the basis of the given blocks."""
    keys = sorted(keys if keys is not None else X.keys())
    labels, grading = [], {}
    for key in keys:
        for lab in X.basis(key):
            labels.append((key, lab))
            grading[(key, lab)] = key
    present = set(labels)

    def compute(args):
        if len(args) == 1:
            (k, l), = args
            d = X.d(k, l)
            return {((k[0] + 1, k[1]), x): c for x, c in d.items() if ((k[0] + 1, k[1]), x) in present}
        if len(args) == 2:
            (k1, l1), (k2, l2) = args
            key = (k1[0] + k2[0], k1[1] + k2[1])
            return {(key, x): c for x, c in X.mul(k1, l1, k2, l2).items() if (key, x) in present}
        return {}
    ws = [k[1] for k in keys]
    return AInfinityStructure(labels, grading, arity_max, compute=compute, minimal=False,
                              weight_window=(min(ws, default=0), max(ws, default=0)))


# ---------------------------------------------------------------------------
# homotopy transfer

class Transfer:
    """Merkulov's recursion on the cohomology of a block dga.

    lambda_2 = m_2 and lambda_n = sum_{s+t=n} (-1)^{s+1} lambda_2(h lambda_s (x) h lambda_t),
    with h lambda_1 = -sigma and tensor products applied with the Koszul rule.
    The transferred operations are p_n = pi lambda_n.
    """

    def __init__(self, X: BlockDga, keys: Iterable[Key], contraction: Optional[BlockContraction] = None,
                 hsign: int = 1, koszul: bool = True):
        self.X = X
        self.keys = sorted(set(keys))
        unit = X.unit()
        pref = {unit[0]: [unit[1]]} if unit else {}
        self.K = contraction or BlockContraction(X, pref)
        self.hsign = hsign
        self.koszul = koszul
        self.labels: List[Tuple[Key, int]] = []
        for key in self.keys:
            for i in range(self.K.dim(key)):
                self.labels.append((key, i))
        self.unit_label = None
        if unit and self.K.dim(unit[0]):
            self.unit_label = (unit[0], 0)
            if unit[0] not in self.keys:
                # only the unit is trusted in its block
                self.labels.insert(0, self.unit_label)
        self.grading = {lab: lab[0] for lab in self.labels}
        self._labelset = set(self.labels)
        self._lam: Dict[Tuple, Tuple[Key, Dict]] = {}
        self._hlam: Dict[Tuple, Tuple[Key, Dict]] = {}

    def sigma(self, lab) -> Dict:
        key, i = lab
        return self.K.reps(key)[i]

    def pi(self, key: Key, vec: Dict) -> Dict:
        return {(key, i): c for i, c in self.K.pi(key, vec).items()}

    def _deg(self, args) -> int:
        return sum(a[0][0] for a in args)

    def hlam(self, args: Tuple) -> Tuple[Key, Dict]:
        got = self._hlam.get(args)
        if got is not None:
            return got
        if len(args) == 1:
            key = args[0][0]
            got = (key, scaled(self.sigma(args[0]), -ONE))
        else:
            key, v = self.lam(args)
            hkey = (key[0] - 1, key[1])
            got = (hkey, scaled(self.K.h(key, v), self.hsign) if v else {})
        self._hlam[args] = got
        return got

    def lam(self, args: Tuple) -> Tuple[Key, Dict]:
        got = self._lam.get(args)
        if got is not None:
            return got
        n = len(args)
        key = (self._deg(args) + 2 - n, sum(a[0][1] for a in args))
        X = self.X
        total: Dict = {}
        if n == 2:
            k1, k2 = args[0][0], args[1][0]
            total = X.mul_vec(k1, self.sigma(args[0]), k2, self.sigma(args[1]))
        else:
            for s in range(1, n):
                t = n - s
                kx, x = self.hlam(args[:s])
                if not x:
                    continue
                ky, y = self.hlam(args[s:])
                if not y:
                    continue
                sign = -1 if s % 2 == 0 else 1          # (-1)^{s+1}
                if self.koszul and t > 1 and (1 - t) * self._deg(args[:s]) % 2:
                    sign = -sign
                add_into(total, X.mul_vec(kx, x, ky, y), sign)
        got = (key, total)
        self._lam[args] = got
        return got

    def p(self, args: Tuple) -> Dict:
        key, v = self.lam(args)
        if not v:
            return {}
        out = self.pi(key, v)
        return {lab: c for lab, c in out.items() if lab in self._labelset}

    def f(self, args: Tuple) -> Tuple[Key, Dict]:
        """Components of the A-infinity quasi-isomorphism H -> X: f_1 = sigma, f_n = -h lambda_n."""
        if len(args) == 1:
            return args[0][0], self.sigma(args[0])
        key, v = self.hlam(args)
        return key, scaled(v, -ONE)


def transfer_minimal_model(X: BlockDga, arity_max: int, keys: Optional[Iterable[Key]] = None,
                           names: Optional[Dict] = None, weight_window: Optional[Tuple[int, int]] = None,
                           certified_arity: Optional[int] = None, **kw) -> AInfinityStructure:
    """Minimal model on H(X) restricted to the given (trusted) blocks."""
    if keys is None:
        keys = X.trusted_keys() if hasattr(X, "trusted_keys") else X.keys()
    T = Transfer(X, keys, **kw)
    ws = [lab[0][1] for lab in T.labels] or [0]

    def compute(args):
        if len(args) == 1:
            return {}
        return T.p(args)
    A = AInfinityStructure(T.labels, T.grading, arity_max, compute=compute, unit=T.unit_label,
                           names=names, weight_window=weight_window or (min(ws), max(ws)),
                           certified_arity=certified_arity)
    A.transfer = T
    return A


def check_morphism(A: AInfinityStructure, T: Transfer, arity_max: int) -> bool:
    """The transferred f_n satisfy the morphism identity into the dga (m_1 = d, m_2 = product)."""
    X = T.X
    for n in range(1, arity_max + 1):
        for args in A.tuples(n, skip_unit=True):
            lhs: Dict = {}
            for r in range(n):
                for s in range(1, n - r + 1):
                    t = n - r - s
                    if s == 1:
                        continue
                    inner = A.op(args[r:r + s])
                    if not inner:
                        continue
                    sign = (-1) ** (r + s * t) * (-1) ** (s * _koszul(args, A, r))
                    for lab, c in inner.items():
                        _, fv = T.f(args[:r] + (lab,) + args[r + s:])
                        add_into(lhs, fv, sign * c)
            rhs: Dict = {}
            key, fv = T.f(args)
            if fv:
                add_into(rhs, X.d_vec(key, fv))
            for i in range(1, n):
                j = n - i
                k1, f1 = T.f(args[:i])
                k2, f2 = T.f(args[i:])
                if not f1 or not f2:
                    continue
                sign = (-1) ** (i - 1)                      # sigma = (2-1)(i-1)
                if (1 - j) * _koszul(args, A, i) % 2:
                    sign = -sign
                add_into(rhs, X.mul_vec(k1, f1, k2, f2), sign)
            add_into(lhs, rhs, -ONE)
            if lhs:
                return False
    return True


# ---------------------------------------------------------------------------
# Massey products

def _tilde(key: Key, vec: Dict) -> Dict:
    return vec if key[0] % 2 else scaled(vec, -ONE)


@dataclass
class MasseyResult:
    representative: Optional[Tuple[Key, Dict]]
    indeterminacy: List[Dict]
    key: Optional[Key] = None
    classes: Optional[Dict] = None       # H-coordinates of the representative

    @property
    def empty(self) -> bool:
        return self.representative is None


def massey_product(X: BlockDga, classes: Sequence[Tuple[Key, Dict]], r: Optional[int] = None,
                   contraction: Optional[BlockContraction] = None) -> MasseyResult:
    """One element of <x_1, ..., x_r> and a spanning set of first-order indeterminacy.

    The defining system d a_ij = sum_k ~a_ik a_{k+1,j} is solved by length;
    when a stage is obstructed, the previous stage is corrected by cocycles
    from the cohomology basis through a linear solve in H-coordinates.
    """
    if r is None:
        r = len(classes)
    if len(classes) == 1 and r > 1:
        classes = list(classes) * r
    if len(classes) != r:
        raise ValueError("need one class per slot")
    if r < 3:
        raise ValueError("Massey products need r >= 3")
    K = contraction or BlockContraction(X)
    for key, v in classes:
        if X.d_vec(key, v):
            raise ComplexError("Massey inputs must be cocycles")
    a: Dict[Tuple[int, int], Tuple[Key, Dict]] = {}
    for i, (key, v) in enumerate(classes, 1):
        a[(i, i)] = (key, dict(v))

    def rhs(i, j):
        total: Dict = {}
        key = None
        for k in range(i, j):
            k1, x = a[(i, k)]
            k2, y = a[(k + 1, j)]
            key = (k1[0] + k2[0], k1[1] + k2[1])
            if x and y:
                add_into(total, X.mul_vec(k1, _tilde(k1, x), k2, y))
        return key, total

    for length in range(2, r):
        pairs = [(i, i + length - 1) for i in range(1, r - length + 2)]
        rh = {p: rhs(*p) for p in pairs}
        obstructed = {p for p, (key, v) in rh.items() if v and K.pi(key, v)}
        if obstructed:
            if length == 2 or not _lookback(X, K, a, length, pairs, rh):
                return MasseyResult(None, [])
            rh = {p: rhs(*p) for p in pairs}
            if any(v and K.pi(key, v) for key, v in rh.values()):
                return MasseyResult(None, [])
        for p, (key, v) in rh.items():
            hkey = (key[0] - 1, key[1])
            a[p] = (hkey, K.h(key, v) if v else {})
    key, prod = rhs(1, r)
    ind = _indeterminacy(X, K, classes, key)
    coords = K.pi(key, prod) if prod else {}
    return MasseyResult((key, prod), ind, key, coords)


def _lookback(X, K, a, length, pairs, rh) -> bool:
    """Add cocycles z_p to the length-1 entries so every rhs at this length is exact."""
    prev = [(i, i + length - 2) for i in range(1, len(pairs) + 2)]
    unknowns = []          # (pair, H-index)
    for p in prev:
        key = a[p][0]
        for idx in range(K.dim(key)):
            unknowns.append((p, idx))
    if not unknowns:
        return False
    # class of rhs(i, j) changes linearly: ~z_{i,j-1} a_{jj} + ~a_{ii} z_{i+1,j}
    rows: Dict[Tuple, Dict[int, Fraction]] = {}
    target: Dict[Tuple, Fraction] = {}
    for p in pairs:
        i, j = p
        key, v = rh[p]
        for h, c in (K.pi(key, v) if v else {}).items():
            target[(p, h)] = c
        for u, (q, idx) in enumerate(unknowns):
            zkey = a[q][0]
            z = K.reps(zkey)[idx]
            contrib: Dict = {}
            if q == (i, j - 1):
                k2, y = a[(j, j)]
                add_into(contrib, X.mul_vec(zkey, _tilde(zkey, z), k2, y))
            if q == (i + 1, j):
                k1, x = a[(i, i)]
                add_into(contrib, X.mul_vec(k1, _tilde(k1, x), zkey, z))
            if contrib:
                for h, c in K.pi(key, contrib).items():
                    rows.setdefault((p, h), {})[u] = c
    eqs = sorted(set(rows) | set(target), key=repr)
    # solve sum_u rows[e][u] x_u = -target[e]
    el = Eliminator(track=True)
    col_index = {e: n for n, e in enumerate(eqs)}
    for u in range(len(unknowns)):
        vec = {col_index[e]: rows[e][u] for e in eqs if u in rows.get(e, {})}
        el.add(vec, u)
    goal = {col_index[e]: -target[e] for e in eqs if target.get(e)}
    sol = el.solve(goal)
    if sol is None:
        return False
    for u, x in sol.items():
        q, idx = unknowns[u]
        zkey = a[q][0]
        add_into(a[q][1], K.reps(zkey)[idx], x)
    return True


def _indeterminacy(X, K, classes, key) -> List[Dict]:
    """Span of [~x_1 z] and [~z x_r] over cohomology representatives z of the right bidegree."""
    (k1, x1), (kr, xr) = classes[0], classes[-1]
    out_vecs = []
    zkey = (key[0] - k1[0], key[1] - k1[1])
    for z in K.reps(zkey) if X.basis(zkey) else []:
        out_vecs.append(K.pi(key, X.mul_vec(k1, _tilde(k1, x1), zkey, z)))
    zkey = (key[0] - kr[0], key[1] - kr[1])
    for z in K.reps(zkey) if X.basis(zkey) else []:
        out_vecs.append(K.pi(key, X.mul_vec(zkey, _tilde(zkey, z), kr, xr)))
    el = Eliminator()
    basis = []
    for v in out_vecs:
        if v and el.add(dict(v))[0]:
            basis.append(v)
    return basis
