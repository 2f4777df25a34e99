"""Exact sparse linear algebra over the rationals.

A vector is a dict mapping an integer column index to a nonzero Fraction.
Everything here is written for the small, very sparse systems that come out
of weight-graded path algebras, so rows are never densified.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

Vec = Dict[int, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)


def add_into(target: dict, source: dict, scale=ONE) -> None:
    """target += scale * source, dropping entries that cancel."""
    if not scale:
        return
    for k, v in source.items():
        x = target.get(k, ZERO) + scale * v
        if x:
            target[k] = x
        else:
            target.pop(k, None)


def scaled(vec: dict, scale) -> dict:
    if not scale:
        return {}
    return {k: scale * v for k, v in vec.items()}


def combine(pairs: Iterable[Tuple[Fraction, dict]]) -> dict:
    out: dict = {}
    for c, v in pairs:
        add_into(out, v, c)
    return out


def lincomb_keys(vec: dict, images: Sequence[dict]) -> dict:
    """Apply a linear map given by the images of basis vectors."""
    out: dict = {}
    for k, c in vec.items():
        add_into(out, images[k], c)
    return out


class Eliminator:
    """Incremental row echelon form.

    Each stored row has its largest column as pivot, normalised to 1.  With
    ``track=True`` every row also remembers which combination of inserted
    vectors produced it, which is what kernels, solves and change of basis
    need.
    """

    def __init__(self, track: bool = False):
        self.track = track
        self.rows: Dict[int, Tuple[Vec, dict]] = {}
        self.order: List[int] = []

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> List[int]:
        return list(self.order)

    def reduce(self, vec: Vec, combo: Optional[dict] = None) -> Tuple[Vec, dict]:
        v = dict(vec)
        c = dict(combo) if combo else {}
        rows = self.rows
        heap = [-k for k in v if k in rows]
        heapq.heapify(heap)
        while heap:
            col = -heapq.heappop(heap)
            coef = v.get(col)
            if coef is None:
                continue
            row, rcombo = rows[col]
            for k, x in row.items():
                y = v.get(k, ZERO) - coef * x
                if y:
                    if k not in v and k in rows and k != col:
                        heapq.heappush(heap, -k)
                    v[k] = y
                else:
                    v.pop(k, None)
            if self.track:
                add_into(c, rcombo, -coef)
        return v, c

    def add(self, vec: Vec, label: Hashable = None) -> Tuple[bool, dict]:
        """Insert a vector.  Returns (independent, combo).

        When the vector is dependent and tracking is on, combo is a relation
        among inserted vectors (including this one with coefficient 1).
        """
        start = {label: ONE} if self.track else None
        v, c = self.reduce(vec, start)
        if not v:
            return False, c
        p = max(v)
        inv = ONE / v[p]
        v = {k: x * inv for k, x in v.items()}
        if self.track:
            c = {k: x * inv for k, x in c.items()}
        self.rows[p] = (v, c)
        self.order.append(p)
        return True, c

    def contains(self, vec: Vec) -> bool:
        return not self.reduce(vec)[0]

    def solve(self, vec: Vec) -> Optional[dict]:
        """Express vec as a combination of inserted labels, or None."""
        v, c = self.reduce(vec, {})
        if v:
            return None
        return {k: -x for k, x in c.items()}


def kernel(images: Sequence[Vec]) -> List[Vec]:
    """Basis of the kernel of the map sending e_i to images[i]."""
    el = Eliminator(track=True)
    out = []
    for i, img in enumerate(images):
        ok, combo = el.add(img, i)
        if not ok:
            out.append(combo)
    return out


def rank(vectors: Iterable[Vec]) -> int:
    el = Eliminator()
    for v in vectors:
        el.add(v)
    return len(el)


def independent_subset(vectors: Sequence[Vec], start: Iterable[Vec] = ()) -> List[int]:
    """Indices of vectors that are independent modulo span(start) and earlier ones."""
    el = Eliminator()
    for v in start:
        el.add(v)
    keep = []
    for i, v in enumerate(vectors):
        if el.add(v)[0]:
            keep.append(i)
    return keep


def dense_rank(matrix: Sequence[Sequence[Fraction]]) -> int:
    """Plain Gaussian elimination on a dense matrix (used as a test oracle)."""
    m = [list(map(Fraction, row)) for row in matrix]
    if not m:
        return 0
    rows, cols = len(m), len(m[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == rows:
            break
    return r


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
