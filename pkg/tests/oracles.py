"""Brute-force reference computations used only by the tests."""

from fractions import Fraction
from math import comb

from dcalg.linalg import rank


def paths(p, w):
    """All paths of weight exactly w, as (source, target, word); vertices for w = 0."""
    out = [(v, v, ()) for v in p.vertices] if w == 0 else []
    if w == 0:
        return out
    for a in p.arrows:
        if a.weight == w:
            out.append((a.source, a.target, (a.name,)))
        elif a.weight < w:
            for s, t, word in paths(p, w - a.weight):
                if t == a.source and word:
                    out.append((s, a.target, word + (a.name,)))
    return out


def quotient_dims(p, w_max):
    """dim of (kQ/I)_w for w <= w_max by spanning the ideal with u r v directly."""
    dims = {}
    rels = []
    for r in p.relations:
        s, t = p.word_ends(r.terms[0][0])
        rels.append((s, t, p.word_weight(r.terms[0][0]), dict(r.terms)))
    by_w = {w: paths(p, w) for w in range(w_max + 1)}
    for w in range(w_max + 1):
        idx = {(s, t, word): i for i, (s, t, word) in enumerate(by_w[w])}
        span = []
        for s, t, rw, rel in rels:
            for wu in range(w - rw + 1):
                for us, ut, u in by_w[wu]:
                    if ut != s:
                        continue
                    for vs, vt, v in by_w[w - rw - wu]:
                        if vs != t:
                            continue
                        vec = {}
                        for word, c in rel.items():
                            full = u + word + v
                            k = idx[(us, vt, full)]
                            vec[k] = vec.get(k, 0) + c
                        span.append({k: x for k, x in vec.items() if x})
        n = len(by_w[w]) - rank(span)
        if n:
            dims[w] = n
    return dims


def catalan(p):
    return comb(2 * (p - 1), p - 1) // p


def pagoda_catalan_op(n, args):
    """The closed formula for m_r on the basis eta^i xi^j of k[xi]/xi^n [eta]; args are (i, j)."""
    r = len(args)
    i = sum(a[0] for a in args)
    j = sum(a[1] for a in args)
    if r % 2 == 0 and n * (r - 2) <= j < n * (r - 1):
        return (i + r // 2 - 1, j - n * (r - 2)), Fraction(-(-1) ** (r // 2) * catalan(r // 2))
    return None
