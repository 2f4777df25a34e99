from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dcalg.algebra import build_truncated_algebra
from dcalg.derived_quotient import derived_contraction_algebra
from dcalg.dsl import parse
from dcalg.ginzburg import (Superpotential, contraction_subquiver, cyclic_derivative, ginzburg_dga,
                            jacobi_algebra, jacobi_relations, match_presentations, same_relations)
from dcalg.koszul import free_dga_cohomology
from dcalg.linalg import add_into
from dcalg.quiver import PresentationError

from conftest import corpus


def word_product(p, q):
    out = {}
    for u, a in p.items():
        for v, b in q.items():
            add_into(out, {u + v: a * b})
    return out


def test_pagoda_loop_derivative():
    doc = corpus("pagoda3")
    q, W = contraction_subquiver(doc.presentation, doc.superpotential, ["2"])
    assert [a.name for a in q.arrows] == ["m"]
    assert cyclic_derivative(W, "m") == {("m", "m", "m"): Fraction(2)}


def test_laufer_derivatives():
    doc = corpus("laufer")
    q, W = contraction_subquiver(doc.presentation, doc.superpotential, ["2"])
    assert cyclic_derivative(W, "y") == {("x", "x"): 1, ("y", "y", "y"): -1}
    assert cyclic_derivative(W, "x") == {("x", "y"): 1, ("y", "x"): 1}


def test_unused_arrow_has_zero_derivative():
    doc = parse("vertex 1\narrow x: 1 -> 1 weight 1\narrow y: 1 -> 1 weight 1\nsuperpotential x x x\n")
    assert cyclic_derivative(doc.superpotential, "y") == {}
    assert doc.superpotential.arrows_used() == ["x"]


def test_unknown_arrow_rejected():
    doc = corpus("pagoda2")
    with pytest.raises(Exception):
        cyclic_derivative(doc.superpotential, "nope")


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.lists(st.sampled_from("xy"), min_size=1, max_size=5),
                          st.integers(-3, 3)), min_size=1, max_size=4),
       st.integers(0, 4))
def test_rotation_invariance(terms, k):
    p = parse("vertex 1\narrow x: 1 -> 1 weight 1\narrow y: 1 -> 1 weight 1\n").presentation
    rotated = [(w[k % len(w):] + w[:k % len(w)], c) for w, c in terms]
    A = Superpotential.from_terms(p, [(tuple(w), c) for w, c in terms])
    B = Superpotential.from_terms(p, [(tuple(w), c) for w, c in rotated])
    assert A == B
    for a in "xy":
        assert cyclic_derivative(A, a) == cyclic_derivative(B, a)


@pytest.mark.parametrize("name", ["laufer", "pagoda2", "pagoda3", "pagoda4"])
def test_commutator_sum_vanishes(name):
    doc = corpus(name)
    W = doc.superpotential
    total = {}
    for a in doc.presentation.arrows:
        der = cyclic_derivative(W, a.name)
        add_into(total, word_product({(a.name,): 1}, der))
        add_into(total, {w: -c for w, c in word_product(der, {(a.name,): 1}).items()})
    assert total == {}


@pytest.mark.parametrize("name", ["laufer", "pagoda2", "pagoda3"])
def test_corpus_relations_are_jacobi(name):
    doc = corpus(name)
    A = build_truncated_algebra(doc.presentation, 12)
    J = jacobi_algebra(doc.presentation, doc.superpotential, 12)
    assert same_relations(A, J, doc.presentation.relations, jacobi_relations(doc.superpotential))
    assert A.dims_by_weight() == J.dims_by_weight()


def test_different_relations_detected():
    doc = corpus("pagoda2")
    A = build_truncated_algebra(doc.presentation, 10)
    B = build_truncated_algebra(doc.presentation.with_relations(()), 10)
    assert not same_relations(A, B, doc.presentation.relations, [])


@pytest.mark.parametrize("name,v,W,L,N,want", [
    ("laufer", "2", 16, 5, 5, {"x": -3, "y": -2, "x*": -5, "y*": -6, "z": -8}),
    ("pagoda3", "2", 14, 4, 4, {"m": -2, "m*": -6, "z": -8}),
    ("pagoda2", "2", 12, 4, 4, {"m": -2, "m*": -4, "z": -6}),
])
def test_ginzburg_matches_contraction_algebra(name, v, W, L, N, want):
    doc = corpus(name)
    q, Wq = contraction_subquiver(doc.presentation, doc.superpotential, [v])
    G = ginzburg_dga(q, Wq)
    F = derived_contraction_algebra(doc.presentation, v, W, L, N).dga
    by_bideg = {(g.degree, g.weight): g.name for g in F.generators}
    matching = {g.name: by_bideg[(g.degree, want[g.name])] for g in G.generators}
    m = match_presentations(G, F, matching)
    assert m is not None


def test_laufer_jacobi_equals_h0():
    doc = corpus("laufer")
    q, Wq = contraction_subquiver(doc.presentation, doc.superpotential, ["2"])
    J = jacobi_algebra(q, Wq, 18)
    H = free_dga_cohomology(ginzburg_dga(q, Wq, w_bound=18), 0, 18, 0)
    assert J.dim() == 9
    assert {w: n for w, n in J.dims_by_weight().items() if n} == \
        {w: n for (j, w), n in H.dims.items() if j == 0 and n}


def test_zero_superpotential_needs_weight():
    p = parse("vertex 1\nvertex 2\narrow x: 1 -> 2 weight 1\n").presentation
    W = Superpotential.from_terms(p, [])
    assert W.is_zero()
    with pytest.raises(PresentationError):
        ginzburg_dga(p, W)
    G = ginzburg_dga(p, W, weight=3)
    assert G.d_gen("x*") == {}
    assert jacobi_algebra(p, W, 5).dim() == 3


def test_noncycle_rejected():
    p = parse("vertex 1\nvertex 2\narrow x: 1 -> 2 weight 1\n").presentation
    with pytest.raises(PresentationError):
        Superpotential.from_terms(p, [(("x",), 1)])


def test_contraction_subquiver_drops_broken_cycles():
    doc = corpus("laufer")
    q, W = contraction_subquiver(doc.presentation, doc.superpotential, ["2"])
    assert sorted(a.name for a in q.arrows) == ["x", "y"]
    assert sorted(W.arrows_used()) == ["x", "y"]
    with pytest.raises(PresentationError):
        contraction_subquiver(doc.presentation, doc.superpotential, ["9"])
