import functools

import pytest

from dcalg.chain import check_d_squared
from dcalg.derived_quotient import (DerivedQuotientError, derived_contraction_algebra, dq_cohomology,
                                    drinfeld_model, eta_periodicity_check, h0_matches_quotient,
                                    marked_relations, marking_bound, relative_tor_dims)
from dcalg.dsl import parse
from dcalg.koszul import free_dga_cohomology

from conftest import algebra, corpus
from oracles import quotient_dims

DQ_CASES = [("pagoda3", 12, 3), ("an_slice2", 10, 4), ("quiv1", 6, 4), ("laufer", 12, 3), ("atiyah", 6, 3)]


def marked_for(name):
    return {"quiv1": ("1", "2")}.get(name, ("1",))


@functools.lru_cache(maxsize=None)
def dq(name, W, L):
    return dq_cohomology(algebra(name, W, marked_for(name)), L, W)


@functools.lru_cache(maxsize=None)
def dca(name, W, L, N):
    v = "3" if name == "quiv1" else "2"
    return derived_contraction_algebra(corpus(name).presentation, v, W, L, N)


@pytest.mark.parametrize("name,W,L", DQ_CASES)
def test_drinfeld_d_squared(name, W, L):
    assert check_d_squared(drinfeld_model(algebra(name, W, marked_for(name)), L, W))


@pytest.mark.parametrize("name,W,L", DQ_CASES)
def test_tor_oracle(name, W, L):
    tor = relative_tor_dims(algebra(name, W, marked_for(name)), L - 1, W)
    T = dq(name, W, L).table
    for j in range(2, L + 1):
        for w in range(W + 1):
            assert T.dims.get((-j, w), 0) == tor.get((j - 1, w), 0)


@pytest.mark.parametrize("name,W,L", DQ_CASES)
def test_h0_is_the_quotient(name, W, L):
    assert h0_matches_quotient(dq(name, W, L))


@pytest.mark.parametrize("name,W,L", DQ_CASES)
def test_marked_relations_span_h_minus_one(name, W, L):
    R = marked_relations(algebra(name, W, marked_for(name)))
    assert R.rank == dq(name, W, L).dims_by_degree().get(-1, 0)


@pytest.mark.parametrize("name,W,L,dcaW,N", [("pagoda3", 12, 3, 14, 4), ("an_slice2", 10, 4, 10, 4),
                                             ("quiv1", 6, 4, 6, 4), ("laufer", 12, 3, 16, 5),
                                             ("atiyah", 6, 3, 8, 4)])
def test_dq_agrees_with_dca(name, W, L, dcaW, N):
    r = dca(name, dcaW, 6 if name != "laufer" else 5, N)
    cw = r.window["certified_abs_weight"]
    B = W if cw is None else min(W, cw)
    H = free_dga_cohomology(r.dga, -L, B)
    T = dq(name, W, L).table
    for j in range(-L, 1):
        for w in range(B + 1):
            assert T.dims.get((j, w), 0) == H.dims.get((j, -w), 0)


def test_quiv1_values():
    A = algebra("quiv1", 8, ("1", "2"))
    R = marked_relations(A)
    assert [m.text() for m in R.basis] == ["z|xy"]
    assert marking_bound(A) == 7
    assert dq("quiv1", 6, 4).dims_by_degree()[-1] == 1


def test_quantum_cusp_h0():
    r = dca("laufer", 16, 5, 5)
    assert r.window["certified_abs_weight"] is None
    H = free_dga_cohomology(r.dga, 0, 18)
    cusp = parse("vertex 1\narrow x: 1 -> 1 weight 3\narrow y: 1 -> 1 weight 2\n"
                 "relation x y + y x\nrelation x x - y y y\n").presentation
    want = quotient_dims(cusp, 18)
    got = {-w: n for (j, w), n in H.dims.items() if j == 0 and n}
    assert got == want


def test_laufer_eta_weight():
    r = dca("laufer", 16, 5, 5)
    H = free_dga_cohomology(r.dga, -2, 18, -2)
    assert H.nonzero() == {(-2, -18): 1}


@pytest.mark.parametrize("name,B,window", [("atiyah", 12, (-6, 0)), ("pagoda2", 18, (-4, 0)),
                                           ("pagoda3", 24, (-2, 0)), ("an_slice2", 12, (-4, 0))])
def test_eta_periodicity(name, B, window):
    r = dca(name, max(B, 12) if name != "an_slice2" else 12, 6, 4)
    H = free_dga_cohomology(r.dga, window[0], B)
    assert eta_periodicity_check(H, window)


def test_eta_periodicity_refuses_uncertified_degrees():
    H = free_dga_cohomology(dca("atiyah", 8, 4, 4).dga, -2, 8)
    with pytest.raises(DerivedQuotientError):
        eta_periodicity_check(H, (-6, 0))


def test_dca_needs_finite_quotient():
    with pytest.raises(DerivedQuotientError):
        derived_contraction_algebra(corpus("laufer").presentation, "2", 10, 4, 4)
