import pytest
from hypothesis import given, settings, strategies as st

from dcalg.chain import (BlockContraction, MatrixComplex, check_d_squared, cohomology, ext_table,
                         verify_complex)
from dcalg.linalg import add_into

from helpers import endo, pagoda_explicit, resolution

CASES = [("atiyah", "2", 8, 4), ("pagoda2", "2", 12, 4), ("pagoda3", "2", 14, 4), ("pagoda4", "2", 14, 4),
         ("laufer", "2", 16, 5), ("an_slice1", "2", 8, 4), ("an_slice2", "2", 12, 6), ("quiv1", "3", 6, 4)]


@pytest.mark.parametrize("name,v,W,L", CASES)
def test_resolution_is_a_complex(name, v, W, L):
    assert verify_complex(resolution(name, v, W, L))


@pytest.mark.parametrize("name,v,W,L", CASES)
def test_ext_counts_summands(name, v, W, L):
    # for a minimal resolution, Ext^k(S_v, S_v) in weight d counts copies of P_v(d) in degree k
    C = resolution(name, v, W, L)
    E = endo(name, v, W, L)
    T = ext_table(E)
    expected = {}
    for k, summands in C.terms.items():
        for u, d in summands:
            if u == v and E.trusted((k, d)):
                expected[(k, d)] = expected.get((k, d), 0) + 1
    expected[(0, 0)] = 1
    assert T.nonzero() == expected


def hilbert(name, v, W, L):
    return ext_table(endo(name, v, W, L)).hilbert()


def test_atiyah_ext():
    assert hilbert("atiyah", "2", 8, 4) == {0: 1, 3: 1}


@pytest.mark.parametrize("n", [2, 3, 4])
def test_pagoda_ext(n):
    assert hilbert(f"pagoda{n}", "2", 2 * n + 6, 4) == {0: 1, 1: 1, 2: 1, 3: 1}


def test_laufer_ext_bidegrees():
    T = ext_table(endo("laufer", "2", 16, 5))
    assert T.nonzero() == {(0, 0): 1, (1, 2): 1, (1, 3): 1, (2, 5): 1, (2, 6): 1, (3, 8): 1}


def test_slice_ext_pattern():
    T = ext_table(endo("an_slice2", "2", 12, 6))
    assert [T.by_degree().get(j, 0) for j in range(7)] == [1, 0, 1, 1, 1, 1, 1]


@pytest.mark.parametrize("name,v,W,L", CASES[:5])
def test_end_dga_d_squared(name, v, W, L):
    assert check_d_squared(endo(name, v, W, L))


@pytest.mark.parametrize("name,v,W,L", [("pagoda3", "2", 14, 4), ("laufer", "2", 16, 5), ("an_slice2", "2", 12, 6)])
def test_leibniz(name, v, W, L):
    E = endo(name, v, W, L)
    labels = [(k, lab) for k in E.keys() for lab in E.basis(k)]

    @given(st.sampled_from(labels), st.sampled_from(labels))
    @settings(max_examples=150, deadline=None)
    def check(x, y):
        (k1, a), (k2, b) = x, y
        k = (k1[0] + k2[0], k1[1] + k2[1])
        if not E.in_window(k) or not E.in_window((k[0] + 1, k[1])):
            return
        prod = E.mul(k1, a, k2, b)
        lhs = E.d_vec(k, prod)
        rhs = {}
        add_into(rhs, E.mul_vec((k1[0] + 1, k1[1]), E.d(k1, a), k2, {b: 1}))
        sign = -1 if k1[0] % 2 else 1
        add_into(rhs, E.mul_vec(k1, {a: 1}, (k2[0] + 1, k2[1]), E.d(k2, b)), sign)
        assert lhs == rhs

    check()


@pytest.mark.parametrize("n", [2, 3, 4])
def test_hand_written_pagoda_resolution(n):
    C, E, f1, f2 = pagoda_explicit(n)
    assert verify_complex(C)
    assert E.d_vec(*f1) == {} and E.d_vec(*f2) == {}
    K = BlockContraction(E)
    assert K.pi(*f1) and K.pi(*f2)


def test_matrix_complex_cohomology():
    X = MatrixComplex({0: 2, 1: 2, 2: 1}, {0: [[1, 1], [1, 1]], 1: [[1, -1]]})
    T = cohomology(X)
    assert T.by_degree() == {0: 1, 1: 0, 2: 0}


def test_contraction_identities():
    E = endo("pagoda3", "2", 14, 4)
    K = BlockContraction(E)
    for key in E.keys():
        for lab in E.basis(key):
            v = {lab: 1}
            # v = sigma pi v + d h v + h d v
            total = K.sigma(key, K.pi(key, v)) if K.dim(key) else {}
            total = dict(total)
            up = (key[0] + 1, key[1])
            down = (key[0] - 1, key[1])
            if E.in_window(down):
                add_into(total, E.d_vec(down, K.h(key, v)))
            if E.in_window(up) and E.d(key, lab):
                add_into(total, K.h(up, E.d(key, lab)))
            assert total == v
