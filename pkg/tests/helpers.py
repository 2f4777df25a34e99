"""Shared builders for the tests."""

import functools

from dcalg.algebra import build_truncated_algebra
from dcalg.chain import complex_from_entries, end_dga, resolve_simple

from conftest import algebra, corpus


@functools.lru_cache(maxsize=None)
def resolution(name, vertex, w_max, hdeg):
    return resolve_simple(algebra(name, w_max), vertex, hdeg)


@functools.lru_cache(maxsize=None)
def endo(name, vertex, w_max, hdeg):
    return end_dga(resolution(name, vertex, w_max, hdeg))


@functools.lru_cache(maxsize=None)
def pagoda_explicit(n):
    """The four-term resolution of the simple at 2 written out by hand, with lifts of f1 and f2."""
    A = build_truncated_algebra(corpus(f"pagoda{n}").presentation, 2 * n + 4)
    mn1 = f"m^{n - 1}" if n > 2 else "m"
    terms = {0: [("2", 0)], 1: [("2", 2), ("1", n), ("1", n)],
             2: [("1", n + 2), ("1", n + 2), ("2", 2 * n)], 3: [("2", 2 * n + 2)]}
    diffs = {1: [["m", "s", "t"]],
             2: [["s", "t", f"2 {mn1}"], ["-l", "0", "-a"], ["0", "-l", "b"]],
             3: [["-a"], ["b"], ["m"]]}
    C = complex_from_entries(A, terms, diffs)
    E = end_dga(C, hdeg_max=3)
    m2 = "-2 m" if n == 3 else (f"-2 m^{n - 2}" if n > 3 else "-2")
    f1 = E.element(1, {(3, 0, 2): "1", (2, 2, 0): m2, (2, 0, 1): "-1", (2, 1, 2): "-1", (1, 0, 0): "1"})
    f2 = E.element(2, {(3, 0, 0): "1", (2, 2, 0): "1"})
    return C, E, f1, f2
