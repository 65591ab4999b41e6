from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from enriques_phi.lattice import (
    E8_CARTAN,
    QuadLattice,
    appendix_glue,
    characteristic_vector,
    disc_group,
    enumerate_vectors,
    hnf_rows,
    integer_kernel,
    invariants,
    isotropic_level,
    short_vectors,
    short_vectors_array,
    sl2_lift_check,
    standard_lattice,
)


def _random_instance(rng: random.Random):
    r = rng.randint(2, 6)
    a = np.eye(r, dtype=np.int64)
    for i in range(r):
        for j in range(i + 1, r):
            a[i, j] = rng.randint(-1, 1)
    d = np.diag([rng.randint(1, 2)] + [-rng.randint(1, 2) for _ in range(r - 1)])
    gram = a.T @ d @ a
    while True:
        hv = np.array([rng.randint(-2, 2) for _ in range(r)], dtype=np.int64)
        if hv @ gram @ hv > 0:
            break
    norm_min = rng.choice([-4, -2, 0])
    norm_max = norm_min + rng.randint(0, 4)
    h_min = rng.randint(-1, 1)
    h_max = h_min + rng.randint(1, 3)
    return gram, hv, norm_min, norm_max, h_min, h_max


def _naive(gram, hv, norm_min, norm_max, h_min, h_max):
    """Brute force over a box large enough by an eigenvalue bound."""
    r = len(gram)
    H = float(hv @ gram @ hv)
    gh = gram @ hv
    # v = (h/H) hv + w with w in the negative definite complement, so
    # -w^2 <= h_max^2/H - norm_min; bound coordinates through the smallest
    # eigenvalue of the positive definite form 2 gh gh^T / H - gram.
    form = 2 * np.outer(gh, gh) / H - gram
    lam = np.linalg.eigvalsh(form).min()
    bound = 2 * max(h_min**2, h_max**2) / H - norm_min
    radius = int(math.isqrt(int(max(bound, 0) / lam) + 1)) + 1
    if (2 * radius + 1) ** r > 3_000_000:
        return None
    axis = np.arange(-radius, radius + 1, dtype=np.int64)
    grid = np.array(np.meshgrid(*([axis] * r), indexing="ij")).reshape(r, -1).T
    norms = np.einsum("ij,jk,ik->i", grid, gram, grid)
    heights = grid @ gh
    keep = (norms >= norm_min) & (norms <= norm_max) & (heights > h_min) & (heights <= h_max)
    rows = [(int(h), tuple(int(x) for x in v)) for h, v in zip(heights[keep], grid[keep])]
    rows.sort()
    return [v for _, v in rows]


def test_enumerate_vectors_matches_naive_oracle():
    rng = random.Random(8)
    checked = 0
    while checked < 60:
        gram, hv, nmin, nmax, hmin, hmax = _random_instance(rng)
        expected = _naive(gram, hv, nmin, nmax, hmin, hmax)
        if expected is None:
            continue
        L = QuadLattice("rand", [[int(x) for x in row] for row in gram])
        got = enumerate_vectors(L, nmin, nmax, [int(x) for x in hv], hmin, hmax)
        assert [tuple(int(x) for x in v) for v in got] == expected
        checked += 1


def test_e8_2_norm_minus_four_count():
    E = standard_lattice("E8_2")
    neg = [[-x for x in row] for row in E.gram]
    vecs = [v for v in short_vectors(neg, 4) if any(v)]
    assert len(vecs) == 240
    assert all(E.norm(v) == -4 for v in vecs)


def test_e8_theta_series_start():
    t, num, scale = short_vectors_array(E8_CARTAN, 6)
    values = np.asarray(num) // scale
    assert [int((values == 2 * k).sum()) for k in range(4)] == [1, 240, 2160, 6720]


def test_no_roots_in_u2_sum_and_e8_2():
    # every norm of U(2)+U(2) and of E8(2) lies in 4Z: even off-diagonal
    # entries and diagonal entries divisible by 4 force it
    for name in ("K", "E8_2"):
        g = standard_lattice(name).gram
        n = len(g)
        assert all(g[i][i] % 4 == 0 for i in range(n))
        assert all(g[i][j] % 2 == 0 for i in range(n) for j in range(n))
    E = standard_lattice("E8_2")
    assert not [v for v in short_vectors([[-x for x in r] for r in E.gram], 2) if any(v)]


def test_standard_invariants():
    assert invariants(standard_lattice("Lambda")) == ((2, 10), 10, 0)
    assert invariants(standard_lattice("K")) == ((2, 2), 4, 0)
    assert invariants(standard_lattice("U2")) == ((1, 1), 2, 0)


def test_appendix_glue_invariants():
    L = appendix_glue()
    assert invariants(L) == ((2, 10), 10, 0)
    assert L.is_even


def test_characteristic_vector_of_u2_is_zero_class():
    c = characteristic_vector(standard_lattice("U2"))
    assert all(x % 1 == 0 for x in c)


def test_disc_group_of_k():
    A = disc_group(standard_lattice("K"))
    assert len(A.reps) == 16
    # 6 odd and 10 even classes (the zero class among the even ones)
    assert sum(1 for q in A.qvals if q == 1) == 6


def test_isotropic_level():
    L = standard_lattice("Lambda")
    e = [1, 0] + [0] * 10
    f = [0, 0, 1, 0] + [0] * 8
    assert isotropic_level(L, e) == 2
    assert isotropic_level(L, f) == 1
    with pytest.raises(ValueError):
        isotropic_level(L, [1, 1] + [0] * 10)


@pytest.mark.parametrize("g", [[[0, -1], [1, 0]], [[1, 1], [0, 1]], [[2, 1], [1, 1]]])
def test_sl2_lift_is_isometry(g):
    m = np.array(sl2_lift_check(g))
    gram = np.array([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    assert (m.T @ gram @ m == gram).all()


def test_sl2_lift_rejects_bad_determinant():
    with pytest.raises(ValueError):
        sl2_lift_check([[2, 0], [0, 1]])


small_ints = st.integers(-6, 6)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(small_ints, min_size=4, max_size=4), min_size=1, max_size=4))
def test_integer_kernel_property(rows):
    kernel = integer_kernel(rows, 4)
    m = np.array(rows)
    for k in kernel:
        assert not (m @ np.array(k)).any()
    assert len(kernel) == 4 - np.linalg.matrix_rank(m)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(small_ints, min_size=3, max_size=3), min_size=1, max_size=5))
def test_hnf_preserves_row_span(rows):
    h = hnf_rows(rows)
    assert len(h) == np.linalg.matrix_rank(np.array(rows))
    # each original row is an integer combination of the HNF rows
    if h:
        sol, *_ = np.linalg.lstsq(np.array(h, dtype=float).T, np.array(rows, dtype=float).T, rcond=None)
        assert np.allclose(sol, np.round(sol), atol=1e-8)
        assert np.allclose(np.array(h).T @ np.round(sol), np.array(rows).T)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(0, 12))
def test_short_vectors_symmetric_and_bounded(n, bound):
    gram = [[2 if i == j else (1 if abs(i - j) == 1 else 0) for j in range(n)] for i in range(n)]
    vecs = set(short_vectors(gram, bound))
    for v in vecs:
        assert tuple(-x for x in v) in vecs
        assert sum(gram[i][j] * v[i] * v[j] for i in range(n) for j in range(n)) <= bound
    box = range(-3, 4)
    for v in itertools.product(box, repeat=n):
        if sum(gram[i][j] * v[i] * v[j] for i in range(n) for j in range(n)) <= bound:
            assert v in vecs


def test_short_vectors_with_shift_is_exact():
    half = Fraction(1, 2)
    vecs = list(short_vectors([[2, 0], [0, 2]], 1, (half, half)))
    assert sorted(vecs) == sorted(
        (Fraction(a) + half, Fraction(b) + half) for a in (-1, 0) for b in (-1, 0)
    )
