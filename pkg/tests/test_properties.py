import math

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from birkhoff_lab.bracelet import bracelet_margin, compose_factors, is_bracelet, random_factorisable, tensor
from birkhoff_lab.core import (
    BistochasticMatrix,
    CirculantVector,
    circulant_eigenvalues,
    circulant_to_matrix,
    multiply,
    sinkhorn_sample,
)
from birkhoff_lab.matrix_io import format_matrix, parse_matrix
from birkhoff_lab.spectra import HypocycloidRegion
from birkhoff_lab.unistochastic import Verdict, witness_d3

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=2, max_value=7)


@given(dims, seeds)
def test_margin_invariant_under_permutation_and_transpose(d, seed):
    rng = np.random.default_rng(seed)
    a = sinkhorn_sample(d, rng).entries
    p, q = rng.permutation(d), rng.permutation(d)
    m = bracelet_margin(a)
    assert math.isclose(bracelet_margin(a[p][:, q]), m, abs_tol=1e-14)
    assert math.isclose(bracelet_margin(a.T), m, abs_tol=1e-14)


@given(dims, seeds, seeds)
def test_product_stays_bistochastic(d, s1, s2):
    c = multiply(sinkhorn_sample(d, s1), sinkhorn_sample(d, s2)).entries
    np.testing.assert_allclose(c.sum(axis=0), 1, atol=1e-11)
    np.testing.assert_allclose(c.sum(axis=1), 1, atol=1e-11)


@given(st.integers(3, 6), seeds, st.integers(1, 25))
def test_factorisable_is_bracelet(d, seed, n):
    _, b = random_factorisable(d, np.random.default_rng(seed), n)
    assert is_bracelet(b).holds


@given(st.integers(2, 3), st.integers(2, 3), seeds)
def test_tensor_of_factorisables(d1, d2, seed):
    rng = np.random.default_rng(seed)
    _, a = random_factorisable(d1, rng, 6)
    _, b = random_factorisable(d2, rng, 6)
    assert is_bracelet(tensor(a, b)).holds


@given(st.integers(1, 9), seeds)
def test_circulant_eigenvalues_match_fft(d, seed):
    alpha = np.random.default_rng(seed).dirichlet(np.ones(d))
    vals = circulant_eigenvalues(CirculantVector(alpha)).values
    # sum_k alpha_k exp(+2 pi i jk/d) is d times the inverse DFT
    np.testing.assert_allclose(vals, d * np.fft.ifft(alpha), atol=1e-14)


@given(st.integers(3, 8), st.floats(0, 2 * math.pi), st.floats(0, 1))
def test_hypocycloid_star_shaped_about_origin(d, angle, scale):
    h = HypocycloidRegion(d)
    z = h.boundary_radius(angle) * np.exp(1j * angle)
    assert h.contains(scale * z, 1e-12)


@given(st.integers(3, 8), st.floats(-1, 1), st.floats(-1, 1))
def test_hypocycloid_rotation_symmetry(d, x, y):
    h = HypocycloidRegion(d)
    z = complex(x, y)
    assume(abs(z) > 1e-12)  # the excess at the origin depends on direction
    rot = np.exp(2j * math.pi / d)
    # rounding in the rotated angle is amplified like |angle|^(2/3) at a cusp
    assert abs(float(h.excess(z)) - float(h.excess(z * rot))) < 1e-9


@settings(max_examples=200)
@given(seeds)
def test_d3_bracelet_iff_certified(seed):
    b = sinkhorn_sample(3, seed)
    cert = witness_d3(b)
    assert (cert.verdict is Verdict.UNISTOCHASTIC) == is_bracelet(b).holds
    if cert.verdict is Verdict.UNISTOCHASTIC:
        assert cert.witness.certified


@given(dims, seeds)
def test_matrix_text_round_trip(d, seed):
    b = sinkhorn_sample(d, seed)
    assert BistochasticMatrix(parse_matrix(format_matrix(b))) == b


@given(st.integers(2, 5), seeds)
def test_compose_is_associative(d, seed):
    factors, b = random_factorisable(d, np.random.default_rng(seed), 8)
    left = compose_factors(factors[:4], dim=d)
    right = compose_factors(factors[4:], dim=d)
    np.testing.assert_allclose(multiply(left, right).entries, b.entries, atol=1e-14)


@given(st.integers(2, 6), seeds)
def test_circulant_product_is_circulant(d, seed):
    rng = np.random.default_rng(seed)
    a = circulant_to_matrix(CirculantVector(rng.dirichlet(np.ones(d))))
    b = circulant_to_matrix(CirculantVector(rng.dirichlet(np.ones(d))))
    ab = multiply(a, b).entries
    np.testing.assert_allclose(ab, multiply(b, a).entries, atol=1e-15)
    for j in range(d):
        np.testing.assert_allclose(np.roll(ab[0], j), ab[j], atol=1e-15)
