import math

import numpy as np
import pytest

from kreingeo.kernels import (KernelSpec, Signature, gram_matrix, kernel_eval,
                              sobolev_coth_reference, sobolev_kernel_value)

COTH_PI_HALF = 0.5018709365986606  # cosh(pi)/sinh(pi)/2
K2000_AT_ZERO = 0.5017118214509261  # truncated sum, N = 2000


def test_signature_validation():
    with pytest.raises(ValueError):
        Signature(-1, 2)
    with pytest.raises(ValueError):
        Signature(0, 0)
    assert Signature(3, 1).dim == 4
    assert np.array_equal(Signature(2, 1).eta(), np.diag([1.0, 1.0, -1.0]))


def test_spec_validation():
    with pytest.raises(ValueError):
        KernelSpec.gaussian(3, 0, scale=0.0)
    with pytest.raises(ValueError):
        KernelSpec("gaussian", Signature(3, 1), 1.0, normalized=True)
    with pytest.raises(ValueError):
        KernelSpec("periodic_sobolev", Signature(2, 0))
    with pytest.raises(ValueError):
        KernelSpec("unknown_family", Signature(1, 0))


def test_zero_separation_is_one():
    spec = KernelSpec.gaussian(3, 0)
    assert kernel_eval(spec, [0.3, -1.0, 2.0], [0.3, -1.0, 2.0]) == 1.0


def test_null_separation_cancels():
    spec = KernelSpec.gaussian(3, 1)
    assert kernel_eval(spec, [0, 0, 0, 0], [1, 0, 0, 1]) == pytest.approx(1.0, abs=1e-15)


def test_unit_separation_value():
    spec = KernelSpec.gaussian(1, 0)
    assert kernel_eval(spec, [0.0], [1.0]) == pytest.approx(0.6065306597126334, rel=1e-14)


def test_scale_enters_quadratically():
    spec = KernelSpec.gaussian(1, 0, scale=2.0)
    assert kernel_eval(spec, [0.0], [1.0]) == pytest.approx(math.exp(-2.0), rel=1e-14)


def test_normalized_prefactor():
    spec = KernelSpec.gaussian(3, 0, scale=2.0, normalized=True)
    pref = (2.0 / math.sqrt(2 * math.pi)) ** 3
    assert kernel_eval(spec, np.zeros(3), np.zeros(3)) == pytest.approx(pref, rel=1e-14)


def test_dimension_mismatch():
    spec = KernelSpec.gaussian(2, 0)
    with pytest.raises(ValueError):
        kernel_eval(spec, [0.0], [1.0])


def test_symmetry():
    spec = KernelSpec.gaussian(2, 1)
    x, y = np.array([0.2, -0.7, 1.1]), np.array([1.0, 0.0, 0.4])
    assert kernel_eval(spec, x, y) == kernel_eval(spec, y, x)


def test_gram_single_point():
    spec = KernelSpec.gaussian(3, 0)
    assert np.array_equal(gram_matrix([[0.0, 0.0, 0.0]], spec), [[1.0]])


def test_gram_two_points():
    spec = KernelSpec.gaussian(1, 0)
    got = gram_matrix([[0.0], [1.0]], spec)
    want = np.array([[1.0, 0.6065306597126334], [0.6065306597126334, 1.0]])
    assert np.allclose(got, want, rtol=1e-14)


def test_gram_lightlike_line_is_all_ones():
    spec = KernelSpec.gaussian(3, 1)
    pts = [[0, 0, 0, 0], [1, 0, 0, 1], [2, 0, 0, 2]]
    assert np.allclose(gram_matrix(pts, spec), np.ones((3, 3)), atol=1e-14)


def test_gram_positive_definite_for_distinct_points():
    rng = np.random.default_rng(3)
    spec = KernelSpec.gaussian(3, 0)
    pts = rng.normal(size=(8, 3))
    eigs = np.linalg.eigvalsh(gram_matrix(pts, spec))
    assert eigs.min() > 0


def test_sobolev_kernel_truncated_value():
    assert sobolev_kernel_value(0.0, 2000) == pytest.approx(K2000_AT_ZERO, abs=1e-12)
    # Approaches the closed form as the truncation error 1/(pi N) predicts.
    assert abs(sobolev_kernel_value(0.0, 2000) - COTH_PI_HALF) < 2e-4
    assert sobolev_coth_reference() == pytest.approx(COTH_PI_HALF, rel=1e-14)


def test_sobolev_kernel_periodic():
    spec = KernelSpec.periodic_sobolev()
    assert kernel_eval(spec, [0.0], [2 * math.pi]) == pytest.approx(
        kernel_eval(spec, [0.0], [0.0]), abs=1e-12)


def test_sobolev_gram_matches_pointwise():
    spec = KernelSpec.periodic_sobolev(500)
    pts = [[0.0], [1.0], [2.5]]
    gram = gram_matrix(pts, spec)
    for i, a in enumerate(pts):
        for j, b in enumerate(pts):
            assert gram[i, j] == pytest.approx(kernel_eval(spec, a, b), rel=1e-12)
