"""Engine checks: moments, derivatives and substitution of poly-Gaussians.

The integrate() closed form is checked against plain trapezoid quadrature,
which shares no code with the moment recursion.
"""

import numpy as np
import pytest

from kreingeo.errors import DivergentNormError
from kreingeo.polygauss import PolyGaussian, min_real_eigenvalue


def trapezoid_integral(pg, radius=10.0, n=4001):
    xs = np.linspace(-radius, radius, n)
    if pg.dim == 1:
        vals = np.array([pg.evaluate([x]) for x in xs])
        return np.trapezoid(vals, xs)
    xg, yg = np.meshgrid(xs, xs, indexing="ij")
    vals = np.array([[pg.evaluate([a, b]) for b in xs[::8]] for a in xs[::8]])
    step = xs[8] - xs[0]
    return vals.sum() * step * step


def test_plain_gaussian_integral():
    pg = PolyGaussian({(0,): 1.0}, [[2.0]], [0.0])
    assert pg.integrate() == pytest.approx(np.sqrt(2 * np.pi / 2.0), rel=1e-14)


def test_moment_integrals_against_trapezoid():
    pg = PolyGaussian({(3,): 1.5, (1,): -0.5, (0,): 2.0}, [[1.3]], [0.4], 0.1)
    assert pg.integrate() == pytest.approx(trapezoid_integral(pg), rel=1e-10)


def test_complex_shift_and_coefficients():
    pg = PolyGaussian({(2,): 1.0 + 0.5j}, [[1.0 + 0.3j]], [0.2 - 0.1j], 0.05j)
    got = pg.integrate()
    want = trapezoid_integral(pg)
    assert abs(got - want) / abs(want) < 1e-10


def test_two_dimensional_integral():
    quad = np.array([[1.5, 0.3], [0.3, 2.0]], dtype=complex)
    pg = PolyGaussian({(1, 1): 1.0, (0, 0): 0.7}, quad, [0.1, -0.2])
    got = pg.integrate()
    want = trapezoid_integral(pg, radius=8.0)
    assert abs(got - want) / abs(want) < 1e-4  # coarse 2-d trapezoid


def test_differentiate_matches_finite_difference():
    pg = PolyGaussian({(2, 0): 1.0, (0, 1): 0.5}, [[1.2, 0.1], [0.1, 0.9]], [0.3, -0.4])
    d0 = pg.differentiate(0)
    z = np.array([0.37, -0.81])
    h = 1e-6
    fd = (pg.evaluate(z + [h, 0]) - pg.evaluate(z - [h, 0])) / (2 * h)
    assert d0.evaluate(z) == pytest.approx(fd, rel=1e-8)


def test_substitute_pins_coordinates():
    pg = PolyGaussian({(1, 2): 1.0}, [[1.0, 0.2], [0.2, 1.5]], [0.0, 0.3])
    fixed = pg.substitute({0: 0.7})
    assert fixed.dim == 1
    assert fixed.evaluate([0.4]) == pytest.approx(pg.evaluate([0.7, 0.4]), rel=1e-14)


def test_divergence_raises_with_eigenvalue():
    pg = PolyGaussian({(0, 0): 1.0}, [[1.0, 1.0], [1.0, 1.0]], [0.0, 0.0])
    with pytest.raises(DivergentNormError) as err:
        pg.integrate()
    assert err.value.min_eigenvalue == pytest.approx(0.0, abs=1e-14)


def test_min_real_eigenvalue_helper():
    m = np.array([[3.0, 1.0], [1.0, 3.0]]) + 1j * np.ones((2, 2))
    assert min_real_eigenvalue(m) == pytest.approx(2.0)


def test_zero_polynomial_integrates_to_zero():
    pg = PolyGaussian({}, [[1.0]], [0.0])
    assert pg.integrate() == 0.0


def test_sqrt_det_branch_is_continuous():
    # Rotating the quadratic form's phase must not jump across a branch cut.
    values = []
    for phi in np.linspace(0, 1.2, 13):
        quad = [[2.0 * np.exp(1j * phi)]]
        pg = PolyGaussian({(0,): 1.0}, quad, [0.0])
        values.append(pg.integrate())
    diffs = np.abs(np.diff(values))
    assert diffs.max() < 0.2
