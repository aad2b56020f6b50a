import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ptspectra.grid import apply_second_derivative, from_closure, inner_product
from ptspectra.line_model import (
    EigenBranch,
    LineModel,
    bc_compatible_gaussian,
    eigen_residual,
    eigenfunction_line,
    interface_residual,
    intertwining_residual,
    matching_determinant,
    metric_apply,
    metric_invertible,
    metric_spectrum,
    point_spectrum_member,
    pt_map,
    weyl_residual,
    weyl_sequence,
)

PLUS, MINUS = LineModel(math.pi / 2), LineModel(-math.pi / 2)


def random_lambdas(rng, n):
    r = 10 ** rng.uniform(-2, 2, n)
    a = rng.uniform(1e-3, 2 * math.pi - 1e-3, n)
    return r * np.exp(1j * a)


# -- eigenfunctions -------------------------------------------------------------

def test_psi_plus_k1():
    f, lam = eigenfunction_line(EigenBranch("psi", 1, 1.0))
    assert lam == -1
    assert np.allclose(f.traces.as_array(), [1, 1, 1j, -1j], rtol=0, atol=1e-15)
    assert interface_residual(f, PLUS) < 1e-15
    assert eigen_residual(f, lam) < 1e-8


def test_psi_norm_matches_closed_form():
    k = 2 + 1j
    f, lam = eigenfunction_line(EigenBranch("psi", 1, k))
    assert abs(lam - (-3 - 4j)) < 1e-14
    # int |e^{kx}|^2 over each half-line is 1 / (2 Re k)
    assert abs(f.norm() ** 2 - 1 / k.real) < 1e-10


@pytest.mark.parametrize("kind,k,model", [
    ("psi", 0.8 - 0.5j, PLUS),
    ("phi_branch", -1.1 + 0.3j, PLUS),
    ("zeta", 1.5j, PLUS),
])
def test_branches_are_eigenfunctions(kind, k, model):
    f, lam = eigenfunction_line(EigenBranch(kind, 1, k))
    assert interface_residual(f, model) < 1e-14
    assert eigen_residual(f, lam) < 1e-8


def test_minus_branch_matches_minus_model():
    f, lam = eigenfunction_line(EigenBranch("psi", -1, 1.3 + 0.2j))
    assert interface_residual(f, MINUS) < 1e-14
    assert interface_residual(f, PLUS) > 0.1


def test_zeta_is_square_integrable():
    # with k = i t the zeta branch decays like e^{-t|x|} on both sides
    br = EigenBranch("zeta", 1, 1j)
    assert br.square_integrable
    f20, lam = eigenfunction_line(br, truncation=20)
    f40, _ = eigenfunction_line(br, truncation=40)
    assert lam == -1
    assert abs(f20.norm() - f40.norm()) < 1e-12
    assert abs(f20.norm() ** 2 - 1.0) < 1e-10


@pytest.mark.parametrize("kind,k", [("psi", -1.0), ("phi_branch", 1.0), ("zeta", 1.0), ("zeta", 0.5 + 1j)])
def test_non_square_integrable_rejected(kind, k):
    with pytest.raises(ValueError):
        eigenfunction_line(EigenBranch(kind, 1, k))


# -- point spectrum -----------------------------------------------------------------

def test_member_examples():
    f = point_spectrum_member(-1, PLUS)
    assert np.allclose(f.traces.as_array(), [1, 1, 1j, -1j])
    assert eigen_residual(f, -1) < 1e-8
    lam = 5 + 7j
    g = point_spectrum_member(lam, PLUS)
    k = cmath.sqrt(-lam)
    assert k.real > 0 and np.isclose(g.traces.val_minus, 1) and np.isclose(g.traces.der_minus, k)
    assert interface_residual(g, PLUS) < 1e-14
    assert eigen_residual(g, lam) < 1e-8
    assert point_spectrum_member(-1, LineModel(0.0)) is None
    assert point_spectrum_member(3.0, PLUS) is None


def test_member_random_draws(rng):
    for lam in random_lambdas(rng, 10):
        for model in (PLUS, MINUS):
            f = point_spectrum_member(lam, model)
            assert interface_residual(f, model) < 1e-14
            assert eigen_residual(f, lam) < 1e-8


@given(st.floats(-math.pi, math.pi), st.floats(0.01, 10), st.floats(-math.pi, math.pi))
def test_matching_determinant(phi, r, a):
    model = LineModel(phi)
    k = r * cmath.exp(1j * a * 0.49)  # Re k > 0
    d = matching_determinant(model, k)
    assert abs(d - k * cmath.exp(-1j * phi) * (cmath.exp(2j * phi) + 1)) < 1e-13 * abs(k)
    if model.exceptional == 0:
        assert point_spectrum_member(-k * k, model) is None
        if abs(abs(phi) - math.pi / 2) > 1e-6:
            assert abs(d) > 0


# -- metric -----------------------------------------------------------------------------

def test_metric_spectrum_examples():
    assert metric_spectrum(LineModel(0.0)) == (1, 1)
    assert metric_spectrum(PLUS) == (2, 0)
    s = metric_spectrum(LineModel(math.pi / 6))
    assert np.allclose(s, (1.5, 0.5))
    assert not metric_invertible(PLUS) and not metric_invertible(MINUS)
    assert metric_invertible(LineModel(math.pi / 2 - 1e-6))


def _gauss(grid_n=256, X=6.0):
    return from_closure((lambda x: np.exp(-(x + 1) ** 2), lambda x: 1j * np.exp(-(x - 0.5) ** 2)),
                        (lambda x: -2 * (x + 1) * np.exp(-(x + 1) ** 2),
                         lambda x: -2j * (x - 0.5) * np.exp(-(x - 0.5) ** 2)), -X, X, grid_n)


def test_metric_identity_at_zero():
    f = _gauss()
    assert (metric_apply(LineModel(0.0), f) - f).norm() == 0


def test_metric_on_even_function():
    f = from_closure(lambda x: np.exp(-x * x), lambda x: -2 * x * np.exp(-x * x), -5, 5, 128)
    tf = metric_apply(PLUS, f)
    assert np.allclose(tf.left, f.left * (1 + 1j)) and np.allclose(tf.right, f.right * (1 - 1j))


@pytest.mark.parametrize("phi", [0.3, math.pi / 2, -1.0])
def test_metric_eigenvectors(phi):
    s = math.sin(phi)
    g = lambda x: np.exp(-(x - 1) ** 2)
    # f(-x) = i f(x) for x > 0 gives 1 + sin(phi); f(-x) = -i f(x) gives 1 - sin(phi)
    for c, ev in ((1j, 1 + s), (-1j, 1 - s)):
        f = from_closure((lambda x: c * g(-x), g), (lambda x: 0 * x, lambda x: 0 * x), -6, 6, 128)
        tf = metric_apply(LineModel(phi), f)
        assert np.allclose(tf.left, ev * f.left) and np.allclose(tf.right, ev * f.right)


@given(st.floats(-math.pi, math.pi))
def test_metric_bounded_and_selfadjoint(phi):
    m = LineModel(phi)
    f = _gauss()
    g = bc_compatible_gaussian(LineModel(0.4), grid_n=256)
    g = from_closure((lambda x: np.cos(x) * np.exp(-x * x / 4), lambda x: np.exp(-(x - 2) ** 2)),
                     (lambda x: 0 * x, lambda x: 0 * x), -6, 6, 256)
    assert metric_apply(m, f).norm() <= (1 + abs(math.sin(phi))) * f.norm() * (1 + 1e-12)
    lhs = inner_product(metric_apply(m, f), g)
    rhs = inner_product(f, metric_apply(m, g))
    assert abs(lhs - rhs) < 1e-12


def test_pt_map_involution():
    f = _gauss()
    twice = pt_map(pt_map(f))
    assert np.array_equal(twice.left, f.left) and np.array_equal(twice.right, f.right)
    assert np.array_equal(twice.traces.as_array(), f.traces.as_array())


def test_metric_requires_symmetric_grid():
    f = from_closure(lambda x: np.exp(-x * x), lambda x: -2 * x * np.exp(-x * x), -5, 4, 128)
    with pytest.raises(ValueError):
        metric_apply(PLUS, f)


# -- intertwining -----------------------------------------------------------------------

@pytest.mark.parametrize("phi", [0.0, math.pi / 6, math.pi / 4, math.pi / 2, -1.2])
def test_intertwining_gaussian(phi):
    m = LineModel(phi)
    f = bc_compatible_gaussian(m, 1 + 0.3j, -0.7 + 0.2j, 0.8)
    r = intertwining_residual(m, f)
    assert r.commutator < 1e-8 and r.adjoint_bc < 1e-12
    if phi == 0:
        assert r.total == 0


def test_intertwining_eigenfunction():
    f, _ = eigenfunction_line(EigenBranch("psi", 1, 1.2 + 0.4j), grid_n=4096, fd_order=4)
    assert intertwining_residual(PLUS, f).total < 1e-8


def test_intertwining_requires_domain():
    f = bc_compatible_gaussian(LineModel(0.3))
    with pytest.raises(ValueError):
        intertwining_residual(LineModel(1.0), f)


# -- Weyl sequences ---------------------------------------------------------------

@pytest.mark.parametrize("n", [2, 3, 5])
def test_weyl_sequence_properties(n):
    f = weyl_sequence(1.0, n)
    assert abs(f.norm() - 1) < 1e-12
    assert np.all(f.traces.as_array() == 0)
    x = f.x_right
    assert np.all(np.abs(f.right[(x <= n * (n - 1)) | (x >= n * (n + 1))]) == 0)
    assert np.all(f.left == 0)
    chi = from_closure(lambda x: np.where(np.abs(x) < 1.5, 1.0, 0.0), lambda x: 0 * x, f.a, f.b, f.grid_n)
    if n >= 3:
        assert inner_product(chi, f) == 0


def test_weyl_sequence_rejects_small_n():
    with pytest.raises(ValueError):
        weyl_sequence(1.0, 1)


def test_weyl_decay_rate():
    r = {n: weyl_residual(1.0, n).residual for n in (8, 16, 32, 64)}
    for n in (8, 16, 32):
        assert 0.45 <= r[2 * n] / r[n] <= 0.55


def test_weyl_k_zero_second_order():
    r8, r16 = weyl_residual(0.0, 8), weyl_residual(0.0, 16)
    assert abs(r16.residual / r8.residual - 0.25) < 1e-12
    assert abs(r8.residual - r8.bound) < 1e-15


@given(st.floats(-5, 5), st.integers(2, 64))
def test_weyl_bound(k, n):
    r = weyl_residual(k, n)
    assert r.residual <= r.bound * (1 + 1e-12)


def test_weyl_residual_matches_grid():
    k, n = 1.0, 4
    f = weyl_sequence(k, n, points_per_unit=400)
    r = (apply_second_derivative(f) - f * k ** 2).norm()
    assert abs(r - weyl_residual(k, n).residual) < 1e-6
