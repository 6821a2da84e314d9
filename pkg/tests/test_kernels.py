import numpy as np
import pytest

from defml import kernels
from defml.analysis import recurrence_beta
from defml.exact import poly_eval
from defml.families import phi_monic_by_recurrence


def test_backend_flag_is_reported():
    assert kernels.BACKEND in ("numba", "numpy")


@pytest.mark.parametrize("h", [0.5, 1.0, 2.0])
def test_monic_values_match_exact_polynomials(backend, h):
    x = np.linspace(-3 * h, 3 * h, 13)
    beta = recurrence_beta(10, h)
    vals = backend["monic_values"](x, beta, 10)
    members = phi_monic_by_recurrence(10).members
    for n in range(11):
        want = [poly_eval(members[n], float(t), h) for t in x]
        np.testing.assert_allclose(vals[n], want, rtol=1e-12, atol=1e-12 * h**n)


def test_monic_values_shape(backend):
    x = np.zeros((2, 3))
    out = backend["monic_values"](x, recurrence_beta(4, 1.0), 4)
    assert out.shape == (5, 2, 3)


@pytest.mark.parametrize("n", [1, 2, 5, 17, 40])
@pytest.mark.parametrize("h", [0.5, 2.0])
def test_ql_and_bisection_match_lapack(backend, n, h):
    b = np.sqrt(recurrence_beta(max(n - 1, 1), h))
    dense = np.diag(b[: n - 1], 1) + np.diag(b[: n - 1], -1)
    ref, vecs = np.linalg.eigh(dense)
    x, z2 = backend["tridiag_ql"](b, n)
    scale = max(1.0, float(np.abs(ref).max()))
    np.testing.assert_allclose(x, ref, atol=1e-13 * scale)
    np.testing.assert_allclose(z2, vecs[0] ** 2, atol=1e-13)
    xb = backend["bisect_eigvals"](b, n)
    np.testing.assert_allclose(xb, ref, atol=1e-13 * scale)


def test_backends_agree():
    b = np.sqrt(recurrence_beta(29, 1.0))
    a = kernels.BACKENDS["numpy"]
    c = kernels.BACKENDS["numba"]
    np.testing.assert_allclose(a["tridiag_ql"](b, 30)[0], c["tridiag_ql"](b, 30)[0], rtol=0, atol=1e-12)
    np.testing.assert_allclose(a["bisect_eigvals"](b, 30), c["bisect_eigvals"](b, 30), atol=1e-12)


def test_sturm_count():
    b = np.sqrt(recurrence_beta(4, 1.0))
    ev = np.linalg.eigvalsh(np.diag(b, 1) + np.diag(b, -1))
    probes = np.array([-100.0, ev[0] - 1e-9, ev[0] + 1e-9, 0.5, 100.0])
    want = [int(np.sum(ev < p)) for p in probes]
    assert list(kernels.sturm_count_np(b, probes)) == want
