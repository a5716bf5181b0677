import math

import numpy as np
import pytest

from picturelab.fock import Decomposition, Ket, ModeShape


def random_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_decomposition(rng, shape: ModeShape, n_terms: int) -> Decomposition:
    dim = shape.total_dim
    w = rng.random(n_terms) + 0.1
    w /= w.sum()
    kets = []
    for _ in range(n_terms):
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        kets.append(Ket(shape, v / np.linalg.norm(v)))
    return Decomposition(w, kets)


def remix_decomposition(rng, d: Decomposition) -> Decomposition:
    """Equivalent picture of the same operator via a unitary on the weighting."""
    n = len(d.weights)
    u = random_unitary(rng, n)
    vs = [math.sqrt(w) * k.amps for w, k in zip(d.weights, d.kets)]
    new_w, new_kets = [], []
    for j in range(n):
        uj = sum(u[j, i] * vs[i] for i in range(n))
        q = float(np.vdot(uj, uj).real)
        new_w.append(q)
        new_kets.append(Ket(d.shape, uj / math.sqrt(q)))
    total = sum(new_w)
    new_w = [w / total for w in new_w]
    return Decomposition(new_w, new_kets)


def wigner_tmsv_correlator(eta: float, phi: float, a: complex, b: complex) -> float:
    """Closed-form displaced-parity correlator of the two-mode squeezed state.

    Independent oracle: evaluates the Gaussian Wigner function of the state at
    the displaced phase-space points instead of using truncated matrices.
    """
    r = math.atanh(eta)
    cross = a * b * np.exp(-1j * phi)
    return float(np.exp(-2 * math.cosh(2 * r) * (abs(a) ** 2 + abs(b) ** 2)
                        + 2 * math.sinh(2 * r) * 2 * cross.real))


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)
