"""Constructors for the states under study.

Covers coherent kets and their phase-randomized mixture, the two-mode
squeezed vacuum and its dephased form, coherent-beam splitting into m
same-phase copies, and the multi-copy shared-phase mixture on 2m modes.

Phase averaging comes in two interchangeable flavors: an analytic projection
onto conserved total-photon (or total-pair-number) sectors, and a K-point
uniform phase quadrature kept as an independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .config import DEFAULT_TOL, Tolerances
from .errors import ConfigurationError, ResourceError, ValidationError
from .fock import DensityOp, Ket, ModeShape

ANALYTIC = "analytic"
QUADRATURE = "quadrature"

# Cap on the total dimension of dense multi-copy states. 2**14 keeps the
# dense matrix below ~4 GiB; anything larger is not representable here anyway.
DEFAULT_DIM_CAP = 2**14


@dataclass(frozen=True)
class PhaseAverage:
    """How to realize the uniform phase integral.

    ``analytic`` projects onto phase-insensitive sectors exactly;
    ``quadrature`` averages over ``points`` uniform phases and is exact as
    long as ``points`` exceeds the highest phase harmonic present.
    """

    method: str = ANALYTIC
    points: int = 64

    def __post_init__(self):
        if self.method not in (ANALYTIC, QUADRATURE):
            raise ConfigurationError(f"unknown phase-average method {self.method!r}")
        if self.method == QUADRATURE and self.points < 2:
            raise ConfigurationError("quadrature needs at least 2 phase points")


@dataclass(frozen=True)
class SqueezeParams:
    """Squeeze parameter eta in [0,1), pump phase phi, pair-number cutoff."""

    eta: float
    phi: float = 0.0
    n_max: int = 16

    def __post_init__(self):
        if not 0.0 <= self.eta < 1.0:
            raise ValidationError(f"eta must be in [0, 1), got {self.eta}")
        if self.n_max < 0:
            raise ValidationError("n_max must be >= 0")
        object.__setattr__(self, "phi", float(self.phi) % (2 * math.pi))

    @property
    def tail_weight(self) -> float:
        """Weight of pair numbers beyond n_max: eta^(2*(n_max+1))."""
        return self.eta ** (2 * (self.n_max + 1))

    def require_tail(self, tol: Tolerances = DEFAULT_TOL) -> "SqueezeParams":
        if self.tail_weight >= tol.tail_tol:
            raise ValidationError(
                f"squeeze tail {self.tail_weight:.3e} exceeds tail_tol {tol.tail_tol:.1e}"
            )
        return self


def coherent_ket(alpha: float, phi: float = 0.0, n_max: int = 20,
                 tol: Tolerances = DEFAULT_TOL) -> Ket:
    """|alpha e^{i phi}> truncated at n_max; amplitudes are Poisson square roots."""
    if alpha < 0:
        raise ValidationError("alpha must be >= 0; the phase carries the sign")
    if n_max < 0:
        raise ValidationError("n_max must be >= 0")
    phi = float(phi) % (2 * math.pi)
    n = np.arange(n_max + 1)
    if alpha == 0.0:
        log_mag = np.where(n == 0, 0.0, -np.inf)
    else:
        log_mag = -0.5 * alpha**2 + n * math.log(alpha) - 0.5 * gammaln(n + 1)
    amps = np.exp(log_mag) * np.exp(1j * n * phi)
    return Ket(ModeShape([n_max + 1]), amps).require_tail(tol)


def _poisson_diagonal(alpha: float, n_max: int) -> np.ndarray:
    n = np.arange(n_max + 1)
    if alpha == 0.0:
        return np.where(n == 0, 1.0, 0.0)
    return np.exp(-(alpha**2) + 2 * n * math.log(alpha) - gammaln(n + 1))


def phase_randomized_coherent(alpha: float, n_max: int = 20,
                              method: PhaseAverage = PhaseAverage(),
                              tol: Tolerances = DEFAULT_TOL) -> DensityOp:
    """Uniform phase average of |alpha e^{i phi}>: diagonal Poisson mixture."""
    shape = ModeShape([n_max + 1])
    if method.method == ANALYTIC:
        mat = np.diag(_poisson_diagonal(alpha, n_max)).astype(np.complex128)
        return DensityOp(shape, mat, tol)
    if method.points <= n_max:
        raise ConfigurationError(
            f"quadrature needs K > n_max ({method.points} <= {n_max}): "
            "aliasing would leave spurious coherences"
        )
    mat = np.zeros((n_max + 1, n_max + 1), dtype=np.complex128)
    for k in range(method.points):
        a = coherent_ket(alpha, 2 * math.pi * k / method.points, n_max, tol).amps
        mat += np.outer(a, a.conj())
    mat /= method.points
    return DensityOp(shape, 0.5 * (mat + mat.conj().T), tol)


def tmsv_ket(p: SqueezeParams, tol: Tolerances = DEFAULT_TOL) -> Ket:
    """Two-mode squeezed vacuum: sqrt(1-eta^2) eta^n e^{i n phi} on |n n>."""
    p.require_tail(tol)
    d = p.n_max + 1
    n = np.arange(d)
    c = math.sqrt(1.0 - p.eta**2) * p.eta**n * np.exp(1j * n * p.phi)
    amps = np.zeros((d, d), dtype=np.complex128)
    amps[n, n] = c
    return Ket(ModeShape([d, d]), amps.reshape(-1)).require_tail(tol)


def rho_s(eta: float, n_max: int = 16, tol: Tolerances = DEFAULT_TOL) -> DensityOp:
    """Dephased two-mode squeezed vacuum: (1-eta^2) eta^(2n) on |n n><n n|."""
    SqueezeParams(eta, 0.0, n_max).require_tail(tol)
    d = n_max + 1
    n = np.arange(d)
    w = (1.0 - eta**2) * eta ** (2 * n)
    mat = np.zeros((d * d, d * d), dtype=np.complex128)
    diag_idx = n * d + n
    mat[diag_idx, diag_idx] = w
    return DensityOp(ModeShape([d, d]), mat, tol)


def split_coherent(alpha: float, phi: float = 0.0, m: int = 1, n_max: int = 20,
                   tol: Tolerances = DEFAULT_TOL) -> Ket:
    """m-mode product of same-phase coherent kets |alpha/sqrt(m) e^{i phi}>."""
    if m < 1:
        raise ValidationError("m must be >= 1")
    single = coherent_ket(alpha / math.sqrt(m), phi, n_max, tol)
    amps = single.amps
    for _ in range(m - 1):
        amps = np.kron(amps, single.amps)
    return Ket(ModeShape([n_max + 1] * m), amps).require_tail(tol)


def _pair_number_per_index(m: int, d: int) -> np.ndarray:
    """Total pair number for each flat index of the 2m-mode product basis.

    Modes are ordered (a1, b1, a2, b2, ...); the pair number of a copy is its
    a-mode occupation (kets of interest only populate n_a == n_b anyway).
    """
    occ = np.indices([d] * (2 * m)).reshape(2 * m, -1)
    return occ[0::2].sum(axis=0)


def rho_t(eta: float, m: int = 2, n_max_per_pair: int = 8,
          method: PhaseAverage = PhaseAverage(), tol: Tolerances = DEFAULT_TOL,
          dim_cap: int = DEFAULT_DIM_CAP) -> DensityOp:
    """Shared-phase mixture of m two-mode squeezed copies on 2m modes.

    Each copy carries squeeze parameter eta/sqrt(m); the common random phase
    is averaged out, leaving coherences only inside equal total-pair-number
    sectors. Mode order is (a1, b1, a2, b2, ...).
    """
    if m < 1:
        raise ValidationError("m must be >= 1")
    d = n_max_per_pair + 1
    total_dim = d ** (2 * m)
    if total_dim > dim_cap:
        raise ResourceError(
            f"total dimension {total_dim} exceeds cap {dim_cap}; lower n_max_per_pair or m"
        )
    eta_copy = eta / math.sqrt(m)
    shape = ModeShape([d] * (2 * m))

    if method.method == ANALYTIC:
        single = tmsv_ket(SqueezeParams(eta_copy, 0.0, n_max_per_pair), tol)
        amps = single.amps
        for _ in range(m - 1):
            amps = np.kron(amps, single.amps)
        mat = np.outer(amps, amps.conj())
        pair_n = _pair_number_per_index(m, d)
        mat[pair_n[:, None] != pair_n[None, :]] = 0.0
        return DensityOp(shape, mat, tol)

    if method.points <= m * n_max_per_pair:
        raise ConfigurationError(
            f"quadrature needs K > m*n_max_per_pair "
            f"({method.points} <= {m * n_max_per_pair})"
        )
    mat = np.zeros((total_dim, total_dim), dtype=np.complex128)
    for k in range(method.points):
        phi = 2 * math.pi * k / method.points
        single = tmsv_ket(SqueezeParams(eta_copy, phi, n_max_per_pair), tol)
        amps = single.amps
        for _ in range(m - 1):
            amps = np.kron(amps, single.amps)
        mat += np.outer(amps, amps.conj())
    mat /= method.points
    return DensityOp(shape, 0.5 * (mat + mat.conj().T), tol)


def coherent_phase_decomposition(alpha: float, n_max: int, k_points: int,
                                 tol: Tolerances = DEFAULT_TOL):
    """Equal-weight mixture of K coherent kets at uniform phases.

    Assembles to the same operator as the Fock-diagonal picture whenever
    k_points > n_max.
    """
    from .fock import Decomposition

    kets = [coherent_ket(alpha, 2 * math.pi * k / k_points, n_max, tol)
            for k in range(k_points)]
    return Decomposition([1.0 / k_points] * k_points, kets)


def number_diagonal_decomposition(alpha: float, n_max: int,
                                  tol: Tolerances = DEFAULT_TOL):
    """Fock-diagonal picture of the phase-randomized coherent state.

    Basis kets are scaled by the square root of the retained trace so the
    sub-unit truncated operator is reassembled exactly.
    """
    from .fock import Decomposition

    shape = ModeShape([n_max + 1])
    diag = _poisson_diagonal(alpha, n_max)
    total = diag.sum()
    weights, kets = [], []
    for n, p in enumerate(diag):
        if p <= 0.0:
            continue
        amps = np.zeros(n_max + 1, dtype=np.complex128)
        amps[n] = math.sqrt(total)
        weights.append(p / total)
        kets.append(Ket(shape, amps))
    return Decomposition(weights, kets)


# JSON config record used by the CLI: {"state": name, "params": {...}}.
_STATE_FIELDS = {
    "coherent": {"alpha", "phi", "n_max"},
    "rho_l": {"alpha", "n_max", "method", "K"},
    "tmsv": {"eta", "phi", "n_max"},
    "rho_s": {"eta", "n_max"},
    "split_coherent": {"alpha", "phi", "m", "n_max"},
    "rho_t": {"eta", "m", "n_max", "method", "K"},
}


def _phase_average_from(params: dict) -> PhaseAverage:
    method = params.get("method", ANALYTIC)
    if method == QUADRATURE:
        return PhaseAverage(QUADRATURE, int(params.get("K", 64)))
    return PhaseAverage(method)


def from_config(record: dict, tol: Tolerances = DEFAULT_TOL):
    """Build a state from {"state": name, "params": {...}}; unknown fields rejected."""
    if set(record) != {"state", "params"}:
        raise ConfigurationError(f"config record must have exactly 'state' and 'params', got {sorted(record)}")
    name, params = record["state"], dict(record["params"])
    if name not in _STATE_FIELDS:
        raise ConfigurationError(f"unknown state {name!r}; choose from {sorted(_STATE_FIELDS)}")
    unknown = set(params) - _STATE_FIELDS[name]
    if unknown:
        raise ConfigurationError(f"unknown parameters for {name}: {sorted(unknown)}")
    if name == "coherent":
        return coherent_ket(params.get("alpha", 1.0), params.get("phi", 0.0),
                            int(params.get("n_max", 20)), tol)
    if name == "rho_l":
        return phase_randomized_coherent(params.get("alpha", 1.0), int(params.get("n_max", 20)),
                                         _phase_average_from(params), tol)
    if name == "tmsv":
        p = SqueezeParams(params.get("eta", 0.5), params.get("phi", 0.0),
                          int(params.get("n_max", 16)))
        return tmsv_ket(p, tol)
    if name == "rho_s":
        return rho_s(params.get("eta", 0.5), int(params.get("n_max", 16)), tol)
    if name == "split_coherent":
        return split_coherent(params.get("alpha", 1.0), params.get("phi", 0.0),
                              int(params.get("m", 1)), int(params.get("n_max", 20)), tol)
    return rho_t(params.get("eta", 0.6), int(params.get("m", 2)),
                 int(params.get("n_max", 8)), _phase_average_from(params), tol)
