"""Picture-invariant entanglement diagnostics.

Entanglement is certified through the negativity of the partial transpose;
separability is certified only for operators diagonal in the product basis,
where the diagonal itself is an explicit product-state decomposition. All
other cases are reported as undecided: that is enough for every state this
package constructs, and full separability deciding is NP-hard anyway.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.sparse
from scipy.sparse.csgraph import connected_components

from .config import DEFAULT_TOL, Tolerances
from .errors import ShapeError, ValidationError
from .fock import (
    Decomposition,
    DensityOp,
    Ket,
    assemble_density,
    partial_transpose,
    trace_distance,
)

TOL_NEG = 1e-9  # eigensolver noise floor at the dimensions in play

SEPARABLE = "separable-certified"
ENTANGLED = "entangled-certified"
UNDECIDED = "undecided"


@dataclass(frozen=True)
class Bipartition:
    """Disjoint mode subsets A and B whose union is all modes."""

    party_a: tuple[int, ...]
    party_b: tuple[int, ...]

    def __init__(self, party_a: Sequence[int], party_b: Sequence[int]):
        a, b = tuple(party_a), tuple(party_b)
        if not a or not b or set(a) & set(b):
            raise ValidationError("parties must be disjoint and nonempty")
        n = len(a) + len(b)
        if set(a) | set(b) != set(range(n)):
            raise ValidationError("parties must cover all modes 0..n-1")
        object.__setattr__(self, "party_a", a)
        object.__setattr__(self, "party_b", b)

    @classmethod
    def split(cls, party_a: Sequence[int], n_modes: int) -> "Bipartition":
        a = tuple(party_a)
        return cls(a, tuple(k for k in range(n_modes) if k not in a))


def alice_bob_cut(m: int) -> Bipartition:
    """A = first mode of every copy-pair, B = second, for 2m modes ordered (a1,b1,a2,b2,...)."""
    return Bipartition(tuple(range(0, 2 * m, 2)), tuple(range(1, 2 * m, 2)))


@dataclass(frozen=True)
class SeparabilityVerdict:
    status: str
    negativity: Optional[float] = None
    certificate: Optional[Decomposition] = None

    def to_dict(self) -> dict:
        out = {"status": self.status, "negativity": self.negativity}
        if self.certificate is not None:
            dims = self.certificate.shape.dims
            out["certificate"] = [
                {"weight": w,
                 "occupations": [int(n) for n in
                                 np.unravel_index(int(np.flatnonzero(k.amps)[0]), dims)]}
                for w, k in zip(self.certificate.weights, self.certificate.kets)
            ]
        return out


def _eigvalsh_by_blocks(h: np.ndarray) -> np.ndarray:
    """Hermitian eigenvalues via connected components of the sparsity pattern.

    Exact-zero structure (sector projections, partial transposes of sparse
    states) splits the matrix into small independent blocks; solving them
    separately is dramatically cheaper than one dense solve.
    """
    n = h.shape[0]
    pattern = scipy.sparse.csr_matrix(h != 0)
    n_comp, labels = connected_components(pattern, directed=False)
    if n_comp <= 1:
        return np.linalg.eigvalsh(h)
    evals = np.empty(n, dtype=float)
    order = np.argsort(labels, kind="stable")
    sorted_labels = labels[order]
    starts = np.searchsorted(sorted_labels, np.arange(n_comp))
    ends = np.append(starts[1:], n)
    pos = 0
    for c in range(n_comp):
        idx = order[starts[c]:ends[c]]
        if len(idx) == 1:
            evals[pos] = h[idx[0], idx[0]].real
            pos += 1
        else:
            block = h[np.ix_(idx, idx)]
            evals[pos:pos + len(idx)] = np.linalg.eigvalsh(block)
            pos += len(idx)
    return evals


def negativity(rho: DensityOp, cut: Bipartition, tol_neg: float = TOL_NEG) -> float:
    """Sum of |negative eigenvalues| of the partial transpose across the cut."""
    if len(cut.party_a) + len(cut.party_b) != rho.shape.n_modes:
        raise ShapeError("bipartition does not match the operator's mode count")
    pt = partial_transpose(rho, cut.party_b)
    pt = 0.5 * (pt + pt.conj().T)
    evals = _eigvalsh_by_blocks(pt)
    neg = float(-evals[evals < 0].sum())
    return neg if neg > tol_neg else 0.0


def separable_certificate_diagonal(rho: DensityOp, cut: Bipartition,
                                   diag_tol: float = 1e-12) -> SeparabilityVerdict:
    """Certify separability for operators diagonal in the product basis.

    The diagonal is read off as an explicit mixture of product number states;
    kets are scaled by sqrt(trace) so the sub-unit truncated operator is
    reassembled exactly. Non-diagonal input yields ``undecided``.
    """
    mat = rho.mat
    off = mat - np.diag(np.diag(mat))
    if np.abs(off).max() > diag_tol:
        return SeparabilityVerdict(UNDECIDED, negativity=None)
    diag = np.clip(np.diag(mat).real, 0.0, None)
    total = diag.sum()
    scale = math.sqrt(total)
    weights, kets = [], []
    for i in np.flatnonzero(diag):
        amps = np.zeros(rho.shape.total_dim, dtype=np.complex128)
        amps[i] = scale
        weights.append(diag[i] / total)
        kets.append(Ket(rho.shape, amps))
    cert = Decomposition(weights, kets)
    return SeparabilityVerdict(SEPARABLE, negativity=0.0, certificate=cert)


def classify(rho: DensityOp, cut: Bipartition, tol_neg: float = TOL_NEG) -> SeparabilityVerdict:
    """Negativity witness first, diagonal certificate second, else undecided."""
    neg = negativity(rho, cut, tol_neg)
    if neg > 0.0:
        return SeparabilityVerdict(ENTANGLED, negativity=neg)
    verdict = separable_certificate_diagonal(rho, cut)
    if verdict.status == SEPARABLE:
        return verdict
    return SeparabilityVerdict(UNDECIDED, negativity=neg)


def decomposition_equivalent(d1: Decomposition, d2: Decomposition, tol: float,
                             tolerances: Tolerances = DEFAULT_TOL) -> bool:
    """True iff both decompositions assemble to the same operator within tol."""
    if d1.shape != d2.shape:
        raise ShapeError("decompositions live on different shapes")
    r1 = assemble_density(d1, tolerances)
    r2 = assemble_density(d2, tolerances)
    return trace_distance(r1, r2) < tol


def statistics_invariance_check(d1: Decomposition, d2: Decomposition,
                                povm: Sequence[np.ndarray], tol: float,
                                tolerances: Tolerances = DEFAULT_TOL) -> bool:
    """True iff every POVM outcome probability agrees between the two pictures."""
    if d1.shape != d2.shape:
        raise ShapeError("decompositions live on different shapes")
    dim = d1.shape.total_dim
    total = np.zeros((dim, dim), dtype=np.complex128)
    for e in povm:
        e = np.asarray(e, dtype=np.complex128)
        if e.shape != (dim, dim):
            raise ValidationError("POVM effect has wrong dimension")
        total += e
    if np.abs(total - np.eye(dim)).max() > 1e-10:
        raise ValidationError("POVM effects do not sum to identity within 1e-10")
    r1 = assemble_density(d1, tolerances).mat
    r2 = assemble_density(d2, tolerances).mat
    for e in povm:
        p1 = float(np.trace(r1 @ e).real)
        p2 = float(np.trace(r2 @ e).real)
        if abs(p1 - p2) >= tol:
            return False
    return True
