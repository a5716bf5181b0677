"""Multimode truncated Fock-space states and the linear algebra on them.

Basis layout is row-major over the declared mode order: for dims (d0, d1, ...)
the flat index of occupations (n0, n1, ...) is n0*d1*d2*... + n1*d2*... + ...
Every other module relies on this single canonical layout.

Kets are deliberately *not* renormalized after truncation; the missing tail
weight is tracked as ``norm_deficit`` and checked against ``tail_tol`` so
truncation bugs surface instead of being hidden by a silent rescale.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import DimensionError, ShapeError, ValidationError

# Eigenvalue checks on construction are skipped above this dimension; they
# would dominate runtime for the larger multi-copy states. validate_psd()
# remains available for explicit checks at any size.
PSD_AUTO_CHECK_MAX_DIM = 600


@dataclass(frozen=True)
class ModeShape:
    """Ordered per-mode truncation sizes; mode k holds Fock levels 0..dims[k]-1."""

    dims: tuple[int, ...]

    def __init__(self, dims: Iterable[int]):
        dims = tuple(int(d) for d in dims)
        if not dims or any(d < 1 for d in dims):
            raise DimensionError(f"every mode dimension must be >= 1, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def n_modes(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def flat_index(self, occupations: Sequence[int]) -> int:
        if len(occupations) != self.n_modes:
            raise DimensionError(
                f"expected {self.n_modes} occupations, got {len(occupations)}"
            )
        idx = 0
        for n, d in zip(occupations, self.dims):
            if not 0 <= n < d:
                raise DimensionError(f"occupation {n} out of range for mode dim {d}")
            idx = idx * d + n
        return idx


class Ket:
    """Complex amplitude vector over the truncated multimode Fock basis.

    Squared norm must lie in (0, 1]; the gap to 1 is the truncation tail.
    """

    __slots__ = ("shape", "amps")

    def __init__(self, shape: ModeShape, amps: np.ndarray):
        amps = np.ascontiguousarray(amps, dtype=np.complex128)
        if amps.shape != (shape.total_dim,):
            raise ShapeError(
                f"amplitude length {amps.shape} does not match total dim {shape.total_dim}"
            )
        nrm2 = float(np.vdot(amps, amps).real)
        if nrm2 <= 0.0 or nrm2 > 1.0 + 1e-12:
            raise ValidationError(f"squared norm {nrm2} outside (0, 1]")
        amps.setflags(write=False)
        self.shape = shape
        self.amps = amps

    @property
    def norm_deficit(self) -> float:
        return max(0.0, 1.0 - float(np.vdot(self.amps, self.amps).real))

    def require_tail(self, tol: Tolerances = DEFAULT_TOL) -> "Ket":
        if self.norm_deficit >= tol.tail_tol:
            raise ValidationError(
                f"norm deficit {self.norm_deficit:.3e} exceeds tail_tol {tol.tail_tol:.1e}"
            )
        return self


class DensityOp:
    """Hermitian, PSD, unit-trace operator over the truncated multimode basis."""

    __slots__ = ("shape", "mat")

    def __init__(self, shape: ModeShape, mat: np.ndarray, tol: Tolerances = DEFAULT_TOL):
        mat = np.ascontiguousarray(mat, dtype=np.complex128)
        d = shape.total_dim
        if mat.shape != (d, d):
            raise ShapeError(f"matrix shape {mat.shape} does not match total dim {d}")
        herm_dev = float(np.abs(mat - mat.conj().T).max())
        if herm_dev > tol.tol_herm:
            raise ValidationError(f"hermiticity deviation {herm_dev:.3e} > {tol.tol_herm:.1e}")
        tr = float(np.trace(mat).real)
        if not (1.0 - tol.tail_tol <= tr <= 1.0 + 1e-12):
            raise ValidationError(
                f"trace {tr!r} outside [1 - {tol.tail_tol:.1e}, 1 + 1e-12]"
            )
        mat.setflags(write=False)
        self.shape = shape
        self.mat = mat
        if d <= PSD_AUTO_CHECK_MAX_DIM:
            self.validate_psd(tol)

    def validate_psd(self, tol: Tolerances = DEFAULT_TOL) -> "DensityOp":
        evals = np.linalg.eigvalsh(0.5 * (self.mat + self.mat.conj().T))
        if evals.min() < tol.tol_psd:
            raise ValidationError(f"eigenvalue {evals.min():.3e} below {tol.tol_psd:.1e}")
        return self


@dataclass(frozen=True)
class Decomposition:
    """One 'picture' of a density operator: weighted pure states."""

    weights: tuple[float, ...]
    kets: tuple[Ket, ...]

    def __init__(self, weights: Iterable[float], kets: Iterable[Ket]):
        weights = tuple(float(w) for w in weights)
        kets = tuple(kets)
        if len(weights) != len(kets):
            raise ValidationError("weights and kets must have matching lengths")
        if any(w < 0 for w in weights):
            raise ValidationError("weights must be nonnegative")
        if abs(sum(weights) - 1.0) > 1e-12:
            raise ValidationError(f"weights sum to {sum(weights)!r}, expected 1")
        shapes = {k.shape for k in kets}
        if len(shapes) > 1:
            raise ShapeError("all kets in a decomposition must share one shape")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "kets", kets)

    @property
    def shape(self) -> ModeShape:
        return self.kets[0].shape


def number_ket(shape: ModeShape, occupations: Sequence[int]) -> Ket:
    """Basis vector |n0 n1 ...> with amplitude 1 at the given multi-index."""
    amps = np.zeros(shape.total_dim, dtype=np.complex128)
    amps[shape.flat_index(occupations)] = 1.0
    return Ket(shape, amps)


def assemble_density(d: Decomposition, tol: Tolerances = DEFAULT_TOL) -> DensityOp:
    """Sum w_i |psi_i><psi_i| over the decomposition."""
    mat = np.zeros((d.shape.total_dim,) * 2, dtype=np.complex128)
    for w, k in zip(d.weights, d.kets):
        if w:
            mat += w * np.outer(k.amps, k.amps.conj())
    mat = 0.5 * (mat + mat.conj().T)  # kill roundoff asymmetry
    return DensityOp(d.shape, mat, tol)


def _as_tensor(mat: np.ndarray, dims: tuple[int, ...]) -> np.ndarray:
    return mat.reshape(dims + dims)


def partial_trace(rho: DensityOp, keep: Sequence[int], tol: Tolerances = DEFAULT_TOL) -> DensityOp:
    """Trace out every mode not listed in ``keep`` (order of ``keep`` is preserved)."""
    keep = list(keep)
    n = rho.shape.n_modes
    if not keep or any(k < 0 or k >= n for k in keep) or len(set(keep)) != len(keep):
        raise ValidationError(f"keep must be a nonempty subset of modes 0..{n - 1}")
    dims = rho.shape.dims
    t = _as_tensor(rho.mat, dims)
    traced = [k for k in range(n) if k not in keep]
    # contract each traced mode's row index with its column index
    for k in sorted(traced, reverse=True):
        t = np.trace(t, axis1=k, axis2=k + t.ndim // 2)
    # axes now follow the original relative order of kept modes; permute to `keep`
    kept_sorted = sorted(keep)
    perm = [kept_sorted.index(k) for k in keep]
    half = t.ndim // 2
    t = t.transpose(perm + [p + half for p in perm])
    new_shape = ModeShape([dims[k] for k in keep])
    d = new_shape.total_dim
    return DensityOp(new_shape, t.reshape(d, d), tol)


def partial_transpose_matrix(mat: np.ndarray, shape: ModeShape, party: Sequence[int]) -> np.ndarray:
    """Transpose the indices of ``party`` modes; works on any square matrix."""
    party = set(party)
    n = shape.n_modes
    if not party or party == set(range(n)) or any(k < 0 or k >= n for k in party):
        raise ValidationError("party must be a proper nonempty subset of modes")
    t = _as_tensor(np.asarray(mat, dtype=np.complex128), shape.dims)
    perm = list(range(2 * n))
    for k in party:
        perm[k], perm[k + n] = perm[k + n], perm[k]
    d = shape.total_dim
    return t.transpose(perm).reshape(d, d)


def partial_transpose(rho: DensityOp, party: Sequence[int]) -> np.ndarray:
    """Partial transpose of a density operator; Hermitian but possibly non-PSD."""
    return partial_transpose_matrix(rho.mat, rho.shape, party)


def trace_distance(a: DensityOp, b: DensityOp) -> float:
    """(1/2) * sum |eigenvalues of a - b|."""
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch: {a.shape.dims} vs {b.shape.dims}")
    diff = a.mat - b.mat
    evals = np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))
    return 0.5 * float(np.abs(evals).sum())


def expectation(rho: DensityOp, obs: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> float:
    """Tr(rho * obs) for a Hermitian observable."""
    obs = np.asarray(obs, dtype=np.complex128)
    d = rho.shape.total_dim
    if obs.shape != (d, d):
        raise ShapeError(f"observable shape {obs.shape} does not match dim {d}")
    if np.abs(obs - obs.conj().T).max() > tol.tol_herm:
        raise ValidationError("observable is not Hermitian within tol_herm")
    val = complex(np.trace(rho.mat @ obs))
    if abs(val.imag) > 1e-10:
        raise ValidationError(f"expectation has imaginary residue {val.imag:.3e}")
    return val.real


# ---------------------------------------------------------------------------
# JSON serialization: {"dims": [...], "re": [...], "im": [...]} flat row-major.

def ket_to_dict(k: Ket) -> dict:
    return {
        "dims": list(k.shape.dims),
        "re": k.amps.real.tolist(),
        "im": k.amps.imag.tolist(),
    }


def ket_from_dict(d: dict) -> Ket:
    amps = np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)
    return Ket(ModeShape(d["dims"]), amps)


def density_to_dict(rho: DensityOp) -> dict:
    flat = rho.mat.reshape(-1)
    return {
        "dims": list(rho.shape.dims),
        "re": flat.real.tolist(),
        "im": flat.imag.tolist(),
    }


def density_from_dict(d: dict, tol: Tolerances = DEFAULT_TOL) -> DensityOp:
    shape = ModeShape(d["dims"])
    n = shape.total_dim
    mat = (np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)).reshape(n, n)
    return DensityOp(shape, mat, tol)


def ket_to_json(k: Ket) -> str:
    return json.dumps(ket_to_dict(k))


def ket_from_json(s: str) -> Ket:
    return ket_from_dict(json.loads(s))


def density_to_json(rho: DensityOp) -> str:
    return json.dumps(density_to_dict(rho))


def density_from_json(s: str, tol: Tolerances = DEFAULT_TOL) -> DensityOp:
    return density_from_dict(json.loads(s), tol)
