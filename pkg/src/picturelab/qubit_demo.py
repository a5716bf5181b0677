"""Worked qubit example: a 4-level register entangled with two qubits.

The shared pure state puts one Bell state behind each register outcome.
Reading the register leaves a Bell pair; losing it leaves the maximally
mixed two-qubit state, which admits both a Bell-mixture picture and a
product-basis picture of the same operator.
"""

from __future__ import annotations

import math

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .fock import Decomposition, DensityOp, Ket, ModeShape, partial_trace
from .errors import ValidationError

PSI_SHAPE = ModeShape([4, 2, 2])  # register, qubit A, qubit B
QUBITS_SHAPE = ModeShape([2, 2])

_SQ2 = 1.0 / math.sqrt(2.0)

# Bell amplitudes over |00>, |01>, |10>, |11>, in register-outcome order.
_BELL_AMPS = {
    "phi+": np.array([_SQ2, 0.0, 0.0, _SQ2]),
    "phi-": np.array([_SQ2, 0.0, 0.0, -_SQ2]),
    "psi+": np.array([0.0, _SQ2, _SQ2, 0.0]),
    "psi-": np.array([0.0, _SQ2, -_SQ2, 0.0]),
}
BELL_ORDER = ("phi+", "phi-", "psi+", "psi-")


def bell_ket(name: str) -> Ket:
    if name not in _BELL_AMPS:
        raise ValidationError(f"unknown Bell state {name!r}")
    return Ket(QUBITS_SHAPE, _BELL_AMPS[name].astype(np.complex128))


def build_psi() -> Ket:
    """(1/2) sum_k |k>|bell_k> on the register + two qubits."""
    amps = np.zeros(16, dtype=np.complex128)
    for k, name in enumerate(BELL_ORDER):
        amps[4 * k: 4 * k + 4] = 0.5 * _BELL_AMPS[name]
    return Ket(PSI_SHAPE, amps)


def measure_register(psi: Ket, outcome: int) -> tuple[float, Ket]:
    """Project the register on |outcome|; return (probability, conditional qubits)."""
    if psi.shape != PSI_SHAPE:
        raise ValidationError("expected the register + two-qubit state")
    if outcome not in (0, 1, 2, 3):
        raise ValidationError(f"outcome must be in 0..3, got {outcome}")
    branch = psi.amps.reshape(4, 4)[outcome]
    prob = float(np.vdot(branch, branch).real)
    if prob <= 0.0:
        raise ValidationError(f"outcome {outcome} has zero probability")
    return prob, Ket(QUBITS_SHAPE, branch / math.sqrt(prob))


def lost_register_state(psi: Ket, tol: Tolerances = DEFAULT_TOL) -> DensityOp:
    """Two-qubit state after the register becomes inaccessible: (1/4) I."""
    full = DensityOp(PSI_SHAPE, np.outer(psi.amps, psi.amps.conj()), tol)
    return partial_trace(full, keep=[1, 2], tol=tol)


def bell_mixture_decomposition() -> Decomposition:
    """The four Bell states with weight 1/4 each."""
    return Decomposition([0.25] * 4, [bell_ket(n) for n in BELL_ORDER])


def product_mixture_decomposition() -> Decomposition:
    """The four product basis states |00>, |01>, |10>, |11> with weight 1/4 each."""
    kets = []
    for i in range(4):
        amps = np.zeros(4, dtype=np.complex128)
        amps[i] = 1.0
        kets.append(Ket(QUBITS_SHAPE, amps))
    return Decomposition([0.25] * 4, kets)


def fidelity_with(ket: Ket, reference: Ket) -> float:
    """|<reference|ket>|^2."""
    if ket.shape != reference.shape:
        raise ValidationError("fidelity requires matching shapes")
    return float(abs(np.vdot(reference.amps, ket.amps)) ** 2)
