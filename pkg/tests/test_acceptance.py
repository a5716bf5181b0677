"""End-to-end acceptance checks.

Each test covers one numbered shipping criterion and prints a single
machine-greppable CRITERION line on success; a pytest failure is the
corresponding fail line.
"""

import dataclasses
import math

import numpy as np

from picturelab.bell import ChshSettings, GridSpec, correlator, optimize_chsh
from picturelab.cli import EXIT_OK, main as cli_main
from picturelab.config import DEFAULT_TOL
from picturelab.entanglement import (
    SEPARABLE,
    Bipartition,
    alice_bob_cut,
    classify,
    decomposition_equivalent,
    negativity,
    separable_certificate_diagonal,
    statistics_invariance_check,
)
from picturelab.fock import Decomposition, ModeShape, assemble_density
from picturelab.protocol import (
    ExperimentConfig,
    PhaseModel,
    phase_window,
    select_protocol_defaults,
    success_curve,
)
from picturelab.qubit_demo import (
    BELL_ORDER,
    bell_ket,
    bell_mixture_decomposition,
    build_psi,
    fidelity_with,
    lost_register_state,
    measure_register,
    product_mixture_decomposition,
)
from picturelab.states import (
    PhaseAverage,
    SqueezeParams,
    coherent_phase_decomposition,
    number_diagonal_decomposition,
    phase_randomized_coherent,
    rho_s,
    rho_t,
    tmsv_ket,
)

from conftest import random_decomposition, remix_decomposition, wigner_tmsv_correlator

CUT2 = Bipartition([0], [1])

# Pinned by a standalone dense partial-transpose eigensolve before this
# package existed; the build must reproduce them, not the other way round.
PINNED_COPY_NEGATIVITY = {
    0.3: 0.04712041883530396,
    0.6: 0.21950882301396693,
    0.9: 0.6756885135346322,
}

_DEFAULTS_CACHE = []


def _protocol_defaults():
    if not _DEFAULTS_CACHE:
        _DEFAULTS_CACHE.append(select_protocol_defaults())
    return _DEFAULTS_CACHE[0]


def test_criterion_01_phase_randomized_coherent_diagonal():
    rho = phase_randomized_coherent(1.0, 20, PhaseAverage("quadrature", 64))
    want = np.exp(-1.0) / np.array([math.factorial(n) for n in range(21)])
    diag_err = np.abs(np.diag(rho.mat).real - want).max()
    off = np.abs(rho.mat - np.diag(np.diag(rho.mat))).max()
    assert diag_err < 1e-14
    assert off < 1e-12
    print(f"CRITERION 1: PASS - diagonal err {diag_err:.2e}, off-diagonal {off:.2e}")


def test_criterion_02_dephased_pair_weights():
    rho = rho_s(0.5, 12, DEFAULT_TOL.with_tail(1e-6))
    d = 13
    diag = np.diag(rho.mat).real.reshape(d, d)
    want = 0.75 * 0.25 ** np.arange(d)
    err = np.abs(np.diag(diag) - want).max()
    off_pair = diag - np.diag(np.diag(diag))
    deficit = abs(1.0 - rho.mat.trace().real)
    assert err < 1e-14
    assert np.abs(off_pair).max() == 0.0
    assert deficit < 1e-7
    print(f"CRITERION 2: PASS - weight err {err:.2e}, trace deficit {deficit:.2e}")


def test_criterion_03_dephased_pair_is_separable():
    rho = rho_s(0.5, 12, DEFAULT_TOL.with_tail(1e-6))
    neg = negativity(rho, CUT2, tol_neg=1e-10)
    verdict = separable_certificate_diagonal(rho, CUT2)
    assert neg == 0.0
    assert verdict.status == SEPARABLE
    back = assemble_density(verdict.certificate, DEFAULT_TOL.with_tail(1e-6))
    reassembly = np.abs(back.mat - rho.mat).max()
    assert reassembly < 1e-12
    print(f"CRITERION 3: PASS - negativity 0, certificate reassembles at {reassembly:.2e}")


def test_criterion_04_shared_phase_copies_entangled():
    cut = alice_bob_cut(2)
    for eta, pinned in PINNED_COPY_NEGATIVITY.items():
        rho = rho_t(eta, 2, 8, tol=DEFAULT_TOL.with_tail(0.5))
        neg = negativity(rho, cut, tol_neg=1e-9)
        assert neg > 0.0
        assert abs(neg - pinned) < 1e-8, (eta, neg, pinned)
    print("CRITERION 4: PASS - negativities match pinned oracle values within 1e-8")


def test_criterion_05_qubit_example_pictures():
    assert decomposition_equivalent(
        bell_mixture_decomposition(), product_mixture_decomposition(), 1e-12)
    psi = build_psi()
    for outcome, name in enumerate(BELL_ORDER):
        _, cond = measure_register(psi, outcome)
        assert abs(fidelity_with(cond, bell_ket(name)) - 1.0) < 1e-14
    reduced = lost_register_state(psi)
    assert negativity(reduced, CUT2) == 0.0
    print("CRITERION 5: PASS - equivalent pictures, unit Bell fidelities, "
          "separable reduced state")


def test_criterion_06_squeezed_state_violates():
    defaults = _protocol_defaults()
    assert defaults.chsh_value > 2.05
    ket = tmsv_ket(SqueezeParams(defaults.eta, 0.0, defaults.n_max))
    rho = assemble_density(Decomposition([1.0], [ket]))
    s = defaults.settings
    worst = 0.0
    for ga, gb in ((s.a0, s.b0), (s.a1, s.b0), (s.a0, s.b1), (s.a1, s.b1)):
        got = correlator(rho, ga, gb)
        want = wigner_tmsv_correlator(defaults.eta, 0.0, complex(ga), complex(gb))
        worst = max(worst, abs(got - want))
    assert worst < 1e-6
    print(f"CRITERION 6: PASS - B {defaults.chsh_value:.6f} > 2.05, "
          f"oracle agreement {worst:.2e}")


def test_criterion_07_dephased_pair_never_violates():
    defaults = _protocol_defaults()
    rho = rho_s(defaults.eta, defaults.n_max)
    res = optimize_chsh(rho, GridSpec())
    assert res.chsh_value <= 2.0 + 1e-9
    print(f"CRITERION 7: PASS - max B {res.chsh_value:.12f} <= 2 + 1e-9")


MS = (400, 1600, 6400, 25600)
N_EXPERIMENTS = 2000
_CURVE_CACHE = {}


def _curve(kind):
    if kind not in _CURVE_CACHE:
        d = _protocol_defaults()
        cfg = ExperimentConfig(eta=d.eta, m=MS[0], settings=d.settings,
                               phase_model=PhaseModel(kind), n_max=d.n_max, seed=42)
        _CURVE_CACHE[kind] = success_curve(cfg, list(MS), N_EXPERIMENTS)
    return _CURVE_CACHE[kind]


def test_criterion_08_protocol_contrast():
    d = _protocol_defaults()
    shared = {m: (p, se) for m, p, _, se in _curve("shared").points}
    iid = {m: (p, se) for m, p, _, se in _curve("iid").points}
    # (a) shared success is flat at large m and clearly nonzero
    p1, se1 = shared[6400]
    p2, se2 = shared[25600]
    combined = math.hypot(se1, se2)
    assert abs(p1 - p2) < 4 * combined
    assert p1 > 3 * se1 and p2 > 3 * se2
    # (b) the plateau is the phase-window measure
    window, _ = phase_window(d.eta, d.settings, 720, d.n_max)
    assert abs(p2 - window) < 3 * max(se2, 1e-12)
    # (c) iid success collapses
    p_first, _ = iid[400]
    p_last, _ = iid[25600]
    assert p_last == 0.0 or p_first / max(p_last, 1e-300) >= 5.0
    print(f"CRITERION 8: PASS - shared plateau {p2:.4f} ~ window {window:.4f}, "
          f"iid {p_first:.4f} -> {p_last:.4f}")


def test_criterion_09_picture_invariance_suite(rng):
    cs = coherent_phase_decomposition(1.0, 20, 64)
    ns = number_diagonal_decomposition(1.0, 20)
    r_cs = assemble_density(cs)
    r_ns = assemble_density(ns)
    stat_err = np.abs(np.diag(r_cs.mat).real - np.diag(r_ns.mat).real).max()
    assert stat_err < 1e-12
    povm = [np.diag((np.arange(4) == i).astype(complex)) for i in range(4)]
    for _ in range(100):
        d1 = random_decomposition(rng, ModeShape([4]), 3)
        d2 = remix_decomposition(rng, d1)
        assert statistics_invariance_check(d1, d2, povm, 1e-10)
    print(f"CRITERION 9: PASS - number statistics agree at {stat_err:.2e}; "
          "100 remixed pairs statistics-invariant at 1e-10")


def test_criterion_10_determinism(tmp_path, capsys):
    d = _protocol_defaults()
    args = ["protocol", "--eta", str(d.eta), "--experiments", str(N_EXPERIMENTS),
            "--phase-model", "shared", "--seed", "42"]
    for m in MS:
        args += ["--m", str(m)]
    f1, f2 = tmp_path / "run1.csv", tmp_path / "run2.csv"
    assert cli_main(args + ["--out", str(f1)]) == EXIT_OK
    assert cli_main(args + ["--out", str(f2)]) == EXIT_OK
    capsys.readouterr()
    assert f1.read_bytes() == f2.read_bytes()
    print("CRITERION 10: PASS - repeated seeded runs are byte-identical")
