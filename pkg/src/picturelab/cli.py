"""Command-line front end.

Subcommands: state, negativity, bell-scan, protocol, qubit-demo,
picture-check. Tables go to CSV with a one-line JSON config comment so every
file is self-describing; reports go to JSON with the resolved config inline.
``--plot`` renders a matplotlib figure next to the delimited output.

Exit codes: 0 success, 2 usage/validation, 3 resource, 4 numerical.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from typing import Optional

import numpy as np

from . import bell, entanglement, protocol, qubit_demo, states
from .config import DEFAULT_TOL, Tolerances
from .errors import (
    ConfigurationError,
    PictureLabError,
    ResourceError,
    TruncationError,
    ValidationError,
)
from .fock import (
    Decomposition,
    DensityOp,
    Ket,
    assemble_density,
    trace_distance,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_NUMERICAL = 4

DEFAULT_SEED = 42


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _tolerances() -> Tolerances:
    env = os.environ.get("PICTURELAB_TAIL_TOL")
    if env is None:
        return DEFAULT_TOL
    try:
        return DEFAULT_TOL.with_tail(float(env))
    except ValueError as exc:
        raise ConfigurationError(f"bad PICTURELAB_TAIL_TOL {env!r}") from exc


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_report(payload: dict, out: Optional[str]) -> None:
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", out)


def _csv_text(config: dict, header: list[str], rows: list[list]) -> str:
    lines = ["# config: " + json.dumps(config, sort_keys=True)]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# state

def _state_record_from_args(args) -> dict:
    if args.config:
        with open(args.config) as fh:
            return json.load(fh)
    params: dict = {}
    for field in ("alpha", "phi", "eta", "m", "n_max", "K"):
        v = getattr(args, field.replace("K", "K"))
        if v is not None:
            params[field] = v
    if args.method is not None:
        params["method"] = args.method
    return {"state": args.kind, "params": params}


def cmd_state(args) -> int:
    tol = _tolerances()
    if args.tail_tol is not None:
        tol = tol.with_tail(args.tail_tol)
    record = _state_record_from_args(args)
    obj = states.from_config(record, tol)
    if isinstance(obj, Ket):
        weight = float(1.0 - obj.norm_deficit)
        diag = (np.abs(obj.amps) ** 2).tolist()
        off = 0.0
        kind_label = "ket"
    else:
        weight = float(np.trace(obj.mat).real)
        diag = np.diag(obj.mat).real.tolist()
        offmat = obj.mat - np.diag(np.diag(obj.mat))
        off = float(np.abs(offmat).max())
        kind_label = "density"
    payload = {
        "config": {"record": record, "tail_tol": tol.tail_tol},
        "kind": kind_label,
        "dims": list(obj.shape.dims),
        "trace_or_norm": weight,
        "diagonal": diag,
        "max_offdiagonal": off,
    }
    _json_report(payload, args.out)
    if args.plot:
        from .plots import plot_state_diagonal
        base = args.out or "state"
        plot_state_diagonal(diag, _plot_path(base), title=record["state"])
    return EXIT_OK


# ---------------------------------------------------------------------------
# negativity

def _build_diagnostic_state(args, tol: Tolerances):
    if args.kind == "rho_s":
        rho = states.rho_s(args.eta, args.n_max, tol)
        cut = entanglement.Bipartition.split([0], 2)
    elif args.kind == "rho_t":
        rho = states.rho_t(args.eta, args.m, args.n_max, states.PhaseAverage(), tol)
        cut = entanglement.alice_bob_cut(args.m)
    elif args.kind == "tmsv":
        ket = states.tmsv_ket(states.SqueezeParams(args.eta, args.phi or 0.0, args.n_max), tol)
        rho = assemble_density(Decomposition([1.0], [ket]), tol)
        cut = entanglement.Bipartition.split([0], 2)
    elif args.kind == "bell":
        rho = assemble_density(Decomposition([1.0], [qubit_demo.bell_ket("phi+")]), tol)
        cut = entanglement.Bipartition.split([0], 2)
    else:
        raise ConfigurationError(f"unknown kind {args.kind!r}")
    return rho, cut


def cmd_negativity(args) -> int:
    tol = _tolerances()
    if args.tail_tol is not None:
        tol = tol.with_tail(args.tail_tol)
    elif args.kind == "rho_t":
        # multi-copy states at the default cutoff carry a heavier truncation
        # tail than single-copy ones; keep them constructible out of the box
        tol = tol.with_tail(1e-3)
    rho, cut = _build_diagnostic_state(args, tol)
    verdict = entanglement.classify(rho, cut)
    payload = verdict.to_dict()
    payload["config"] = {
        "kind": args.kind, "eta": args.eta, "m": args.m,
        "n_max": args.n_max, "tail_tol": tol.tail_tol,
        "cut": {"party_a": list(cut.party_a), "party_b": list(cut.party_b)},
    }
    _json_report(payload, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# bell-scan

def _two_mode_state_for_scan(args, tol: Tolerances) -> DensityOp:
    if args.state == "tmsv":
        ket = states.tmsv_ket(states.SqueezeParams(args.eta, args.phi, args.n_max), tol)
        return assemble_density(Decomposition([1.0], [ket]), tol)
    if args.state == "rho_s":
        return states.rho_s(args.eta, args.n_max, tol)
    if args.state == "vacuum":
        d = args.n_max + 1
        mat = np.zeros((d * d, d * d), dtype=np.complex128)
        mat[0, 0] = 1.0
        from .fock import ModeShape
        return DensityOp(ModeShape([d, d]), mat, tol)
    raise ConfigurationError(f"unknown state {args.state!r}")


def cmd_bell_scan(args) -> int:
    tol = _tolerances()
    rho = _two_mode_state_for_scan(args, tol)
    grid = bell.GridSpec(lo=args.lo, hi=args.hi, points=args.points)
    config = {
        "state": args.state, "eta": args.eta, "phi": args.phi, "n_max": args.n_max,
        "grid": dataclasses.asdict(grid), "seed": args.seed,
    }
    vals = np.linspace(grid.lo, grid.hi, grid.points)
    b_grid = np.empty((grid.points, grid.points))
    rows: list[list] = []
    for i, a1 in enumerate(vals):
        for j, b1 in enumerate(vals):
            r = bell.chsh(rho, bell.ChshSettings(0.0, a1, 0.0, b1))
            b_grid[i, j] = r.chsh_value
            rows.append([0.0, float(a1), 0.0, float(b1), r.chsh_value])
    best = bell.optimize_chsh(rho, grid)
    s = best.settings
    rows.append([s.a0.real, s.a1.real, s.b0.real, s.b1.real, best.chsh_value])
    text = _csv_text(config, ["a0", "a1", "b0", "b1", "chsh"], rows)
    _emit(text, args.out)
    if args.plot:
        from .plots import plot_bell_scan
        plot_bell_scan(vals, vals, b_grid, (s.a1.real, s.b1.real, best.chsh_value),
                       _plot_path(args.out or "bell_scan"),
                       title=f"{args.state} displaced-parity CHSH")
    return EXIT_OK


# ---------------------------------------------------------------------------
# protocol

def _resolve_protocol_settings(args, tol: Tolerances):
    if args.eta is None:
        defaults = protocol.select_protocol_defaults(tol=tol)
        return defaults.eta, defaults.settings, defaults.n_max
    n_max = args.n_max if args.n_max is not None else protocol._n_max_for(args.eta, tol.tail_tol)
    ket = states.tmsv_ket(states.SqueezeParams(args.eta, 0.0, n_max), tol)
    rho = assemble_density(Decomposition([1.0], [ket]), tol)
    best = bell.optimize_chsh(rho)
    return args.eta, best.settings, n_max


def cmd_protocol(args) -> int:
    tol = _tolerances()
    eta, settings, n_max = _resolve_protocol_settings(args, tol)
    model = protocol.PhaseModel(args.phase_model, args.phi)
    ms = sorted(args.m) if args.m else [400, 1600, 6400, 25600]
    cfg = protocol.ExperimentConfig(
        eta=eta, m=ms[0], settings=settings, phase_model=model,
        n_max=n_max, seed=args.seed)
    curve = protocol.success_curve(cfg, ms, args.experiments, tol)
    config = {
        "eta": eta, "n_max": n_max, "seed": args.seed,
        "phase_model": args.phase_model, "phi": model.phi,
        "experiments": args.experiments, "ms": ms,
        "settings": {k: [getattr(settings, k).real, getattr(settings, k).imag]
                     for k in ("a0", "a1", "b0", "b1")},
        "phase_grid_points": protocol.PHASE_GRID_POINTS,
        "tail_tol": tol.tail_tol,
    }
    rows = [[m, p_hat, stderr, n, args.phase_model]
            for m, p_hat, n, stderr in curve.points]
    if args.format == "json":
        payload = {
            "config": config,
            "points": [{"m": m, "p_hat": p, "stderr": se, "n_experiments": n,
                        "phase_model": args.phase_model}
                       for m, p, n, se in curve.points],
        }
        _json_report(payload, args.out)
    else:
        text = _csv_text(config, ["m", "p_hat", "stderr", "n_experiments", "phase_model"],
                         rows)
        _emit(text, args.out)
    if args.plot:
        from .plots import plot_success_curve
        prows = [{"m": m, "p_hat": p, "stderr": se, "phase_model": args.phase_model}
                 for m, p, n, se in curve.points]
        plot_success_curve(prows, _plot_path(args.out or "protocol"),
                           title=f"eta={eta} {args.phase_model} phases")
    return EXIT_OK


# ---------------------------------------------------------------------------
# qubit-demo

def cmd_qubit_demo(args) -> int:
    tol = _tolerances()
    psi = qubit_demo.build_psi()
    reduced = qubit_demo.lost_register_state(psi, tol)
    bell_mix = qubit_demo.bell_mixture_decomposition()
    prod_mix = qubit_demo.product_mixture_decomposition()
    td = trace_distance(assemble_density(bell_mix, tol), assemble_density(prod_mix, tol))
    conditionals = []
    for outcome, name in enumerate(qubit_demo.BELL_ORDER):
        prob, ket = qubit_demo.measure_register(psi, outcome)
        fid = qubit_demo.fidelity_with(ket, qubit_demo.bell_ket(name))
        cond_rho = assemble_density(Decomposition([1.0], [ket]), tol)
        neg = entanglement.negativity(cond_rho, entanglement.Bipartition.split([0], 2))
        conditionals.append({"outcome": outcome, "bell_state": name,
                             "probability": prob, "fidelity": fid, "negativity": neg})
    reduced_neg = entanglement.negativity(reduced, entanglement.Bipartition.split([0], 2))
    payload = {
        "config": {"seed": args.seed},
        "decompositions": {
            "bell_mixture_weights": list(bell_mix.weights),
            "product_mixture_weights": list(prod_mix.weights),
            "trace_distance": td,
        },
        "conditional_states": conditionals,
        "reduced_state_negativity": reduced_neg,
    }
    _json_report(payload, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# picture-check

def cmd_picture_check(args) -> int:
    tol = _tolerances()
    checks = []

    # phase-averaged coherent state: coherent-phase picture vs Fock-diagonal picture
    cs = states.coherent_phase_decomposition(args.alpha, args.n_max, args.K, tol)
    ns = states.number_diagonal_decomposition(args.alpha, args.n_max, tol)
    d = args.n_max + 1
    number_povm = [np.diag(np.eye(d)[n]).astype(complex) for n in range(d)]
    checks.append({
        "name": "phase-averaged coherent: coherent-phase vs number-diagonal",
        "equivalent": entanglement.decomposition_equivalent(cs, ns, 1e-12, tol),
        "statistics_invariant": entanglement.statistics_invariance_check(
            cs, ns, number_povm, 1e-10, tol),
    })

    # maximally mixed qubit pair: Bell mixture vs product mixture
    bell_mix = qubit_demo.bell_mixture_decomposition()
    prod_mix = qubit_demo.product_mixture_decomposition()
    basis_povm = [np.diag(np.eye(4)[i]).astype(complex) for i in range(4)]
    checks.append({
        "name": "maximally mixed qubits: Bell mixture vs product mixture",
        "equivalent": entanglement.decomposition_equivalent(bell_mix, prod_mix, 1e-12, tol),
        "statistics_invariant": entanglement.statistics_invariance_check(
            bell_mix, prod_mix, basis_povm, 1e-10, tol),
    })

    payload = {
        "config": {"alpha": args.alpha, "n_max": args.n_max, "K": args.K,
                   "seed": args.seed},
        "checks": checks,
        "all_pass": all(c["equivalent"] and c["statistics_invariant"] for c in checks),
    }
    _json_report(payload, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------

def _plot_path(base: str) -> str:
    root, ext = os.path.splitext(base)
    return (root if ext else base) + ".png"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="picturelab",
                                description="Truncated Fock-space quantum optics toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)

    sp = sub.add_parser("state", help="build a state and summarize it")
    sp.add_argument("--kind", choices=sorted(states._STATE_FIELDS),
                    default="rho_s")
    sp.add_argument("--config", help="JSON config record {state, params}")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--phi", type=float)
    sp.add_argument("--eta", type=float)
    sp.add_argument("--m", type=int)
    sp.add_argument("--n-max", dest="n_max", type=int)
    sp.add_argument("--method", choices=[states.ANALYTIC, states.QUADRATURE])
    sp.add_argument("--K", dest="K", type=int)
    sp.add_argument("--tail-tol", dest="tail_tol", type=float)
    sp.add_argument("--plot", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_state)

    sp = sub.add_parser("negativity", help="entanglement verdict for a named state")
    sp.add_argument("--kind", choices=["rho_s", "rho_t", "tmsv", "bell"], default="rho_s")
    sp.add_argument("--eta", type=float, default=0.5)
    sp.add_argument("--phi", type=float)
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--n-max", dest="n_max", type=int, default=12)
    sp.add_argument("--tail-tol", dest="tail_tol", type=float)
    common(sp)
    sp.set_defaults(func=cmd_negativity)

    sp = sub.add_parser("bell-scan", help="CHSH scan over displacement settings")
    sp.add_argument("--state", choices=["tmsv", "rho_s", "vacuum"], default="tmsv")
    sp.add_argument("--eta", type=float, default=0.6)
    sp.add_argument("--phi", type=float, default=0.0)
    sp.add_argument("--n-max", dest="n_max", type=int, default=24)
    sp.add_argument("--lo", type=float, default=-1.0)
    sp.add_argument("--hi", type=float, default=1.0)
    sp.add_argument("--points", type=int, default=41)
    sp.add_argument("--plot", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_bell_scan)

    sp = sub.add_parser("protocol", help="Monte Carlo success-probability curve")
    sp.add_argument("--eta", type=float, help="default: scan-selected")
    sp.add_argument("--m", type=int, action="append",
                    help="pairs per experiment (repeatable)")
    sp.add_argument("--experiments", type=int, default=400)
    sp.add_argument("--phase-model", dest="phase_model",
                    choices=[protocol.FIXED, protocol.SHARED, protocol.IID],
                    default=protocol.SHARED)
    sp.add_argument("--phi", type=float, default=0.0)
    sp.add_argument("--n-max", dest="n_max", type=int)
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.add_argument("--plot", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_protocol)

    sp = sub.add_parser("qubit-demo", help="register + Bell-pair worked example")
    common(sp)
    sp.set_defaults(func=cmd_qubit_demo)

    sp = sub.add_parser("picture-check", help="decomposition-invariance checks")
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--n-max", dest="n_max", type=int, default=20)
    sp.add_argument("--K", dest="K", type=int, default=64)
    common(sp)
    sp.set_defaults(func=cmd_picture_check)

    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (ResourceError, MemoryError) as exc:
        _error_json("resource", exc)
        return EXIT_RESOURCE
    except TruncationError as exc:
        _error_json("numerical", exc)
        return EXIT_NUMERICAL
    except (PictureLabError, ValueError, OSError, json.JSONDecodeError) as exc:
        _error_json("validation", exc)
        return EXIT_USAGE


def _error_json(category: str, exc: Exception) -> None:
    sys.stderr.write(json.dumps({
        "error": category,
        "type": type(exc).__name__,
        "message": str(exc),
    }) + "\n")


if __name__ == "__main__":
    sys.exit(main())
