"""Command-line front end.

Every subcommand prints a single JSON report to stdout and returns a
nonzero exit code when parsing, synthesis, or verification fails.
"""
from __future__ import annotations

import argparse
import json
import pathlib
import sys

from . import algorithms, fileio
from .circuits import Circuit, compile_circuit, count_resources, gateset_by_name
from .configs import SpecValidationError, StateSpec, cisd_excitations, hartree_fock_config
from .givens import AngleUnderflowError, PlanError, synthesize_gr
from .paulis import PauliSum
from .simulator import StateVector, exact_spectrum, fidelity_up_to_phase, moments, run_circuit
from .ssp import MergeError, synthesize_ssp

REPORT_SCHEMA = "mcprep/1"
SYNTH_FIDELITY = 1e-9
EXACT_REFERENCE_MAX_QUBITS = 10

_USER_ERRORS = (
    fileio.ParseError,
    SpecValidationError,
    AngleUnderflowError,
    PlanError,
    MergeError,
    algorithms.TauTooLarge,
    ArithmeticError,
    ValueError,
    OSError,
)


def _read(path: str) -> str:
    return pathlib.Path(path).read_text()


def _emit(command: str, body: dict) -> None:
    report = {"schema": REPORT_SCHEMA, "command": command}
    report.update(body)
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _synthesize(spec: StateSpec, method: str) -> Circuit:
    if method == "gr":
        return synthesize_gr(spec)
    return synthesize_ssp(spec)


def _counts_dict(c: Circuit) -> dict:
    r = count_resources(c)
    return {
        "n_gates": r.n_gates,
        "two_qubit": r.two_qubit_total,
        "depth": r.depth,
        "by_kind": dict(sorted(r.counts.items())),
    }


def _synth_one(spec: StateSpec, method: str, gateset_name: str) -> tuple[dict, Circuit, bool]:
    raw = _synthesize(spec, method)
    emitted = raw if gateset_name == "none" else compile_circuit(raw, gateset_by_name(gateset_name))
    fidelity = fidelity_up_to_phase(run_circuit(emitted), StateVector.from_spec(spec))
    ok = fidelity >= 1 - SYNTH_FIDELITY
    body = {
        "method": method,
        "gateset": gateset_name,
        "n_qubits": spec.n_q,
        "n_configs": spec.size,
        "fidelity": fidelity,
        "verified": ok,
        "resources": _counts_dict(emitted),
    }
    return body, emitted, ok


def _cmd_synth(args) -> int:
    if args.spec_dir:
        results = []
        all_ok = True
        out_dir = pathlib.Path(args.out) if args.out else None
        if out_dir:
            out_dir.mkdir(parents=True, exist_ok=True)
        for path in sorted(p for p in pathlib.Path(args.spec_dir).iterdir() if p.is_file()):
            spec = fileio.parse_state_spec(path.read_text())
            body, circuit, ok = _synth_one(spec, args.method, args.gateset)
            body["spec"] = str(path)
            if out_dir and ok:
                target = out_dir / (path.stem + ".circuit.json")
                target.write_text(fileio.circuit_to_json(circuit))
                body["circuit_file"] = str(target)
            results.append(body)
            all_ok = all_ok and ok
        _emit("synth", {"verified": all_ok, "results": results})
        return 0 if all_ok else 1
    spec = fileio.parse_state_spec(_read(args.spec))
    body, circuit, ok = _synth_one(spec, args.method, args.gateset)
    body["spec"] = args.spec
    # Artifacts are only written for circuits that passed self-verification.
    if args.out and ok:
        pathlib.Path(args.out).write_text(fileio.circuit_to_json(circuit))
        body["circuit_file"] = args.out
    _emit("synth", body)
    return 0 if ok else 1


def _cmd_verify(args) -> int:
    spec = fileio.parse_state_spec(_read(args.spec))
    circuit = fileio.circuit_from_json(_read(args.circuit))
    if circuit.parameters:
        raise fileio.ParseError(f"circuit has unbound parameters {list(circuit.parameters)}")
    fidelity = fidelity_up_to_phase(run_circuit(circuit), StateVector.from_spec(spec))
    ok = fidelity >= 1 - args.tolerance
    _emit(
        "verify",
        {
            "spec": args.spec,
            "circuit": args.circuit,
            "fidelity": fidelity,
            "tolerance": args.tolerance,
            "verified": ok,
        },
    )
    return 0 if ok else 1


def _cmd_resources(args) -> int:
    spec = fileio.parse_state_spec(_read(args.spec))
    methods = ("gr", "ssp") if args.method == "both" else (args.method,)
    gateset = gateset_by_name(args.gateset)
    per_method = {}
    for method in methods:
        compiled = compile_circuit(_synthesize(spec, method), gateset)
        per_method[method] = _counts_dict(compiled)
    _emit(
        "resources",
        {
            "spec": args.spec,
            "gateset": args.gateset,
            "n_qubits": spec.n_q,
            "n_configs": spec.size,
            "methods": per_method,
        },
    )
    return 0


def _maybe_exact_ground(h: PauliSum) -> float | None:
    if h.n_qubits > EXACT_REFERENCE_MAX_QUBITS:
        return None
    return float(exact_spectrum(h).values[0])


def _cmd_vqe(args) -> int:
    spec = fileio.parse_state_spec(_read(args.spec))
    h = parse_matching_hamiltonian(args.hamiltonian, spec.n_q)
    result = algorithms.vqe_minimize(
        h, spec, args.method, restarts=args.restarts, seed=args.seed, maxiter=args.maxiter
    )
    body = {
        "spec": args.spec,
        "hamiltonian": args.hamiltonian,
        "method": args.method,
        "energy": result.energy,
        "parameters": result.parameters,
        "restarts_used": result.restarts_used,
    }
    exact = _maybe_exact_ground(h)
    if exact is not None:
        body["exact_ground"] = exact
        body["error_vs_exact"] = result.energy - exact
    _emit("vqe", body)
    return 0


def parse_matching_hamiltonian(path: str, n_qubits: int) -> PauliSum:
    h = fileio.parse_hamiltonian(_read(path))
    if h.n_qubits != n_qubits:
        raise fileio.ParseError(
            f"operator acts on {h.n_qubits} qubits but the state has {n_qubits}"
        )
    return h


def _cmd_moments(args) -> int:
    spec = fileio.parse_state_spec(_read(args.spec))
    h = parse_matching_hamiltonian(args.hamiltonian, spec.n_q)
    state = run_circuit(_synthesize(spec, args.method))
    mu = moments(state, h, 4)
    c = algorithms.cumulants(mu)
    body = {
        "spec": args.spec,
        "hamiltonian": args.hamiltonian,
        "method": args.method,
        "moments": mu,
        "cumulants": {"c1": c.c1, "c2": c.c2, "c3": c.c3, "c4": c.c4},
    }
    try:
        body["qcm4"] = algorithms.qcm4(c)
    except ArithmeticError as err:
        body["qcm4"] = None
        body["qcm4_skipped"] = str(err)
    try:
        body["cmx2"] = algorithms.cmx2(c)
    except ArithmeticError as err:
        body["cmx2"] = None
        body["cmx2_skipped"] = str(err)
    _emit("moments", body)
    return 0


def _cmd_qcels(args) -> int:
    spec = fileio.parse_state_spec(_read(args.spec))
    h = parse_matching_hamiltonian(args.hamiltonian, spec.n_q)
    state = run_circuit(_synthesize(spec, args.method))
    maker = algorithms.qcels_series_hadamard if args.hadamard else algorithms.qcels_series
    series = maker(state, h, args.tau, args.samples)
    estimate = algorithms.qcels_estimate(series)
    body = {
        "spec": args.spec,
        "hamiltonian": args.hamiltonian,
        "method": args.method,
        "tau": args.tau,
        "samples": args.samples,
        "readout": "hadamard" if args.hadamard else "direct",
        "estimate": estimate,
    }
    exact = _maybe_exact_ground(h)
    if exact is not None:
        body["exact_ground"] = exact
        body["error_vs_exact"] = estimate - exact
    _emit("qcels", body)
    return 0


def _cmd_sceom(args) -> int:
    h = fileio.parse_hamiltonian(_read(args.hamiltonian))
    hf = hartree_fock_config(args.orbitals, args.electrons)
    if hf.n_qubits != h.n_qubits:
        raise fileio.ParseError(
            f"{args.orbitals} orbitals give {hf.n_qubits} qubits; operator has {h.n_qubits}"
        )
    excitations = cisd_excitations(hf)
    if args.ansatz:
        ansatz = fileio.circuit_from_json(_read(args.ansatz))
        if ansatz.parameters:
            raise fileio.ParseError("ansatz circuit has unbound parameters")
    else:
        ansatz = Circuit(h.n_qubits, ())
    m = algorithms.sceom_m_matrix(h, hf, excitations, ansatz, prep_method=args.prep)
    energies = algorithms.sceom_energies(m)
    body = {
        "hamiltonian": args.hamiltonian,
        "reference": str(hf),
        "prep_method": args.prep,
        "n_excitations": len(excitations),
        "ground_energy": m.ground_energy,
        "excitation_energies": [float(e) for e in energies],
        "m_matrix": [[float(v) for v in row] for row in m.values],
    }
    if args.element_resources:
        body["elements"] = [
            {
                "i": e.i,
                "j": e.j,
                "pair_distance": e.pair_distance,
                "gr_two_qubit": e.gr_two_qubit,
                "ssp_two_qubit": e.ssp_two_qubit,
            }
            for e in algorithms.sceom_element_resources(hf, excitations, args.gateset)
        ]
    _emit("sceom", body)
    return 0


def _cmd_spectrum(args) -> int:
    h = fileio.parse_hamiltonian(_read(args.hamiltonian))
    values = exact_spectrum(h).values
    count = min(args.count, values.size)
    _emit(
        "spectrum",
        {
            "hamiltonian": args.hamiltonian,
            "n_qubits": h.n_qubits,
            "lowest": [float(v) for v in values[:count]],
        },
    )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mcprep",
        description="Synthesize, verify, and use number-conserving state preparation circuits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_method(p, default="gr"):
        p.add_argument("--method", choices=("gr", "ssp"), default=default)

    p = sub.add_parser("synth", help="synthesize a circuit and verify it against the spec")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--spec", help="state spec file")
    group.add_argument("--spec-dir", help="directory of state spec files")
    add_method(p)
    p.add_argument("--gateset", choices=("zz", "cx", "none"), default="zz")
    p.add_argument("--out", help="circuit JSON output path (directory with --spec-dir)")
    p.set_defaults(run=_cmd_synth)

    p = sub.add_parser("verify", help="check a circuit file against a state spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--circuit", required=True)
    p.add_argument("--tolerance", type=float, default=SYNTH_FIDELITY)
    p.set_defaults(run=_cmd_verify)

    p = sub.add_parser("resources", help="gate counts after compilation")
    p.add_argument("--spec", required=True)
    p.add_argument("--method", choices=("gr", "ssp", "both"), default="both")
    p.add_argument("--gateset", choices=("zz", "cx"), default="zz")
    p.set_defaults(run=_cmd_resources)

    p = sub.add_parser("vqe", help="variational ground-state search over the circuit's angles")
    p.add_argument("--spec", required=True)
    p.add_argument("--hamiltonian", required=True)
    add_method(p)
    p.add_argument("--restarts", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--maxiter", type=int, default=500)
    p.set_defaults(run=_cmd_vqe)

    p = sub.add_parser("moments", help="moment and cumulant energy estimates for a spec state")
    p.add_argument("--spec", required=True)
    p.add_argument("--hamiltonian", required=True)
    add_method(p)
    p.set_defaults(run=_cmd_moments)

    p = sub.add_parser("qcels", help="time-series phase estimation from a spec state")
    p.add_argument("--spec", required=True)
    p.add_argument("--hamiltonian", required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--samples", type=int, default=32)
    p.add_argument("--hadamard", action="store_true", help="read out via an explicit ancilla")
    add_method(p)
    p.set_defaults(run=_cmd_qcels)

    p = sub.add_parser("sceom", help="excited-state energies from single/double excitations")
    p.add_argument("--hamiltonian", required=True)
    p.add_argument("--orbitals", type=int, required=True)
    p.add_argument("--electrons", type=int, required=True)
    p.add_argument("--ansatz", help="bound circuit JSON applied after each probe prep")
    p.add_argument("--prep", choices=("gr", "ssp"), default="gr")
    p.add_argument("--element-resources", action="store_true")
    p.add_argument("--gateset", choices=("zz", "cx"), default="zz")
    p.set_defaults(run=_cmd_sceom)

    p = sub.add_parser("spectrum", help="lowest exact eigenvalues of an operator file")
    p.add_argument("--hamiltonian", required=True)
    p.add_argument("--count", type=int, default=6)
    p.set_defaults(run=_cmd_spectrum)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.run(args)
    except _USER_ERRORS as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
