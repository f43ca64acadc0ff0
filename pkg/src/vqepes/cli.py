"""Command-line surface for reproduction runs.

Exit codes: 0 success, 1 domain error (bad inputs, failed runs), 2 usage
error.  Every subcommand writes a machine-readable result file next to
its human-readable summary, echoes the seed it used, and never mutates
fixture inputs.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import benchmark
from .adapt import AdaptConfig, run_adapt
from .ansatz import build_pool, ryrz_circuit, uccsd_circuit, uccsd_excitations
from .fermion import (
    ActiveSpaceSpec,
    FcidumpError,
    build_hamiltonian,
    determinant_energy,
    fold_active_space,
    hf_reference,
    jordan_wigner,
    parse_fcidump,
    read_sidecar,
)
from .pes import (
    METHODS,
    ScanConfig,
    fit_morse,
    fit_report,
    parse_results_table,
    plot_data,
    results_table,
    run_scan,
)
from .resources import decompose, verify_decomposition
from .simulator import compile_operator
from .vqe import VqeConfig, run_vqe


class DomainError(Exception):
    pass


def _load_problem(args):
    """FCIDUMP (+optional fold) -> (compiled H, reference mask, data, meta)."""
    path = Path(args.fcidump)
    if not path.exists():
        raise DomainError(f"no such file: {path}")
    try:
        data = parse_fcidump(path.read_text())
    except FcidumpError as err:
        raise DomainError(f"{path}: {err}") from err
    meta = {}
    sidecar = path.with_suffix(".meta")
    if sidecar.exists():
        meta = read_sidecar(sidecar.read_text())
    n_elec = data.n_elec
    if getattr(args, "active_space", None):
        ne, no = (int(x) for x in args.active_space.split(","))
        h1, h2, e_core = fold_active_space(data, ActiveSpaceSpec(ne, no))
        n_elec = ne
    else:
        h1, h2, e_core = data.h1, data.h2, data.e_core
    hamiltonian = jordan_wigner(build_hamiltonian(h1, h2, e_core))
    reference = hf_reference(n_elec, 2 * h1.shape[0])
    return compile_operator(hamiltonian), reference, (h1, h2, e_core, n_elec), meta


def _write_result(out_dir: str | None, name: str, payload: dict) -> None:
    if out_dir is None:
        return
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = [f"{key} = {value}" for key, value in payload.items()]
    (out / f"{name}.result").write_text("\n".join(lines) + "\n")


def _report_energy(label: str, payload: dict) -> None:
    print(f"{label}:")
    for key, value in payload.items():
        print(f"  {key} = {value}")


def cmd_inspect(args) -> int:
    path = Path(args.fcidump)
    if not path.exists():
        print(f"error: no such file: {path}", file=sys.stderr)
        return 1
    try:
        data = parse_fcidump(path.read_text())
    except FcidumpError as err:
        print(f"error: {path}: {err}", file=sys.stderr)
        return 1
    det = determinant_energy(data.h1, data.h2, data.e_core, data.n_elec)
    payload = {
        "norb": data.n_orb,
        "nelec": data.n_elec,
        "ms2": data.ms2,
        "e_core_ha": f"{data.e_core:.10f}",
        "jw_qubits": 2 * data.n_orb,
        "hf_determinant_energy_ha": f"{det:.10f}",
    }
    sidecar = path.with_suffix(".meta")
    if sidecar.exists():
        meta = read_sidecar(sidecar.read_text())
        payload["hf_energy_metadata_ha"] = meta.get("hf_energy_ha", "")
        payload["system"] = meta.get("system", "")
    print(f"norb={data.n_orb} nelec={data.n_elec} qubits={2 * data.n_orb}")
    _report_energy("inspect", payload)
    _write_result(args.out, f"inspect_{path.stem}", payload)
    return 0


def cmd_exact(args) -> int:
    compiled, reference, (h1, h2, e_core, n_elec), meta = _load_problem(args)
    # physical answer lives in the fixed particle-number sector
    result = benchmark.ground_state_in_sector(compiled, n_elec, seed=args.seed)
    unrestricted = benchmark.ground_state(compiled, seed=args.seed)
    payload = {
        "method": f"exact-{result.method}",
        "energy_ha": f"{result.energy:.10f}",
        "unrestricted_energy_ha": f"{unrestricted.energy:.10f}",
        "degenerate": result.degeneracy_flag,
        "e_core_ha": f"{e_core:.10f}",
        "seed": args.seed,
    }
    if "nuclear_repulsion_ha" in meta:
        e_nuc = float(meta["nuclear_repulsion_ha"])
        payload["active_space_energy_ha"] = f"{result.energy - e_core - e_nuc:.10f}"
    _report_energy("exact", payload)
    _write_result(args.out, f"exact_{Path(args.fcidump).stem}", payload)
    return 0


def _run_variational(args, kind: str) -> int:
    compiled, reference, (h1, h2, e_core, n_elec), meta = _load_problem(args)
    n_so = 2 * h1.shape[0]
    if kind == "uccsd":
        circuit = uccsd_circuit(uccsd_excitations(n_elec, n_so), n_so)
    else:
        circuit = ryrz_circuit(n_so, args.reps)
    config = VqeConfig()
    res = run_vqe(circuit, compiled, reference, config)
    payload = {
        "method": kind,
        "optimizer": "bfgs",
        "energy_ha": f"{res.energy:.10f}",
        "iterations": res.iterations,
        "evaluations": res.evaluations,
        "converged": res.converged,
        "stop_reason": res.stop_reason,
        "n_params": circuit.n_params,
        "f_tol": config.f_tol,
        "g_tol": config.g_tol,
        "seed": args.seed,
        "wall_time_s": f"{res.wall_time_s:.3f}",
    }
    if "nuclear_repulsion_ha" in meta:
        e_nuc = float(meta["nuclear_repulsion_ha"])
        payload["active_space_energy_ha"] = f"{res.energy - e_core - e_nuc:.10f}"
    _report_energy(kind, payload)
    _write_result(args.out, f"{kind}_{Path(args.fcidump).stem}", payload)
    return 0


def cmd_vqe(args) -> int:
    if args.method not in ("uccsd", "ryrz"):
        raise DomainError(f"vqe method must be uccsd or ryrz, got {args.method!r}")
    return _run_variational(args, args.method)


def cmd_adapt(args) -> int:
    compiled, reference, (h1, h2, e_core, n_elec), meta = _load_problem(args)
    n_so = 2 * h1.shape[0]
    pool = build_pool(uccsd_excitations(n_elec, n_so))
    res = run_adapt(compiled, pool, reference, AdaptConfig())
    payload = {
        "method": "adapt",
        "optimizer": "bfgs",
        "energy_ha": f"{res.energies[-1]:.10f}",
        "outer_iterations": res.outer_iterations,
        "inner_iterations": res.inner_iterations,
        "evaluations": res.evaluations,
        "stop_reason": res.stop_reason,
        "pool_size": len(pool),
        "chosen_ops": ";".join(p.sparse_label() for p in res.chosen_ops),
        "energies": ",".join(f"{e:.10f}" for e in res.energies),
        "seed": args.seed,
    }
    if "nuclear_repulsion_ha" in meta:
        e_nuc = float(meta["nuclear_repulsion_ha"])
        payload["active_space_energy_ha"] = f"{res.energies[-1] - e_core - e_nuc:.10f}"
    _report_energy("adapt", payload)
    _write_result(args.out, f"adapt_{Path(args.fcidump).stem}", payload)
    return 0


def cmd_scan(args) -> int:
    manifest_path = Path(args.manifest)
    if not manifest_path.exists():
        print(f"error: no such manifest: {manifest_path}", file=sys.stderr)
        return 1
    try:
        config = ScanConfig.from_manifest(manifest_path.read_text())
    except ValueError as err:
        if "unknown method" in str(err):
            print(f"usage error: {err}", file=sys.stderr)
            return 2
        print(f"error: {err}", file=sys.stderr)
        return 1
    if args.seed is not None:
        config.seed = args.seed
    if args.shots is not None:
        config.shots = args.shots
    if args.noise_p01 is not None:
        config.noise_p01 = args.noise_p01
    if args.noise_p10 is not None:
        config.noise_p10 = args.noise_p10
    if args.trex is not None:
        config.trex = args.trex
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        points = run_scan(config)
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    n_ok = sum(1 for p in points if not p.failed)
    vqe_defaults = VqeConfig()
    meta = {
        "system": config.system,
        "method": config.method,
        "fixture_dir": config.fixture_dir,
        "seed": config.seed,
        "shots": config.shots if config.method == "sampled-adapt" else 0,
        "noise_p01": config.noise_p01,
        "noise_p10": config.noise_p10,
        "trex": config.trex,
        "optimizer": "bfgs",
        "f_tol": vqe_defaults.f_tol,
        "g_tol": vqe_defaults.g_tol,
        "reps": config.reps,
    }
    # per-point solver audit trail (chosen ADAPT operators, stop reasons)
    for p in points:
        if p.detail:
            meta[f"point_d{p.distance:.2f}"] = p.detail
    tag = f"{config.system}_{config.method}"
    (out / f"{tag}.results").write_text(results_table(points, meta))
    for p in points:
        status = "FAILED " if p.failed else ""
        print(f"  d={p.distance:.2f}  E={p.energy:.8f}  {status}{p.detail}")
    if n_ok >= 4:
        fit = fit_morse([p for p in points if not p.failed])
        (out / f"{tag}.fit").write_text(fit_report(fit, extra={"source": f"{tag}.results"}))
        good = [p for p in points if not p.failed]
        (out / f"{tag}.curve").write_text(
            plot_data(fit, min(p.distance for p in good), max(p.distance for p in good))
        )
        re, sre = fit.equilibrium_distance
        be, sbe = fit.binding_energy
        print(f"morse fit: r_e = {re:.4f} +- {sre:.4f} A, binding = {be:.4f} +- {sbe:.4f} Ha")
    print(f"scan complete: {n_ok}/{len(points)} points ok -> {out}")
    return 0 if n_ok >= 2 else 1


def cmd_fit(args) -> int:
    path = Path(args.points)
    if not path.exists():
        print(f"error: no such file: {path}", file=sys.stderr)
        return 1
    points = parse_results_table(path.read_text())
    usable = [p for p in points if p.finite()]
    if len(usable) < 4:
        print(f"error: Morse fit needs at least 4 points, got {len(usable)}", file=sys.stderr)
        return 1
    fit = fit_morse(usable)
    report = fit_report(fit, extra={"source": str(path)})
    print(report, end="")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{path.stem}.fit").write_text(report)
        good = usable
        (out / f"{path.stem}.curve").write_text(
            plot_data(fit, min(p.distance for p in good), max(p.distance for p in good))
        )
    return 0


def cmd_resources(args) -> int:
    compiled, reference, (h1, h2, e_core, n_elec), meta = _load_problem(args)
    n_so = 2 * h1.shape[0]
    if args.method == "uccsd":
        circuit = uccsd_circuit(uccsd_excitations(n_elec, n_so), n_so)
        params = np.full(circuit.n_params, 0.1)  # structural count: nonzero angles
        note = "angles bound to 0.1 (structural count)"
    elif args.method == "ryrz":
        circuit = ryrz_circuit(n_so, args.reps)
        params = np.full(circuit.n_params, 0.1)
        note = "angles bound to 0.1 (structural count)"
    elif args.method == "adapt":
        pool = build_pool(uccsd_excitations(n_elec, n_so))
        res = run_adapt(compiled, pool, reference, AdaptConfig())
        circuit, params = res.final_circuit, res.params
        note = f"largest ADAPT circuit ({len(res.chosen_ops)} operators, optimized angles)"
    else:
        raise DomainError(f"resources method must be uccsd, ryrz or adapt, got {args.method!r}")
    basis_circuit = decompose(circuit, params)
    verified = ""
    if circuit.n_qubits <= 8:
        verified = str(verify_decomposition(circuit, params))
    counts = basis_circuit.counts
    payload = {
        "method": args.method,
        "note": note,
        "cnot": counts["CNOT"],
        "rz": counts["RZ"],
        "sx": counts["SX"],
        "x": counts["X"],
        "depth": basis_circuit.depth,
        "unitary_verified": verified or "skipped (n_qubits > 8)",
        "seed": args.seed,
    }
    print(basis_circuit.count_table(), end="")
    _report_energy("resources", payload)
    _write_result(args.out, f"resources_{args.method}_{Path(args.fcidump).stem}", payload)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="vqepes", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fcidump=True):
        if fcidump:
            p.add_argument("--fcidump", required=True)
            p.add_argument("--active-space", default=None, help='fold to "electrons,orbitals"')
        p.add_argument("--out", default=None)
        p.add_argument("--seed", type=int, default=0)

    p_inspect = sub.add_parser("inspect", help="summarize an FCIDUMP fixture")
    p_inspect.add_argument("--fcidump", required=True)
    p_inspect.add_argument("--out", default=None)
    p_inspect.set_defaults(func=cmd_inspect)

    p_exact = sub.add_parser("exact", help="exact ground state of a fixture")
    common(p_exact)
    p_exact.set_defaults(func=cmd_exact)

    p_vqe = sub.add_parser("vqe", help="UCCSD or RyRz VQE on a fixture")
    common(p_vqe)
    p_vqe.add_argument("--method", required=True)
    p_vqe.add_argument("--reps", type=int, default=3)
    p_vqe.set_defaults(func=cmd_vqe)

    p_adapt = sub.add_parser("adapt", help="qubit-ADAPT-VQE on a fixture")
    common(p_adapt)
    p_adapt.set_defaults(func=cmd_adapt)

    p_scan = sub.add_parser("scan", help="PES scan from a manifest")
    p_scan.add_argument("--manifest", required=True)
    p_scan.add_argument("--out", required=True)
    p_scan.add_argument("--seed", type=int, default=None)
    p_scan.add_argument("--shots", type=int, default=None)
    p_scan.add_argument("--noise-p01", type=float, default=None)
    p_scan.add_argument("--noise-p10", type=float, default=None)
    p_scan.add_argument("--trex", action="store_true", default=None)
    p_scan.set_defaults(func=cmd_scan)

    p_fit = sub.add_parser("fit", help="Morse fit of a results table")
    p_fit.add_argument("--points", required=True)
    p_fit.add_argument("--out", default=None)
    p_fit.set_defaults(func=cmd_fit)

    p_res = sub.add_parser("resources", help="gate counts of a decomposed ansatz")
    common(p_res)
    p_res.add_argument("--method", required=True)
    p_res.add_argument("--reps", type=int, default=3)
    p_res.set_defaults(func=cmd_resources)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
