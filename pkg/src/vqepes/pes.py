"""PES scans over ion-molecule separations and Morse-potential fitting.

A scan loads one FCIDUMP + sidecar fixture per distance, solves it with
the configured method and emits (distance, energy, stderr) rows in a
fixed tabular format.  Energies are totals (active eigenvalue plus the
fixture's core constant), which is what the Morse fit consumes; the
active-space electronic energy relative to the bare nuclear repulsion is
carried alongside for benchmark comparisons.

The Morse model is E(r) = D_e (1 - exp(-a (r - r_e)))^2 - D_e + E_offset,
fitted by Levenberg-Marquardt with an analytic Jacobian.  E_offset is a
fitted parameter: re-zeroing energies to it realizes the
asymptote-at-zero plotting convention without computing a point at
infinite separation.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import benchmark
from .adapt import AdaptConfig, run_adapt
from .ansatz import build_pool, ryrz_circuit, uccsd_circuit, uccsd_excitations
from .fermion import (
    build_hamiltonian,
    hf_reference,
    jordan_wigner,
    parse_fcidump,
    read_sidecar,
)
from .simulator import ReadoutNoiseModel, compile_operator, prepare_reference, sample_expectation
from .vqe import VqeConfig, run_vqe

METHODS = ("uccsd", "ryrz", "adapt", "exact", "sampled-adapt")
RESULTS_HEADER = "distance_angstrom energy_ha stderr_ha method iterations evaluations wall_time_s"


@dataclass
class ScanConfig:
    system: str
    fixture_dir: str
    method: str
    distances: list[float] = field(default_factory=lambda: [round(0.3 * k, 2) for k in range(1, 13)])
    shots: int = 1024
    noise_p01: float = 0.0
    noise_p10: float = 0.0
    trex: bool = True
    seed: int = 0
    reps: int = 3
    max_workers: int = 4

    def validate(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {METHODS}")
        if len(self.distances) < 2:
            raise ValueError("a scan needs at least 2 distances")
        if any(b <= a for a, b in zip(self.distances, self.distances[1:])):
            raise ValueError("distances must be strictly increasing")

    @classmethod
    def from_manifest(cls, text: str) -> "ScanConfig":
        data = yaml.safe_load(text)
        if not isinstance(data, dict):
            raise ValueError("manifest must be a key-value mapping")
        known = {f.name for f in cls.__dataclass_fields__.values()}  # type: ignore[attr-defined]
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown manifest keys: {sorted(unknown)}")
        cfg = cls(**data)
        cfg.validate()
        return cfg


@dataclass
class PesPoint:
    distance: float
    energy: float          # total, Hartree
    stderr: float
    method: str
    iterations: int = 0
    evaluations: int = 0
    wall_time_s: float = 0.0
    active_energy: float | None = None   # energy - e_core - nuclear repulsion
    detail: str = ""
    failed: bool = False

    def finite(self) -> bool:
        return bool(np.isfinite(self.energy) and np.isfinite(self.stderr))


def find_fixture(fixture_dir: str, distance: float) -> tuple[Path, Path]:
    root = Path(fixture_dir)
    matches = sorted(root.glob(f"*_d{distance:.2f}.fcidump"))
    if not matches:
        raise FileNotFoundError(f"no fixture for d={distance:.2f} in {fixture_dir}")
    fcidump = matches[0]
    sidecar = fcidump.with_suffix(".meta")
    if not sidecar.exists():
        raise FileNotFoundError(f"missing sidecar {sidecar}")
    return fcidump, sidecar


def solve_fixture(fcidump_text: str, meta: dict[str, str], config: ScanConfig,
                  distance_index: int) -> PesPoint:
    """Solve one scan point with the configured method."""
    t0 = time.perf_counter()
    data = parse_fcidump(fcidump_text)
    hamiltonian = jordan_wigner(build_hamiltonian(data.h1, data.h2, data.e_core))
    compiled = compile_operator(hamiltonian)
    reference = hf_reference(data.n_elec, 2 * data.n_orb)
    distance = float(meta["distance_angstrom"])
    method = config.method

    iterations = evaluations = 0
    stderr = 0.0
    detail = ""
    if method == "exact":
        # restrict to the physical particle-number sector: on folded cation
        # Hamiltonians the unrestricted qubit ground state can overfill
        result = benchmark.ground_state_in_sector(compiled, data.n_elec, seed=config.seed)
        energy = result.energy
        detail = f"diag={result.method}"
    elif method == "uccsd":
        circuit = uccsd_circuit(uccsd_excitations(data.n_elec, 2 * data.n_orb), 2 * data.n_orb)
        res = run_vqe(circuit, compiled, reference, VqeConfig())
        energy, iterations, evaluations = res.energy, res.iterations, res.evaluations
        detail = f"converged={res.converged} stop={res.stop_reason}"
    elif method == "ryrz":
        circuit = ryrz_circuit(2 * data.n_orb, config.reps)
        res = run_vqe(circuit, compiled, reference, VqeConfig())
        energy, iterations, evaluations = res.energy, res.iterations, res.evaluations
        detail = f"converged={res.converged} stop={res.stop_reason}"
    else:  # adapt / sampled-adapt
        pool = build_pool(uccsd_excitations(data.n_elec, 2 * data.n_orb))
        res = run_adapt(compiled, pool, reference, AdaptConfig())
        energy = res.energies[-1]
        iterations, evaluations = res.inner_iterations, res.evaluations
        detail = (f"ops={len(res.chosen_ops)} stop={res.stop_reason} "
                  f"chosen=[{';'.join(p.sparse_label() for p in res.chosen_ops)}]")
        if method == "sampled-adapt":
            state = prepare_reference(reference, hamiltonian.n_qubits)
            res.final_circuit.apply_to(state, res.params)
            noise = None
            if config.noise_p01 > 0 or config.noise_p10 > 0:
                noise = ReadoutNoiseModel.uniform(hamiltonian.n_qubits, config.noise_p01, config.noise_p10)
            energy, stderr = sample_expectation(
                state, compiled, config.shots, seed=config.seed * 100003 + distance_index,
                noise=noise, twirl=config.trex,
            )
    active_energy = None
    if "nuclear_repulsion_ha" in meta:
        active_energy = energy - data.e_core - float(meta["nuclear_repulsion_ha"])
    return PesPoint(
        distance=distance, energy=float(energy), stderr=float(stderr), method=method,
        iterations=iterations, evaluations=evaluations,
        wall_time_s=time.perf_counter() - t0, active_energy=active_energy, detail=detail,
    )


def run_scan(config: ScanConfig) -> list[PesPoint]:
    """Execute all scan points; failures are flagged, not fatal."""
    config.validate()
    jobs = []
    missing = []
    for k, d in enumerate(config.distances):
        try:
            fcidump_path, sidecar_path = find_fixture(config.fixture_dir, d)
        except FileNotFoundError:
            missing.append(d)
            continue
        jobs.append((k, d, fcidump_path.read_text(), read_sidecar(sidecar_path.read_text())))
    if missing:
        raise FileNotFoundError(
            f"missing fixtures for distances {missing} in {config.fixture_dir}"
        )

    def worker(job):
        k, d, text, meta = job
        try:
            return solve_fixture(text, meta, config, k)
        except Exception as err:  # point flagged, scan continues
            return PesPoint(distance=d, energy=float("nan"), stderr=float("nan"),
                            method=config.method, detail=f"failed: {err}", failed=True)

    if config.max_workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=config.max_workers) as pool:
            points = list(pool.map(worker, jobs))
    else:
        points = [worker(job) for job in jobs]
    return sorted(points, key=lambda p: p.distance)


# ---------------------------------------------------------------------------
# Morse fitting

@dataclass
class MorseFit:
    d_e: float
    a: float
    r_e: float
    e_offset: float
    covariance: np.ndarray
    converged: bool
    weighted: bool
    rms_residual: float
    n_points: int
    iterations: int
    low_confidence: bool = False

    @property
    def sigma(self) -> np.ndarray:
        return np.sqrt(np.maximum(np.diag(self.covariance), 0.0))

    @property
    def equilibrium_distance(self) -> tuple[float, float]:
        return self.r_e, float(self.sigma[2])

    @property
    def binding_energy(self) -> tuple[float, float]:
        return -self.d_e, float(self.sigma[0])

    def model(self, r: np.ndarray) -> np.ndarray:
        u = 1.0 - np.exp(-self.a * (np.asarray(r) - self.r_e))
        return self.d_e * u**2 - self.d_e + self.e_offset


def _morse_residuals_jacobian(params: np.ndarray, r: np.ndarray):
    d_e, a, r_e, off = params
    # overflowing trial steps produce inf cost and get rejected by damping
    with np.errstate(over="ignore", invalid="ignore"):
        expo = np.exp(-a * (r - r_e))
        u = 1.0 - expo
        model = d_e * u**2 - d_e + off
        jac = np.column_stack([
            u**2 - 1.0,
            2.0 * d_e * u * (r - r_e) * expo,
            -2.0 * d_e * u * a * expo,
            np.ones_like(r),
        ])
    return model, jac


def initial_guess(points: list[PesPoint]) -> tuple[float, float, float, float]:
    """Deterministic Morse start: minimum-energy distance, far-point offset."""
    if len(points) < 4:
        raise ValueError("Morse initial guess needs at least 4 points")
    distances = np.array([p.distance for p in points])
    energies = np.array([p.energy for p in points])
    k_min = int(np.argmin(energies))  # ties resolve to the lower distance
    r_e = float(distances[k_min])
    e_offset = float(energies[np.argmax(distances)])
    d_e = max(e_offset - float(energies[k_min]), 1e-4)
    return d_e, 1.0, r_e, e_offset


def fit_morse(points: list[PesPoint], weighted: bool | None = None,
              max_iterations: int = 200) -> MorseFit:
    """Levenberg-Marquardt weighted least squares for the Morse model."""
    usable = [p for p in points if not p.failed and p.finite()]
    if len(usable) < 4:
        raise ValueError(f"Morse fit needs at least 4 points, got {len(usable)}")
    r = np.array([p.distance for p in usable])
    y = np.array([p.energy for p in usable])
    errs = np.array([p.stderr for p in usable])
    if weighted is None:
        weighted = bool(np.any(errs > 0))
    if weighted:
        sigma = np.where(errs > 0, errs, np.max(errs[errs > 0], initial=1.0))
        w = 1.0 / sigma**2
    else:
        w = np.ones_like(y)

    guess = initial_guess(usable)
    low_confidence = guess[2] >= float(r.max())  # no interior minimum
    params = np.array(guess, dtype=float)
    lam = 1e-3
    model, jac = _morse_residuals_jacobian(params, r)
    cost = float(np.sum(w * (y - model) ** 2))
    converged = False
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        resid = y - model
        jtw = jac.T * w
        gradient = jtw @ resid
        hessian = jtw @ jac
        stepped = False
        for _ in range(40):  # bounded damping escalation
            try:
                step = np.linalg.solve(hessian + lam * np.diag(np.diag(hessian)), gradient)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            trial = params + step
            trial_model, trial_jac = _morse_residuals_jacobian(trial, r)
            trial_cost = float(np.sum(w * (y - trial_model) ** 2))
            if np.isfinite(trial_cost) and trial_cost <= cost:
                improvement = cost - trial_cost
                params, model, jac, cost = trial, trial_model, trial_jac, trial_cost
                lam = max(lam / 3.0, 1e-12)
                stepped = True
                if improvement < 1e-14 * (1.0 + cost) or float(np.max(np.abs(step))) < 1e-12:
                    converged = True
                break
            lam *= 10.0
            if lam > 1e12:
                break
        if not stepped or converged:
            converged = converged or stepped
            break

    jtw = jac.T * w
    hessian = jtw @ jac
    dof = max(len(usable) - 4, 1)
    singular = False
    try:
        cov = np.linalg.inv(hessian)
    except np.linalg.LinAlgError:
        cov = np.full((4, 4), np.nan)
        singular = True
    if not weighted and not singular:
        cov = cov * (cost / dof)
    rms = float(np.sqrt(np.mean((y - model) ** 2)))
    d_e, a, r_e, off = (float(v) for v in params)
    return MorseFit(
        d_e=d_e, a=a, r_e=r_e, e_offset=off, covariance=cov,
        converged=converged and not singular, weighted=weighted,
        rms_residual=rms, n_points=len(usable), iterations=iterations,
        low_confidence=low_confidence or singular or d_e <= 0 or a <= 0,
    )


# ---------------------------------------------------------------------------
# file formats

def results_table(points: list[PesPoint], header_meta: dict | None = None) -> str:
    lines = []
    if header_meta:
        for key, value in header_meta.items():
            lines.append(f"# {key} = {value}")
    lines.append(RESULTS_HEADER)
    for p in points:
        lines.append(
            f"{p.distance:.4f} {p.energy:.10f} {p.stderr:.10f} {p.method} "
            f"{p.iterations} {p.evaluations} {p.wall_time_s:.3f}"
        )
    return "\n".join(lines) + "\n"


def parse_results_table(text: str) -> list[PesPoint]:
    points = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("distance_angstrom"):
            continue
        parts = line.split()
        if len(parts) != 7:
            raise ValueError(f"malformed results row {line!r}")
        points.append(PesPoint(
            distance=float(parts[0]), energy=float(parts[1]), stderr=float(parts[2]),
            method=parts[3], iterations=int(parts[4]), evaluations=int(parts[5]),
            wall_time_s=float(parts[6]),
        ))
    return points


def fit_report(fit: MorseFit, extra: dict | None = None) -> str:
    sig = fit.sigma
    lines = [
        "morse_fit_report",
        f"model = D_e*(1 - exp(-a*(r - r_e)))^2 - D_e + E_offset",
        f"converged = {fit.converged}",
        f"weighted = {fit.weighted}",
        f"low_confidence = {fit.low_confidence}",
        f"n_points = {fit.n_points}",
        f"lm_iterations = {fit.iterations}",
        f"rms_residual_ha = {fit.rms_residual:.6e}",
        f"D_e_ha = {fit.d_e:.8f} +- {sig[0]:.8f}",
        f"a_per_angstrom = {fit.a:.8f} +- {sig[1]:.8f}",
        f"r_e_angstrom = {fit.r_e:.8f} +- {sig[2]:.8f}",
        f"E_offset_ha = {fit.e_offset:.8f} +- {sig[3]:.8f}",
        f"equilibrium_distance_angstrom = {fit.equilibrium_distance[0]:.4f} +- {fit.equilibrium_distance[1]:.4f}",
        f"binding_energy_ha = {fit.binding_energy[0]:.4f} +- {fit.binding_energy[1]:.4f}",
        "covariance =",
    ]
    for row in fit.covariance:
        lines.append("  " + " ".join(f"{v: .6e}" for v in row))
    if extra:
        for key, value in extra.items():
            lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def plot_data(fit: MorseFit, r_min: float, r_max: float, spacing: float = 0.01) -> str:
    n = int(round((r_max - r_min) / spacing)) + 1
    rs = r_min + spacing * np.arange(n)
    lines = ["r_angstrom e_model_ha"]
    for r, e in zip(rs, fit.model(rs)):
        lines.append(f"{r:.4f} {e:.10f}")
    return "\n".join(lines) + "\n"
