"""The global descent function of the phase dynamics and its gradient.

The normative definition: E is the potential with grad E = -(2/w) * drift,
with constants fixed so that for sine coupling and uniform frequencies

    E = -K sum_{i != j} J_ij cos(phi_i - phi_j)
        - Ks sum_i cos(2 phi_i)
        - 2K sum_i h_i cos(phi_i)
        - 2 sum_i ((w_i - w*)/w_i) phi_i.

General couplings replace cos by the pair kernel 1 - G with G the
antiderivative of g (G(0) = 0).  At binary phases (0/pi) with K = 1/2 the
sine-form E equals the Ising Hamiltonian minus n*Ks (and minus the
problem's constant offset), so descending E minimises H.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .coupling import CouplingFunction
from .dynamics import OscillatorBank, Trajectory
from .ising import IsingProblem

__all__ = ["EnergyBreakdown", "energy", "grad_energy", "check_monotone",
           "DescentReport"]


@dataclass(frozen=True)
class EnergyBreakdown:
    """total = coupling_term + self_term + shil_term + tilt_term, in that order."""

    coupling_term: float
    self_term: float
    shil_term: float
    tilt_term: float
    total: float


def _validate(problem: IsingProblem, bank: OscillatorBank, phi: np.ndarray) -> np.ndarray:
    phi = np.asarray(phi, dtype=np.float64)
    if phi.shape[-1] != problem.n:
        raise ValueError(f"phi has {phi.shape[-1]} phases, problem has n={problem.n}")
    if bank.n != problem.n:
        raise ValueError("bank size does not match problem size")
    return phi


def energy(problem: IsingProblem, coupling: CouplingFunction,
           bank: OscillatorBank, phi: np.ndarray, K: float, Ks: float,
           shil_coupling: CouplingFunction | None = None) -> EnergyBreakdown:
    """Evaluate the descent function at a phase vector."""
    phi = _validate(problem, bank, phi)
    gs = shil_coupling or coupling
    if problem.m:
        kern = coupling.pair_kernel(phi[problem.i] - phi[problem.j])
        coupling_term = -2.0 * K * float(problem.jval @ kern)
    else:
        coupling_term = 0.0
    if problem.has_self_terms:
        self_term = -2.0 * K * float(problem.h @ coupling.pair_kernel(phi))
    else:
        self_term = 0.0
    shil_term = -Ks * float(gs.pair_kernel(2.0 * phi).sum())
    tilt_term = 0.0 if bank.is_uniform else -2.0 * float(bank.detuning @ phi)
    total = coupling_term + self_term + shil_term + tilt_term
    return EnergyBreakdown(coupling_term, self_term, shil_term, tilt_term, total)


def energy_total_batch(problem: IsingProblem, coupling: CouplingFunction,
                       bank: OscillatorBank, phi: np.ndarray, K, Ks,
                       shil_coupling: CouplingFunction | None = None) -> np.ndarray:
    """energy(...).total over rows of (B, n) phases; K, Ks may be arrays (B,)."""
    phi = _validate(problem, bank, phi)
    gs = shil_coupling or coupling
    K = np.asarray(K, dtype=np.float64)
    Ks = np.asarray(Ks, dtype=np.float64)
    if problem.m:
        kern = coupling.pair_kernel(phi[..., problem.i] - phi[..., problem.j])
        total = -2.0 * K * (kern @ problem.jval)
    else:
        total = np.zeros(phi.shape[:-1])
    if problem.has_self_terms:
        total = total - 2.0 * K * (coupling.pair_kernel(phi) @ problem.h)
    total = total - Ks * gs.pair_kernel(2.0 * phi).sum(axis=-1)
    if not bank.is_uniform:
        total = total - 2.0 * (phi @ bank.detuning)
    return total


def grad_energy(problem: IsingProblem, coupling: CouplingFunction,
                bank: OscillatorBank, phi: np.ndarray, K: float, Ks: float,
                shil_coupling: CouplingFunction | None = None) -> np.ndarray:
    """Analytic gradient of energy(); equals -(2/w_i) * drift_i exactly."""
    from .dynamics import _coupling_sum
    phi = _validate(problem, bank, phi)
    gs = shil_coupling or coupling
    grad = 2.0 * K * _coupling_sum(problem, coupling, phi)
    if problem.has_self_terms:
        grad += 2.0 * K * problem.h * coupling.g(phi)
    if Ks != 0.0:
        grad += 2.0 * Ks * gs.g(2.0 * phi)
    if not bank.is_uniform:
        grad -= 2.0 * bank.detuning
    return grad


@dataclass(frozen=True)
class DescentReport:
    """Energy along a trajectory with the largest per-step increase found."""

    energies: np.ndarray
    max_increase: float
    tolerances: np.ndarray
    passed: bool
    first_violation: int | None

    def to_json(self) -> str:
        return json.dumps({
            "energies": self.energies.tolist(),
            "max_increase": self.max_increase,
            "passed": self.passed,
            "first_violation": self.first_violation,
        })


def check_monotone(trajectory: Trajectory, coupling: CouplingFunction,
                   problem: IsingProblem, bank: OscillatorBank,
                   shil_coupling: CouplingFunction | None = None,
                   rel_tol: float = 1e-8) -> DescentReport:
    """Verify E never rises along a noiseless, constant-control trajectory.

    Each recorded increment must satisfy E_{k+1} - E_k <= rel_tol*(1 + |E_k|);
    trajectories recorded with noise or time-varying controls are rejected
    because descent is not guaranteed there.
    """
    ctrl = trajectory.controls
    if np.any(ctrl[:, 2] != 0.0):
        raise ValueError("descent check needs a noiseless (Kn = 0) trajectory")
    if np.any(ctrl != ctrl[0]):
        raise ValueError("descent check needs constant controls")
    K, Ks = float(ctrl[0, 0]), float(ctrl[0, 1])
    e = energy_total_batch(problem, coupling, bank, trajectory.phi, K, Ks,
                           shil_coupling=shil_coupling)
    inc = np.diff(e)
    tol = rel_tol * (1.0 + np.abs(e[:-1]))
    bad = np.nonzero(inc > tol)[0]
    return DescentReport(
        energies=e,
        max_increase=float(inc.max()) if len(inc) else 0.0,
        tolerances=tol,
        passed=len(bad) == 0,
        first_violation=int(bad[0]) if len(bad) else None,
    )
