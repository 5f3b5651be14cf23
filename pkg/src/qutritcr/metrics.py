"""State fidelity, average gate fidelity, purity, and two-qutrit concurrence."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimMismatch, NotDensityMatrix, NotUnitary
from .linalg import PAIR_DIM, QUTRIT_DIM, dag, herm_defect, partial_trace, unitary_defect

GATE_UNITARY_TOL = 1e-7


@dataclass(frozen=True)
class MetricReport:
    name: str
    value: float
    stderr: float | None = None
    shots: int | None = None
    seed: int | None = None

    def __post_init__(self):
        if not (0.0 <= self.value <= 1.0):
            raise ValueError(f"metric value {self.value} outside [0, 1]")

    def to_dict(self) -> dict:
        d = {"name": self.name, "value": self.value}
        if self.stderr is not None:
            d["stderr"] = self.stderr
        if self.shots is not None:
            d["shots"] = self.shots
        if self.seed is not None:
            d["seed"] = self.seed
        return d


def state_fidelity(psi: np.ndarray, phi: np.ndarray) -> float:
    """|<psi|phi>|^2 for pure states of equal dimension."""
    psi, phi = np.asarray(psi), np.asarray(phi)
    if psi.shape != phi.shape:
        raise DimMismatch(f"state dims differ: {psi.shape} vs {phi.shape}")
    return float(abs(np.vdot(psi, phi)) ** 2)


def average_gate_fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """(|Tr(u† v)|^2 + d) / (d (d + 1)); invariant under global phases."""
    if u.shape != v.shape:
        raise DimMismatch(f"gate dims differ: {u.shape} vs {v.shape}")
    for m in (u, v):
        if unitary_defect(m) > GATE_UNITARY_TOL:
            raise NotUnitary(f"unitarity defect {unitary_defect(m):.3e}")
    d = u.shape[0]
    return float((abs(np.trace(dag(u) @ v)) ** 2 + d) / (d * (d + 1)))


def purity(rho: np.ndarray) -> float:
    """Tr(rho^2) for a density matrix."""
    rho = np.asarray(rho)
    if herm_defect(rho) > 1e-9 or abs(np.trace(rho).real - 1.0) > 1e-9:
        raise NotDensityMatrix("input is not Hermitian with unit trace")
    if float(np.linalg.eigvalsh(rho).min()) < -1e-9:
        raise NotDensityMatrix("input has a significantly negative eigenvalue")
    return float(np.trace(rho @ rho).real)


def concurrence(psi: np.ndarray) -> float:
    """Normalized pure-state two-qutrit concurrence sqrt((3/2)(1 - Tr rho_A^2)).

    Equals 0 for product states and 1 for the maximally entangled state.
    """
    psi = np.asarray(psi)
    if psi.shape != (PAIR_DIM,):
        raise DimMismatch(f"expected a length-{PAIR_DIM} state, got {psi.shape}")
    rho_a = partial_trace(psi, keep="first")
    d = QUTRIT_DIM
    val = (d / (d - 1.0)) * (1.0 - float(np.trace(rho_a @ rho_a).real))
    return float(np.sqrt(max(val, 0.0)))
