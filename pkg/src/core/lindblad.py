"""
Master-equation steady state of the coherently driven cavity dimer

A weak classical drive Omega (a1 + a1†) excites the dimer at the single
photon detuning delta/2. The Liouvillian acts on column-stacked density
matrices over a Fock basis truncated in the total excitation number.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.linalg

from src.core.errors import NoSignalError, ParameterError, SteadyStateError
from src.core.model import DimerParams

logger = logging.getLogger(__name__)

MAX_ENTRIES = 10 ** 6
NULL_TOLERANCE = 1e-13
OCCUPATION_FLOOR = 1e-20


@dataclass(frozen=True)
class FockBasis:
    """Class representing two-mode Fock states with n1 + n2 <= n_max

    States are ordered by total number N, then by n1 from N down to 0.
    """

    n_max: int = 4
    states: Tuple[Tuple[int, int], ...] = field(init=False, repr=False)
    index: Dict[Tuple[int, int], int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n_max < 2:
            raise ParameterError("n_max must be at least 2", field="n_max")
        states = tuple((n1, total - n1) for total in range(self.n_max + 1)
                       for n1 in range(total, -1, -1))
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "index", {s: i for i, s in enumerate(states)})

    @property
    def dim(self) -> int:
        return len(self.states)

    def numbers(self) -> np.ndarray:
        """Total excitation number of every basis state"""
        return np.array([n1 + n2 for n1, n2 in self.states])

    def annihilation(self, mode: int) -> np.ndarray:
        """Truncated annihilation operator of cavity 1 or 2"""
        op = np.zeros((self.dim, self.dim))
        for col, (n1, n2) in enumerate(self.states):
            n = n1 if mode == 1 else n2
            if n == 0:
                continue
            target = (n1 - 1, n2) if mode == 1 else (n1, n2 - 1)
            op[self.index[target], col] = math.sqrt(n)
        return op


@dataclass(frozen=True)
class SteadyState:
    """Class representing the steady-state density matrix and its residual"""

    rho: np.ndarray
    residual: float
    basis: Optional[FockBasis] = None

    def expectation(self, op: np.ndarray) -> complex:
        return complex(np.trace(self.rho @ op))


def drive_hamiltonian(params: DimerParams, omega_drive: float, delta: float,
                      basis: FockBasis) -> np.ndarray:
    """Cavity Hamiltonian in the frame rotating at the drive frequency delta/2"""
    a1, a2 = basis.annihilation(1), basis.annihilation(2)
    n1, n2 = a1.T @ a1, a2.T @ a2
    eye = np.eye(basis.dim)
    h = (params.omega1.real - 0.5 * delta) * n1 + (params.omega2.real - 0.5 * delta) * n2
    h = h + params.u1 * n1 @ (n1 - eye) + params.u2 * n2 @ (n2 - eye)
    h = h + params.j_hop * (a1.T @ a2 + a2.T @ a1)
    h = h + omega_drive * (a1 + a1.T)
    return h.astype(complex)


def build_liouvillian(params: DimerParams, omega_drive: float, gamma: Optional[float] = None,
                      basis: Optional[FockBasis] = None, delta: float = 0.0) -> np.ndarray:
    """Superoperator of the driven-dissipative dimer on column-stacked rho

    Args:
        params: dimer parameters; gamma_bath adds to the decay of both cavities
        omega_drive: drive strength on cavity 1
        gamma: waveguide decay rate of both cavities, V_j² per cavity if None
        delta: two-photon detuning, the drive sits at delta/2
        basis: truncated Fock basis, n_max = 4 if None

    Raises:
        SteadyStateError: if the superoperator would be too large
    """
    basis = basis or FockBasis()
    dim = basis.dim
    if dim ** 4 > MAX_ENTRIES:
        raise SteadyStateError(f"Liouvillian of dimension {dim ** 2} exceeds {MAX_ENTRIES} entries")
    rates = (params.vsq1, params.vsq2) if gamma is None else (gamma, gamma)
    h = drive_hamiltonian(params, omega_drive, delta, basis)
    eye = np.eye(dim)
    liouv = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for mode, rate in zip((1, 2), rates):
        rate = rate + params.gamma_bath
        c = basis.annihilation(mode).astype(complex)
        cdc = c.conj().T @ c
        liouv += rate * (np.kron(c.conj(), c) - 0.5 * np.kron(eye, cdc) - 0.5 * np.kron(cdc.T, eye))
    return liouv


def _sector_scaling(basis: FockBasis, kappa: float) -> np.ndarray:
    numbers = basis.numbers()
    total = numbers[:, None] + numbers[None, :]
    # column stacking: flat index i + dim * j holds rho[i, j]
    return (kappa ** total.astype(float)).ravel(order="F")


def steady_state(liouvillian: np.ndarray, basis: Optional[FockBasis] = None,
                 scale: float = 1.0) -> SteadyState:
    """Normalized null vector of the Liouvillian

    Args:
        scale: ratio Omega/gamma; the n-photon sectors are rescaled by scale**n
            before the singular value decomposition so that weak-drive
            coherences keep their relative precision

    Raises:
        SteadyStateError: if the kernel is not one-dimensional
    """
    size = liouvillian.shape[0]
    dim = int(round(math.sqrt(size)))
    if basis is not None and basis.dim != dim:
        raise SteadyStateError(f"basis of dimension {basis.dim} does not match the Liouvillian")
    if basis is not None and scale > 0 and scale != 1.0:
        t = _sector_scaling(basis, scale)
    else:
        t = np.ones(size)
    scaled = liouvillian * t[None, :] / t[:, None]
    _, s, vh = scipy.linalg.svd(scaled)
    if s[-2] < NULL_TOLERANCE * s[0]:
        raise SteadyStateError("non-unique steady state")
    rho = (t * vh[-1].conj()).reshape((dim, dim), order="F")
    trace = np.trace(rho)
    if abs(trace) == 0:
        raise SteadyStateError("steady state has zero trace")
    rho = rho / trace
    rho = 0.5 * (rho + rho.conj().T)
    residual = float(np.linalg.norm(liouvillian @ rho.ravel(order="F")))
    logger.debug("steady state: smallest singular values %.3g, %.3g; residual %.3g",
                 s[-1], s[-2], residual)
    return SteadyState(rho=rho, residual=residual, basis=basis)


def solve(params: DimerParams, delta: float, omega_drive: float,
          gamma: Optional[float] = None, n_max: int = 4) -> SteadyState:
    """Build and solve the master equation at one detuning"""
    basis = FockBasis(n_max)
    liouv = build_liouvillian(params, omega_drive, gamma, basis, delta=delta)
    rates = (params.vsq1, params.vsq2) if gamma is None else (gamma, gamma)
    kappa = omega_drive / (min(rates) + params.gamma_bath) if omega_drive else 1.0
    return steady_state(liouv, basis, scale=kappa)


def occupation(state: SteadyState, mode: int = 2) -> float:
    a = state.basis.annihilation(mode)
    return float(state.expectation(a.T @ a).real)


def g2_steady(rho: np.ndarray, basis: FockBasis, mode: int = 2) -> float:
    """Zero-delay <a†a†aa>/<a†a>² of one cavity

    Raises:
        NoSignalError: if the cavity is empty
    """
    a = basis.annihilation(mode)
    n = float(np.trace(rho @ (a.T @ a)).real)
    if not n > OCCUPATION_FLOOR:
        raise NoSignalError("no signal: cavity occupation vanishes")
    pairs = float(np.trace(rho @ (a.T @ a.T @ a @ a)).real)
    return pairs / n ** 2


def linear_response(params: DimerParams, omega_drive: float, delta: float,
                    gamma: Optional[float] = None) -> Tuple[complex, complex]:
    """Coherent amplitudes (alpha1, alpha2) of the undriven-nonlinearity limit"""
    rates = (params.vsq1, params.vsq2) if gamma is None else (gamma, gamma)
    g1, g2 = (r + params.gamma_bath for r in rates)
    detuning = -0.5 * delta
    matrix = np.array([
        [params.omega1.real + detuning - 0.5j * g1, params.j_hop],
        [params.j_hop, params.omega2.real + detuning - 0.5j * g2],
    ])
    alpha = np.linalg.solve(matrix, np.array([-omega_drive, 0.0]))
    return complex(alpha[0]), complex(alpha[1])


def sweep_delta(params: DimerParams, deltas, omega_drive: float,
                gamma: Optional[float] = None, n_max: int = 4) -> List[Dict[str, float]]:
    """Rows of (delta, n2_occupation, g2_ss, residual) over a detuning grid"""
    rows = []
    for delta in deltas:
        state = solve(params, float(delta), omega_drive, gamma, n_max)
        rows.append({
            "delta": float(delta),
            "n2_occupation": occupation(state, 2),
            "g2_ss": g2_steady(state.rho, state.basis),
            "residual": state.residual,
        })
    return rows
