"""Open-system time evolution: Schrodinger and Lindblad propagation.

The master equation

    drho/dt = -i [H, rho] + sum_l gamma_l (A_l rho A_l+ - 1/2 {A_l+ A_l, rho})

is integrated with an adaptive embedded Runge-Kutta 4(5) pair on the
vectorized (stacked) density matrices; absolute tolerance defaults to 1e-10,
relative to 1e-8, and the step size is capped at 0.05/||H|| so oscillating
drive coefficients are always resolved.  Coefficients of time-dependent terms
are evaluated exactly at the RK stage times.  Hamiltonians are in rad/us and
times in us.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .hilbert import (
    DEPHASE_3,
    LOWER_3,
    PAULI_Z,
    SIGMA_MINUS,
    DensityMatrix,
    HilbertError,
    OperatorMatrix,
    SiteDims,
    TimeDependentOperator,
    embed_operators,
)


class PropagationError(RuntimeError):
    """Integration failure, with the time reached when it occurred."""

    def __init__(self, message: str, t_reached: float | None = None):
        super().__init__(message)
        self.t_reached = t_reached


@dataclass(frozen=True)
class NoiseModel:
    """Per-site dephasing and photon-loss channels at a common base rate.

    ``gamma`` is in 1/us (a printed 0.01 MHz decay rate is 0.01 here, giving
    a 100 us lifetime).  Individual channel rates may be overridden; both
    default to ``gamma``.
    """

    gamma: float
    channels: frozenset[str] = frozenset({"dephasing", "photon_loss"})
    gamma_dephasing: float | None = None
    gamma_photon_loss: float | None = None

    def __post_init__(self) -> None:
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        unknown = self.channels - {"dephasing", "photon_loss"}
        if unknown:
            raise ValueError(f"unknown noise channels {sorted(unknown)}")

    def rate(self, channel: str) -> float:
        override = {
            "dephasing": self.gamma_dephasing,
            "photon_loss": self.gamma_photon_loss,
        }[channel]
        return self.gamma if override is None else override

    def collapse_operators(
        self, dims: SiteDims | Sequence[int]
    ) -> list[tuple[float, np.ndarray]]:
        """(rate, operator) pairs over the full chain, one per site and channel."""
        dims = dims if isinstance(dims, SiteDims) else SiteDims(tuple(dims))
        ops: list[tuple[float, np.ndarray]] = []
        for channel, op2, op3 in (
            ("dephasing", PAULI_Z, DEPHASE_3),
            ("photon_loss", SIGMA_MINUS, LOWER_3),
        ):
            if channel not in self.channels:
                continue
            g = self.rate(channel)
            if g == 0.0:
                continue
            for j, d in enumerate(dims):
                local = op2 if d == 2 else op3
                ops.append((g, embed_operators({j: local}, dims).entries))
        return ops


NO_NOISE = NoiseModel(gamma=0.0)


@dataclass(frozen=True)
class Propagation:
    """A propagation problem: generator, noise, horizon and sample times."""

    hamiltonian: OperatorMatrix | TimeDependentOperator
    noise: NoiseModel | None
    t_final: float
    sample_times: tuple[float, ...]
    rtol: float = 1e-8
    atol: float = 1e-10
    max_step_factor: float = 0.05

    def __post_init__(self) -> None:
        ts = tuple(float(t) for t in self.sample_times)
        if any(t2 <= t1 for t1, t2 in zip(ts, ts[1:])):
            raise ValueError("sample_times must be strictly increasing")
        if ts and (ts[0] < 0.0 or ts[-1] > self.t_final + 1e-15):
            raise ValueError("sample_times must lie within [0, t_final]")
        object.__setattr__(self, "sample_times", ts)

    @property
    def dims(self) -> SiteDims:
        return self.hamiltonian.dims


class _LindbladGenerator:
    """Right-hand side of the master equation for a stack of operators.

    Uses the effective-Hamiltonian form: the anticommutator halves are folded
    into a non-Hermitian Heff, diagonal (dephasing-type) jump terms are
    applied as one precomputed elementwise mask, and the remaining jumps as
    matrix products.
    """

    def __init__(
        self,
        h_static: np.ndarray,
        td_terms: Sequence[tuple],
        collapse: Sequence[tuple[float, np.ndarray]],
        n_stack: int,
    ):
        self.td_terms = [(coef, -1j * np.asarray(op)) for coef, op in td_terms]
        self.dim = h_static.shape[0]
        self.n_stack = n_stack
        heff = -1j * h_static.astype(complex)
        mask = np.zeros((self.dim, self.dim), dtype=complex)
        jumps: list[tuple[float, np.ndarray]] = []
        for g, op in collapse:
            heff = heff - 0.5 * g * (op.conj().T @ op)
            diag = np.diagonal(op)
            if np.allclose(op, np.diag(diag)):
                mask += g * np.outer(diag, diag.conj())
            else:
                jumps.append((g, op))
        self.heff = heff
        self.mask = mask if np.any(mask) else None
        self.jumps = jumps

    def __call__(self, t: float, y: np.ndarray) -> np.ndarray:
        r = y.reshape(self.n_stack, self.dim, self.dim)
        heff = self.heff
        for coef, a in self.td_terms:
            heff = heff + coef(t) * a
        # flatten the stack into one wide matrix so BLAS sees a single product
        flat = r.reshape(self.n_stack * self.dim, self.dim)
        out = (flat @ heff.conj().T).reshape(r.shape)
        left = heff @ r.transpose(1, 0, 2).reshape(self.dim, -1)
        out += left.reshape(self.dim, self.n_stack, self.dim).transpose(1, 0, 2)
        if self.mask is not None:
            out += self.mask[None, :, :] * r
        for g, l_op in self.jumps:
            tmp = l_op @ r.transpose(1, 0, 2).reshape(self.dim, -1)
            tmp = tmp.reshape(self.dim, self.n_stack, self.dim).transpose(1, 0, 2)
            out += g * (tmp.reshape(-1, self.dim) @ l_op.conj().T).reshape(r.shape)
        return out.ravel()


def _split_hamiltonian(
    hamiltonian: OperatorMatrix | TimeDependentOperator,
) -> tuple[np.ndarray, list[tuple], float]:
    """Static matrix, time-dependent (coef, matrix) terms, and a norm bound."""
    if isinstance(hamiltonian, TimeDependentOperator):
        terms = [(coef, op.entries) for coef, op in hamiltonian.terms]
        return hamiltonian.static.entries, terms, hamiltonian.norm_bound()
    return hamiltonian.entries, [], hamiltonian.norm()


def _integrate_stack(prop: Propagation, stack: np.ndarray) -> np.ndarray:
    """Evolve a (n, D, D) stack; returns (n_times, n, D, D)."""
    collapse = (
        prop.noise.collapse_operators(prop.dims) if prop.noise is not None else []
    )
    h_static, td_terms, bound = _split_hamiltonian(prop.hamiltonian)
    return evolve_stack_raw(
        h_static,
        td_terms,
        collapse,
        stack,
        prop.sample_times,
        rtol=prop.rtol,
        atol=prop.atol,
        max_step_factor=prop.max_step_factor,
        norm_bound=bound,
    )


def propagate(
    rho0: DensityMatrix | OperatorMatrix, prop: Propagation
) -> list[DensityMatrix] | list[OperatorMatrix]:
    """Evolve one state (or general operator) and sample it at ``sample_times``.

    Density-matrix inputs are validated, and every sample is checked for
    trace and Hermiticity preservation (1e-8) and positivity (-1e-7).
    General operators evolve under the identical linear generator with no
    physicality checks.
    """
    is_state = isinstance(rho0, DensityMatrix)
    if rho0.dims.dims != prop.dims.dims:
        raise HilbertError("state dimensions do not match the Hamiltonian")
    if is_state:
        rho0.validate()
    out = _integrate_stack(prop, rho0.entries[None, :, :])
    results: list = []
    for k in range(out.shape[0]):
        m = out[k, 0]
        op = OperatorMatrix(prop.dims, m)
        if is_state:
            tr = np.trace(m)
            if abs(tr - 1.0) > 1e-8:
                raise PropagationError(
                    f"trace drifted to {tr:.10f} at t = {prop.sample_times[k]:.3e}"
                )
            if np.max(np.abs(m - m.conj().T)) > 1e-8:
                raise PropagationError("Hermiticity lost beyond 1e-8")
            w = np.linalg.eigvalsh((m + m.conj().T) / 2)
            if w.min() < -1e-7:
                raise PropagationError(f"negative population {w.min():.3e}")
            results.append(DensityMatrix(op))
        else:
            results.append(op)
    return results


def propagate_superoperator(
    prop: Propagation, basis: Sequence[OperatorMatrix]
) -> list[list[OperatorMatrix]]:
    """Evolve a family of operators under the same linear generator.

    All basis elements are integrated together as one stacked system, which
    keeps the quantum map construction over an operator basis cheap.  Returns
    one list of evolved operators per sample time.
    """
    if not basis:
        raise ValueError("basis must be nonempty")
    dims0 = basis[0].dims.dims
    if any(b.dims.dims != dims0 for b in basis):
        raise HilbertError("all basis elements must share site dimensions")
    if dims0 != prop.dims.dims:
        raise HilbertError("basis dimensions do not match the Hamiltonian")
    stack = np.stack([b.entries for b in basis])
    out = _integrate_stack(prop, stack)
    return [
        [OperatorMatrix(prop.dims, out[k, j]) for j in range(len(basis))]
        for k in range(out.shape[0])
    ]


def evolve_stack_raw(
    h_static: np.ndarray,
    td_terms: Sequence[tuple],
    collapse: Sequence[tuple[float, np.ndarray]],
    stack: np.ndarray,
    sample_times: Sequence[float],
    rtol: float = 1e-8,
    atol: float = 1e-10,
    max_step_factor: float = 0.05,
    norm_bound: float | None = None,
) -> np.ndarray:
    """Low-level stacked evolution on raw arrays (used by the metrics layer).

    ``collapse`` carries explicit (rate, operator) pairs, which permits
    evolving in a restricted excitation sector where embedded operators have
    already been projected.  Returns an array of shape
    (n_times, n_stack, D, D).
    """
    times = np.asarray(sample_times, dtype=float)
    if times.size == 0:
        raise ValueError("no sample times requested")
    rhs = _LindbladGenerator(h_static, td_terms, collapse, stack.shape[0])
    if norm_bound is None:
        norm_bound = float(np.linalg.norm(h_static, 2)) + sum(
            float(np.linalg.norm(op, 2)) for _, op in td_terms
        )
    kwargs = dict(rtol=rtol, atol=atol, method="RK45")
    if norm_bound > 0:
        kwargs["max_step"] = max_step_factor / norm_bound
    sol = solve_ivp(
        rhs, (0.0, float(times[-1])), stack.astype(complex).ravel(),
        t_eval=times, **kwargs
    )
    if not sol.success:
        reached = float(sol.t[-1]) if sol.t.size else 0.0
        raise PropagationError(
            f"integrator failed: {sol.message} (reached t = {reached:.3e} us)",
            t_reached=reached,
        )
    n, d = stack.shape[0], stack.shape[1]
    return sol.y.T.reshape(times.size, n, d, d)
