"""Newmark-beta time integration (constant average acceleration).

Advances M_bar*u'' + K_bar*u = f(t) one implicit step. The effective
stiffness K_bar + a0*M_bar is constant for the linear problems handled here,
so callers factorize it once (see :class:`NewmarkOperator`) and reuse the
factorization across every step and Schwarz iteration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve, cholesky_banded, cho_solve_banded


@dataclass(frozen=True)
class NewmarkParams:
    """Integrator constants.

    :param beta: Newmark beta (0.25 = average acceleration).
    :param gamma: Newmark gamma (0.5 = no numerical damping).
    :param dt: time step in s.
    """

    dt: float
    beta: float = 0.25
    gamma: float = 0.5

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")


@dataclass
class KinematicState:
    """Displacement/velocity/acceleration triple at a time instant."""

    u: np.ndarray
    v: np.ndarray
    a: np.ndarray
    t: float

    def copy(self) -> "KinematicState":
        return KinematicState(self.u.copy(), self.v.copy(), self.a.copy(), self.t)


def initial_acceleration(Mbar, Kbar, f0, u0, v0) -> np.ndarray:
    """Consistent starting acceleration: solve M_bar*a0 = f0 - K_bar*u0."""
    rhs = np.asarray(f0, dtype=float) - np.asarray(Kbar) @ np.asarray(u0, dtype=float)
    return np.linalg.solve(np.asarray(Mbar, dtype=float), rhs)


def newmark_step(Mbar, Kbar_total, f_next, state: KinematicState,
                 p: NewmarkParams) -> KinematicState:
    """One Newmark step with dense operators (reference implementation).

    Solves (M/(beta*dt^2) + K_total) u_{n+1} = f_{n+1} + M*(u_n/(beta*dt^2)
    + v_n/(beta*dt) + (1/(2 beta) - 1) a_n), then updates a and v.
    ``Kbar_total`` must already include any Robin stiffness contribution.
    """
    a0 = 1.0 / (p.beta * p.dt**2)
    a1 = 1.0 / (p.beta * p.dt)
    a2 = 1.0 / (2.0 * p.beta) - 1.0

    Mbar = np.atleast_2d(np.asarray(Mbar, dtype=float))
    Kbar_total = np.atleast_2d(np.asarray(Kbar_total, dtype=float))
    K_eff = Mbar * a0 + Kbar_total
    pred = a0 * state.u + a1 * state.v + a2 * state.a
    rhs = np.asarray(f_next, dtype=float) + Mbar @ pred
    u_next = np.linalg.solve(K_eff, rhs)

    a_next = a0 * u_next - pred
    v_next = state.v + p.dt * ((1.0 - p.gamma) * state.a + p.gamma * a_next)
    return KinematicState(u=u_next, v=v_next, a=a_next, t=state.t + p.dt)


def _to_upper_banded(A: np.ndarray, bandwidth: int) -> np.ndarray:
    """Pack a symmetric banded matrix into LAPACK upper-banded storage."""
    n = A.shape[0]
    ab = np.zeros((bandwidth + 1, n))
    for i in range(bandwidth + 1):
        d = bandwidth - i
        ab[i, d:] = np.diagonal(A, offset=d)
    return ab


class NewmarkOperator:
    """Pre-factorized Newmark stepper for a fixed (M_bar, K_total, dt).

    Uses a banded Cholesky factorization when the operators are banded
    (tridiagonal for linear 1D elements), falling back to dense Cholesky.
    The factorization is computed once; :meth:`predictor` and :meth:`solve`
    split the step so callers can reuse the window-constant part of the
    right-hand side across Schwarz iterations.
    """

    def __init__(self, Mbar: np.ndarray, Kbar_total: np.ndarray, p: NewmarkParams,
                 bandwidth: int = 1):
        self.p = p
        self.a0 = 1.0 / (p.beta * p.dt**2)
        self.a1 = 1.0 / (p.beta * p.dt)
        self.a2 = 1.0 / (2.0 * p.beta) - 1.0
        self.n = Mbar.shape[0]
        K_eff = Mbar * self.a0 + Kbar_total
        self._banded = bandwidth is not None and 0 < bandwidth < self.n - 1
        if self._banded:
            self._cho_b = cholesky_banded(_to_upper_banded(K_eff, bandwidth),
                                          check_finite=False)
        else:
            self._cho = cho_factor(K_eff, check_finite=False)
        # banded application of Mbar (diagonals) avoids a dense matvec per window
        self._M_diags = [np.diagonal(Mbar, offset=d).copy()
                         for d in range(-bandwidth if self._banded else 0,
                                        (bandwidth if self._banded else 0) + 1)]
        self._M_offsets = list(range(-bandwidth if self._banded else 0,
                                     (bandwidth if self._banded else 0) + 1))
        self._M = Mbar

    def apply_mass(self, x: np.ndarray) -> np.ndarray:
        if not self._banded:
            return self._M @ x
        y = self._M_diags[len(self._M_diags) // 2] * x  # main diagonal
        for d, diag in zip(self._M_offsets, self._M_diags):
            if d > 0:
                y[:-d] += diag * x[d:]
            elif d < 0:
                y[-d:] += diag * x[:d]
        return y

    def predictor(self, u, v, a):
        """Window-constant predictor a0*u_n + a1*v_n + a2*a_n."""
        return self.a0 * u + self.a1 * v + self.a2 * a

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        if self._banded:
            return cho_solve_banded((self._cho_b, False), rhs, check_finite=False)
        return cho_solve(self._cho, rhs, check_finite=False)

    def step_from_predictor(self, pred, m_pred, f_next, v_n, a_n):
        """Complete a step given the precomputed predictor and M@predictor."""
        u_next = self.solve(f_next + m_pred)
        a_next = self.a0 * u_next - pred
        v_next = v_n + self.p.dt * ((1.0 - self.p.gamma) * a_n + self.p.gamma * a_next)
        return u_next, v_next, a_next
