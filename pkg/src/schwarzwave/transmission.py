"""Interface transmission conditions for two-subdomain coupling.

Covers the alternating Dirichlet-Neumann pair, the two-sided Robin pair, and
the (non-convergent) Dirichlet-Dirichlet control, plus the relaxation update
for the interface datum and discrete traction extraction at the interface.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fem1d import AssembledSystem, MaterialParams, Mesh1D

KIND_DN = "AlternatingDN"
KIND_RR = "RobinRobin"
KIND_DD = "DirichletDirichlet"
KINDS = (KIND_DN, KIND_RR, KIND_DD)

SIDE_LEFT = "left-of-interface"
SIDE_RIGHT = "right-of-interface"


@dataclass(frozen=True)
class TransmissionSpec:
    """Coefficients of the interface data exchanged between two subdomains.

    Subdomain 1 (left of the interface) consumes a datum built with
    ``(alpha_12, beta_12)`` from subdomain 2's trace; subdomain 2 consumes one
    built with ``(alpha_21, beta_21)``.  The alphas are stored in normalized
    dimensionless form (physical coefficient times ``sigma_max``); internal
    computations divide back out.  A side with alpha = 0 receives a Dirichlet
    value; a side with alpha != 0 receives a Robin (or, with beta = 0,
    Neumann) datum applied through the weak form.
    """

    kind: str
    alpha_12: float
    alpha_21: float
    beta_12: float
    beta_21: float
    sigma_max: float
    theta_1: float = 1.0
    theta_2: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown transmission kind {self.kind!r}")
        for name in ("alpha_12", "alpha_21", "beta_12", "beta_21"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        for th in (self.theta_1, self.theta_2):
            if not 0.0 < th <= 1.0:
                raise ValueError("theta must lie in (0, 1]")
        if self.sigma_max <= 0:
            raise ValueError("sigma_max must be positive")
        if self.kind == KIND_DN:
            if not (self.alpha_12 == 0.0 and self.beta_21 == 0.0
                    and self.alpha_21 == 1.0 and self.beta_12 == 1.0):
                raise ValueError(
                    "AlternatingDN requires alpha_12 = beta_21 = 0 and "
                    "alpha_21 = beta_12 = 1")
        elif self.kind == KIND_RR:
            if 0.0 in (self.alpha_12, self.alpha_21, self.beta_12, self.beta_21):
                raise ValueError("RobinRobin requires all four coefficients nonzero")
        else:  # Dirichlet-Dirichlet control
            if not (self.alpha_12 == 0.0 and self.alpha_21 == 0.0):
                raise ValueError("DirichletDirichlet requires both alphas zero")
            if 0.0 in (self.beta_12, self.beta_21):
                raise ValueError("DirichletDirichlet requires nonzero betas")
        # a side that receives no traction must receive a displacement
        if self.alpha_12 == 0.0 and self.beta_12 == 0.0:
            raise ValueError("subdomain 1 datum has alpha and beta both zero")
        if self.alpha_21 == 0.0 and self.beta_21 == 0.0:
            raise ValueError("subdomain 2 datum has alpha and beta both zero")

    @classmethod
    def alternating_dn(cls, sigma_max: float, theta_1: float = 1.0,
                       theta_2: float = 1.0) -> "TransmissionSpec":
        return cls(KIND_DN, 0.0, 1.0, 1.0, 0.0, sigma_max, theta_1, theta_2)

    @classmethod
    def robin_robin(cls, alpha_12: float, alpha_21: float, beta_12: float,
                    beta_21: float, sigma_max: float, theta_1: float = 1.0,
                    theta_2: float = 1.0) -> "TransmissionSpec":
        return cls(KIND_RR, alpha_12, alpha_21, beta_12, beta_21, sigma_max,
                   theta_1, theta_2)

    @classmethod
    def dirichlet_dirichlet(cls, sigma_max: float, theta_1: float = 1.0,
                            theta_2: float = 1.0) -> "TransmissionSpec":
        return cls(KIND_DD, 0.0, 0.0, 1.0, 1.0, sigma_max, theta_1, theta_2)

    def coefficients_for(self, k: int) -> tuple[float, float]:
        """(alpha_bar, beta) of the datum consumed by subdomain ``k``."""
        if k == 1:
            return self.alpha_12, self.beta_12
        if k == 2:
            return self.alpha_21, self.beta_21
        raise ValueError("subdomain index must be 1 or 2")

    def theta_for(self, k: int) -> float:
        return self.theta_1 if k == 1 else self.theta_2

    def receives_dirichlet(self, k: int) -> bool:
        """True if subdomain ``k`` imposes its datum as a displacement."""
        return self.coefficients_for(k)[0] == 0.0

    def internal_alpha(self, k: int) -> float:
        """De-normalized alpha for subdomain ``k``'s datum (units 1/Pa)."""
        return self.coefficients_for(k)[0] / self.sigma_max


@dataclass
class InterfaceState:
    """Interface data owned by the coupling controller.

    ``lambda_1``/``lambda_2`` are the data currently imposed on each
    subdomain; ``u_gamma``/``t_gamma`` cache the latest interface
    displacement and traction produced by each subdomain (indexed 0 for
    subdomain 1, 1 for subdomain 2).
    """

    lambda_1: float = 0.0
    lambda_2: float = 0.0
    u_gamma: np.ndarray = None
    t_gamma: np.ndarray = None
    last_measures: tuple = (np.inf, np.inf)

    def __post_init__(self):
        if self.u_gamma is None:
            self.u_gamma = np.zeros(2)
        if self.t_gamma is None:
            self.t_gamma = np.zeros(2)

    def reset_lambdas(self):
        self.lambda_1 = 0.0
        self.lambda_2 = 0.0


def relax_lambda(theta: float, alpha: float, beta: float, t_neighbor: float,
                 u_neighbor: float, lambda_prev: float) -> float:
    """Relaxed update of one subdomain's interface datum.

    Returns ``theta*(alpha*t_neighbor + beta*u_neighbor)
    + (1 - theta)*lambda_prev``.  ``t_neighbor`` must already carry the sign
    of the receiving subdomain's outward normal (the controller flips the
    producer's own-normal traction before calling).
    """
    return theta * (alpha * t_neighbor + beta * u_neighbor) \
        + (1.0 - theta) * lambda_prev


def robin_contributions(n_free: int, gamma_row: int, alpha: float,
                        c_value: float) -> tuple[np.ndarray, np.ndarray]:
    """Unscaled Robin stiffness and force contributions at the interface.

    In 1D the interface integral collapses to a point evaluation, so the
    stiffness contribution ``S`` is a single unit diagonal entry at the
    interface free row and the force contribution is ``c_value`` at the same
    row.  The caller scales them by beta/alpha and 1/alpha respectively when
    assembling the subdomain system.
    """
    if alpha == 0.0:
        raise ValueError("Robin contributions need alpha != 0; "
                         "use the Dirichlet path for alpha = 0")
    if not 0 <= gamma_row < n_free:
        raise ValueError("interface row outside the free-DOF range")
    S = np.zeros((n_free, n_free))
    S[gamma_row, gamma_row] = 1.0
    R = np.zeros(n_free)
    R[gamma_row] = c_value
    return S, R


def extract_traction(mesh: Mesh1D, mat: MaterialParams, u: np.ndarray,
                     side: str, method: str = "element-stress",
                     system: AssembledSystem = None,
                     accel: np.ndarray = None,
                     f_known: float = 0.0) -> float:
    """Traction at the interface in the subdomain's own outward normal.

    ``side`` says where the subdomain sits relative to the interface:
    ``"left-of-interface"`` means the interface is the subdomain's right end
    (outward normal +x), ``"right-of-interface"`` the left end (normal -x).

    The default ``element-stress`` method takes the stress of the element
    adjacent to the interface, signed by the outward normal.  The
    ``residual-reaction`` method forms the interface row of M*a + K*u minus
    any known non-interface load there and divides by the cross-section
    area, recovering the boundary flux of the weak form; it needs the
    assembled ``system`` and the acceleration vector.
    """
    if side not in (SIDE_LEFT, SIDE_RIGHT):
        raise ValueError(f"unknown side {side!r}")
    if method == "element-stress":
        E, h = mat.youngs_modulus, mesh.h
        if side == SIDE_LEFT:
            return E * (u[-1] - u[-2]) / h
        return E * (u[0] - u[1]) / h
    if method == "residual-reaction":
        if system is None or accel is None:
            raise ValueError("residual-reaction needs the assembled system "
                             "and the acceleration vector")
        j = mesh.n_nodes - 1 if side == SIDE_LEFT else 0
        flux = system.M[j, :] @ accel + system.K[j, :] @ u - f_known
        return float(flux) / mat.area
    raise ValueError(f"unknown traction method {method!r}")
