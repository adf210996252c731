"""Uniform 1D linear-elastic finite elements.

Builds meshes, assembles consistent-mass/stiffness systems, and carries the
boundary bookkeeping (Dirichlet partition, interface load map) needed by both
the monolithic solver and the subdomain models.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class MaterialParams:
    """Linear-elastic material for a 1D bar.

    Args:
        youngs_modulus: Young's modulus E in Pa.
        density: mass density rho in kg/m^3.
        area: cross-section area A in m^2 (1.0 throughout the benchmark, so
            stress and interface force coincide numerically).
    """

    youngs_modulus: float
    density: float
    area: float = 1.0

    def __post_init__(self):
        if self.youngs_modulus <= 0:
            raise ValueError("youngs_modulus must be positive")
        if self.density <= 0:
            raise ValueError("density must be positive")
        if self.area <= 0:
            raise ValueError("area must be positive")

    @property
    def wave_speed(self) -> float:
        """Longitudinal wave speed c = sqrt(E/rho) in m/s."""
        return float(np.sqrt(self.youngs_modulus / self.density))


@dataclass(frozen=True)
class Mesh1D:
    """Uniform node/element layout on [x_left, x_right]."""

    x_left: float
    x_right: float
    h: float
    node_coords: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.node_coords)

    @property
    def n_elements(self) -> int:
        return len(self.node_coords) - 1


@dataclass(frozen=True)
class BcPartition:
    """Split of node indices into Dirichlet-constrained and free sets.

    ``interface_index`` is the node sitting on the coupling boundary, if the
    mesh belongs to a subdomain (None for the monolithic domain).
    """

    constrained: np.ndarray
    free: np.ndarray
    interface_index: int | None = None


@dataclass(frozen=True)
class AssembledSystem:
    """Assembled operators plus their Dirichlet-partitioned blocks.

    M and K are the full consistent mass / stiffness matrices. Mbar, Kbar are
    their restrictions to the free index set, Bbar = -K[free, constrained]
    maps prescribed boundary displacements to free-equation loads, and Hbar
    maps an interface traction to its (single) loaded free row.
    """

    M: np.ndarray
    K: np.ndarray
    partition: BcPartition
    Mbar: np.ndarray
    Kbar: np.ndarray
    Bbar: np.ndarray
    Hbar: np.ndarray = field(default=None)  # set when an interface exists


def build_uniform_mesh(x_left: float, x_right: float, h: float) -> Mesh1D:
    """Build a uniform mesh; (x_right - x_left)/h must be an integer."""
    if x_right <= x_left:
        raise ValueError(f"need x_right > x_left, got [{x_left}, {x_right}]")
    n_float = (x_right - x_left) / h
    n_elems = int(round(n_float))
    if n_elems < 1 or abs(n_float - n_elems) > 1e-9 * max(1.0, n_float):
        raise ValueError(
            f"domain length {x_right - x_left} is not an integer multiple of h={h}"
        )
    # generate as x_left + i*h, then snap the last node exactly onto x_right
    # so accumulation error cannot creep in on long meshes
    coords = x_left + h * np.arange(n_elems + 1, dtype=float)
    coords[-1] = x_right
    coords.setflags(write=False)
    return Mesh1D(x_left=x_left, x_right=x_right, h=h, node_coords=coords)


def assemble_system(mesh: Mesh1D, mat: MaterialParams) -> tuple[np.ndarray, np.ndarray]:
    """Assemble consistent mass M and stiffness K by element overlap-add.

    Element blocks are (rho*A*h/6)*[[2,1],[1,2]] and (E*A/h)*[[1,-1],[-1,1]].
    """
    n = mesh.n_nodes
    h = mesh.h
    m_el = mat.density * mat.area * h / 6.0
    k_el = mat.youngs_modulus * mat.area / h

    M = np.zeros((n, n))
    K = np.zeros((n, n))
    # overlap-add of the two-node element blocks
    idx = np.arange(n - 1)
    M[idx, idx] += 2.0 * m_el
    M[idx + 1, idx + 1] += 2.0 * m_el
    M[idx, idx + 1] += m_el
    M[idx + 1, idx] += m_el
    K[idx, idx] += k_el
    K[idx + 1, idx + 1] += k_el
    K[idx, idx + 1] += -k_el
    K[idx + 1, idx] += -k_el
    return M, K


def partition_system(M: np.ndarray, K: np.ndarray, constrained, interface_index=None) -> AssembledSystem:
    """Partition (M, K) by a nonempty Dirichlet index set.

    Returns the free-block operators Mbar = M[free, free], Kbar = K[free, free]
    and the boundary coupling Bbar = -K[free, constrained]. When
    ``interface_index`` is given, the interface load map Hbar is built too
    (zero column if the interface node is itself constrained).
    """
    n = M.shape[0]
    constrained = np.atleast_1d(np.asarray(constrained, dtype=int))
    if constrained.size == 0:
        raise ValueError("constrained index set must be nonempty (floating bar)")
    if constrained.size >= n:
        raise ValueError("constraining every node leaves no free degrees of freedom")
    mask = np.ones(n, dtype=bool)
    mask[constrained] = False
    free = np.nonzero(mask)[0]
    part = BcPartition(constrained=np.sort(constrained), free=free,
                       interface_index=interface_index)
    Mbar = M[np.ix_(free, free)]
    Kbar = K[np.ix_(free, free)]
    Bbar = -K[np.ix_(free, part.constrained)]
    return AssembledSystem(M=M, K=K, partition=part, Mbar=Mbar, Kbar=Kbar,
                           Bbar=Bbar, Hbar=None)


def interface_load_map(mesh: Mesh1D, free: np.ndarray, interface_index: int,
                       area: float = 1.0) -> np.ndarray:
    """Map a single interface traction to the free-equation load vector.

    For the 1D point interface the map is a single column with entry A at the
    free row of the interface node; if that node is Dirichlet-constrained the
    column is all zero (the traction does no work on a constrained DOF).
    """
    if interface_index not in (0, mesh.n_nodes - 1):
        raise ValueError(
            f"interface node {interface_index} is not an endpoint of the mesh"
        )
    H = np.zeros((len(free), 1))
    where = np.nonzero(free == interface_index)[0]
    if where.size:
        H[where[0], 0] = area
    return H


def gaussian_ic(mesh: Mesh1D, a: float, b: float, w: float) -> np.ndarray:
    """Gaussian displacement pulse u_i = a*exp(-(x_i - b)^2 / (2 w^2))."""
    if w <= 0:
        raise ValueError("gaussian width w must be positive")
    x = mesh.node_coords
    return a * np.exp(-((x - b) ** 2) / (2.0 * w * w))


def element_stress(mesh: Mesh1D, mat: MaterialParams, u: np.ndarray) -> np.ndarray:
    """Per-element stress sigma_e = E * (u_{e+1} - u_e) / h, in Pa.

    Works on a single displacement vector or on an (n_nodes, n_steps) array
    (stress history per column).
    """
    u = np.asarray(u)
    return mat.youngs_modulus * np.diff(u, axis=0) / mesh.h
