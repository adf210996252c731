import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schwarzwave.fem1d import (
    MaterialParams,
    build_uniform_mesh,
    assemble_system,
    partition_system,
    interface_load_map,
    gaussian_ic,
    element_stress,
)


# ---------------------------------------------------------------- meshes


def test_benchmark_mesh_node_counts():
    mesh = build_uniform_mesh(0.0, 1.0, 0.001)
    assert mesh.n_nodes == 1001
    assert mesh.n_elements == 1000
    mesh_left = build_uniform_mesh(0.0, 0.6, 0.001)
    assert mesh_left.n_nodes == 601


def test_single_element_mesh():
    mesh = build_uniform_mesh(0.0, 1.0, 1.0)
    assert mesh.n_nodes == 2
    assert mesh.n_elements == 1


def test_mesh_spacing_and_endpoints_exact():
    mesh = build_uniform_mesh(0.3, 0.9, 0.003)
    d = np.diff(mesh.node_coords)
    assert np.allclose(d, 0.003, rtol=1e-12)
    assert mesh.node_coords[0] == 0.3
    assert mesh.node_coords[-1] == 0.9


def test_non_integer_element_count_rejected():
    with pytest.raises(ValueError):
        build_uniform_mesh(0.0, 1.0, 0.0003)
    with pytest.raises(ValueError):
        build_uniform_mesh(1.0, 0.0, 0.1)


def test_refinement_consistency():
    coarse = build_uniform_mesh(0.0, 0.6, 0.002)
    fine = build_uniform_mesh(0.0, 0.6, 0.001)
    assert fine.n_elements == 2 * coarse.n_elements
    assert fine.x_left == coarse.x_left and fine.x_right == coarse.x_right


# ---------------------------------------------------------------- assembly

UNIT = MaterialParams(youngs_modulus=1.0, density=1.0, area=1.0)


def test_single_element_closed_form():
    mesh = build_uniform_mesh(0.0, 1.0, 1.0)
    M, K = assemble_system(mesh, UNIT)
    assert np.allclose(K, [[1.0, -1.0], [-1.0, 1.0]])
    assert np.allclose(M, [[1 / 3, 1 / 6], [1 / 6, 1 / 3]])


def test_two_element_hand_assembly():
    # overlap-add of (EA/h)[[1,-1],[-1,1]] with E=1, A=1, h=0.5
    mesh = build_uniform_mesh(0.0, 1.0, 0.5)
    _, K = assemble_system(mesh, UNIT)
    assert np.allclose(K, [[2, -2, 0], [-2, 4, -2], [0, -2, 2]])


def test_assembly_linearity_in_E():
    mesh = build_uniform_mesh(0.0, 1.0, 0.25)
    _, K1 = assemble_system(mesh, UNIT)
    _, K2 = assemble_system(
        mesh, MaterialParams(youngs_modulus=2.0, density=1.0, area=1.0)
    )
    M1, _ = assemble_system(mesh, UNIT)
    M2, _ = assemble_system(
        mesh, MaterialParams(youngs_modulus=2.0, density=1.0, area=1.0)
    )
    assert np.array_equal(K2, 2.0 * K1)
    assert np.array_equal(M1, M2)


@settings(max_examples=25, deadline=None)
@given(
    n_elems=st.integers(min_value=1, max_value=60),
    E=st.floats(min_value=1e-2, max_value=1e12),
    rho=st.floats(min_value=1e-2, max_value=1e5),
)
def test_assembly_invariants(n_elems, E, rho):
    mesh = build_uniform_mesh(0.0, 1.0, 1.0 / n_elems)
    mat = MaterialParams(youngs_modulus=E, density=rho, area=1.0)
    M, K = assemble_system(mesh, mat)
    # total mass = rho * A * L
    assert np.isclose(M.sum(), rho * 1.0 * 1.0, rtol=1e-10)
    # rigid-body translation nullspace: zero row sums
    assert np.max(np.abs(K.sum(axis=1))) <= 1e-9 * np.max(np.abs(K))
    # symmetry / definiteness
    assert np.array_equal(M, M.T)
    assert np.array_equal(K, K.T)
    assert np.all(np.linalg.eigvalsh(M) > 0)


def test_benchmark_mass_conservation():
    mesh = build_uniform_mesh(0.0, 1.0, 0.001)
    mat = MaterialParams(youngs_modulus=1e9, density=1000.0)
    M, _ = assemble_system(mesh, mat)
    assert np.isclose(M.sum(), 1000.0, rtol=1e-10)
    assert np.isclose(mat.wave_speed, 1000.0)


# ---------------------------------------------------------------- partition


def test_partition_two_element_hand_case():
    mesh = build_uniform_mesh(0.0, 1.0, 0.5)
    M, K = assemble_system(mesh, UNIT)
    sys = partition_system(M, K, [0, 2])
    assert np.allclose(sys.Kbar, [[4.0]])
    assert np.allclose(sys.Bbar, [[2.0, 2.0]])
    assert np.array_equal(sys.partition.free, [1])


def test_partition_rejects_empty_and_full_sets():
    mesh = build_uniform_mesh(0.0, 1.0, 0.5)
    M, K = assemble_system(mesh, UNIT)
    with pytest.raises(ValueError):
        partition_system(M, K, [])
    with pytest.raises(ValueError):
        partition_system(M, K, [0, 1, 2])


def test_partitioned_blocks_spd():
    mesh = build_uniform_mesh(0.0, 1.0, 0.1)
    mat = MaterialParams(youngs_modulus=3.0, density=2.0)
    M, K = assemble_system(mesh, mat)
    sys = partition_system(M, K, [0])
    assert np.array_equal(sys.Kbar, sys.Kbar.T)
    assert np.all(np.linalg.eigvalsh(sys.Kbar) > 0)
    assert np.all(np.linalg.eigvalsh(sys.Mbar) > 0)


# ---------------------------------------------------------------- interface map


def test_interface_load_map_free_interface():
    mesh = build_uniform_mesh(0.0, 1.0, 0.25)  # 5 nodes
    free = np.array([1, 2, 3, 4])  # clamped at node 0, interface node 4
    H = interface_load_map(mesh, free, 4)
    assert H.shape == (4, 1)
    assert np.allclose(H[:, 0], [0, 0, 0, 1])


def test_interface_load_map_constrained_interface_is_zero():
    mesh = build_uniform_mesh(0.0, 1.0, 0.25)
    free = np.array([1, 2, 3])  # both ends constrained
    H = interface_load_map(mesh, free, 4)
    assert np.all(H == 0.0)


def test_interface_load_map_scales_with_area():
    mesh = build_uniform_mesh(0.0, 1.0, 0.5)
    H = interface_load_map(mesh, np.array([1, 2]), 2, area=2.0)
    assert np.allclose(H[:, 0], [0, 2.0])


def test_interface_must_be_endpoint():
    mesh = build_uniform_mesh(0.0, 1.0, 0.25)
    with pytest.raises(ValueError):
        interface_load_map(mesh, np.array([1, 2, 3]), 2)


# ---------------------------------------------------------------- IC and stress


def test_gaussian_ic_closed_forms():
    mesh = build_uniform_mesh(0.0, 1.0, 0.001)
    u = gaussian_ic(mesh, a=0.005, b=0.5, w=0.02)
    i_center = 500
    assert np.isclose(u[i_center], 0.005)
    i_off = 520  # x = b + w
    assert np.isclose(u[i_off], 0.005 * np.exp(-0.5), rtol=1e-12)
    assert np.allclose(gaussian_ic(mesh, 0.0, 0.5, 0.02), 0.0)


def test_element_stress_uniform_strain():
    mesh = build_uniform_mesh(0.0, 1.0, 0.25)
    mat = MaterialParams(youngs_modulus=2.0, density=1.0)
    sigma = element_stress(mesh, mat, mesh.node_coords.copy())
    assert np.allclose(sigma, 2.0)
    assert np.allclose(element_stress(mesh, mat, np.full(5, 0.3)), 0.0)


def test_element_stress_single_element():
    mesh = build_uniform_mesh(0.0, 0.5, 0.5)
    mat = MaterialParams(youngs_modulus=1e9, density=1.0)
    sigma = element_stress(mesh, mat, np.array([0.0, 0.001]))
    assert np.isclose(sigma[0], 2e6)


def test_element_stress_on_history_matrix():
    mesh = build_uniform_mesh(0.0, 1.0, 0.5)
    mat = MaterialParams(youngs_modulus=4.0, density=1.0)
    U = np.column_stack([mesh.node_coords, 2.0 * mesh.node_coords])
    sigma = element_stress(mesh, mat, U)
    assert sigma.shape == (2, 2)
    assert np.allclose(sigma[:, 0], 4.0)
    assert np.allclose(sigma[:, 1], 8.0)
