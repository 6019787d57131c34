import numpy as np
import pytest

from fuzzyfluid import config as cfg
from fuzzyfluid.classical import (VelocityModes, classical_hamiltonian, classical_rhs,
                                  clebsch_wfield, curl, helicity, kinetic_energy,
                                  lattice_convolution, node_energies, project_divfree,
                                  velocity_from_clebsch, vorticity_from_clebsch)
from fuzzyfluid.modes import ClebschState, random_state, reality_project, reality_residual
from fuzzyfluid.tests._test_utils import (grid_19, grid_33, low_mode_field,
                                          raise_if_differs, reference_grid)

rng = np.random.default_rng(cfg.SEED_RANDOM)
num_random_states = 100


def real_low_mode_state(grid, radius=1.0):
    return ClebschState(reality_project(low_mode_field(grid, rng, radius)),
                        reality_project(low_mode_field(grid, rng, radius)))


def test_lattice_convolution():

    grid = grid_19()
    num = grid.num_nodes
    pair_values = rng.standard_normal((num, num, 3)) \
                  + 1j * rng.standard_normal((num, num, 3))

    expected = np.zeros((num, 3), dtype=complex)
    for ii in range(num):
        for jj in range(num):
            target = grid.pair_sum_index[ii, jj]
            if target >= 0:
                expected[target] += pair_values[ii, jj]

    raise_if_differs(lattice_convolution(grid, pair_values), expected, 1e-13,
                     'lattice convolution')


def test_velocity_is_divergence_free():

    grid = reference_grid()
    for seed in range(num_random_states):
        state = random_state(grid, seed=seed, amplitude=1.0)
        velocity = velocity_from_clebsch(state)
        if velocity.divergence_residual() > 1e-12:
            raise ArithmeticError('velocity of seed {} is not divergence-free: {:.3e}'
                                  ''.format(seed, velocity.divergence_residual()))
        if np.any(velocity.amplitudes[grid.origin] != 0.0):
            raise ArithmeticError('velocity carries a mean flow')
        if velocity.reality_residual() > 1e-12 * velocity.norm():
            raise ArithmeticError('velocity of a real state is not real')

    projected = project_divfree(velocity)
    raise_if_differs(projected.amplitudes, velocity.amplitudes, 1e-12,
                     'Leray projection of a divergence-free field')


def test_curl_of_velocity_is_vorticity():

    grid = reference_grid()
    for seed in range(num_random_states):
        state = random_state(grid, seed=seed, amplitude=1.0)
        raise_if_differs(curl(velocity_from_clebsch(state)).amplitudes,
                         vorticity_from_clebsch(state).amplitudes, 1e-11,
                         'curl v vs grad lambda x grad mu, seed {}'.format(seed))


def test_clebsch_helicity_vanishes():

    grid = reference_grid()
    for _ in range(num_random_states):
        state = real_low_mode_state(grid, radius=1.0)
        velocity = velocity_from_clebsch(state)
        vorticity = vorticity_from_clebsch(state)
        scale = velocity.norm() * vorticity.norm()

        if abs(helicity(state)) > 1e-10 * scale:
            raise ArithmeticError('helicity {:.3e} of a Clebsch flow is not zero'
                                  ''.format(helicity(state)))


def test_energy_two_ways():

    state = random_state(reference_grid(), seed=23, amplitude=1.0)
    energy = classical_hamiltonian(state)

    if energy <= 0.0:
        raise ArithmeticError('kinetic energy of a nonzero flow must be positive')
    raise_if_differs(kinetic_energy(velocity_from_clebsch(state)), energy, 1e-12,
                     'kinetic energy vs Clebsch form')
    raise_if_differs(np.sum(node_energies(state)), energy, 1e-14, 'node energies')

    if np.any(node_energies(state) < -1e-14 * energy):
        raise ArithmeticError('node contributions to H must be non-negative')


def test_energy_is_quartic():

    state = random_state(grid_33(), seed=2, amplitude=1.0)
    scaled = ClebschState(2.0 * state.lam, 2.0 * state.mu)
    raise_if_differs(classical_hamiltonian(scaled), 16.0 * classical_hamiltonian(state),
                     1e-13, 'H(2 lambda, 2 mu)')

    only_lam = ClebschState(state.lam, 0.0 * state.mu)
    if classical_hamiltonian(only_lam) != 0.0 or np.any(clebsch_wfield(only_lam) != 0.0):
        raise ArithmeticError('flow without mu must be at rest')


def test_rhs_of_real_state_is_real():

    state = random_state(reference_grid(), seed=31, amplitude=1.0)
    dlam, dmu = classical_rhs(state)
    scale = max(np.max(np.abs(dlam.amplitudes)), np.max(np.abs(dmu.amplitudes)))

    if max(reality_residual(dlam), reality_residual(dmu)) > 1e-12 * scale:
        raise ArithmeticError('advection of a real state is not real')


def test_vector_modes_shape():

    with pytest.raises(ValueError):
        VelocityModes(grid_19(), np.zeros((3, 3)))
