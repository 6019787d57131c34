"""
Commutative (a = 0) Clebsch theory in mode space.

A real field is f(x) = sum_i w_i f_i exp(2 pi i k_i.x). With the Clebsch
potentials (lambda, mu) the velocity is v = P(lambda grad mu) and the vorticity
omega = grad lambda x grad mu. Products of fields become lattice convolutions
over k + p = K; pairs whose sum leaves the grid are dropped.

The kinetic energy is

    H = 1/2 (2 pi)^2 sum_{K != 0} W(K)^dagger Pi(K) W(K) / w_K,
    W(K) = sum_{k+p=K} w_k w_p lambda(k) mu(p) p,

with Pi(K) = I - K K^T / |K|^2, and the potentials are advected by v.
"""

import numpy as np

from fuzzyfluid import config as cfg
from fuzzyfluid.modes import ClebschState, ModeField


class VectorModes(object):
    """Three complex amplitudes per grid node."""


    def __init__(self, grid, amplitudes=None):
        """Constructor."""

        if amplitudes is None:
            amplitudes = np.zeros((grid.num_nodes, 3), dtype=complex)
        else:
            amplitudes = np.array(amplitudes, dtype=complex)
            if amplitudes.shape != (grid.num_nodes, 3):
                raise ValueError('Expected amplitudes of shape {}, got {}'
                                 ''.format((grid.num_nodes, 3), amplitudes.shape))

        amplitudes.setflags(write=False)
        self.grid = grid
        self.amplitudes = amplitudes


    def divergence_residual(self):
        """max over K != 0 of |K.v(K)| / |v(K)|, zero-amplitude modes skipped."""

        dots = np.abs(np.sum(self.grid.nodes * self.amplitudes, axis=1))
        norms = np.linalg.norm(self.amplitudes, axis=1) \
                * np.linalg.norm(self.grid.nodes, axis=1)
        active = norms > 0.0
        if not np.any(active):
            return 0.0
        return float(np.max(dots[active] / norms[active]))


    def reality_residual(self):
        amps = self.amplitudes
        return float(np.max(np.abs(amps[self.grid.mirror] - np.conj(amps))))


    def norm(self):
        """sqrt(sum_K w_K |v(K)|^2)"""
        return float(np.sqrt(np.sum(self.grid.weights[:, np.newaxis]
                                    * np.abs(self.amplitudes) ** 2)))


    def __repr__(self):
        return '{}({} nodes, norm={:.6g})'.format(self.__class__.__name__,
                                                  self.grid.num_nodes, self.norm())


class VelocityModes(VectorModes):
    """Divergence-free velocity amplitudes v(K); v(0) = 0."""
    pass


class VorticityModes(VectorModes):
    """Transversal vorticity amplitudes omega(K)."""
    pass


def lattice_convolution(grid, pair_values):
    """
    Sums values over all node pairs with k_i + k_j = K_m.

    Parameters
    ----------
    grid : MomentumGrid

    pair_values : ndarray
        shape (N, N, ...), value of pair (i, j)

    Returns
    -------
    ndarray of shape (N, ...). Accumulation order is fixed, so results are
    reproducible bit for bit.

    """

    num = grid.num_nodes
    trailing = pair_values.shape[2:]
    targets = grid.pair_sum_index.ravel()
    in_band = targets >= 0

    flat = pair_values.reshape((num * num,) + trailing)
    summed = np.zeros((num,) + trailing, dtype=complex)
    np.add.at(summed, targets[in_band], flat[in_band])

    return summed


def _transverse_projection(nodes, vectors):
    """Pi(K) applied per node; the K = 0 row is zeroed."""

    k_sq = np.sum(nodes ** 2, axis=1)
    nonzero = k_sq > 0.0
    projected = np.zeros_like(vectors)
    longitudinal = np.sum(nodes[nonzero] * vectors[nonzero], axis=1) / k_sq[nonzero]
    projected[nonzero] = vectors[nonzero] - nodes[nonzero] * longitudinal[:, np.newaxis]

    return projected


def project_divfree(velocity):
    """Leray projection u - K(K.u)/|K|^2 per mode; the mean flow is removed."""

    return VelocityModes(velocity.grid,
                         _transverse_projection(velocity.grid.nodes,
                                                velocity.amplitudes))


def clebsch_wfield(state):
    """W(K) = sum_{k+p=K} w_k w_p lambda(k) mu(p) p, shape (N, 3)."""

    grid = state.grid
    weighted_lam = grid.weights * state.lam.amplitudes
    weighted_mu = grid.weights * state.mu.amplitudes

    pair_values = weighted_lam[:, np.newaxis, np.newaxis] \
                  * (weighted_mu[:, np.newaxis] * grid.nodes)[np.newaxis, :, :]

    return lattice_convolution(grid, pair_values)


def _velocity_amplitudes(grid, wfield):
    return 1j * cfg.TWO_PI * _transverse_projection(grid.nodes, wfield) \
           / grid.weights[:, np.newaxis]


def velocity_from_clebsch(state):
    """v = P(lambda grad mu), in mode space."""

    grid = state.grid
    return VelocityModes(grid, _velocity_amplitudes(grid, clebsch_wfield(state)))


def vorticity_from_clebsch(state):
    """omega = grad lambda x grad mu, as a convolution of (2 pi i k lambda) x (2 pi i p mu)."""

    grid = state.grid
    grad_lam = (1j * cfg.TWO_PI) * (grid.weights * state.lam.amplitudes)[:, np.newaxis] \
               * grid.nodes
    grad_mu = (1j * cfg.TWO_PI) * (grid.weights * state.mu.amplitudes)[:, np.newaxis] \
              * grid.nodes

    pair_values = np.cross(grad_lam[:, np.newaxis, :], grad_mu[np.newaxis, :, :])
    summed = lattice_convolution(grid, pair_values)

    return VorticityModes(grid, summed / grid.weights[:, np.newaxis])


def curl(velocity):
    """Mode-space curl, 2 pi i K x v(K)."""

    grid = velocity.grid
    return VorticityModes(grid, np.cross(1j * cfg.TWO_PI * grid.nodes,
                                         velocity.amplitudes))


def kinetic_energy(velocity):
    """1/2 sum_K w_K |v(K)|^2"""

    return 0.5 * velocity.norm() ** 2


def node_energies(state):
    """Contribution of each total momentum K to the classical Hamiltonian."""

    grid = state.grid
    wfield = clebsch_wfield(state)
    projected = _transverse_projection(grid.nodes, wfield)
    quad_form = np.real(np.sum(np.conj(wfield) * projected, axis=1))

    return 0.5 * cfg.TWO_PI_SQ * quad_form / grid.weights


def classical_hamiltonian(state):
    """Kinetic energy of the Clebsch flow, H >= 0."""

    return float(np.sum(node_energies(state)))


def _advection(grid, weighted_velocity, field_amplitudes):
    """(v.grad f)(K) = (1/w_K) sum_{k+p=K} w_k w_p v(k).(2 pi i p) f(p)"""

    velocity_dot_p = weighted_velocity @ grid.nodes.T
    pair_values = (1j * cfg.TWO_PI) * velocity_dot_p \
                  * (grid.weights * field_amplitudes)[np.newaxis, :]

    return lattice_convolution(grid, pair_values) / grid.weights


def classical_rhs_arrays(grid, lam, mu):
    """Time derivatives of the raw amplitude arrays (lambda, mu)."""

    state = ClebschState.from_arrays(grid, lam, mu)
    velocity = _velocity_amplitudes(grid, clebsch_wfield(state))
    weighted_velocity = grid.weights[:, np.newaxis] * velocity

    return -_advection(grid, weighted_velocity, lam), \
           -_advection(grid, weighted_velocity, mu)


def classical_rhs(state):
    """
    Advection of both potentials by the reconstructed velocity,
    d lambda/dt = -v.grad lambda and d mu/dt = -v.grad mu.

    Returns
    -------
    (ModeField, ModeField) time derivatives of lambda and mu

    """

    grid = state.grid
    dlam, dmu = classical_rhs_arrays(grid, state.lam.amplitudes,
                                     state.mu.amplitudes)
    return ModeField(grid, dlam), ModeField(grid, dmu)


def helicity_of(velocity, vorticity):
    """Kinetic helicity sum_K w_K conj(v(K)).omega(K), real part."""

    weights = velocity.grid.weights[:, np.newaxis]
    return float(np.real(np.sum(weights * np.conj(velocity.amplitudes)
                                * vorticity.amplitudes)))


def helicity_vector_of(velocity, vorticity):
    """Components of the integral of omega x v, sum_K w_K omega(K) x conj(v(K))."""

    weights = velocity.grid.weights[:, np.newaxis]
    return np.real(np.sum(weights * np.cross(vorticity.amplitudes,
                                             np.conj(velocity.amplitudes)), axis=0))


def helicity(state):
    """Kinetic helicity of the flow; vanishes for globally defined potentials."""

    return helicity_of(velocity_from_clebsch(state), vorticity_from_clebsch(state))


def helicity_vector(state):
    return helicity_vector_of(velocity_from_clebsch(state),
                              vorticity_from_clebsch(state))
