"""
Embedded invariant suite, run by ``fuzzyfluid verify``.

Each check reports a measured residual against its tolerance. Checks always run
in the same order and on the same seeded inputs.
"""

from dataclasses import dataclass

import numpy as np

from fuzzyfluid import config as cfg
from fuzzyfluid.classical import (classical_hamiltonian, classical_rhs_arrays,
                                  lattice_convolution)
from fuzzyfluid.dynamics import FuzzyConfig, fuzzy_hamiltonian, fuzzy_rhs_arrays
from fuzzyfluid.modes import (ClebschState, ModeField, build_grid, interpolate,
                              random_state, reality_residual)
from fuzzyfluid.star import star
from fuzzyfluid.su2 import (GroupElement, from_momentum, inverse, multiply, pairing,
                            pairing_raw, rho, to_momentum)

# small grids keep the suite fast: 19 and 33 nodes
_SMALL_GRID = dict(h=1.0, kmax=1.5)
_MEDIUM_GRID = dict(h=1.0, kmax=2.0)
_CHECK_CUTOFF = 0.2
_NUM_SAMPLES = 1000


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float


    @property
    def passed(self):
        return bool(np.isfinite(self.residual) and self.residual <= self.tolerance)


    def __str__(self):
        return '{:<32} residual {:10.3e}  tol {:8.1e}  {}' \
               ''.format(self.name, self.residual, self.tolerance,
                         'PASS' if self.passed else 'FAIL')


def _random_momenta(rng, num, radius):
    """Uniform samples in the ball of given radius."""

    direction = rng.standard_normal((num, 3))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    return radius * rng.random((num, 1)) ** (1.0 / 3.0) * direction


def _random_field(grid, rng, scale=1.0):
    amps = scale * (rng.standard_normal(grid.num_nodes)
                    + 1j * rng.standard_normal(grid.num_nodes))
    return ModeField(grid, amps)


def _quat_distance(g1, g2):
    return float(np.max(np.abs(g1.quat - g2.quat)))


def check_associativity(rng, num=_NUM_SAMPLES):
    elements = [GroupElement.from_array(q) for q in rng.standard_normal((3 * num, 4))]
    return max(_quat_distance(multiply(multiply(g1, g2), g3),
                              multiply(g1, multiply(g2, g3)))
               for g1, g2, g3 in zip(elements[0::3], elements[1::3], elements[2::3]))


def check_group_inverse(rng, num=_NUM_SAMPLES):
    identity = GroupElement.identity()
    elements = [GroupElement.from_array(q) for q in rng.standard_normal((num, 4))]
    return max(_quat_distance(multiply(g, inverse(g)), identity) for g in elements)


def check_chart_roundtrip(rng, a=_CHECK_CUTOFF, num=_NUM_SAMPLES):
    """Relative error of k -> g -> k over |k| <= 10/a."""

    momenta = _random_momenta(rng, num, 10.0 / a)
    errors = [np.linalg.norm(to_momentum(from_momentum(k, a), a) - k)
              / max(np.linalg.norm(k), 1.0) for k in momenta]
    return float(max(errors))


def check_chart_negation(rng, a=_CHECK_CUTOFF, num=_NUM_SAMPLES):
    """k(g^-1) = -k(g)"""

    momenta = _random_momenta(rng, num, 5.0 / a)
    return float(max(np.max(np.abs(to_momentum(inverse(from_momentum(k, a)), a) + k))
                     for k in momenta))


def check_angle_momentum(rng, a=_CHECK_CUTOFF, num=_NUM_SAMPLES):
    """|k| = tan(rho/2) / a, relative"""

    momenta = _random_momenta(rng, num, 5.0 / a)
    errors = list()
    for k in momenta:
        k_norm = np.linalg.norm(k)
        errors.append(abs(np.tan(rho(from_momentum(k, a)) / 2.0) / a - k_norm)
                      / max(k_norm, 1.0))
    return float(max(errors))


def check_pairing_raw(rng, a=_CHECK_CUTOFF, num=_NUM_SAMPLES):
    """pairing_raw = -|k1 - k2|^2 / (D1 D2)"""

    errors = list()
    for k1, k2 in zip(_random_momenta(rng, num, 1.0 / a),
                      _random_momenta(rng, num, 1.0 / a)):
        denom = (1.0 + a ** 2 * k1.dot(k1)) * (1.0 + a ** 2 * k2.dot(k2))
        expected = -np.sum((k1 - k2) ** 2) / denom
        errors.append(abs(pairing_raw(from_momentum(k1, a), from_momentum(k2, a), a)
                          - expected))
    return float(max(errors))


def check_polarized_trace(rng, a=_CHECK_CUTOFF, num=_NUM_SAMPLES):
    """B = (k1.k2 + a^2 k1^2 k2^2) / (D1 D2)"""

    errors = list()
    for k1, k2 in zip(_random_momenta(rng, num, 1.0 / a),
                      _random_momenta(rng, num, 1.0 / a)):
        k1_sq, k2_sq = k1.dot(k1), k2.dot(k2)
        denom = (1.0 + a ** 2 * k1_sq) * (1.0 + a ** 2 * k2_sq)
        expected = (k1.dot(k2) + a ** 2 * k1_sq * k2_sq) / denom
        computed = pairing(from_momentum(k1, a), from_momentum(k2, a), a,
                           cfg.pairing_polarized_trace)
        errors.append(abs(computed - expected))
    return float(max(errors))


def check_deposition_duality(rng, a=_CHECK_CUTOFF, num=200):
    """
    Interpolating a linear function of the nodes at G reproduces its value at
    k(G), so deposition is first-moment exact and interpolation is its adjoint.
    """

    grid = build_grid(a=a, **_MEDIUM_GRID)
    direction = rng.standard_normal(3)
    linear = grid.nodes @ direction
    inner_radius = grid.kmax - np.sqrt(3.0) * grid.h

    errors = list()
    for k in _random_momenta(rng, num, inner_radius):
        G = from_momentum(k, a)
        errors.append(abs(interpolate(linear, G, grid, a) - k.dot(direction)))
        errors.append(abs(interpolate(np.ones(grid.num_nodes), G, grid, a) - 1.0))
    return float(max(errors))


def check_star_classical_limit(rng):
    """star at a = 0 is the lattice convolution of the two fields."""

    grid = build_grid(a=0.0, **_MEDIUM_GRID)
    f1, f2 = _random_field(grid, rng), _random_field(grid, rng)
    pairs = np.outer(grid.weights * f1.amplitudes, grid.weights * f2.amplitudes)
    expected = lattice_convolution(grid, pairs) / grid.weights

    diff = star(f1, f2).amplitudes - expected
    return float(np.max(np.abs(diff)) / max(np.max(np.abs(expected)), 1e-300))


def _classical_limit_states(rng, fault):
    a = 1e-3 if fault else 0.0
    classical_grid = build_grid(a=0.0, **_MEDIUM_GRID)
    fuzzy_grid = build_grid(a=a, **_MEDIUM_GRID)
    state = random_state(classical_grid, seed=int(rng.integers(1 << 30)),
                         amplitude=1.0)
    fuzzy_state = ClebschState.from_arrays(fuzzy_grid, state.lam.amplitudes,
                                           state.mu.amplitudes)
    return state, fuzzy_state, FuzzyConfig(a=a, **_MEDIUM_GRID)


def check_classical_limit_energy(rng, fault=False):
    state, fuzzy_state, fuzzy_cfg = _classical_limit_states(rng, fault)
    energy = classical_hamiltonian(state)
    return abs(fuzzy_hamiltonian(fuzzy_state, fuzzy_cfg) - energy) / energy


def check_classical_limit_rhs(rng, fault=False):
    state, fuzzy_state, fuzzy_cfg = _classical_limit_states(rng, fault)
    expected = np.concatenate(classical_rhs_arrays(state.grid, state.lam.amplitudes,
                                                   state.mu.amplitudes))
    computed = np.concatenate(fuzzy_rhs_arrays(fuzzy_state.grid,
                                               fuzzy_state.lam.amplitudes,
                                               fuzzy_state.mu.amplitudes,
                                               fuzzy_cfg.pairing))
    return float(np.linalg.norm(computed - expected) / np.linalg.norm(expected))


def hamiltonian_gradient(state, fuzzy_cfg):
    """
    (d/dRe + i d/dIm) of the cutoff Hamiltonian w.r.t. lambda and mu,
    recovered from the equations of motion.
    """

    grid = state.grid
    dlam, dmu = fuzzy_rhs_arrays(grid, state.lam.amplitudes, state.mu.amplitudes,
                                 fuzzy_cfg.pairing)
    return -grid.weights * dmu, grid.weights * dlam


def gradient_error(state, fuzzy_cfg, rng, num_directions=3,
                   rel_step=cfg.fd_rel_step):
    """
    Largest error of the directional derivative of H predicted by the
    equations of motion, against central differences, relative to
    |grad H| |direction|.
    """

    grad_lam, grad_mu = hamiltonian_gradient(state, fuzzy_cfg)
    grad_norm = np.sqrt(np.sum(np.abs(grad_lam) ** 2) + np.sum(np.abs(grad_mu) ** 2))
    state_norm = np.sqrt(np.sum(np.abs(state.lam.amplitudes) ** 2)
                         + np.sum(np.abs(state.mu.amplitudes) ** 2))

    def energy_at(lam, mu):
        return fuzzy_hamiltonian(ClebschState.from_arrays(state.grid, lam, mu),
                                 fuzzy_cfg)

    errors = list()
    for _ in range(num_directions):
        num = state.grid.num_nodes
        d_lam = rng.standard_normal(num) + 1j * rng.standard_normal(num)
        d_mu = rng.standard_normal(num) + 1j * rng.standard_normal(num)
        d_norm = np.sqrt(np.sum(np.abs(d_lam) ** 2) + np.sum(np.abs(d_mu) ** 2))
        eps = rel_step * state_norm / d_norm

        lam, mu = state.lam.amplitudes, state.mu.amplitudes
        finite_diff = (energy_at(lam + eps * d_lam, mu + eps * d_mu)
                       - energy_at(lam - eps * d_lam, mu - eps * d_mu)) / (2.0 * eps)
        predicted = np.real(np.sum(np.conj(grad_lam) * d_lam)
                            + np.sum(np.conj(grad_mu) * d_mu))
        errors.append(abs(finite_diff - predicted) / (grad_norm * d_norm))

    return float(max(errors))


def check_gradient(rng, pairing_choice, a=_CHECK_CUTOFF):
    fuzzy_cfg = FuzzyConfig(a=a, pairing=pairing_choice, **_SMALL_GRID)
    grid = fuzzy_cfg.make_grid()
    state = random_state(grid, seed=int(rng.integers(1 << 30)), amplitude=1.0,
                         kcut=grid.kmax)
    return gradient_error(state, fuzzy_cfg, rng)


def brute_force_hamiltonian(state, fuzzy_cfg):
    """
    Quadruple-sum form of the cutoff Hamiltonian, evaluated with the pairing
    itself instead of its factorization:

        H = 1/2 (2 pi)^2 sum_m 1/w_m sum_{P', P} cbar_m(P') cbar_m(P)
            conj(z_P') z_P [B(j', j) - B(j', m) B(m, j) / B(m, m)]

    with P = (i, j) and z_P = w_i lambda_i w_j mu_j. Only practical on tiny grids.
    """

    grid = state.grid
    num = grid.num_nodes
    pair_kernel = np.array([[pairing(k1, k2, grid.a, fuzzy_cfg.pairing)
                             for k2 in grid.nodes] for k1 in grid.nodes])
    coupling = grid.symmetric_coupling_matrix.tocsr()
    weighted_lam = grid.weights * state.lam.amplitudes
    weighted_mu = grid.weights * state.mu.amplitudes

    energy = 0.0
    for m in range(num):
        b_mm = pair_kernel[m, m]
        if m == grid.origin or b_mm == 0.0:
            continue

        start, stop = coupling.indptr[m], coupling.indptr[m + 1]
        pair_ids = coupling.indices[start:stop]
        cbar = coupling.data[start:stop]
        if pair_ids.size == 0:
            continue

        ii, jj = np.divmod(pair_ids, num)
        z_pairs = cbar * weighted_lam[ii] * weighted_mu[jj]
        kernel = pair_kernel[np.ix_(jj, jj)] \
                 - np.outer(pair_kernel[jj, m], pair_kernel[m, jj]) / b_mm
        quad_form = np.real(np.conj(z_pairs) @ kernel @ z_pairs)
        energy += 0.5 * cfg.TWO_PI_SQ * quad_form / grid.weights[m]

    return float(energy)


def check_brute_force(rng, a=_CHECK_CUTOFF):
    fuzzy_cfg = FuzzyConfig(a=a, **_SMALL_GRID)
    grid = fuzzy_cfg.make_grid()
    state = random_state(grid, seed=int(rng.integers(1 << 30)), amplitude=1.0,
                         kcut=grid.kmax)
    expected = brute_force_hamiltonian(state, fuzzy_cfg)
    return abs(fuzzy_hamiltonian(state, fuzzy_cfg) - expected) / abs(expected)


def check_rhs_reality(rng, a=_CHECK_CUTOFF):
    """The flow of a real state stays real."""

    fuzzy_cfg = FuzzyConfig(a=a, **_MEDIUM_GRID)
    grid = fuzzy_cfg.make_grid()
    state = random_state(grid, seed=int(rng.integers(1 << 30)), amplitude=1.0)
    dlam, dmu = fuzzy_rhs_arrays(grid, state.lam.amplitudes, state.mu.amplitudes,
                                 fuzzy_cfg.pairing)
    scale = max(np.max(np.abs(dlam)), np.max(np.abs(dmu)))
    return max(reality_residual(ModeField(grid, dlam)),
               reality_residual(ModeField(grid, dmu))) / scale


def run_verification(force_fault=False, tolerances=None):
    """
    Runs every check in a fixed order.

    Parameters
    ----------
    force_fault : bool
        Evaluates the classical-limit checks with the cutoff side at a small
        nonzero a, which must make them fail.

    tolerances : dict, optional
        Overrides of cfg.default_tolerances

    Returns
    -------
    list of CheckResult

    """

    tol = dict(cfg.default_tolerances)
    if tolerances is not None:
        tol.update(tolerances)

    rng = np.random.default_rng(cfg.SEED_RANDOM)
    checks = (
        ('group associativity', lambda: check_associativity(rng), 'group_axioms'),
        ('group inverse', lambda: check_group_inverse(rng), 'group_axioms'),
        ('chart roundtrip', lambda: check_chart_roundtrip(rng), 'roundtrip'),
        ('chart inverse is negation', lambda: check_chart_negation(rng), 'roundtrip'),
        ('rotation angle vs |k|', lambda: check_angle_momentum(rng), 'roundtrip'),
        ('raw pairing closed form', lambda: check_pairing_raw(rng), 'closed_form'),
        ('polarized trace closed form', lambda: check_polarized_trace(rng),
         'closed_form'),
        ('deposition duality', lambda: check_deposition_duality(rng), 'closed_form'),
        ('star product at a = 0', lambda: check_star_classical_limit(rng),
         'equivalence'),
        ('classical limit of H', lambda: check_classical_limit_energy(rng, force_fault),
         'equivalence'),
        ('classical limit of rhs', lambda: check_classical_limit_rhs(rng, force_fault),
         'equivalence'),
        ('gradient, polarized trace',
         lambda: check_gradient(rng, cfg.pairing_polarized_trace), 'gradient'),
        ('gradient, chart dot', lambda: check_gradient(rng, cfg.pairing_chart_dot),
         'gradient'),
        ('brute-force Hamiltonian', lambda: check_brute_force(rng), 'brute_force'),
        ('reality of the flow', lambda: check_rhs_reality(rng), 'reality'),
    )

    results = list()
    for name, check, tol_key in checks:
        results.append(CheckResult(name, float(check()), tol[tol_key]))

    return results


def verify(force_fault=False, tolerances=None):
    """Prints one line per check; True iff all checks pass."""

    print('\nINVARIANT SUITE:\n{line}'.format(line='-' * 50))
    results = run_verification(force_fault=force_fault, tolerances=tolerances)
    for result in results:
        print(result)

    num_failed = sum(not res.passed for res in results)
    print('{line}\n{} of {} checks passed.'.format(len(results) - num_failed,
                                                  len(results), line='-' * 50))

    return num_failed == 0
