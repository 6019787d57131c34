"""
Cutoff dynamics: Clebsch flow with momenta on SU(2).

The quartic Hamiltonian is evaluated through the W-field

    W_m = sum_ij w_i w_j lambda_i mu_j cbar_m(i, j) q(k_j),

where cbar_m(i, j) is the CIC deposition of the composed element, averaged
over the two operand orders g_i g_j and g_j g_i, and q factorizes the
regularized pairing, B(g1, g2) = q(k1).q(k2). Then

    H = 1/2 (2 pi)^2 sum_{m != origin} W_m^dagger Pi_m W_m / w_m,
    Pi_m = I - Q_m Q_m^T / |Q_m|^2,  Q_m = q(k_m).

The equations of motion are the exact gradient of this discrete H,

    d mu_n / dt     = -(1/w_n) (d/dRe + i d/dIm)_{lambda_n} H
    d lambda_n / dt = +(1/w_n) (d/dRe + i d/dIm)_{mu_n} H

computed with the transposed deposition, at the same O(N^2) cost.
"""

import warnings
from dataclasses import asdict, dataclass, replace
from multiprocessing import Pool

import numpy as np

from fuzzyfluid import config as cfg
from fuzzyfluid.classical import (classical_hamiltonian, classical_rhs_arrays,
                                  helicity_of, helicity_vector_of,
                                  velocity_from_clebsch, vorticity_from_clebsch)
from fuzzyfluid.exceptions import ConfigError, NonFiniteError
from fuzzyfluid.modes import (ClebschState, ModeField, build_grid, project_state,
                              state_distance, state_reality_residual)
from fuzzyfluid.results import DiagnosticsRecord, SweepResults, Trajectory
from fuzzyfluid.su2 import pairing_factor
from fuzzyfluid.utils import (all_finite, check_a_list, check_cutoff, check_integrator,
                              check_num_procs, check_pairing_choice, check_positive)


@dataclass(frozen=True)
class FuzzyConfig:
    """Run-level parameters of the cutoff dynamics."""

    a: float
    h: float
    kmax: float
    pairing: str = cfg.default_pairing
    dt: float = cfg.default_dt
    t_end: float = cfg.default_t_end
    integrator: str = cfg.default_integrator


    def __post_init__(self):
        checks = (('a', lambda v: check_cutoff(v)),
                  ('h', lambda v: check_positive(v, 'h')),
                  ('kmax', lambda v: check_positive(v, 'kmax')),
                  ('pairing', check_pairing_choice),
                  ('dt', lambda v: check_positive(v, 'dt')),
                  ('t_end', lambda v: check_positive(v, 't_end', allow_zero=True)),
                  ('integrator', check_integrator))
        for name, check in checks:
            try:
                object.__setattr__(self, name, check(getattr(self, name)))
            except (TypeError, ValueError) as exc:
                raise ConfigError('Invalid value for "{}": {}'.format(name, exc),
                                  key=name)

        if self.kmax < self.h:
            raise ConfigError('kmax={} must be >= h={}'.format(self.kmax, self.h),
                              key='kmax')
        if self.a * self.kmax >= 1.0:
            raise ConfigError('a*kmax = {:.4g} must be < 1, so products of two '
                              'in-band momenta stay away from the antipode'
                              ''.format(self.a * self.kmax), key='a')


    @property
    def skip_identity_channel(self):
        return True


    @property
    def a_kmax(self):
        return self.a * self.kmax


    def make_grid(self):
        return build_grid(self.h, self.kmax, self.a)


    def to_dict(self):
        return asdict(self)


class WField(object):
    """Bilinear intermediate W_m of the cutoff Hamiltonian, shape (N, d)."""


    def __init__(self, grid, values, pairing, num_clipped):
        """Constructor."""

        self.grid = grid
        self.values = values
        self.pairing = pairing
        self.num_clipped = num_clipped


    @property
    def dim(self):
        return self.values.shape[1]


    def __repr__(self):
        return 'WField(d={}, {} nodes, {} pairs clipped)' \
               ''.format(self.dim, self.grid.num_nodes, self.num_clipped)


def _check_state_matches(state, fuzzy_cfg):
    grid = state.grid
    if (grid.h, grid.kmax, grid.a) != (fuzzy_cfg.h, fuzzy_cfg.kmax, fuzzy_cfg.a):
        raise ValueError('State grid (h={}, kmax={}, a={}) does not match the '
                         'config (h={}, kmax={}, a={})'
                         ''.format(grid.h, grid.kmax, grid.a, fuzzy_cfg.h,
                                   fuzzy_cfg.kmax, fuzzy_cfg.a))


def _node_factors(grid, pairing):
    return pairing_factor(grid.nodes, grid.a, pairing)


def _wfield_values(grid, lam, mu, factors):
    weighted_lam = grid.weights * lam
    weighted_mu = grid.weights * mu
    num, dim = factors.shape

    pair_values = weighted_lam[:, np.newaxis, np.newaxis] \
                  * (weighted_mu[:, np.newaxis] * factors)[np.newaxis, :, :]

    return grid.symmetric_coupling_matrix @ pair_values.reshape(num * num, dim)


def _project_transverse(factors, values):
    """Pi_m applied to each row; the identity node (Q = 0) is zeroed."""

    q_sq = np.sum(factors ** 2, axis=1)
    active = q_sq > 0.0
    projected = np.zeros_like(values)
    along = np.sum(factors[active] * values[active], axis=1) / q_sq[active]
    projected[active] = values[active] - factors[active] * along[:, np.newaxis]

    return projected


def build_wfield(state, fuzzy_cfg):
    """W-field of a state, deposited at the composed momenta of all node pairs."""

    _check_state_matches(state, fuzzy_cfg)
    grid = state.grid
    factors = _node_factors(grid, fuzzy_cfg.pairing)
    values = _wfield_values(grid, state.lam.amplitudes, state.mu.amplitudes, factors)

    return WField(grid, values, fuzzy_cfg.pairing, grid.num_clipped_pairs)


def node_energies(state, fuzzy_cfg):
    """Contribution of each total-momentum node m to the cutoff Hamiltonian."""

    wfield = build_wfield(state, fuzzy_cfg)
    factors = _node_factors(state.grid, fuzzy_cfg.pairing)
    projected = _project_transverse(factors, wfield.values)
    quad_form = np.real(np.sum(np.conj(wfield.values) * projected, axis=1))

    return 0.5 * cfg.TWO_PI_SQ * quad_form / state.grid.weights


def fuzzy_hamiltonian(state, fuzzy_cfg):
    """Cutoff kinetic energy, H >= 0; equals the classical one at a = 0."""

    return float(np.sum(node_energies(state, fuzzy_cfg)))


def fuzzy_rhs_arrays(grid, lam, mu, pairing):
    """Time derivatives of the raw amplitude arrays (lambda, mu)."""

    factors = _node_factors(grid, pairing)
    num, dim = factors.shape
    wfield = _wfield_values(grid, lam, mu, factors)

    adjoint = cfg.TWO_PI_SQ * _project_transverse(factors, wfield) \
              / grid.weights[:, np.newaxis]
    gathered = (grid.symmetric_coupling_matrix.T @ adjoint).reshape(num, num, dim)
    # kernel[i, j] = q_j . Z[i, j]
    kernel = np.einsum('jd,ijd->ij', factors, gathered)

    weighted_lam_conj = grid.weights * np.conj(lam)
    weighted_mu_conj = grid.weights * np.conj(mu)

    dmu = -(kernel @ weighted_mu_conj)
    dlam = kernel.T @ weighted_lam_conj

    return dlam, dmu


def fuzzy_rhs(state, fuzzy_cfg):
    """
    Hamilton equations of the cutoff theory, as the analytic gradient of the
    discrete ``fuzzy_hamiltonian``.

    Returns
    -------
    (ModeField, ModeField) time derivatives of lambda and mu

    """

    _check_state_matches(state, fuzzy_cfg)
    grid = state.grid
    dlam, dmu = fuzzy_rhs_arrays(grid, state.lam.amplitudes, state.mu.amplitudes,
                                 fuzzy_cfg.pairing)
    return ModeField(grid, dlam), ModeField(grid, dmu)


def select_rhs(fuzzy_cfg):
    """
    Right-hand side on raw arrays, f(grid, lam, mu) -> (dlam, dmu).
    At a = 0 this is the classical advection.
    """

    if fuzzy_cfg.a == 0.0:
        return classical_rhs_arrays

    def rhs(grid, lam, mu):
        return fuzzy_rhs_arrays(grid, lam, mu, fuzzy_cfg.pairing)

    return rhs


def select_hamiltonian(fuzzy_cfg):
    """Energy functional matching ``select_rhs``."""

    if fuzzy_cfg.a == 0.0:
        return classical_hamiltonian

    def hamiltonian(state):
        return fuzzy_hamiltonian(state, fuzzy_cfg)

    return hamiltonian


def aliasing_loss(state, fuzzy_cfg):
    """
    Fraction (in L2 norm) of the pair amplitudes w_i lambda_i w_j mu_j q_j
    discarded because part of the deposition at the composed momentum falls
    on cell corners outside the grid.
    """

    grid = state.grid
    factors = _node_factors(grid, fuzzy_cfg.pairing)
    lam_sq = np.abs(grid.weights * state.lam.amplitudes) ** 2
    mu_sq = np.abs(grid.weights * state.mu.amplitudes) ** 2 \
            * np.sum(factors ** 2, axis=1)

    pair_sq = np.outer(lam_sq, mu_sq).ravel()
    total = np.sum(pair_sq)
    if total <= 0.0:
        return 0.0

    lost = grid.symmetric_lost_weight
    return float(np.sqrt(np.sum(pair_sq * lost ** 2) / total))


def _rk4_update(grid, lam, mu, dt, rhs):
    k1_lam, k1_mu = rhs(grid, lam, mu)
    k2_lam, k2_mu = rhs(grid, lam + 0.5 * dt * k1_lam, mu + 0.5 * dt * k1_mu)
    k3_lam, k3_mu = rhs(grid, lam + 0.5 * dt * k2_lam, mu + 0.5 * dt * k2_mu)
    k4_lam, k4_mu = rhs(grid, lam + dt * k3_lam, mu + dt * k3_mu)

    new_lam = lam + (dt / 6.0) * (k1_lam + 2.0 * k2_lam + 2.0 * k3_lam + k4_lam)
    new_mu = mu + (dt / 6.0) * (k1_mu + 2.0 * k2_mu + 2.0 * k3_mu + k4_mu)

    return new_lam, new_mu


def step_rk4(state, fuzzy_cfg, rhs=None, dt=None):
    """
    One classical Runge-Kutta step, followed by the reality projection.

    Parameters
    ----------
    state : ClebschState

    fuzzy_cfg : FuzzyConfig

    rhs : callable, optional
        f(grid, lam, mu) -> (dlam, dmu) on raw arrays.
        Defaults to ``select_rhs(fuzzy_cfg)``.

    dt : float, optional
        Step size, defaults to fuzzy_cfg.dt

    """

    if rhs is None:
        rhs = select_rhs(fuzzy_cfg)
    if dt is None:
        dt = fuzzy_cfg.dt

    new_lam, new_mu = _rk4_update(state.grid, state.lam.amplitudes,
                                  state.mu.amplitudes, dt, rhs)
    stepped = ClebschState.from_arrays(state.grid, new_lam, new_mu, state.t + dt)

    return project_state(stepped)


def diagnose(state, fuzzy_cfg, reality_residual=None, hamiltonian=None):
    """Conserved and structural quantities of a state, as one record."""

    if hamiltonian is None:
        hamiltonian = select_hamiltonian(fuzzy_cfg)
    if reality_residual is None:
        reality_residual = state_reality_residual(state)

    velocity = velocity_from_clebsch(state)
    vorticity = vorticity_from_clebsch(state)
    helicity_vec = helicity_vector_of(velocity, vorticity)

    return DiagnosticsRecord(t=state.t,
                             H=hamiltonian(state),
                             L2_lambda=state.lam.norm_sq(),
                             L2_mu=state.mu.norm_sq(),
                             reality_residual=reality_residual,
                             aliasing_loss=aliasing_loss(state, fuzzy_cfg),
                             helicity_scalar=helicity_of(velocity, vorticity),
                             helicity_x=helicity_vec[0],
                             helicity_y=helicity_vec[1],
                             helicity_z=helicity_vec[2])


def _tolerance(tolerances, key):
    if tolerances is not None and key in tolerances:
        return check_positive(tolerances[key], key)
    return cfg.default_tolerances[key]


def _num_steps(fuzzy_cfg):
    return int(np.ceil(fuzzy_cfg.t_end / fuzzy_cfg.dt - cfg.LATTICE_SNAP_TOL))


def run(state0, fuzzy_cfg, callback=None, rhs=None, tolerances=None):
    """
    Integrates from state0 up to t0 + t_end, recording diagnostics at t0 and
    after every step.

    Parameters
    ----------
    state0 : ClebschState
        Initial state, on the grid described by fuzzy_cfg

    fuzzy_cfg : FuzzyConfig

    callback : callable, optional
        Called as callback(step_index, state) after every step

    rhs : callable, optional
        Override of the right-hand side, see ``step_rk4``

    tolerances : dict, optional
        Overrides of the default tolerances; the "reality" entry bounds the
        projection applied after each step before a warning is issued

    Returns
    -------
    records : Trajectory

    final_state : ClebschState

    Raises
    ------
    NonFiniteError
        carrying the last finite state and the records so far

    """

    _check_state_matches(state0, fuzzy_cfg)
    if rhs is None:
        rhs = select_rhs(fuzzy_cfg)
    hamiltonian = select_hamiltonian(fuzzy_cfg)

    grid = state0.grid
    tol_reality = _tolerance(tolerances, 'reality')
    num_steps = _num_steps(fuzzy_cfg)
    t_start = state0.t

    state = project_state(state0)
    records = Trajectory([diagnose(state, fuzzy_cfg, state_reality_residual(state0),
                                   hamiltonian)],
                         meta=fuzzy_cfg.to_dict())

    for step in range(1, num_steps + 1):
        if step < num_steps:
            dt_step = fuzzy_cfg.dt
            t_next = t_start + step * fuzzy_cfg.dt
        else:
            # last step lands exactly on t_end
            dt_step = fuzzy_cfg.t_end - (num_steps - 1) * fuzzy_cfg.dt
            t_next = t_start + fuzzy_cfg.t_end
        new_lam, new_mu = _rk4_update(grid, state.lam.amplitudes, state.mu.amplitudes,
                                      dt_step, rhs)
        if not all_finite(new_lam, new_mu):
            raise NonFiniteError('Non-finite amplitudes at step {} (t={:.6g})'
                                 ''.format(step, t_next),
                                 last_state=state, records=records)

        stepped = ClebschState.from_arrays(grid, new_lam, new_mu, t_next)
        residual = state_reality_residual(stepped)
        if residual > tol_reality:
            warnings.warn('Reality projection of size {:.3g} at t={:.6g} exceeds '
                          '{:.1g}'.format(residual, t_next, tol_reality))

        state = project_state(stepped)
        record = diagnose(state, fuzzy_cfg, residual, hamiltonian)
        if not np.isfinite(record.H):
            raise NonFiniteError('Non-finite energy at step {} (t={:.6g})'
                                 ''.format(step, t_next),
                                 last_state=state, records=records)
        records.add(record)

        if callback is not None:
            callback(step, state)

    return records, state


def _final_amplitudes(args):
    """Worker for the sweep: runs one cutoff value, returns raw final amplitudes."""

    fuzzy_cfg, lam0, mu0, tolerances = args
    grid = fuzzy_cfg.make_grid()
    _, final = run(ClebschState.from_arrays(grid, lam0, mu0), fuzzy_cfg,
                   tolerances=tolerances)

    return final.lam.amplitudes.copy(), final.mu.amplitudes.copy()


def limit_sweep(state0, fuzzy_cfg, a_list, num_procs=cfg.DEFAULT_NUM_PROCS,
                tolerances=None):
    """
    Distance at t_end between cutoff runs and the classical run, over
    decreasing values of a on a fixed lattice, dt and t_end.

    Parameters
    ----------
    state0 : ClebschState
        Initial amplitudes, shared by every run (only the weights change with a)

    fuzzy_cfg : FuzzyConfig
        Fixes h, kmax, dt, t_end and the pairing; its own value of a is ignored

    a_list : sequence of float
        Strictly decreasing cutoff values

    num_procs : int
        Number of processes running the cutoff values in parallel

    tolerances : dict, optional
        Passed on to every run, see ``run``

    Returns
    -------
    SweepResults
        Classical baseline row first, then one row per value of a, with the
        empirical order log(D_prev/D)/log(a_prev/a).

    """

    a_list = check_a_list(a_list)
    num_procs = check_num_procs(num_procs)

    lam0 = np.array(state0.lam.amplitudes)
    mu0 = np.array(state0.mu.amplitudes)

    classical_cfg = replace(fuzzy_cfg, a=0.0)
    for a in a_list:
        replace(fuzzy_cfg, a=a)  # validates a*kmax before any run starts

    jobs = [(classical_cfg, lam0, mu0, tolerances)] \
           + [(replace(fuzzy_cfg, a=a), lam0, mu0, tolerances) for a in a_list]
    if num_procs > 1:
        print('Running {} sweep values with {} processes ...'
              ''.format(len(jobs), num_procs))
        with Pool(processes=num_procs) as pool:
            finals = pool.map(_final_amplitudes, jobs)
    else:
        finals = [_final_amplitudes(job) for job in jobs]

    classical_grid = classical_cfg.make_grid()
    classical_final = ClebschState.from_arrays(classical_grid, *finals[0])

    results = SweepResults(fuzzy_cfg.pairing, fuzzy_cfg.h, fuzzy_cfg.kmax,
                           fuzzy_cfg.dt, fuzzy_cfg.t_end)
    results.add(0.0, 0.0)
    for a, (lam, mu) in zip(a_list, finals[1:]):
        final = ClebschState.from_arrays(classical_grid, lam, mu)
        results.add(a, state_distance(final, classical_final))

    return results
