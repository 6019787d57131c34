import warnings

import numpy as np
import pytest
from scipy.linalg import block_diag, expm

from fuzzyfluid import config as cfg
from fuzzyfluid.classical import (classical_hamiltonian, classical_rhs_arrays,
                                  node_energies as classical_node_energies)
from fuzzyfluid.dynamics import (FuzzyConfig, aliasing_loss, build_wfield, diagnose,
                                 fuzzy_hamiltonian, fuzzy_rhs,
                                 fuzzy_rhs_arrays, limit_sweep, node_energies, run,
                                 select_rhs, step_rk4)
from fuzzyfluid.exceptions import ConfigError, NonFiniteError
from fuzzyfluid.modes import (ClebschState, random_state, reality_residual,
                              state_distance, zero_state)
from fuzzyfluid.tests._test_utils import raise_if_differs, raise_if_ratio_outside
from fuzzyfluid.verify import (brute_force_hamiltonian, check_rhs_reality,
                               gradient_error)

rng = np.random.default_rng(cfg.SEED_RANDOM)
cutoff = 0.2
num_random_states = 100


def make_config(a=cutoff, kmax=2.0, **kwargs):
    return FuzzyConfig(a=a, h=1.0, kmax=kmax, **kwargs)


def make_state(fuzzy_cfg, seed=13, amplitude=1.0, kcut=None):
    return random_state(fuzzy_cfg.make_grid(), seed=seed, amplitude=amplitude,
                        kcut=kcut)


def test_config_validation():

    invalid = (dict(a=-0.1), dict(a=np.inf), dict(h=0.0), dict(h='one'),
               dict(kmax=-2.0), dict(pairing='frobenius'), dict(dt=0.0),
               dict(t_end=-1.0), dict(integrator='euler'))
    for overrides in invalid:
        params = dict(a=cutoff, h=1.0, kmax=2.0)
        params.update(overrides)
        with pytest.raises(ConfigError) as exc_info:
            FuzzyConfig(**params)
        if exc_info.value.key != list(overrides)[0]:
            raise ValueError('ConfigError for {} names key {}'
                             ''.format(overrides, exc_info.value.key))

    with pytest.raises(ConfigError) as exc_info:
        FuzzyConfig(a=0.0, h=1.0, kmax=0.5)
    assert exc_info.value.key == 'kmax'

    # products of in-band momenta must stay away from the antipode
    with pytest.raises(ConfigError) as exc_info:
        FuzzyConfig(a=0.5, h=1.0, kmax=2.0)
    assert exc_info.value.key == 'a'

    fuzzy_cfg = FuzzyConfig(a=0, h=1, kmax=2, pairing='CHART_DOT', integrator='RK4')
    if fuzzy_cfg.pairing != cfg.pairing_chart_dot or fuzzy_cfg.integrator != 'rk4' \
        or not isinstance(fuzzy_cfg.a, float):
        raise ValueError('config values were not normalized: {}'.format(fuzzy_cfg))
    if set(fuzzy_cfg.to_dict()) != {'a', 'h', 'kmax', 'pairing', 'dt', 't_end',
                                    'integrator'}:
        raise ValueError('unexpected keys in {}'.format(fuzzy_cfg.to_dict()))


@pytest.mark.parametrize('pairing', cfg.pairing_choices)
def test_classical_equivalence_at_zero_cutoff(pairing):

    fuzzy_cfg = make_config(a=0.0, kmax=3.0, pairing=pairing)
    for seed in range(num_random_states):
        state = make_state(fuzzy_cfg, seed=seed)

        energy = classical_hamiltonian(state)
        raise_if_differs(fuzzy_hamiltonian(state, fuzzy_cfg), energy,
                         cfg.default_tolerances['equivalence'],
                         'H at a = 0, seed {}'.format(seed))
        raise_if_differs(node_energies(state, fuzzy_cfg),
                         classical_node_energies(state), 1e-12,
                         'node energies at a = 0, seed {}'.format(seed))

        lam, mu = state.lam.amplitudes, state.mu.amplitudes
        expected = np.concatenate(classical_rhs_arrays(state.grid, lam, mu))
        computed = np.concatenate(fuzzy_rhs_arrays(state.grid, lam, mu, pairing))
        raise_if_differs(computed, expected, 1e-12, 'rhs at a = 0, seed {}'.format(seed))


@pytest.mark.parametrize('pairing', cfg.pairing_choices)
def test_rhs_tends_to_classical_rhs(pairing):

    classical_cfg = make_config(a=0.0, kmax=3.0, pairing=pairing)
    state = make_state(classical_cfg, seed=42, amplitude=0.1, kcut=classical_cfg.kmax)
    lam, mu = state.lam.amplitudes, state.mu.amplitudes

    expected = np.concatenate(classical_rhs_arrays(state.grid, lam, mu))
    scale = np.max(np.abs(expected))
    classical_loss = aliasing_loss(state, classical_cfg)

    errors = list()
    for a in (1e-2, 1e-4, 1e-6, 1e-8):
        fuzzy_cfg = make_config(a=a, kmax=3.0, pairing=pairing)
        grid = fuzzy_cfg.make_grid()
        computed = np.concatenate(fuzzy_rhs_arrays(grid, lam, mu, pairing))
        errors.append(np.max(np.abs(computed - expected)) / scale)

        loss = aliasing_loss(ClebschState.from_arrays(grid, lam, mu), fuzzy_cfg)
        if abs(loss - classical_loss) > max(100.0 * a, 1e-12):
            raise ArithmeticError('aliasing loss {:.6g} at a = {} is far from {:.6g} '
                                  'at a = 0'.format(loss, a, classical_loss))

    for coarse, fine in zip(errors[:-1], errors[1:]):
        if fine > 0.1 * coarse:
            raise ArithmeticError('rhs does not approach the classical rhs: {}'
                                  ''.format(errors))
    if errors[-1] > 1e-6:
        raise ArithmeticError('rhs at a = 1e-8 differs from the classical rhs by '
                              '{:.3e}'.format(errors[-1]))


@pytest.mark.parametrize('pairing', cfg.pairing_choices)
@pytest.mark.parametrize('a', (0.0, 0.05, cutoff))
def test_rhs_is_hamiltonian_gradient(pairing, a):

    fuzzy_cfg = make_config(a=a, kmax=1.5, pairing=pairing)
    state = make_state(fuzzy_cfg, seed=int(rng.integers(1000)), kcut=fuzzy_cfg.kmax)

    error = gradient_error(state, fuzzy_cfg, rng, num_directions=5)
    if error > cfg.default_tolerances['gradient']:
        raise ArithmeticError('rhs differs from the gradient of H by {:.3e}'
                              ''.format(error))


@pytest.mark.parametrize('pairing', cfg.pairing_choices)
@pytest.mark.parametrize('kmax', (1.0, 1.5, 2.0))
def test_brute_force_hamiltonian(pairing, kmax):

    fuzzy_cfg = make_config(kmax=kmax, pairing=pairing)
    state = make_state(fuzzy_cfg, seed=int(rng.integers(1000)), kcut=kmax)

    expected = brute_force_hamiltonian(state, fuzzy_cfg)
    raise_if_differs(fuzzy_hamiltonian(state, fuzzy_cfg), expected,
                     cfg.default_tolerances['brute_force'], 'factorized vs brute force')


def test_energy_is_non_negative():

    fuzzy_cfg = make_config()
    for seed in range(10):
        state = make_state(fuzzy_cfg, seed=seed, kcut=fuzzy_cfg.kmax)
        energy = fuzzy_hamiltonian(state, fuzzy_cfg)
        if energy < 0.0 or np.any(node_energies(state, fuzzy_cfg) < -1e-14 * energy):
            raise ArithmeticError('negative energy for seed {}'.format(seed))


@pytest.mark.parametrize('pairing', cfg.pairing_choices)
def test_energy_is_conserved_by_the_flow(pairing):

    fuzzy_cfg = make_config(pairing=pairing)
    state = make_state(fuzzy_cfg, seed=29)
    lam, mu = state.lam.amplitudes, state.mu.amplitudes
    dlam, dmu = fuzzy_rhs_arrays(state.grid, lam, mu, pairing)

    def energy_at(shift):
        return fuzzy_hamiltonian(ClebschState.from_arrays(state.grid, lam + shift * dlam,
                                                          mu + shift * dmu), fuzzy_cfg)

    rhs_norm = np.sqrt(np.sum(np.abs(dlam) ** 2 + np.abs(dmu) ** 2))
    eps = 1e-6 * np.sqrt(np.sum(np.abs(lam) ** 2 + np.abs(mu) ** 2)) / rhs_norm
    rate = (energy_at(eps) - energy_at(-eps)) / (2.0 * eps)

    grid = state.grid
    grad_norm = np.sqrt(np.sum(np.abs(grid.weights * dmu) ** 2
                               + np.abs(grid.weights * dlam) ** 2))
    if abs(rate) > 1e-7 * grad_norm * rhs_norm:
        raise ArithmeticError('H changes along its own flow: dH/dt = {:.3e}'
                              ''.format(rate))


def test_rhs_preserves_reality():

    residual = check_rhs_reality(rng)
    if residual > cfg.default_tolerances['reality']:
        raise ArithmeticError('rhs of a real state is not real: {:.3e}'.format(residual))

    fuzzy_cfg = make_config()
    dlam, dmu = fuzzy_rhs(make_state(fuzzy_cfg, seed=4), fuzzy_cfg)
    if max(reality_residual(dlam), reality_residual(dmu)) > 1e-10:
        raise ArithmeticError('rhs of a real state is not real')


def test_zero_state_is_at_rest():

    fuzzy_cfg = make_config(t_end=0.03)
    state = zero_state(fuzzy_cfg.make_grid())

    if fuzzy_hamiltonian(state, fuzzy_cfg) != 0.0:
        raise ArithmeticError('zero state carries energy')
    if np.any(build_wfield(state, fuzzy_cfg).values != 0.0):
        raise ArithmeticError('zero state has a nonzero W-field')
    dlam, dmu = fuzzy_rhs(state, fuzzy_cfg)
    if np.any(dlam.amplitudes != 0.0) or np.any(dmu.amplitudes != 0.0):
        raise ArithmeticError('zero state is not stationary')

    records, final = run(state, fuzzy_cfg)
    if state_distance(final, state) != 0.0 or records.energy_drift() != 0.0:
        raise ArithmeticError('zero state moved')


def test_wfield_dimension():

    for pairing, dim in cfg.pairing_factor_dim.items():
        fuzzy_cfg = make_config(pairing=pairing)
        wfield = build_wfield(make_state(fuzzy_cfg), fuzzy_cfg)
        if wfield.dim != dim or wfield.values.shape[0] != wfield.grid.num_nodes:
            raise ValueError('W-field has shape {} for {}'
                             ''.format(wfield.values.shape, pairing))


def test_state_must_match_config():

    fuzzy_cfg = make_config()
    with pytest.raises(ValueError):
        fuzzy_hamiltonian(make_state(make_config(a=0.1)), fuzzy_cfg)
    with pytest.raises(ValueError):
        run(make_state(make_config(kmax=1.5)), fuzzy_cfg)


def _to_real(lam, mu):
    return np.concatenate((lam.real, lam.imag, mu.real, mu.imag))


def _from_real(values, num):
    return (values[:num] + 1j * values[num:2 * num],
            values[2 * num:3 * num] + 1j * values[3 * num:])


def test_rk4_matches_exponential_of_linearized_flow():

    fuzzy_cfg = make_config(kmax=1.5)
    grid = fuzzy_cfg.make_grid()
    num = grid.num_nodes
    background = make_state(fuzzy_cfg, seed=17, kcut=fuzzy_cfg.kmax)
    x0 = _to_real(background.lam.amplitudes, background.mu.amplitudes)

    def real_rhs(values):
        dlam, dmu = fuzzy_rhs_arrays(grid, *_from_real(values, num), fuzzy_cfg.pairing)
        return _to_real(dlam, dmu)

    step = 1e-6
    columns = list()
    for col in range(x0.size):
        shift = np.zeros_like(x0)
        shift[col] = step
        columns.append((real_rhs(x0 + shift) - real_rhs(x0 - shift)) / (2.0 * step))
    jacobian = np.column_stack(columns)

    # the linearized flow commutes with the mirror conjugation
    mirror = np.eye(num)[grid.mirror]
    conjugation = block_diag(mirror, -mirror, mirror, -mirror)
    jacobian = 0.5 * (jacobian + conjugation @ jacobian @ conjugation)

    def linearized_rhs(_grid, lam, mu):
        return _from_real(jacobian @ _to_real(lam, mu), num)

    start = make_state(fuzzy_cfg, seed=18, kcut=fuzzy_cfg.kmax)
    y0 = _to_real(start.lam.amplitudes, start.mu.amplitudes)
    spectral_norm = np.linalg.norm(jacobian, 2)

    errors = list()
    for dt in (0.05 / spectral_norm, 0.025 / spectral_norm):
        stepped = step_rk4(start, fuzzy_cfg, rhs=linearized_rhs, dt=dt)
        computed = _to_real(stepped.lam.amplitudes, stepped.mu.amplitudes)
        errors.append(np.linalg.norm(computed - expm(dt * jacobian) @ y0))

    # local error of a fourth-order method scales as dt^5
    raise_if_ratio_outside(errors[0] / errors[1], 28.0, 36.0, 'RK4 local error')

    zero = zero_state(grid)
    if np.any(step_rk4(zero, fuzzy_cfg).lam.amplitudes != 0.0):
        raise ArithmeticError('zero state must stay at rest over one step')


def test_energy_drift_converges():

    drifts = list()
    for dt in (0.01, 0.005):
        fuzzy_cfg = make_config(dt=dt, t_end=0.1)
        records, _ = run(make_state(fuzzy_cfg, seed=8, amplitude=0.3), fuzzy_cfg)
        drifts.append(records.energy_drift())

    if drifts[1] <= 0.0 or drifts[0] / drifts[1] < 11.2:
        raise ArithmeticError('energy drift {} does not shrink as dt^4'.format(drifts))


def test_state_converges_with_dt():

    finals = list()
    for dt in (0.02, 0.01, 0.0025):
        fuzzy_cfg = make_config(dt=dt, t_end=0.1)
        finals.append(run(make_state(fuzzy_cfg, seed=8, amplitude=0.3), fuzzy_cfg)[1])

    coarse = state_distance(finals[0], finals[2])
    fine = state_distance(finals[1], finals[2])
    raise_if_ratio_outside(coarse / fine, 12.0, 20.0, 'RK4 global error')


def test_reference_run_conserves_energy_and_reality():

    fuzzy_cfg = make_config(kmax=3.0, dt=1e-3, t_end=0.5)
    records, final = run(make_state(fuzzy_cfg, seed=42, amplitude=0.1), fuzzy_cfg)

    if abs(final.t - 0.5) > 1e-15 or len(records) != 501:
        raise ValueError('reference run did not reach t_end in 500 steps')
    if records.energy_drift() > cfg.default_tolerances['energy_drift']:
        raise ArithmeticError('relative energy drift {:.3e} over the reference run'
                              ''.format(records.energy_drift()))
    if records.max_reality_residual() > cfg.default_tolerances['reality']:
        raise ArithmeticError('reality residual {:.3e} over the reference run'
                              ''.format(records.max_reality_residual()))


def test_pairings_differ_at_second_order():

    distances = list()
    for a in (0.0125, 0.00625, 0.003125):
        finals = list()
        for pairing in cfg.pairing_choices:
            fuzzy_cfg = make_config(a=a, kmax=3.0, pairing=pairing, dt=0.01, t_end=0.1)
            finals.append(run(make_state(fuzzy_cfg, seed=42, amplitude=0.1),
                              fuzzy_cfg)[1])
        distances.append(state_distance(*finals))

    for coarse, fine in zip(distances[:-1], distances[1:]):
        raise_if_ratio_outside(coarse / fine, 3.5, 4.5, 'distance between pairings')


def test_run_reality_tolerance_is_configurable():

    fuzzy_cfg = make_config(dt=0.01, t_end=0.01)
    state = make_state(fuzzy_cfg, amplitude=0.3)

    def skewed_rhs(grid, lam, mu):
        return np.full_like(lam, 1j), np.zeros_like(mu)

    with pytest.warns(UserWarning, match='Reality projection'):
        run(state, fuzzy_cfg, rhs=skewed_rhs)

    with warnings.catch_warnings():
        warnings.simplefilter('error')
        run(state, fuzzy_cfg, rhs=skewed_rhs, tolerances=dict(reality=1e3))

    with pytest.raises(ValueError):
        run(state, fuzzy_cfg, tolerances=dict(reality=-1.0))


def test_run_zero_duration():

    fuzzy_cfg = make_config(t_end=0.0)
    state = make_state(fuzzy_cfg)
    calls = list()
    records, final = run(state, fuzzy_cfg, callback=lambda step, st: calls.append(step))

    if len(records) != 1 or calls:
        raise ValueError('zero duration must record t0 only')
    if not np.array_equal(final.lam.amplitudes, state.lam.amplitudes):
        raise ValueError('state changed without a step')
    raise_if_differs(records.records[0].H, fuzzy_hamiltonian(state, fuzzy_cfg), 0.0,
                     'recorded H')


def test_run_lands_on_t_end():

    fuzzy_cfg = make_config(dt=0.01, t_end=0.025)
    steps = list()
    records, final = run(make_state(fuzzy_cfg, amplitude=0.3), fuzzy_cfg,
                         callback=lambda step, st: steps.append((step, st.t)))

    if [step for step, _ in steps] != [1, 2, 3] or len(records) != 4:
        raise ValueError('expected 3 steps, got {}'.format(steps))
    raise_if_differs(records.to_array('t'), [0.0, 0.01, 0.02, 0.025], 1e-15, 'times',
                     relative=False)
    if final.t != 0.025:
        raise ValueError('final time {} is not t_end'.format(final.t))


def test_run_is_deterministic():

    fuzzy_cfg = make_config(dt=0.01, t_end=0.03)
    state = make_state(fuzzy_cfg, amplitude=0.3)
    records1, final1 = run(state, fuzzy_cfg)
    records2, final2 = run(state, fuzzy_cfg)

    if not np.array_equal(records1.to_array(), records2.to_array()) \
        or not np.array_equal(final1.mu.amplitudes, final2.mu.amplitudes):
        raise ValueError('repeated runs differ')


def test_classical_run_uses_classical_rhs():

    fuzzy_cfg = make_config(a=0.0, dt=0.01, t_end=0.02)
    if select_rhs(fuzzy_cfg) is not classical_rhs_arrays:
        raise ValueError('a = 0 must integrate the classical equations')

    state = make_state(fuzzy_cfg, amplitude=0.3)
    _, final = run(state, fuzzy_cfg)
    _, explicit = run(state, fuzzy_cfg, rhs=classical_rhs_arrays)
    if not np.array_equal(final.lam.amplitudes, explicit.lam.amplitudes):
        raise ValueError('classical runs differ bit for bit')

    stepped = step_rk4(state, fuzzy_cfg)
    if not np.array_equal(stepped.lam.amplitudes, step_rk4(state, fuzzy_cfg,
                                                           rhs=classical_rhs_arrays
                                                           ).lam.amplitudes):
        raise ValueError('single classical steps differ')


def test_non_finite_run_raises():

    fuzzy_cfg = make_config(dt=0.01, t_end=0.05)
    state = make_state(fuzzy_cfg, amplitude=0.3)

    def broken_rhs(grid, lam, mu):
        return np.full_like(lam, np.nan), np.zeros_like(mu)

    with pytest.raises(NonFiniteError) as exc_info:
        run(state, fuzzy_cfg, rhs=broken_rhs)

    nfe = exc_info.value
    if len(nfe.records) != 1 or nfe.last_state is None:
        raise ValueError('NonFiniteError must carry the last finite state and records')
    if not np.array_equal(nfe.last_state.lam.amplitudes, state.lam.amplitudes):
        raise ValueError('last finite state is not the initial state')


def test_diagnostics_record():

    fuzzy_cfg = make_config()
    state = make_state(fuzzy_cfg)
    record = diagnose(state, fuzzy_cfg)

    if record.column_names() != cfg.diagnostics_columns:
        raise ValueError('record columns differ from the CSV header')
    raise_if_differs(record.H, fuzzy_hamiltonian(state, fuzzy_cfg), 0.0, 'H')
    raise_if_differs(record.L2_lambda, state.lam.norm_sq(), 0.0, 'L2 lambda')
    if record.reality_residual != 0.0 or not np.all(np.isfinite(record.as_row())):
        raise ValueError('unexpected diagnostics {}'.format(record))


def test_aliasing_loss():

    fuzzy_cfg = make_config(a=0.0)
    grid = fuzzy_cfg.make_grid()

    if aliasing_loss(zero_state(grid), fuzzy_cfg) != 0.0:
        raise ValueError('zero state has no pairs to drop')
    if aliasing_loss(make_state(fuzzy_cfg), fuzzy_cfg) != 0.0:
        raise ValueError('modes within kmax/2 must keep every pair in band')

    loss = aliasing_loss(make_state(fuzzy_cfg, kcut=fuzzy_cfg.kmax), fuzzy_cfg)
    if not 0.0 < loss < 1.0:
        raise ValueError('full-band state must lose a fraction of its pairs: {}'
                         ''.format(loss))


def test_limit_sweep_baseline():

    fuzzy_cfg = make_config(a=0.0, dt=0.01, t_end=0.02)
    state = make_state(fuzzy_cfg, amplitude=0.3)
    results = limit_sweep(state, fuzzy_cfg, [0.0])

    table = results.to_array()
    if table.shape != (2, 3) or np.any(table[:, :2] != 0.0):
        raise ValueError('a = 0 must reproduce the classical run exactly: {}'
                         ''.format(table))
    if not np.all(np.isnan(table[:, 2])):
        raise ValueError('rows without a positive a and D carry no order')


def test_limit_sweep_converges():

    fuzzy_cfg = make_config(kmax=3.0, dt=0.01, t_end=0.03)
    state = make_state(fuzzy_cfg, seed=42, amplitude=0.1)
    a_list = (0.2, 0.1, 0.05)
    results = limit_sweep(state, fuzzy_cfg, a_list)

    table = results.to_array()
    if not np.array_equal(table[1:, 0], a_list) or table[0, 1] != 0.0:
        raise ValueError('unexpected sweep rows {}'.format(table))
    distances = table[1:, 1]
    if np.any(distances <= 0.0) or np.any(np.diff(distances) >= 0.0):
        raise ArithmeticError('distance does not shrink with a: {}'.format(distances))
    if np.any(results.orders() < 0.8):
        raise ArithmeticError('empirical orders too low: {}'.format(results.orders()))

    parallel = limit_sweep(state, fuzzy_cfg, a_list, num_procs=2)
    if not np.array_equal(parallel.to_array()[:, :2], table[:, :2]):
        raise ValueError('parallel sweep differs from the serial one')

    with pytest.raises(ValueError):
        limit_sweep(state, fuzzy_cfg, (0.05, 0.1))
    with pytest.raises(ConfigError):
        limit_sweep(state, fuzzy_cfg, (0.6, ))
