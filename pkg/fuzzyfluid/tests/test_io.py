import json
from os.path import join as pjoin

import numpy as np
import pytest

from fuzzyfluid import config as cfg
from fuzzyfluid.exceptions import ConfigError
from fuzzyfluid.io import (SimConfig, field_from_dict, field_to_dict, format_csv,
                           load_config, load_snapshot, read_csv, save_config,
                           save_snapshot, write_csv)
from fuzzyfluid.modes import random_state
from fuzzyfluid.tests._test_utils import (grid_19, grid_33, minimal_config,
                                          write_config)


def key_of_error(config, base_dir='.'):
    with pytest.raises(ConfigError) as exc_info:
        SimConfig.from_dict(config, base_dir=base_dir)
    return exc_info.value.key


def test_defaults_are_resolved():

    sim_cfg = SimConfig.from_dict(minimal_config())
    resolved = sim_cfg.to_dict()

    expected_keys = set(cfg.required_config_keys + cfg.optional_config_keys)
    if set(resolved) != expected_keys:
        raise ValueError('resolved config keys {} differ from the schema'
                         ''.format(sorted(resolved)))
    if resolved['integrator'] != cfg.default_integrator \
        or resolved['snapshot_every'] != cfg.default_snapshot_every \
        or resolved['tolerances'] != cfg.default_tolerances:
        raise ValueError('defaults not filled in: {}'.format(resolved))
    if resolved['initial']['kcut'] != 1.0:
        raise ValueError('kcut must default to kmax / 2')

    again = SimConfig.from_dict(resolved).to_dict()
    if again != resolved:
        raise ValueError('resolved config does not reproduce itself')


def test_unknown_and_missing_keys():

    if key_of_error(minimal_config(viscosity=0.1)) != 'viscosity':
        raise ValueError('unknown top-level key not named')

    config = minimal_config()
    del config['dt']
    if key_of_error(config) != 'dt':
        raise ValueError('missing key not named')

    bad_initial = minimal_config(initial=dict(type='random', sigma=2.0))
    if key_of_error(bad_initial) != 'sigma':
        raise ValueError('unknown key of the initial block not named')

    for initial, key in ((dict(type='gaussian'), 'type'), (dict(seed=1), 'type'),
                         (dict(type='modes'), 'modes'),
                         (dict(type='modes', modes=[dict(lam=1.0)]), 'lam'),
                         (dict(type='modes', modes=[dict(mu=1.0)]), 'k'),
                         (dict(type='snapshot'), 'path'),
                         ('random', 'initial')):
        found = key_of_error(minimal_config(initial=initial))
        if found != key:
            raise ValueError('initial {} reported key {}, not {}'
                             ''.format(initial, found, key))


def test_invalid_values():

    for overrides, key in ((dict(a=0.6), 'a'), (dict(a='small'), 'a'),
                           (dict(pairing='frobenius'), 'pairing'),
                           (dict(integrator='euler'), 'integrator'),
                           (dict(kmax=0.5), 'kmax'),
                           (dict(snapshot_every=-1), 'snapshot_every'),
                           (dict(snapshot_every=2.5), 'snapshot_every'),
                           (dict(snapshot_every=True), 'snapshot_every'),
                           (dict(tolerances=dict(energy_drift=-1.0)), 'energy_drift'),
                           (dict(tolerances=dict(drift=1.0)), 'drift'),
                           (dict(output=dict(out_dir='')), 'out_dir'),
                           (dict(output=dict(format='hdf5')), 'format')):
        found = key_of_error(minimal_config(**overrides))
        if found != key:
            raise ValueError('{} reported key {}, not {}'.format(overrides, found, key))

    if not issubclass(ConfigError, ValueError):
        raise TypeError('ConfigError must remain a ValueError')


def test_load_config(tmp_path):

    path = write_config(tmp_path, minimal_config(tolerances=dict(energy_drift=1e-6)))
    sim_cfg = load_config(path)
    if sim_cfg.tolerances['energy_drift'] != 1e-6 or sim_cfg.fuzzy.a != 0.2:
        raise ValueError('config values lost: {}'.format(sim_cfg))

    resolved_path = save_config(sim_cfg, pjoin(str(tmp_path), 'resolved.json'))
    if load_config(resolved_path).to_dict() != sim_cfg.to_dict():
        raise ValueError('saved config does not load back identically')

    broken = pjoin(str(tmp_path), 'broken.json')
    with open(broken, 'w') as broken_file:
        broken_file.write('{"a": 0.2,')
    with pytest.raises(ConfigError):
        load_config(broken)
    with pytest.raises(ConfigError):
        load_config(pjoin(str(tmp_path), 'missing.json'))


def test_initial_conditions(tmp_path):

    sim_cfg = SimConfig.from_dict(minimal_config())
    state1 = sim_cfg.initial_state()
    state2 = sim_cfg.initial_state()
    if not np.array_equal(state1.lam.amplitudes, state2.lam.amplitudes):
        raise ValueError('random initial condition is not reproducible')

    modes = [dict(k=[1, 0, 0], **{'lambda': [0.5, 0.1], 'mu': 0.0}),
             dict(k=[0, 0, 1], mu=1.0)]
    state = SimConfig.from_dict(minimal_config(
            initial=dict(type='modes', modes=modes))).initial_state()
    if np.count_nonzero(state.lam.amplitudes) != 2 \
        or np.count_nonzero(state.mu.amplitudes) != 2:
        raise ValueError('mode list not applied with mirrors')

    off_lattice = SimConfig.from_dict(minimal_config(
            initial=dict(type='modes', modes=[dict(k=[0.5, 0, 0])])))
    with pytest.raises(ConfigError) as exc_info:
        off_lattice.initial_state()
    assert exc_info.value.key == 'modes'

    # snapshot paths resolve relative to the config file
    save_snapshot(state1, pjoin(str(tmp_path), 'start.json'))
    path = write_config(tmp_path, minimal_config(
            initial=dict(type='snapshot', path='start.json')))
    restored = load_config(path).initial_state()
    if not np.array_equal(restored.mu.amplitudes, state1.mu.amplitudes):
        raise ValueError('snapshot initial condition differs')

    other_lattice = write_config(tmp_path, minimal_config(
            kmax=1.5, initial=dict(type='snapshot', path='start.json')), 'other.json')
    with pytest.raises(ConfigError) as exc_info:
        load_config(other_lattice).initial_state()
    assert exc_info.value.key == 'path'

    missing = write_config(tmp_path, minimal_config(
            initial=dict(type='snapshot', path='nowhere.json')), 'missing.json')
    with pytest.raises(ConfigError) as exc_info:
        load_config(missing).initial_state()
    assert exc_info.value.key == 'path'


def test_snapshots(tmp_path):

    state = random_state(grid_33(0.1), seed=9, amplitude=1.0).with_time(0.75)
    path = save_snapshot(state, pjoin(str(tmp_path), 'snap.json'),
                         cfg.pairing_chart_dot)

    loaded, pairing = load_snapshot(path)
    if pairing != cfg.pairing_chart_dot or loaded.t != 0.75 \
        or loaded.grid != state.grid:
        raise ValueError('snapshot meta data lost')
    for restored, original in ((loaded.lam, state.lam), (loaded.mu, state.mu)):
        if not np.array_equal(restored.amplitudes, original.amplitudes):
            raise ValueError('snapshot amplitudes are not restored bit for bit')

    with open(path) as snap_file:
        snapshot = json.load(snap_file)
    if set(snapshot) != {'t', 'pairing', 'lambda', 'mu'} \
        or set(snapshot['mu']) != {'a', 'h', 'kmax', 'nodes', 're', 'im'}:
        raise ValueError('unexpected snapshot layout {}'.format(sorted(snapshot)))

    field_dict = field_to_dict(state.lam)
    with pytest.raises(ValueError):
        field_from_dict(field_dict, grid_19(0.1))
    field_dict.pop('re')
    with pytest.raises(ValueError):
        field_from_dict(field_dict)

    garbage = pjoin(str(tmp_path), 'garbage.json')
    with open(garbage, 'w') as garbage_file:
        garbage_file.write('[1, 2, 3]')
    with pytest.raises(ValueError):
        load_snapshot(garbage)


def test_csv(tmp_path):

    header = ('x', 'y')
    rows = np.array([[0.1, 1.0 / 3.0], [2.0, np.pi]])
    text = format_csv(header, rows)
    if text.splitlines()[0] != 'x,y' or not text.endswith('\n'):
        raise ValueError('unexpected CSV text:\n{}'.format(text))

    path = write_csv(pjoin(str(tmp_path), 'sub', 'table.csv'), header, rows)
    read_header, table = read_csv(path)
    if tuple(read_header) != header or not np.array_equal(table, rows):
        raise ValueError('CSV does not round trip at full precision')

    single = write_csv(pjoin(str(tmp_path), 'single.csv'), header, rows[:1])
    if read_csv(single)[1].shape != (1, 2):
        raise ValueError('single row CSV must read back as a 2D table')
