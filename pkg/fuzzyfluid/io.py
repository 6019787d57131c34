"""
Reading and writing run configurations, state snapshots and tables.

Configs and snapshots are JSON, time series and tables are CSV. Every file is
written through a temporary file and renamed into place.
"""

import json
from os.path import dirname, isabs, join as pjoin, realpath

import numpy as np

from fuzzyfluid import config as cfg
from fuzzyfluid.dynamics import FuzzyConfig
from fuzzyfluid.exceptions import ConfigError
from fuzzyfluid.modes import (ClebschState, ModeField, build_grid, random_state,
                              state_from_modes)
from fuzzyfluid.utils import atomic_write_text, check_positive, is_iterable_but_not_str


def _reject_unknown(block, allowed, where):
    for key in block:
        if key not in allowed:
            raise ConfigError('Unknown key "{}" in {}. Allowed keys: {}'
                              ''.format(key, where, ', '.join(allowed)), key=key)


def _require_dict(block, where):
    if not isinstance(block, dict):
        raise ConfigError('{} must be a JSON object, not {}'
                          ''.format(where, type(block).__name__), key=where)


def _parse_initial(block, kmax, base_dir):
    """Validates the initial-condition block, filling in defaults."""

    _require_dict(block, 'initial')
    if 'type' not in block:
        raise ConfigError('initial block needs a "type", one of {}'
                          ''.format(cfg.initial_types), key='type')

    init_type = block['type']
    if init_type not in cfg.initial_types:
        raise ConfigError('Initial condition type "{}" not recognized. '
                          'Choose one of {}'.format(init_type, cfg.initial_types),
                          key='type')
    _reject_unknown(block, cfg.initial_keys[init_type], 'initial')

    if init_type == 'random':
        try:
            seed = int(block.get('seed', cfg.default_seed))
            k0 = check_positive(block.get('k0', cfg.default_k0), 'k0')
            amplitude = check_positive(block.get('amplitude', cfg.default_amplitude),
                                       'amplitude', allow_zero=True)
            kcut = block.get('kcut', None)
            kcut = kmax / 2.0 if kcut is None else check_positive(kcut, 'kcut',
                                                                  allow_zero=True)
        except (TypeError, ValueError) as exc:
            raise ConfigError('Invalid random initial condition: {}'.format(exc),
                              key='initial')
        return dict(type='random', seed=seed, k0=k0, amplitude=amplitude, kcut=kcut)

    if init_type == 'modes':
        modes = block.get('modes', None)
        if not is_iterable_but_not_str(modes, min_length=0) or isinstance(modes, dict):
            raise ConfigError('"modes" must be a list of mode entries', key='modes')
        for mode in modes:
            _require_dict(mode, 'mode entry')
            _reject_unknown(mode, cfg.mode_entry_keys, 'mode entry')
            if 'k' not in mode:
                raise ConfigError('Every mode entry needs a momentum "k"', key='k')
        return dict(type='modes', modes=[dict(mode) for mode in modes])

    if 'path' not in block:
        raise ConfigError('Snapshot initial condition needs a "path"', key='path')
    path = block['path']
    if not isabs(path):
        path = pjoin(base_dir, path)
    return dict(type='snapshot', path=realpath(path))


def _parse_tolerances(block):
    _require_dict(block, 'tolerances')
    _reject_unknown(block, tuple(cfg.default_tolerances), 'tolerances')

    tolerances = dict(cfg.default_tolerances)
    for key, value in block.items():
        try:
            tolerances[key] = check_positive(value, key)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc), key=key)

    return tolerances


def _parse_output(block):
    _require_dict(block, 'output')
    _reject_unknown(block, cfg.output_keys, 'output')

    output = dict(out_dir=cfg.output_dir_default,
                  diagnostics_file=cfg.diagnostics_file_name,
                  snapshot_prefix=cfg.snapshot_prefix)
    for key, value in block.items():
        if not isinstance(value, str) or not value:
            raise ConfigError('output.{} must be a non-empty string'.format(key),
                              key=key)
        output[key] = value

    return output


class SimConfig(object):
    """
    Fully resolved simulation config: the dynamics parameters, the initial
    condition, output locations, snapshot cadence and tolerances.
    """


    def __init__(self, fuzzy, initial, integrator=cfg.default_integrator,
                 snapshot_every=cfg.default_snapshot_every, output=None,
                 tolerances=None):
        """Constructor."""

        self.fuzzy = fuzzy
        self.initial = initial
        self.integrator = integrator
        self.snapshot_every = snapshot_every
        self.output = _parse_output(dict() if output is None else output)
        self.tolerances = _parse_tolerances(dict() if tolerances is None
                                            else tolerances)


    @classmethod
    def from_dict(cls, config_dict, base_dir='.'):
        """
        Validates a parsed JSON config. Unknown keys are rejected, at the top
        level and in every nested block.

        Raises
        ------
        ConfigError
            naming the offending key

        """

        _require_dict(config_dict, 'config')
        _reject_unknown(config_dict,
                        cfg.required_config_keys + cfg.optional_config_keys,
                        'config')
        for key in cfg.required_config_keys:
            if key not in config_dict:
                raise ConfigError('Required key "{}" is missing'.format(key), key=key)

        integrator = config_dict.get('integrator', cfg.default_integrator)
        fuzzy = FuzzyConfig(a=config_dict['a'], h=config_dict['h'],
                            kmax=config_dict['kmax'], pairing=config_dict['pairing'],
                            dt=config_dict['dt'], t_end=config_dict['t_end'],
                            integrator=integrator)

        snapshot_every = config_dict.get('snapshot_every', cfg.default_snapshot_every)
        if isinstance(snapshot_every, bool) or not isinstance(snapshot_every, int) \
            or snapshot_every < 0:
            raise ConfigError('snapshot_every must be an integer >= 0 (0 writes only '
                              'the final snapshot)', key='snapshot_every')

        initial = _parse_initial(config_dict['initial'], fuzzy.kmax, base_dir)

        return cls(fuzzy, initial, integrator=fuzzy.integrator,
                   snapshot_every=snapshot_every,
                   output=config_dict.get('output', None),
                   tolerances=config_dict.get('tolerances', None))


    def to_dict(self):
        """Every key, defaults included, so a run is self-describing."""

        return dict(a=self.fuzzy.a,
                    h=self.fuzzy.h,
                    kmax=self.fuzzy.kmax,
                    dt=self.fuzzy.dt,
                    t_end=self.fuzzy.t_end,
                    pairing=self.fuzzy.pairing,
                    initial=dict(self.initial),
                    integrator=self.integrator,
                    snapshot_every=self.snapshot_every,
                    output=dict(self.output),
                    tolerances=dict(self.tolerances))


    def initial_state(self, grid=None):
        """Builds the initial ClebschState on the grid of this config."""

        if grid is None:
            grid = self.fuzzy.make_grid()

        init = self.initial
        if init['type'] == 'random':
            return random_state(grid, seed=init['seed'], k0=init['k0'],
                                amplitude=init['amplitude'], kcut=init['kcut'])

        if init['type'] == 'modes':
            try:
                return state_from_modes(grid, init['modes'])
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError('Invalid mode list: {}'.format(exc), key='modes')

        try:
            state, _ = load_snapshot(init['path'])
        except ValueError as exc:
            raise ConfigError(str(exc), key='path')
        if not np.array_equal(state.grid.lattice, grid.lattice) \
            or state.grid.h != grid.h:
            raise ConfigError('Snapshot {} lives on a different lattice (h={}, '
                              'kmax={}) than the config'
                              ''.format(init['path'], state.grid.h, state.grid.kmax),
                              key='path')

        return ClebschState.from_arrays(grid, state.lam.amplitudes,
                                        state.mu.amplitudes, state.t)


    def __str__(self):
        return 'SimConfig(a={}, h={}, kmax={}, pairing={}, dt={}, t_end={}, ' \
               'initial={})'.format(self.fuzzy.a, self.fuzzy.h, self.fuzzy.kmax,
                                    self.fuzzy.pairing, self.fuzzy.dt,
                                    self.fuzzy.t_end, self.initial['type'])


    def __repr__(self):
        return self.__str__()


def load_config(path):
    """Reads and validates a JSON config; relative paths resolve next to it."""

    path = realpath(path)
    try:
        with open(path, 'r') as cfg_file:
            config_dict = json.load(cfg_file)
    except (OSError, ValueError) as exc:
        raise ConfigError('Unable to read config from {}: {}'.format(path, exc))

    return SimConfig.from_dict(config_dict, base_dir=dirname(path))


def write_json(path, obj):
    text = json.dumps(obj, indent=cfg.JSON_INDENT, allow_nan=False)
    return atomic_write_text(path, text + '\n')


def save_config(sim_cfg, path):
    return write_json(path, sim_cfg.to_dict())


def field_to_dict(field):
    grid = field.grid
    return dict(a=grid.a, h=grid.h, kmax=grid.kmax,
                nodes=grid.lattice.tolist(),
                re=np.real(field.amplitudes).tolist(),
                im=np.imag(field.amplitudes).tolist())


def field_from_dict(field_dict, grid=None):
    """
    Rebuilds a ModeField; the node list must match the deterministic node
    order of the grid implied by (h, kmax).
    """

    try:
        if grid is None:
            grid = build_grid(field_dict['h'], field_dict['kmax'], field_dict['a'])
        nodes = np.asarray(field_dict['nodes'], dtype=np.int64)
        amplitudes = np.asarray(field_dict['re'], dtype=float) \
                     + 1j * np.asarray(field_dict['im'], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError('Malformed mode field: {}'.format(exc))

    if nodes.shape != grid.lattice.shape or not np.array_equal(nodes, grid.lattice):
        raise ValueError('Node list does not match the grid {}'.format(grid))

    return ModeField(grid, amplitudes)


def save_snapshot(state, path, pairing=cfg.default_pairing):
    snapshot = dict(t=state.t, pairing=pairing,
                    **{'lambda': field_to_dict(state.lam), 'mu': field_to_dict(state.mu)})
    return write_json(path, snapshot)


def load_snapshot(path):
    """
    Reads a state snapshot.

    Returns
    -------
    state : ClebschState

    pairing : str
        pairing the state was produced with

    Raises
    ------
    ValueError
        if the file is unreadable or malformed

    """

    try:
        with open(path, 'r') as snap_file:
            snapshot = json.load(snap_file)
        lam_dict = snapshot['lambda']
        grid = build_grid(lam_dict['h'], lam_dict['kmax'], lam_dict['a'])
        lam = field_from_dict(lam_dict, grid)
        mu = field_from_dict(snapshot['mu'], grid)
        t = float(snapshot.get('t', 0.0))
        pairing = snapshot.get('pairing', cfg.default_pairing)
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise ValueError('Unable to read snapshot from {}: {}'.format(path, exc))

    return ClebschState(lam, mu, t), pairing


def format_csv(header, rows):
    """CSV text with full float precision, so reruns compare byte for byte."""

    lines = [cfg.DELIMITER.join(header)]
    for row in rows:
        lines.append(cfg.DELIMITER.join(cfg.EXPORT_FORMAT % value for value in row))

    return '\n'.join(lines) + '\n'


def write_csv(path, header, rows):
    return atomic_write_text(path, format_csv(header, rows))


def read_csv(path):
    """Header and float table of a CSV written by ``write_csv``."""

    with open(path, 'r') as csv_file:
        header = csv_file.readline().strip().split(cfg.DELIMITER)
    table = np.loadtxt(path, delimiter=cfg.DELIMITER, skiprows=1, ndmin=2)

    return header, table
