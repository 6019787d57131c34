"""Workflow running one simulation from a config file"""

import warnings
from os.path import join as pjoin

from fuzzyfluid import config as cfg
from fuzzyfluid.base import BaseWorkflow
from fuzzyfluid.dynamics import run
from fuzzyfluid.exceptions import NonFiniteError
from fuzzyfluid.io import save_config, save_snapshot, write_csv
from fuzzyfluid.results import Trajectory


class SimulationWorkflow(BaseWorkflow):
    """
    One run of the Clebsch dynamics at a fixed cutoff.

    Writes the per-step diagnostics as CSV, periodic and final snapshots as
    JSON, and the fully resolved config next to them.
    """


    def __init__(self, sim_cfg, out_dir=None):
        if out_dir is None:
            out_dir = sim_cfg.output['out_dir']
        super().__init__(out_dir=out_dir, user_options=sim_cfg)

        self.sim_cfg = sim_cfg
        self.fuzzy_cfg = sim_cfg.fuzzy
        self.trajectory = Trajectory()
        self.final_state = None
        self._snapshot_paths = list()


    def _prepare(self):
        self.grid = self.fuzzy_cfg.make_grid()
        self.state0 = self.sim_cfg.initial_state(self.grid)

        output = self.sim_cfg.output
        self._diagnostics_path = pjoin(self.out_dir, output['diagnostics_file'])
        self._config_path = pjoin(self.out_dir, cfg.resolved_config_file_name)

        super()._prepare()


    def _snapshot_path(self, label):
        return pjoin(self.out_dir, '{}_{}.json'.format(self.sim_cfg.output[
                                                           'snapshot_prefix'], label))


    def _summarize_expt(self):
        fuzzy = self.fuzzy_cfg
        self._print_header('CURRENT SIMULATION')
        print('Cutoff length a            : {}'.format(fuzzy.a))
        print('Lattice spacing h          : {}'.format(fuzzy.h))
        print('Momentum radius kmax       : {}  (a*kmax = {:.3g})'
              ''.format(fuzzy.kmax, fuzzy.a_kmax))
        print('Number of nodes            : {}'.format(self.grid.num_nodes))
        print('Pairs clipped at the edge  : {}'.format(self.grid.num_clipped_pairs))
        print('Pairing                    : {}'.format(fuzzy.pairing))
        print('Integrator, dt, t_end      : {}, {}, {}'
              ''.format(fuzzy.integrator, fuzzy.dt, fuzzy.t_end))
        print('Initial condition          : {}'.format(self.sim_cfg.initial['type']))
        print('Snapshot every             : {} steps\n'
              ''.format(self.sim_cfg.snapshot_every))


    def _save_periodic_snapshot(self, step, state):
        every = self.sim_cfg.snapshot_every
        if every > 0 and step % every == 0:
            path = save_snapshot(state, self._snapshot_path('{:06d}'.format(step)),
                                 self.fuzzy_cfg.pairing)
            self._snapshot_paths.append(path)


    def _run(self):
        # resolved config first, so even a failed run is self-describing
        save_config(self.sim_cfg, self._config_path)

        try:
            self.trajectory, self.final_state = run(
                    self.state0, self.fuzzy_cfg, callback=self._save_periodic_snapshot,
                    tolerances=self.sim_cfg.tolerances)
        except NonFiniteError as nfe:
            print('\nIntegration failed: {}\nSaving the last finite state.'
                  ''.format(nfe))
            self.trajectory = Trajectory(nfe.records)
            self.final_state = nfe.last_state
            self.save()
            raise

        max_loss = self.trajectory.max_aliasing_loss()
        if max_loss > self.sim_cfg.tolerances['aliasing_warning']:
            warnings.warn('Up to {:.3g} of the pair amplitude fell outside the grid.'
                          ' Consider a larger kmax or a smaller initial kcut.'
                          ''.format(max_loss))


    def save(self):
        """Diagnostics CSV and the final snapshot."""

        paths = dict(config=self._config_path)
        paths['diagnostics'] = write_csv(self._diagnostics_path,
                                         cfg.diagnostics_columns,
                                         self.trajectory.to_array())
        if self.final_state is not None:
            paths['final_snapshot'] = save_snapshot(
                    self.final_state, self._snapshot_path(cfg.final_snapshot_name),
                    self.fuzzy_cfg.pairing)
        paths['snapshots'] = list(self._snapshot_paths)

        return paths


    def summarize(self):
        self._print_header('SUMMARY')
        print(self.trajectory)

        drift = self.trajectory.energy_drift()
        tol = self.sim_cfg.tolerances['energy_drift']
        if drift > tol:
            warnings.warn('Relative energy drift {:.3e} exceeds {:.1e}; '
                          'consider a smaller dt.'.format(drift, tol))


def simulate(sim_cfg, out_dir=None):
    """Runs the simulation workflow, returning the paths written."""

    return SimulationWorkflow(sim_cfg, out_dir=out_dir).run()
