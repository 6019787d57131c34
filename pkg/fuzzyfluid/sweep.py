"""Workflow comparing cutoff runs with the classical run, as a shrinks"""

import warnings
from os.path import join as pjoin

import numpy as np

from fuzzyfluid import config as cfg
from fuzzyfluid.base import BaseWorkflow
from fuzzyfluid.dynamics import limit_sweep
from fuzzyfluid.io import save_config, write_csv
from fuzzyfluid.utils import check_a_list, check_num_procs


class SweepWorkflow(BaseWorkflow):
    """
    Runs the initial state of a config at every cutoff in a_list and at a = 0,
    and tabulates the distance of the final states to the classical one.
    """


    def __init__(self, sim_cfg, a_list=cfg.default_sweep_a_list,
                 num_procs=cfg.DEFAULT_NUM_PROCS, out_dir=None):
        if out_dir is None:
            out_dir = sim_cfg.output['out_dir']
        super().__init__(out_dir=out_dir, user_options=sim_cfg)

        self.sim_cfg = sim_cfg
        self.a_list = a_list
        self.num_procs = num_procs
        self.results = None


    def _prepare(self):
        self.a_list = check_a_list(self.a_list)
        self.num_procs = check_num_procs(self.num_procs)

        fuzzy = self.sim_cfg.fuzzy
        self.state0 = self.sim_cfg.initial_state(fuzzy.make_grid())
        self._out_path = pjoin(self.out_dir, cfg.sweep_file_name)
        self._config_path = pjoin(self.out_dir, cfg.resolved_config_file_name)

        super()._prepare()


    def _summarize_expt(self):
        fuzzy = self.sim_cfg.fuzzy
        self._print_header('LIMIT SWEEP')
        print('Cutoff values a            : {}'.format(', '.join(map(str, self.a_list))))
        print('Lattice spacing h, kmax    : {}, {}'.format(fuzzy.h, fuzzy.kmax))
        print('Pairing                    : {}'.format(fuzzy.pairing))
        print('dt, t_end                  : {}, {}'.format(fuzzy.dt, fuzzy.t_end))
        print('Number of processors       : {}\n'.format(self.num_procs))


    def _run(self):
        save_config(self.sim_cfg, self._config_path)
        self.results = limit_sweep(self.state0, self.sim_cfg.fuzzy, self.a_list,
                                   num_procs=self.num_procs,
                                   tolerances=self.sim_cfg.tolerances)


    def save(self):
        path = write_csv(self._out_path, cfg.sweep_columns, self.results.to_array())
        return dict(sweep=path, config=self._config_path)


    def summarize(self):
        self._print_header('SUMMARY')
        print(self.results)

        fuzzy_rows = self.results.to_array()[1:]
        distances = fuzzy_rows[fuzzy_rows[:, 0] > 0.0, 1]
        if distances.size > 1 and np.any(np.diff(distances) >= 0.0):
            warnings.warn('Distance to the classical run does not decrease '
                          'monotonically over the sweep.')


def sweep(sim_cfg, a_list=cfg.default_sweep_a_list, num_procs=cfg.DEFAULT_NUM_PROCS,
          out_dir=None):
    """Runs the sweep workflow, returning the paths written."""

    return SweepWorkflow(sim_cfg, a_list=a_list, num_procs=num_procs,
                         out_dir=out_dir).run()
