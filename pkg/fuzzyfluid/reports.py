"""
Shell-binned energy spectrum of a state, exported as plot-ready CSV.

"""

from os.path import basename, dirname, join as pjoin, realpath, splitext

import numpy as np

from fuzzyfluid import config as cfg
from fuzzyfluid.base import BaseWorkflow
from fuzzyfluid.dynamics import FuzzyConfig, node_energies
from fuzzyfluid.io import load_snapshot, write_csv


def shell_spectrum(state, fuzzy_cfg):
    """
    Bins the node contributions to H by |k_m| into shells of width h.

    Shell s collects the nodes with (s - 1/2) h <= |k| < (s + 1/2) h.

    Returns
    -------
    shells : ndarray of int

    k_center : ndarray
        s * h

    energy : ndarray
        sums to the Hamiltonian of the state

    """

    grid = state.grid
    energies = node_energies(state, fuzzy_cfg)
    radius = np.linalg.norm(grid.nodes, axis=1) / grid.h
    shell_of_node = np.floor(radius + 0.5).astype(np.int64)

    num_shells = int(shell_of_node.max()) + 1
    energy = np.bincount(shell_of_node, weights=energies, minlength=num_shells)
    shells = np.arange(num_shells)

    return shells, grid.h * shells, energy


def export_spectrum(path, shells, k_center, energy):
    rows = np.column_stack((shells, k_center, energy))
    return write_csv(path, cfg.spectrum_columns, rows)


class SpectrumWorkflow(BaseWorkflow):
    """Energy spectrum of a saved snapshot."""


    def __init__(self, snapshot_path, out_dir=None):
        snapshot_path = realpath(snapshot_path)
        if out_dir is None:
            out_dir = dirname(snapshot_path)
        super().__init__(out_dir=out_dir)

        self.snapshot_path = snapshot_path
        self.shells = self.k_center = self.energy = None


    def _prepare(self):
        self.state, pairing = load_snapshot(self.snapshot_path)
        grid = self.state.grid
        self.fuzzy_cfg = FuzzyConfig(a=grid.a, h=grid.h, kmax=grid.kmax,
                                     pairing=pairing)

        stem = splitext(basename(self.snapshot_path))[0]
        self._out_path = pjoin(self.out_dir, stem + cfg.spectrum_suffix)

        super()._prepare()


    def _summarize_expt(self):
        grid = self.state.grid
        self._print_header('SPECTRUM')
        print('Snapshot                   : {}'.format(self.snapshot_path))
        print('Time                       : {}'.format(self.state.t))
        print('a, h, kmax                 : {}, {}, {}'.format(grid.a, grid.h, grid.kmax))
        print('Pairing                    : {}\n'.format(self.fuzzy_cfg.pairing))


    def _run(self):
        self.shells, self.k_center, self.energy = shell_spectrum(self.state,
                                                                 self.fuzzy_cfg)


    def save(self):
        path = export_spectrum(self._out_path, self.shells, self.k_center, self.energy)
        print('Exporting {:<40} .. {}'.format('shell spectrum', 'Done.'))
        return dict(spectrum=path)


    def summarize(self):
        self._print_header('SUMMARY')
        for shell, k_c, energy in zip(self.shells, self.k_center, self.energy):
            print('shell {:>3}  |k| ~ {:<8.4g} energy {:.6e}'.format(shell, k_c, energy))
        print('total energy {:.10g}'.format(float(np.sum(self.energy))))


def spectrum(snapshot_path, out_dir=None):
    """Runs the spectrum workflow, returning the paths written."""

    return SpectrumWorkflow(snapshot_path, out_dir=out_dir).run()
