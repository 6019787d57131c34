from __future__ import print_function

import argparse
import textwrap
from abc import abstractmethod
from os import getcwd, makedirs
from os.path import realpath

from fuzzyfluid import __version__, config as cfg


class BaseWorkflow(object):
    """Class defining the structure shared by the fuzzyfluid workflows"""


    def __init__(self, out_dir=None, user_options=None):
        """Constructor"""

        if out_dir is None:
            out_dir = getcwd()
        self.out_dir = realpath(out_dir)
        makedirs(self.out_dir, exist_ok=True)

        self.user_options = user_options
        self._out_paths = dict()


    def _prepare(self):
        """Checks in inputs and parameters, and builds what the run needs"""

        self._summarize_expt()


    @abstractmethod
    def _summarize_expt(self):
        """Summarize the experiment for user info"""


    @abstractmethod
    def _run(self):
        """The actual computation"""


    @abstractmethod
    def save(self):
        """Writes the outputs to disk, returning a dict of paths."""


    @abstractmethod
    def summarize(self):
        """Simple summary of the results produced, for logging and user info"""


    def run(self):
        """Full run of workflow"""

        self._prepare()
        print('Saving results to: \n {}\n'.format(self.out_dir))

        self._run()
        self._out_paths = self.save()
        self.summarize()

        print('Results have been saved to \n\t{}'.format(self.out_dir))

        return self._out_paths


    @staticmethod
    def _print_header(title):
        print('\n{}:\n{line}'.format(title, line='-' * 50))


def get_parser():
    """Parser to specify subcommands, arguments and their defaults."""

    help_text_config = textwrap.dedent("""
    Path to the JSON config of the run.

    Required keys: a, h, kmax, dt, t_end, pairing, initial.
    Optional keys: integrator, snapshot_every, output, tolerances.
    See docs/config.rst for the full schema.
    \n \n """)

    help_text_out_dir = textwrap.dedent("""
    Output folder for diagnostics, snapshots and tables.

    Overrides output.out_dir of the config.
    \n \n """)

    help_text_a_list = textwrap.dedent("""
    Strictly decreasing list of cutoff lengths to compare against the classical
    run, e.g. ``--a_list 0.2 0.1 0.05``

    Default: {}
    \n \n """.format(' '.join(str(a) for a in cfg.default_sweep_a_list)))

    help_text_num_procs = textwrap.dedent("""
    Number of CPUs to use to run the cutoff values of the sweep in parallel.

    Default : {}.

    Number of CPUs will be capped at the number available on the machine if higher
    is requested.
    \n \n """.format(cfg.DEFAULT_NUM_PROCS))

    help_text_snapshot = textwrap.dedent("""
    Path to a snapshot JSON written by ``fuzzyfluid simulate``.
    \n \n """)

    help_text_verify_config = textwrap.dedent("""
    Optional config whose "tolerances" block replaces the default thresholds
    of the checks.
    \n \n """)

    help_text_force_fault = textwrap.dedent("""
    Injects a known fault into the classical-limit check, so the suite must fail.
    Used to check that failures are detected and reported.
    \n \n """)

    parser = argparse.ArgumentParser(prog='fuzzyfluid',
                                     formatter_class=argparse.RawTextHelpFormatter,
                                     description='Ideal fluid in Clebsch variables '
                                                 'with SU(2)-valued momenta.')
    parser.add_argument('-v', '--version', action='version',
                        version='fuzzyfluid {}'.format(__version__))

    subparsers = parser.add_subparsers(dest='command', metavar='command')
    subparsers.required = True

    simulate = subparsers.add_parser('simulate', help='run one simulation',
                                     formatter_class=argparse.RawTextHelpFormatter)
    simulate.add_argument('-c', '--config', action='store', dest='config',
                          required=True, help=help_text_config)
    simulate.add_argument('-o', '--out_dir', action='store', dest='out_dir',
                          default=None, help=help_text_out_dir)

    verify = subparsers.add_parser('verify', help='run the embedded invariant suite',
                                   formatter_class=argparse.RawTextHelpFormatter)
    verify.add_argument('--force_fault', action='store_true', dest='force_fault',
                        default=False, help=help_text_force_fault)
    verify.add_argument('-c', '--config', action='store', dest='config',
                        default=None, help=help_text_verify_config)

    sweep = subparsers.add_parser('sweep', help='distance to the classical run '
                                                'as the cutoff shrinks',
                                  formatter_class=argparse.RawTextHelpFormatter)
    sweep.add_argument('-c', '--config', action='store', dest='config',
                       required=True, help=help_text_config)
    sweep.add_argument('-a', '--a_list', action='store', dest='a_list', type=float,
                       nargs='+', default=list(cfg.default_sweep_a_list),
                       help=help_text_a_list)
    sweep.add_argument('-n', '--num_procs', action='store', dest='num_procs',
                       type=int, default=cfg.DEFAULT_NUM_PROCS,
                       help=help_text_num_procs)
    sweep.add_argument('-o', '--out_dir', action='store', dest='out_dir',
                       default=None, help=help_text_out_dir)

    spectrum = subparsers.add_parser('spectrum', help='shell-binned energy spectrum '
                                                      'of a snapshot',
                                     formatter_class=argparse.RawTextHelpFormatter)
    spectrum.add_argument('-s', '--snapshot', action='store', dest='snapshot',
                          required=True, help=help_text_snapshot)
    spectrum.add_argument('-o', '--out_dir', action='store', dest='out_dir',
                          default=None,
                          help='Output folder. Default: folder of the snapshot.')

    return parser
