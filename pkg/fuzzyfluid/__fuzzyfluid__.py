import sys
from datetime import datetime

from fuzzyfluid import __version__, config as cfg
from fuzzyfluid.base import get_parser
from fuzzyfluid.exceptions import ConfigError, NonFiniteError
from fuzzyfluid.utils import check_a_list


def _simulate(user_args):
    from fuzzyfluid.io import load_config
    from fuzzyfluid.simulate import simulate

    simulate(load_config(user_args.config), out_dir=user_args.out_dir)
    return cfg.EXIT_SUCCESS


def _verify(user_args):
    from fuzzyfluid.io import load_config
    from fuzzyfluid.verify import verify

    tolerances = None
    if user_args.config is not None:
        tolerances = load_config(user_args.config).tolerances

    passed = verify(force_fault=user_args.force_fault, tolerances=tolerances)
    return cfg.EXIT_SUCCESS if passed else cfg.EXIT_VERIFY_FAILED


def _sweep(user_args):
    from fuzzyfluid.io import load_config
    from fuzzyfluid.sweep import sweep

    try:
        a_list = check_a_list(user_args.a_list)
    except ValueError as exc:
        raise ConfigError('Invalid --a_list: {}'.format(exc), key='a_list')

    sweep(load_config(user_args.config), a_list=a_list,
          num_procs=user_args.num_procs, out_dir=user_args.out_dir)
    return cfg.EXIT_SUCCESS


def _spectrum(user_args):
    from fuzzyfluid.reports import spectrum

    try:
        spectrum(user_args.snapshot, out_dir=user_args.out_dir)
    except (OSError, ValueError) as exc:
        raise ConfigError('Unable to process snapshot: {}'.format(exc),
                          key='snapshot')
    return cfg.EXIT_SUCCESS


_commands = {'simulate': _simulate,
             'verify'  : _verify,
             'sweep'   : _sweep,
             'spectrum': _spectrum}


def cli(argv=None):
    """
    Parses the arguments and runs the requested subcommand.

    Returns
    -------
    exit_code : int
        0 on success, 1 on a failed verification, 2 on a bad config or input
        file, 3 when the integration produced non-finite values

    """

    parser = get_parser()
    user_args = parser.parse_args(argv)

    print('\nfuzzyfluid version {}'.format(__version__))
    print('\tTime stamp : {}\n'.format(datetime.now().strftime('%Y-%m-%d %H:%M:%S')))

    try:
        return _commands[user_args.command](user_args)
    except ConfigError as cfg_err:
        key_msg = '' if cfg_err.key is None else ' (key: {})'.format(cfg_err.key)
        print('Configuration error{}: {}'.format(key_msg, cfg_err), file=sys.stderr)
        return cfg.EXIT_CONFIG_ERROR
    except NonFiniteError as nfe:
        print('Non-finite values: {}'.format(nfe), file=sys.stderr)
        return cfg.EXIT_NON_FINITE


def main():
    "Entry point."

    sys.exit(cli())


if __name__ == '__main__':
    main()
