import os
import tempfile
from collections.abc import Iterable
from multiprocessing import cpu_count
from os.path import dirname, realpath

import numpy as np

from fuzzyfluid import config as cfg


def check_cutoff(a, allow_zero=True):
    "Ensures the cutoff length is a finite non-negative real."

    a = float(a)
    if not np.isfinite(a) or a < 0.0:
        raise ValueError('Cutoff length a must be finite and >= 0, not {}'.format(a))

    if not allow_zero and a == 0.0:
        raise ValueError('This map is undefined at a = 0; use the Euclidean '
                         'limit (plain momenta) instead.')

    return a


def check_positive(value, name, allow_zero=False):
    "Ensures a scalar parameter is finite and positive."

    try:
        value = float(value)
    except (TypeError, ValueError):
        raise TypeError('{} must be a real number, not {}'.format(name, value))

    if not np.isfinite(value):
        raise ValueError('{} must be finite, not {}'.format(name, value))

    if value < 0.0 or (value == 0.0 and not allow_zero):
        raise ValueError('{} must be {}, not {}'
                         ''.format(name, '>= 0' if allow_zero else '> 0', value))

    return value


def check_pairing_choice(choice):
    "Validates the name of the regularized pairing."

    if not isinstance(choice, str) or choice.lower() not in cfg.pairing_choices:
        raise ValueError('Pairing not recognized : {}\n'
                         '\tChoose one of: {}'.format(choice, cfg.pairing_choices))

    return choice.lower()


def check_integrator(name):
    "Validates the name of the time integrator."

    if not isinstance(name, str) or name.lower() not in cfg.integrator_choices:
        raise ValueError('Integrator not recognized : {}\n'
                         '\tChoose one of: {}'.format(name, cfg.integrator_choices))

    return name.lower()


def check_a_list(a_list):
    "Sweep values of the cutoff must be non-negative and sorted descending."

    if not is_iterable_but_not_str(a_list):
        raise ValueError('List of cutoff values must be a non-empty sequence.')

    a_list = [check_cutoff(a) for a in a_list]
    if any(a_next >= a_prev for a_prev, a_next in zip(a_list[:-1], a_list[1:])):
        raise ValueError('Cutoff values must be strictly decreasing: {}'
                         ''.format(a_list))

    return a_list


def check_num_procs(requested_num_procs=cfg.DEFAULT_NUM_PROCS):
    "Ensures num_procs is finite and <= available cpu count."

    num_procs = int(requested_num_procs)
    avail_cpu_count = int(cpu_count())

    if num_procs < 1:
        print('Invalid value for num_procs: {}. Using 1.'.format(num_procs))
        num_procs = 1

    if num_procs > avail_cpu_count:
        print('# CPUs requested higher than available {}'.format(avail_cpu_count))
        num_procs = avail_cpu_count

    return num_procs


def atomic_write_text(path, text):
    """Writes text to a temporary file in the target folder, then renames it.

    Readers never see a partially written file.
    """

    path = realpath(path)
    out_dir = dirname(path)
    os.makedirs(out_dir, exist_ok=True)

    fd, tmp_path = tempfile.mkstemp(dir=out_dir, prefix='.tmp_', suffix='.part')
    try:
        with os.fdopen(fd, 'w', newline='\n') as tmp_file:
            tmp_file.write(text)
        os.replace(tmp_path, path)
    except:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise IOError('Unable to write to\n\t{}'.format(path))

    return path


def is_iterable_but_not_str(input_obj, min_length=1):
    """Boolean check for iterables that are not strings and of a minimum length"""

    if not (not isinstance(input_obj, str) and isinstance(input_obj, Iterable)):
        return False

    if len(input_obj) < min_length:
        return False
    else:
        return True


def all_finite(*arrays):
    "True if every element of every array is finite."

    return all(np.all(np.isfinite(arr)) for arr in arrays)
