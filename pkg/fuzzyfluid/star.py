"""
Non-commutative product of band-limited functions, induced by group
multiplication of their momenta:

    e_{k(g1)} * e_{k(g2)} = e_{k(g1 g2)}

In mode space the product deposits every ordered pair (i, j) at the composed
element g_i g_j with the CIC weights of the grid.
"""

import numpy as np

from fuzzyfluid import config as cfg
from fuzzyfluid.modes import ModeField
from fuzzyfluid.su2 import compose_momenta_array


def _check_same_grid(*fields):
    first = fields[0]
    for other in fields[1:]:
        first._check_compatible(other)


def star(field1, field2):
    """
    Star product, result_m = (1/w_m) sum_ij w_i w_j f1_i f2_j c_m(g_i g_j).

    Deposition on cell corners outside the grid is dropped. At a = 0 this is
    the truncated lattice convolution, i.e. the transform of the pointwise
    product.

    Only pairs with both amplitudes nonzero are composed, block by block, so
    the cost follows the supports of the factors rather than the grid size.
    """

    _check_same_grid(field1, field2)
    grid = field1.grid

    weighted1 = grid.weights * field1.amplitudes
    weighted2 = grid.weights * field2.amplitudes
    support1 = np.flatnonzero(weighted1)
    support2 = np.flatnonzero(weighted2)

    deposited = np.zeros(grid.num_nodes, dtype=complex)
    if support1.size == 0 or support2.size == 0:
        return ModeField(grid, deposited)

    rows_per_block = max(1, cfg.STAR_PAIR_BLOCK // support2.size)
    for start in range(0, support1.size, rows_per_block):
        rows = support1[start:start + rows_per_block]
        composed = compose_momenta_array(grid.nodes[rows][:, np.newaxis, :],
                                         grid.nodes[support2][np.newaxis, :, :],
                                         grid.a).reshape(-1, 3)
        corner_index, corner_weight, _ = grid.clipped_deposition(composed)

        products = np.outer(weighted1[rows], weighted2[support2]).ravel()
        contributions = (corner_weight * products[:, np.newaxis]).ravel()
        targets = corner_index.ravel()
        deposited += np.bincount(targets, contributions.real, grid.num_nodes) \
                     + 1j * np.bincount(targets, contributions.imag, grid.num_nodes)

    return ModeField(grid, deposited / grid.weights)


def star_commutator(field1, field2):
    """f1 * f2 - f2 * f1"""

    return star(field1, field2) - star(field2, field1)


def associator_norm(field1, field2, field3):
    """
    L2 node norm, sqrt(sum_m |A_m|^2), of the associator
    A = (f1 * f2) * f3 - f1 * (f2 * f3). No quadrature weights are applied.

    Group multiplication is associative, so only the deposition onto the grid
    contributes; the value shrinks as the lattice is refined.
    """

    _check_same_grid(field1, field2, field3)
    diff = star(star(field1, field2), field3) - star(field1, star(field2, field3))
    return float(np.linalg.norm(diff.amplitudes))
