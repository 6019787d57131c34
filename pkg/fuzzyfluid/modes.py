"""
Truncated momentum space: the lattice of chart momenta, mode fields over it,
and the cloud-in-cell deposition that discretizes the group delta function.

"""

from functools import cached_property
from itertools import product

import numpy as np
from scipy import sparse

from fuzzyfluid import config as cfg
from fuzzyfluid.exceptions import EmptyGridError, OutOfBandError
from fuzzyfluid.su2 import compose_momenta_array, haar_weight, to_momentum
from fuzzyfluid.utils import check_cutoff, check_positive

# offsets of the 8 corners of a lattice cell, in lexicographic order
_CELL_CORNERS = np.array(list(product((0, 1), repeat=3)), dtype=np.int64)


class MomentumGrid(object):
    """
    Ball-shaped lattice of chart momenta k = h*n, |k| <= kmax, with quadrature
    weights w_i = h^3 / (1 + a^2 |k_i|^2)^3.

    Nodes are ordered lexicographically by their integer triple n. The grid is
    closed under negation; ``mirror[i]`` is the index of -k_i.
    """


    def __init__(self, h, kmax, a=0.0):
        """Constructor."""

        self.h = check_positive(h, 'lattice spacing h')
        self.kmax = check_positive(kmax, 'cutoff radius kmax')
        self.a = check_cutoff(a)

        if self.kmax < self.h:
            raise EmptyGridError('kmax={} is smaller than the lattice spacing h={}:'
                                 ' the grid would hold only the origin.'
                                 ''.format(self.kmax, self.h))

        ratio = self.kmax / self.h
        self._radius = int(np.floor(ratio + cfg.LATTICE_SNAP_TOL))
        span = np.arange(-self._radius, self._radius + 1)
        cube = np.stack(np.meshgrid(span, span, span, indexing='ij'),
                        axis=-1).reshape(-1, 3)
        in_ball = np.sum(cube ** 2, axis=1) <= ratio ** 2 + cfg.LATTICE_SNAP_TOL
        lattice = cube[in_ball]

        side = 2 * self._radius + 1
        self._lookup = -np.ones(side ** 3, dtype=np.int64)
        self._lookup[self._flat_position(lattice)] = np.arange(len(lattice))

        self.lattice = lattice
        self.nodes = self.h * lattice.astype(float)
        self.weights = self.h ** 3 * haar_weight(self.nodes, self.a)
        self.mirror = self.index_of(-lattice)
        self.origin = int(self.index_of(np.zeros(3, dtype=np.int64)))

        for arr in (self.lattice, self.nodes, self.weights, self.mirror):
            arr.setflags(write=False)


    @property
    def num_nodes(self):
        return len(self.lattice)


    def _flat_position(self, lattice_points):
        side = 2 * self._radius + 1
        shifted = lattice_points + self._radius
        return (shifted[..., 0] * side + shifted[..., 1]) * side + shifted[..., 2]


    def index_of(self, lattice_points):
        """Node index of integer triples (shape (..., 3)); -1 where not a node."""

        lattice_points = np.asarray(lattice_points, dtype=np.int64)
        inside = np.all(np.abs(lattice_points) <= self._radius, axis=-1)
        clipped = np.clip(lattice_points, -self._radius, self._radius)
        index = self._lookup[self._flat_position(clipped)]

        return np.where(inside, index, -1)


    def deposition_weights(self, points):
        """
        Cloud-in-cell weights of chart momenta on the lattice.

        Parameters
        ----------
        points : ndarray
            Chart momenta of shape (P, 3). NaN rows (antipode) are out of band.

        Returns
        -------
        corner_index : ndarray
            (P, 8) node index of each cell corner, -1 if the corner is not a node

        corner_weight : ndarray
            (P, 8) trilinear weights, summing to 1 per row

        in_band : ndarray
            (P, ) True when every corner with nonzero weight is a grid node.
            The pair coupling tables keep the node corners of the others.

        """

        points = np.atleast_2d(np.asarray(points, dtype=float))
        finite = np.all(np.isfinite(points), axis=1)
        scaled = np.where(finite[:, np.newaxis], points / self.h, 0.0)

        base = np.floor(scaled)
        frac = scaled - base
        near_next = frac > 1.0 - cfg.LATTICE_SNAP_TOL
        base[near_next] += 1.0
        frac[near_next] = 0.0
        frac[frac < cfg.LATTICE_SNAP_TOL] = 0.0

        corners = base.astype(np.int64)[:, np.newaxis, :] + _CELL_CORNERS
        axis_weights = np.where(_CELL_CORNERS == 1,
                                frac[:, np.newaxis, :], 1.0 - frac[:, np.newaxis, :])
        corner_weight = np.prod(axis_weights, axis=-1)
        corner_index = self.index_of(corners)

        needed = corner_weight > 0.0
        in_band = finite & np.all(~needed | (corner_index >= 0), axis=1)

        return corner_index, corner_weight, in_band


    @cached_property
    def pair_sum_index(self):
        """(N, N) table of the node index of k_i + k_j, -1 when out of band."""

        sums = self.lattice[:, np.newaxis, :] + self.lattice[np.newaxis, :, :]
        table = self.index_of(sums)
        table.setflags(write=False)
        return table


    def clipped_deposition(self, points):
        """
        Cloud-in-cell deposition restricted to the grid.

        Corners off the grid lose their share and the rest of the cell is kept.
        Non-finite rows lose everything.

        Returns
        -------
        corner_index : ndarray
            (P, 8) node index of each corner, 0 where the corner is not kept

        corner_weight : ndarray
            (P, 8) weights of the kept corners, 0 elsewhere

        lost : ndarray
            (P, ) weight that fell off the grid

        """

        points = np.atleast_2d(np.asarray(points, dtype=float))
        corner_index, corner_weight, _ = self.deposition_weights(points)
        finite = np.all(np.isfinite(points), axis=1)

        keep = finite[:, np.newaxis] & (corner_weight > 0.0) & (corner_index >= 0)
        lost = np.where(finite, np.sum(np.where(keep, 0.0, corner_weight), axis=1),
                        1.0)

        return np.where(keep, corner_index, 0), np.where(keep, corner_weight, 0.0), lost


    @cached_property
    def _ordered_coupling(self):
        num = self.num_nodes
        composed = compose_momenta_array(self.nodes[:, np.newaxis, :],
                                         self.nodes[np.newaxis, :, :],
                                         self.a).reshape(num * num, 3)
        corner_index, corner_weight, lost = self.clipped_deposition(composed)

        keep = corner_weight > 0.0
        pair_ids = np.broadcast_to(np.arange(num * num)[:, np.newaxis],
                                   corner_index.shape)
        matrix = sparse.csr_matrix((corner_weight[keep],
                                    (corner_index[keep], pair_ids[keep])),
                                   shape=(num, num * num))

        lost.setflags(write=False)
        return matrix, lost


    @property
    def coupling_matrix(self):
        """
        Sparse (N, N^2) deposition of the ordered products g_i g_j:
        column i*N + j holds the CIC weights c_m(g_i g_j) on grid nodes.
        """
        return self._ordered_coupling[0]


    @property
    def coupling_lost_weight(self):
        """(N^2, ) CIC weight of each ordered product falling off the grid."""
        return self._ordered_coupling[1]


    @cached_property
    def _symmetric_coupling(self):
        num = self.num_nodes
        ordered, lost = self._ordered_coupling
        swapped = np.arange(num * num).reshape(num, num).T.ravel()

        averaged = sparse.csr_matrix(0.5 * (ordered + ordered[:, swapped]))
        averaged.eliminate_zeros()
        lost_both = 0.5 * (lost + lost[swapped])
        lost_both.setflags(write=False)

        return averaged, lost_both


    @property
    def symmetric_coupling_matrix(self):
        """
        Average of the depositions of g_i g_j and g_j g_i, for every pair (i, j).
        Cell corners off the grid are dropped, so a column sums to
        1 - symmetric_lost_weight.
        """
        return self._symmetric_coupling[0]


    @property
    def symmetric_lost_weight(self):
        return self._symmetric_coupling[1]


    @property
    def num_clipped_pairs(self):
        """Node pairs losing part of their deposition off the grid."""
        return int(np.count_nonzero(self.symmetric_lost_weight > 0.0))


    def __str__(self):
        return 'MomentumGrid(h={}, kmax={}, a={}, {} nodes)' \
               ''.format(self.h, self.kmax, self.a, self.num_nodes)


    def __repr__(self):
        return self.__str__()


    def __eq__(self, other):
        if not isinstance(other, MomentumGrid):
            return NotImplemented
        return (self.h, self.kmax, self.a) == (other.h, other.kmax, other.a)


    def __hash__(self):
        return hash((self.h, self.kmax, self.a))


def build_grid(h, kmax, a=0.0):
    """Builds the truncated momentum lattice. Raises EmptyGridError if kmax < h."""

    return MomentumGrid(h, kmax, a)


class ModeField(object):
    """Complex amplitudes of one scalar field over the nodes of a grid."""


    def __init__(self, grid, amplitudes=None):
        """Constructor."""

        if not isinstance(grid, MomentumGrid):
            raise TypeError('grid must be a MomentumGrid, not {}'.format(type(grid)))

        if amplitudes is None:
            amplitudes = np.zeros(grid.num_nodes, dtype=complex)
        else:
            amplitudes = np.array(amplitudes, dtype=complex).reshape(-1)
            if amplitudes.size != grid.num_nodes:
                raise ValueError('Expected {} amplitudes, got {}'
                                 ''.format(grid.num_nodes, amplitudes.size))

        amplitudes.setflags(write=False)
        self.grid = grid
        self.amplitudes = amplitudes


    def _check_compatible(self, other):
        if not isinstance(other, ModeField):
            raise TypeError('Can only combine with another ModeField.')
        if other.grid is not self.grid and other.grid != self.grid:
            raise ValueError('Fields live on different grids.')


    def __add__(self, other):
        self._check_compatible(other)
        return ModeField(self.grid, self.amplitudes + other.amplitudes)


    def __sub__(self, other):
        self._check_compatible(other)
        return ModeField(self.grid, self.amplitudes - other.amplitudes)


    def __mul__(self, scalar):
        return ModeField(self.grid, scalar * self.amplitudes)


    __rmul__ = __mul__


    def __neg__(self):
        return ModeField(self.grid, -self.amplitudes)


    def norm_sq(self):
        """Quadrature norm sum_i w_i |f_i|^2"""
        return float(np.sum(self.grid.weights * np.abs(self.amplitudes) ** 2))


    def __repr__(self):
        return 'ModeField({} nodes, |f|^2 = {:.6g})'.format(self.grid.num_nodes,
                                                             self.norm_sq())


class ClebschState(object):
    """The pair of Clebsch potentials (lambda, mu) at time t."""


    def __init__(self, lam, mu, t=0.0):
        """Constructor."""

        if not isinstance(lam, ModeField) or not isinstance(mu, ModeField):
            raise TypeError('Both Clebsch potentials must be ModeFields.')
        lam._check_compatible(mu)

        self.lam = lam
        self.mu = mu
        self.t = float(t)


    @property
    def grid(self):
        return self.lam.grid


    @classmethod
    def from_arrays(cls, grid, lam, mu, t=0.0):
        return cls(ModeField(grid, lam), ModeField(grid, mu), t)


    def with_time(self, t):
        return ClebschState(self.lam, self.mu, t)


    def __repr__(self):
        return 'ClebschState(t={:.6g}, lambda={!r}, mu={!r})' \
               ''.format(self.t, self.lam, self.mu)


def zero_state(grid, t=0.0):
    return ClebschState(ModeField(grid), ModeField(grid), t)


def deposit_momentum(k, grid):
    """
    CIC deposition of a chart momentum onto the grid.

    Returns
    -------
    list of (node index, weight) for the nonzero weights, summing to 1.

    Raises
    ------
    OutOfBandError
        if a corner with nonzero weight is not a grid node.

    """

    k = np.asarray(k, dtype=float).reshape(1, 3)
    corner_index, corner_weight, in_band = grid.deposition_weights(k)
    if not in_band[0]:
        raise OutOfBandError('Momentum {} deposits outside of {}'.format(k[0], grid))

    nonzero = corner_weight[0] > 0.0
    return sorted(zip(corner_index[0][nonzero].tolist(),
                      corner_weight[0][nonzero].tolist()))


def deposit(G, grid, a):
    """Mollified delta at the group element G, as (node index, weight) pairs."""

    return deposit_momentum(to_momentum(G, a), grid)


def interpolate(values, G, grid, a):
    """Adjoint of ``deposit``: sum_m c_m(G) values_m."""

    values = np.asarray(values).reshape(-1)
    return sum(weight * values[index] for index, weight in deposit(G, grid, a))


def reality_residual(field):
    """max_i |f(-k_i) - conj(f(k_i))|"""

    amps = field.amplitudes
    return float(np.max(np.abs(amps[field.grid.mirror] - np.conj(amps))))


def reality_project(field):
    """Nearest field satisfying f(-k) = conj(f(k)). Idempotent."""

    amps = field.amplitudes
    return ModeField(field.grid, 0.5 * (amps + np.conj(amps[field.grid.mirror])))


def state_reality_residual(state):
    return max(reality_residual(state.lam), reality_residual(state.mu))


def project_state(state):
    return ClebschState(reality_project(state.lam), reality_project(state.mu),
                        state.t)


def evaluate_position(field, x):
    """
    Field value in position space, f(x) = sum_i w_i f_i exp(2 pi i k_i.x).

    x may be a single point (3, ) or a stack of points (M, 3).
    """

    x = np.asarray(x, dtype=float)
    phases = np.exp(1j * cfg.TWO_PI * (x @ field.grid.nodes.T))
    return phases @ (field.grid.weights * field.amplitudes)


def state_distance(state1, state2):
    """
    L2 distance of two states on the same node set, with the flat weights h^3
    so states at different cutoffs are compared on equal terms.
    """

    if state1.grid.num_nodes != state2.grid.num_nodes \
        or state1.grid.h != state2.grid.h:
        raise ValueError('States live on incompatible grids.')

    diff_sq = np.abs(state1.lam.amplitudes - state2.lam.amplitudes) ** 2 \
              + np.abs(state1.mu.amplitudes - state2.mu.amplitudes) ** 2

    return float(np.sqrt(state1.grid.h ** 3 * np.sum(diff_sq)))


def random_state(grid, seed=cfg.default_seed, k0=cfg.default_k0,
                 amplitude=cfg.default_amplitude, kcut=None):
    """
    Seeded random band-limited state with spectral envelope exp(-|k|^2/k0^2),
    real in position space. Modes with |k| > kcut are zero; kcut defaults to
    kmax/2 so that quadratic products stay in band.
    """

    k0 = check_positive(k0, 'k0')
    amplitude = check_positive(amplitude, 'amplitude', allow_zero=True)
    if kcut is None:
        kcut = grid.kmax / 2.0
    kcut = check_positive(kcut, 'kcut', allow_zero=True)

    rng = np.random.default_rng(seed)
    k_sq = np.sum(grid.nodes ** 2, axis=1)
    envelope = amplitude * np.exp(-k_sq / k0 ** 2)
    envelope[k_sq > kcut ** 2 + cfg.LATTICE_SNAP_TOL] = 0.0

    fields = list()
    for _ in range(2):
        noise = (rng.standard_normal(grid.num_nodes)
                 + 1j * rng.standard_normal(grid.num_nodes)) / np.sqrt(2.0)
        fields.append(reality_project(ModeField(grid, envelope * noise)))

    return ClebschState(fields[0], fields[1], 0.0)


def _parse_amplitude(value, name):
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError('{} amplitude must be a number or [re, im]'.format(name))
        value = complex(float(value[0]), float(value[1]))
    try:
        value = complex(value)
    except (TypeError, ValueError):
        raise ValueError('{} amplitude {} is not a number'.format(name, value))

    if not np.isfinite(value):
        raise ValueError('{} amplitude must be finite'.format(name))

    return value


def state_from_modes(grid, modes):
    """
    State from an explicit list of modes, each a dict with keys
    ``k`` (a grid node, in momentum units), ``lambda`` and ``mu``
    (numbers or [re, im] pairs). The mirror mode -k gets the conjugate
    amplitude automatically; the k = 0 amplitude must be real.
    """

    lam = np.zeros(grid.num_nodes, dtype=complex)
    mu = np.zeros(grid.num_nodes, dtype=complex)
    assigned = set()

    for mode in modes:
        k_scaled = np.asarray(mode['k'], dtype=float).reshape(3) / grid.h
        lattice_point = np.round(k_scaled)
        if np.max(np.abs(k_scaled - lattice_point)) > cfg.LATTICE_SNAP_TOL:
            raise ValueError('Mode k={} is not on the lattice of spacing h={}'
                             ''.format(mode['k'], grid.h))
        index = int(grid.index_of(lattice_point.astype(np.int64)))
        if index < 0:
            raise ValueError('Mode k={} is outside the grid (kmax={})'
                             ''.format(mode['k'], grid.kmax))

        if index in assigned or grid.mirror[index] in assigned:
            raise ValueError('Mode k={} (or its mirror) is listed twice'
                             ''.format(mode['k']))
        assigned.add(index)

        lam_amp = _parse_amplitude(mode.get('lambda', 0.0), 'lambda')
        mu_amp = _parse_amplitude(mode.get('mu', 0.0), 'mu')
        if index == grid.origin and (lam_amp.imag != 0.0 or mu_amp.imag != 0.0):
            raise ValueError('Amplitudes at k = 0 must be real.')

        for arr, amp in ((lam, lam_amp), (mu, mu_amp)):
            arr[index] = amp
            arr[grid.mirror[index]] = np.conj(amp)

    return ClebschState.from_arrays(grid, lam, mu, 0.0)
