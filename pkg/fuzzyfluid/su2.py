"""
Group algebra of SU(2) in unit-quaternion form, plus the stereographic chart,
the Haar density and the pairings used by the cutoff Hamiltonian.

An element is stored as (u0, u), representing g = u0*1 + i u.sigma, so that

    (u0, u)(v0, v) = (u0 v0 - u.v,  u0 v + v0 u - u x v).

Most functions come in two flavours: one acting on a single ``GroupElement``
and one acting on stacked arrays of shape (..., 4) or (..., 3), used to build
the pair tables of a momentum grid.

"""

import numpy as np
from scipy import linalg

from fuzzyfluid import config as cfg
from fuzzyfluid.exceptions import AntipodeError, SingularFrameError
from fuzzyfluid.utils import check_cutoff, check_pairing_choice

PAULI = np.array([[[0, 1], [1, 0]],
                  [[0, -1j], [1j, 0]],
                  [[1, 0], [0, -1]]], dtype=complex)


class GroupElement(object):
    """A point of SU(2) held as a unit quaternion (u0, u)."""


    def __init__(self, u0, u=(0.0, 0.0, 0.0)):
        """Constructor. Normalizes the input to unit length."""

        quat = np.empty(4)
        quat[0] = float(u0)
        quat[1:] = np.asarray(u, dtype=float).reshape(3)
        if not np.all(np.isfinite(quat)):
            raise ValueError('Quaternion components must be finite: {}'.format(quat))

        norm = np.sqrt(np.sum(quat ** 2))
        if norm <= 0.0:
            raise ValueError('Zero quaternion is not a group element.')
        quat = quat / norm

        quat.setflags(write=False)
        self._quat = quat


    @classmethod
    def identity(cls):
        return cls(1.0)


    @classmethod
    def antipode(cls):
        return cls(-1.0)


    @classmethod
    def from_array(cls, quat):
        quat = np.asarray(quat, dtype=float)
        return cls(quat[0], quat[1:])


    @property
    def u0(self):
        return self._quat[0]


    @property
    def u(self):
        return self._quat[1:]


    @property
    def quat(self):
        """Read-only array (u0, u1, u2, u3)"""
        return self._quat


    def __mul__(self, other):
        if not isinstance(other, GroupElement):
            raise TypeError('Only group elements can be multiplied, '
                            'not {}'.format(type(other)))
        return multiply(self, other)


    def __repr__(self):
        return 'GroupElement(u0={:.17g}, u=({:.17g}, {:.17g}, {:.17g}))' \
               ''.format(*self._quat)


    def __str__(self):
        return '({:.6g}, ({:.6g}, {:.6g}, {:.6g}))'.format(*self._quat)


def quaternion_product(p, q, normalize=True):
    """
    Hamilton product of stacked quaternions, with the SU(2) sign convention.

    Parameters
    ----------
    p, q : ndarray
        Arrays of shape (..., 4), broadcast against each other.

    normalize : bool
        Whether to rescale the product to unit length.
        Products of non-unit quaternions (e.g. derivatives) must not be normalized.

    Returns
    -------
    ndarray of shape (..., 4)

    """

    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    p0, pv = p[..., 0], p[..., 1:]
    q0, qv = q[..., 0], q[..., 1:]

    prod = np.empty(np.broadcast(p, q).shape)
    prod[..., 0] = p0 * q0 - (pv[..., 0] * qv[..., 0]
                              + pv[..., 1] * qv[..., 1]
                              + pv[..., 2] * qv[..., 2])
    prod[..., 1:] = (p0[..., np.newaxis] * qv + q0[..., np.newaxis] * pv) \
                    - np.cross(pv, qv)

    if normalize:
        prod = prod / np.sqrt(np.sum(prod ** 2, axis=-1, keepdims=True))

    return prod


def multiply(g1, g2):
    """Group product g1.g2, renormalized to unit length."""

    return GroupElement.from_array(quaternion_product(g1.quat, g2.quat))


def inverse(g):
    """Inverse of a unit quaternion is its conjugate."""

    return GroupElement(g.u0, -g.u)


def trace(g):
    """Trace of the 2x2 matrix representing g."""

    return 2.0 * g.u0


def rho(g):
    """Geodesic angle from the identity, arccos(tr(g)/2), in [0, pi]."""

    return float(np.arccos(np.clip(g.u0, -1.0, 1.0)))


def momenta_to_quaternions(k, a):
    """Stereographic chart, for momenta of shape (..., 3). Requires a > 0."""

    a = check_cutoff(a, allow_zero=False)
    k = np.asarray(k, dtype=float)
    ak_sq = a ** 2 * np.sum(k ** 2, axis=-1)
    denom = 1.0 + ak_sq

    quat = np.empty(k.shape[:-1] + (4,))
    quat[..., 0] = (1.0 - ak_sq) / denom
    quat[..., 1:] = (2.0 * a) * k / denom[..., np.newaxis]

    return quat


def quaternions_to_momenta(quat, a):
    """
    Inverse chart for stacked quaternions; elements at the antipode map to NaN.
    """

    a = check_cutoff(a, allow_zero=False)
    quat = np.asarray(quat, dtype=float)
    one_plus = 1.0 + quat[..., 0]
    at_antipode = one_plus < cfg.ANTIPODE_TOL

    with np.errstate(divide='ignore', invalid='ignore'):
        k = quat[..., 1:] / (a * one_plus[..., np.newaxis])
    k[at_antipode] = np.nan

    return k


def from_momentum(k, a):
    """Group element with chart momentum k."""

    k = np.asarray(k, dtype=float).reshape(3)
    return GroupElement.from_array(momenta_to_quaternions(k, a))


def to_momentum(g, a):
    """
    Chart momentum k = u / (a (1 + u0)) of g.

    Raises
    ------
    AntipodeError
        when g is the antipode -1, whose momentum is at infinity.

    """

    a = check_cutoff(a, allow_zero=False)
    one_plus = 1.0 + g.u0
    if one_plus < cfg.ANTIPODE_TOL:
        raise AntipodeError('Element {} is at the antipode: its chart momentum '
                            'is at infinity.'.format(g))

    return g.u / (a * one_plus)


def compose_momenta(k1, k2, a):
    """Chart momentum of g(k1).g(k2); at a = 0 this is exactly k1 + k2."""

    a = check_cutoff(a)
    k1 = np.asarray(k1, dtype=float).reshape(3)
    k2 = np.asarray(k2, dtype=float).reshape(3)
    if a == 0.0:
        return k1 + k2

    return to_momentum(multiply(from_momentum(k1, a), from_momentum(k2, a)), a)


def compose_momenta_array(k1, k2, a):
    """
    Vectorized ``compose_momenta`` over stacked momenta of shape (..., 3).

    Pairs whose product reaches the antipode come back as NaN, instead of raising.
    """

    a = check_cutoff(a)
    k1 = np.asarray(k1, dtype=float)
    k2 = np.asarray(k2, dtype=float)
    if a == 0.0:
        return k1 + k2

    prod = quaternion_product(momenta_to_quaternions(k1, a),
                              momenta_to_quaternions(k2, a))
    return quaternions_to_momenta(prod, a)


def haar_weight(k, a):
    """Haar density relative to d^3k in the chart: 1/(1 + a^2 |k|^2)^3."""

    a = check_cutoff(a)
    k = np.asarray(k, dtype=float)
    return 1.0 / (1.0 + a ** 2 * np.sum(k ** 2, axis=-1)) ** 3


def pairing_raw(g1, g2, a):
    """(1/4a^2) (tr(g1^dagger g2) - 2), zero on the diagonal."""

    a = check_cutoff(a, allow_zero=False)
    return (np.dot(g1.quat, g2.quat) - 1.0) / (2.0 * a ** 2)


def pairing_factor(k, a, choice=cfg.default_pairing):
    """
    Vector q(k) factorizing the pairing, B(g1, g2) = q(k1) . q(k2).

    For the polarized trace, q = (U - E)/2a = (-a|k|^2, k)/(1 + a^2|k|^2),
    written without dividing by a so it stays valid at a = 0.
    For the chart dot product, q = k.

    Parameters
    ----------
    k : ndarray
        Chart momenta of shape (..., 3)

    a : float
        Cutoff length, >= 0

    choice : str
        One of cfg.pairing_choices

    Returns
    -------
    ndarray of shape (..., 4) or (..., 3)

    """

    a = check_cutoff(a)
    choice = check_pairing_choice(choice)
    k = np.asarray(k, dtype=float)

    if choice == cfg.pairing_chart_dot:
        return k.copy()

    k_sq = np.sum(k ** 2, axis=-1)
    denom = 1.0 + a ** 2 * k_sq
    q_vec = np.empty(k.shape[:-1] + (4,))
    q_vec[..., 0] = -a * k_sq / denom
    q_vec[..., 1:] = k / denom[..., np.newaxis]

    return q_vec


def pairing(g1, g2, a, choice=cfg.default_pairing):
    """
    Regularized pairing B(g1, g2), tending to k1.k2 as a -> 0.

    Polarized trace:
        B = (1/2)[<g1,g2> - <g1,e> - <g2,e>] = (U1 - E).(U2 - E) / 4a^2
    Chart dot:
        B = k(g1) . k(g2)

    At a = 0 group elements carry no momentum information, so g1 and g2 must be
    given as chart momenta; both choices then return k1.k2.

    """

    a = check_cutoff(a)
    choice = check_pairing_choice(choice)

    if a == 0.0:
        if isinstance(g1, GroupElement) or isinstance(g2, GroupElement):
            raise ValueError('At a = 0 the pairing needs chart momenta, '
                             'not group elements.')
        return float(np.dot(np.asarray(g1, dtype=float), np.asarray(g2, dtype=float)))

    if not isinstance(g1, GroupElement):
        g1 = from_momentum(g1, a)
    if not isinstance(g2, GroupElement):
        g2 = from_momentum(g2, a)

    if choice == cfg.pairing_chart_dot:
        return float(np.dot(to_momentum(g1, a), to_momentum(g2, a)))

    unit = GroupElement.identity().quat
    return float(np.dot(g1.quat - unit, g2.quat - unit) / (4.0 * a ** 2))


def _chart_jacobian(k, a):
    """d(u0, u)/dk_j, as a (4, 3) array; column j is the derivative along k_j."""

    k = np.asarray(k, dtype=float).reshape(3)
    denom = 1.0 + a ** 2 * np.dot(k, k)

    jac = np.empty((4, 3))
    jac[0, :] = -4.0 * a ** 2 * k / denom ** 2
    jac[1:, :] = (2.0 * a / denom) * np.eye(3) \
                 - (4.0 * a ** 3 / denom ** 2) * np.outer(k, k)

    return jac


def maurer_cartan_omega(k, a):
    """
    Left-invariant coframe in the chart, normalized so that omega(0) = I.

    g^{-1} dg = Omega_ij dk_j (i sigma_i / 2) defines Omega; near the identity
    Omega = 4a I, and the value returned is Omega^T / 4a.
    """

    a = check_cutoff(a, allow_zero=False)
    g_conj = GroupElement.from_array(momenta_to_quaternions(k, a)).quat.copy()
    g_conj[1:] *= -1.0

    jac = _chart_jacobian(k, a)
    left = quaternion_product(g_conj[np.newaxis, :], jac.T, normalize=False)
    # row j holds g^{-1} dg/dk_j = (0, b_j) = i b_j.sigma = sum_i 2 b_ji (i sigma_i/2)
    omega_big = 2.0 * left[:, 1:].T

    return omega_big.T / (4.0 * a)


def maurer_cartan_xi(k, a):
    """
    Inverse frame xi = omega^{-1}, defining the position operators
    X^i = i xi_ij d/dk_j. xi(0) = I and xi(k) - I = O(a|k|).

    Raises
    ------
    SingularFrameError
        if |det omega| falls below cfg.SINGULAR_FRAME_TOL.

    """

    omega = maurer_cartan_omega(k, a)
    det = linalg.det(omega)
    if abs(det) < cfg.SINGULAR_FRAME_TOL:
        raise SingularFrameError('Frame at k={} is singular: det = {:.3g}'
                                 ''.format(k, det))

    return linalg.inv(omega)


def position_operator(func, index, a, step):
    """
    Position operator X^index = i xi_index,j d/dk_j applied to a function on
    momentum space, with derivatives by central differences of the given step.

    Returns a callable k -> (X^index func)(k), so operators can be nested.
    """

    a = check_cutoff(a, allow_zero=False)

    def applied(k):
        k = np.asarray(k, dtype=float).reshape(3)
        xi = maurer_cartan_xi(k, a)
        grad = np.empty(3, dtype=complex)
        for jj in range(3):
            shift = np.zeros(3)
            shift[jj] = step
            grad[jj] = (func(k + shift) - func(k - shift)) / (2.0 * step)
        return 1j * np.dot(xi[index, :], grad)

    return applied


def momentum_operator(func, index):
    """Momentum operator P_index: multiplication by k_index."""

    def applied(k):
        k = np.asarray(k, dtype=float).reshape(3)
        return k[index] * func(k)

    return applied


def random_elements(num_elements, rng):
    """Haar-uniform samples on SU(2): normalized Gaussian 4-vectors."""

    quats = rng.standard_normal((num_elements, 4))
    quats /= np.linalg.norm(quats, axis=1, keepdims=True)
    return [GroupElement.from_array(qq) for qq in quats]


def _su2_matrix(g):
    """2x2 complex matrix u0*1 + i u.sigma; used as an independent oracle."""

    return g.u0 * np.eye(2, dtype=complex) + 1j * np.einsum('i,ijk->jk', g.u, PAULI)
