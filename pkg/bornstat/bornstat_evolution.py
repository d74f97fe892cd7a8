"""
.. module:: bornstat_evolution
    :platform: Linux
    :synopsis: Real- and complex-time evolution of the quench state

Two backends evolve ``|+...+>`` under ``H = -J sum Z_j Z_k - h sum X_j``:

* first-order Trotterization, each step ``e^{ihX dt} e^{iJZZ dt}`` on the
  full Z-basis state vector;
* exact spectral decomposition of ``H`` restricted to the even-parity
  X-basis sector (dimension ``2^(L-1)``), cached per model.

Both accept a complex time ``z = t + i tau`` meaning ``e^{-iHz}``.

.. moduleauthor:: bornstat developers
"""
import enum
import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import linalg, sparse

from .bornstat_errors import CapacityError, ConfigError
from .bornstat_model import (Boundary, ModelParams, MAX_STATE_L,
                             enumerate_even, popcount_parity)
from .bornstat_utils import philox_generator

#######
# Log #
#######

LOG = logging.getLogger(__name__)
LOG.addHandler(logging.NullHandler())

#############
# Constants #
#############

#: Largest chain length evolved by exact diagonalization
MAX_EXACT_L = 14

#: Tolerated eigenpair residual ||Hv - lambda v||
EIGEN_RESIDUAL_TOL = 1e-10


class EvolutionMode(enum.Enum):
    """ Evolution backend """
    TROTTER = "trotter"
    EXACT = "exact_spectral"

    @classmethod
    def parse(cls, value) -> "EvolutionMode":
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower()
        if text == "exact":
            return cls.EXACT
        try:
            return cls(text)
        except ValueError:
            raise ConfigError("Invalid evolution mode: {0}".format(value))


@dataclass(frozen=True)
class ComplexTime(object):
    """ Evolution time t + i tau (both finite) """
    t: float
    tau: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.t) and math.isfinite(self.tau)):
            raise ConfigError("Complex time must be finite")

    @classmethod
    def of(cls, value) -> "ComplexTime":
        """ Coerces a real, complex or ComplexTime value """
        if isinstance(value, cls):
            return value
        value = complex(value)
        return cls(value.real, value.imag)

    @property
    def value(self) -> complex:
        return complex(self.t, self.tau)

    def boltzmann(self) -> complex:
        """ The same point written as i(t + i tau) = -tau + i t """
        return complex(-self.tau, self.t)

    def __complex__(self):
        return self.value


class StateVector(object):
    """ Amplitudes over the 2^L Z-basis configurations of an L-site chain """

    def __init__(self, amplitudes, L: int = None):
        amplitudes = np.ascontiguousarray(amplitudes, dtype=np.complex128)
        size = amplitudes.size
        inferred = size.bit_length() - 1
        if amplitudes.ndim != 1 or size < 2 or (1 << inferred) != size:
            raise ConfigError("State vector length must be a power of two")
        if L is not None and L != inferred:
            raise ConfigError("State vector of length {0} is not L={1}".format(
                size, L))
        self._amps = amplitudes
        self._L = inferred
        self._norm = None

    @property
    def amplitudes(self):
        return self._amps

    @property
    def L(self) -> int:
        return self._L

    @property
    def norm(self) -> float:
        """ Cached squared norm """
        if self._norm is None:
            self._norm = float(np.vdot(self._amps, self._amps).real)
        return self._norm

    def normalized(self) -> "StateVector":
        return StateVector(self._amps / math.sqrt(self.norm), self._L)

    def __len__(self):
        return self._amps.size

    def __repr__(self):
        return "StateVector(L={0}, norm={1:.6g})".format(self._L, self.norm)


def _check_size(L: int):
    if L < 2 or L > MAX_STATE_L:
        raise CapacityError(
            "State vector for L={0} outside 2..{1}".format(L, MAX_STATE_L),
            cap=MAX_STATE_L)


def initial_plus_state(L: int) -> StateVector:
    """ Returns |+...+> in the Z basis: every amplitude 2^(-L/2) """
    _check_size(L)
    return StateVector(np.full(1 << L, 2.0 ** (-L / 2), dtype=np.complex128))


def random_state(L: int, seed: int, index: int = 0) -> StateVector:
    """ Haar-like normalized random state drawn from a Philox stream """
    _check_size(L)
    rng = philox_generator(seed, 0x5EED, index)
    amps = rng.standard_normal(1 << L) + 1j * rng.standard_normal(1 << L)
    return StateVector(amps / np.linalg.norm(amps))


@lru_cache(maxsize=8)
def _bond_sums(L: int, bonds: tuple):
    codes = np.arange(1 << L, dtype=np.int64)
    total = np.zeros(1 << L, dtype=np.int64)
    for j, k in bonds:
        total += 1 - 2 * (((codes >> j) ^ (codes >> k)) & 1)
    total.flags.writeable = False
    return total


def bond_sums(params: ModelParams):
    """ B(s) = sum over bonds of s_j s_k for every Z configuration s """
    return _bond_sums(params.L, tuple(params.bonds))


def apply_zz_phase(state: StateVector, params: ModelParams,
                   z) -> StateVector:
    """ Multiplies every Z-basis amplitude by exp(i J z B(s)) """
    if state.L != params.L:
        raise ConfigError("State has L={0}, params have L={1}".format(
            state.L, params.L))
    z = ComplexTime.of(z).value
    if z == 0:
        return state
    phases = np.exp(1j * params.J * z * bond_sums(params))
    return StateVector(state.amplitudes * phases, state.L)


def apply_x_rotation(state: StateVector, h: float, z) -> StateVector:
    """
    Applies e^{i h z X} = [[cos hz, i sin hz], [i sin hz, cos hz]] on every
    site; non-unitary for complex z.
    """
    angle = h * ComplexTime.of(z).value
    if angle == 0:
        return state
    cos, isin = np.cos(angle), 1j * np.sin(angle)
    amps = np.array(state.amplitudes)
    L = state.L
    for j in range(L):
        view = amps.reshape(1 << (L - 1 - j), 2, 1 << j)
        low = view[:, 0, :].copy()
        high = view[:, 1, :].copy()
        view[:, 0, :] = cos * low + isin * high
        view[:, 1, :] = isin * low + cos * high
    return StateVector(amps, L)


def trotter_step(state: StateVector, params: ModelParams, z_step) -> StateVector:
    """ One step U = e^{ihX dz} e^{iJZZ dz}: ZZ phase first """
    state = apply_zz_phase(state, params, z_step)
    return apply_x_rotation(state, params.h, z_step)


def trotter_series(params: ModelParams, n_steps: int, z_step=None):
    """
    Yields (step, state) for step = 0 .. n_steps, reusing each state to
    build the next.
    """
    if n_steps < 0:
        raise ConfigError("n_steps must be >= 0")
    z_step = ComplexTime.of(params.dt if z_step is None else z_step)
    try:
        state = initial_plus_state(params.L)
    except MemoryError as err:
        raise CapacityError("Cannot allocate 2^{0} amplitudes: {1}".format(
            params.L, err), cap=MAX_STATE_L)
    yield 0, state
    for step in range(1, n_steps + 1):
        state = trotter_step(state, params, z_step)
        LOG.debug("Trotter step %d/%d norm=%.12g", step, n_steps, state.norm)
        yield step, state


def trotter_evolve(params: ModelParams, n_steps: int,
                   z_step=None) -> StateVector:
    """ U(dz)^n_steps |+...+>; z_step defaults to the real step params.dt """
    state = None
    for _, state in trotter_series(params, n_steps, z_step):
        pass
    return state


class SpectralPropagator(object):
    """
    Eigendecomposition of H in the even-parity X-basis sector.

    In the X basis the field term is diagonal, ``-h sum_j (1 - 2 b_j)``, and
    each bond flips the two bits it touches with amplitude ``-J``.
    """

    def __init__(self, params: ModelParams):
        if params.L > MAX_EXACT_L:
            raise CapacityError(
                "Exact evolution is limited to L <= {0} (got L={1}); "
                "use trotter mode".format(MAX_EXACT_L, params.L),
                cap=MAX_EXACT_L)
        self.L = params.L
        self.codes = enumerate_even(params.L)
        dim = self.codes.size
        bits = (self.codes[:, None] >> np.arange(params.L)) & 1
        diag = -params.h * np.sum(1 - 2 * bits, axis=1).astype(float)
        rows, cols = [], []
        index = np.arange(dim)
        for j, k in params.bonds:
            flipped = self.codes ^ ((1 << j) | (1 << k))
            rows.append(index)
            cols.append(np.searchsorted(self.codes, flipped))
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        offdiag = sparse.coo_matrix(
            (np.full(rows.size, -params.J), (rows, cols)), shape=(dim, dim))
        hamiltonian = (offdiag + sparse.diags(diag)).toarray()
        LOG.debug("Diagonalizing even sector of dimension %d", dim)
        self.energies, self.vectors = linalg.eigh(hamiltonian)
        residual = np.max(np.abs(hamiltonian @ self.vectors
                                 - self.vectors * self.energies))
        if residual > EIGEN_RESIDUAL_TOL:
            LOG.warning("Eigenpair residual %.3g exceeds %.1g", residual,
                        EIGEN_RESIDUAL_TOL)
        self.residual = float(residual)
        # Overlaps of |+...+> (code 0, first in the sorted sector)
        self._overlaps = np.conj(self.vectors[0, :])

    def sector_amplitudes(self, zs):
        """
        Even-sector X amplitudes for each complex time in zs.

        :returns: array of shape (len(zs), 2^(L-1))
        """
        zs = np.atleast_1d(np.asarray(zs, dtype=np.complex128))
        phases = np.exp(-1j * np.outer(zs, self.energies)) * self._overlaps
        return phases @ self.vectors.T

    def x_amplitudes(self, z):
        """ Full X-basis amplitude vector (odd codes zero) """
        full = np.zeros(1 << self.L, dtype=np.complex128)
        full[self.codes] = self.sector_amplitudes([z])[0]
        return full


@lru_cache(maxsize=4)
def _propagator(L: int, J: float, h: float, boundary: Boundary):
    return SpectralPropagator(ModelParams(L=L, J=J, h=h, boundary=boundary))


def spectral_propagator(params: ModelParams) -> SpectralPropagator:
    """ Cached propagator for the model (Trotter fields are irrelevant) """
    if params.L > MAX_EXACT_L:
        raise CapacityError(
            "Exact evolution is limited to L <= {0} (got L={1}); "
            "use trotter mode".format(MAX_EXACT_L, params.L), cap=MAX_EXACT_L)
    return _propagator(params.L, params.J, params.h, params.boundary)


def exact_x_amplitudes(params: ModelParams, zs):
    """ Batched even-sector X amplitudes, shape (len(zs), 2^(L-1)) """
    zs = [ComplexTime.of(z).value for z in np.atleast_1d(zs)]
    return spectral_propagator(params).sector_amplitudes(zs)


def exact_evolve(params: ModelParams, z) -> StateVector:
    """ e^{-iHz}|+...+> from the cached eigendecomposition, in the Z basis """
    z = ComplexTime.of(z).value
    if z == 0:
        return initial_plus_state(params.L)
    x_amps = spectral_propagator(params).x_amplitudes(z)
    return StateVector(walsh_hadamard(x_amps), params.L)


def evolve(params: ModelParams, z, mode=EvolutionMode.EXACT) -> StateVector:
    """ Dispatches to either backend; Trotter splits z into steps <= dt """
    mode = EvolutionMode.parse(mode)
    z = ComplexTime.of(z).value
    if mode is EvolutionMode.EXACT:
        return exact_evolve(params, z)
    n_steps = max(1, int(math.ceil(abs(z) / params.dt - 1e-9)))
    return trotter_evolve(params, n_steps, z / n_steps)


def walsh_hadamard(amplitudes):
    """ L-stage butterfly (a+b)/sqrt2, (a-b)/sqrt2; self-inverse """
    amps = np.array(amplitudes, dtype=np.complex128)
    L = amps.size.bit_length() - 1
    root = math.sqrt(0.5)
    for j in range(L):
        view = amps.reshape(-1, 2, 1 << j)
        low = view[:, 0, :].copy()
        high = view[:, 1, :].copy()
        view[:, 0, :] = (low + high) * root
        view[:, 1, :] = (low - high) * root
    return amps


def x_basis_transform(state: StateVector):
    """
    Returns <sigma|psi> for every X-basis code sigma (bit j = 1 means site j
    in |->), as an array indexed by code.
    """
    return walsh_hadamard(state.amplitudes)


def odd_parity_weight(x_amplitudes) -> float:
    """ Total squared amplitude on odd-parity X codes """
    x_amplitudes = np.asarray(x_amplitudes)
    L = x_amplitudes.size.bit_length() - 1
    odd = popcount_parity(np.arange(x_amplitudes.size), L).astype(bool)
    return float(np.sum(np.abs(x_amplitudes[odd]) ** 2))


def state_fidelity(first: StateVector, second: StateVector) -> float:
    """ |<a|b>|^2 / (<a|a><b|b>) """
    a = getattr(first, "amplitudes", first)
    b = getattr(second, "amplitudes", second)
    overlap = np.vdot(a, b)
    return float(abs(overlap) ** 2 / (np.vdot(a, a).real * np.vdot(b, b).real))
