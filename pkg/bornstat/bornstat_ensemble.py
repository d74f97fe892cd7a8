"""
.. module:: bornstat_ensemble
    :platform: Linux
    :synopsis: Born distribution over X-basis outcomes and its statistics

The dephased ensemble of the evolved state is represented only by its
diagonal, the Born distribution ``P(sigma) = |<sigma|psi>|^2``. Everything
below (free energies, moment averages, participation entropies, sampling)
is a function of that distribution.

Strings with ``P(sigma) <= support_epsilon`` are outside the support: their
free energy is ``math.inf`` and they are excluded from ``f_0``, ``f_inf``
and ``S_0``.

.. moduleauthor:: bornstat developers
"""
import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special, stats

from .bornstat_errors import CapacityError, ConfigError, DomainError, InputError
from .bornstat_model import Bitstring, DEFAULT_ENUM_CAP, popcount_parity
from .bornstat_evolution import StateVector, x_basis_transform
from .bornstat_utils import philox_generator

#######
# Log #
#######

LOG = logging.getLogger(__name__)
LOG.addHandler(logging.NullHandler())

#############
# Constants #
#############

#: Default threshold defining "P > 0"
SUPPORT_EPSILON = 1e-12

#: Number of multinomial resamples for bootstrap errors
BOOTSTRAP_RESAMPLES = 200

#: Samples drawn per Philox counter block
_SAMPLE_BATCH = 1 << 20


class Normalization(enum.Enum):
    """ Whether probabilities are divided by the squared state norm """
    NORMALIZED = "normalized"
    RAW = "raw"

    @classmethod
    def parse(cls, value) -> "Normalization":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ConfigError("Invalid normalization: {0}".format(value))


@dataclass(frozen=True)
class MomentIndex(object):
    """ Real moment order n >= 0, or infinity """
    n: float

    def __post_init__(self):
        n = float(self.n)
        if math.isnan(n) or n < 0:
            raise ConfigError("Moment order must be >= 0, got {0}".format(
                self.n))
        object.__setattr__(self, "n", n)

    @classmethod
    def parse(cls, value) -> "MomentIndex":
        """ Accepts numbers, 'inf', 'infinity' and the infinity sign """
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            text = value.strip().lower()
            if text in ("inf", "infinity", "∞", "+inf"):
                return cls(math.inf)
            try:
                return cls(float(text))
            except ValueError:
                raise ConfigError("Invalid moment order: {0}".format(value))
        return cls(value)

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.n)

    def __str__(self):
        if self.is_infinite:
            return "inf"
        return "%.17g" % self.n


class BornDistribution(object):
    """
    Dense Born distribution over the 2^L X-basis codes.

    :param probabilities: array indexed by X code
    :param normalization: NORMALIZED or RAW
    :param support_epsilon: threshold below which a string is unsupported
    :param norm: squared norm of the originating state
    """

    def __init__(self, probabilities, normalization=Normalization.NORMALIZED,
                 support_epsilon: float = SUPPORT_EPSILON, norm: float = 1.0):
        probs = np.asarray(probabilities, dtype=float)
        L = probs.size.bit_length() - 1
        if probs.ndim != 1 or (1 << L) != probs.size or L < 1:
            raise ConfigError("Distribution length must be a power of two")
        self.probabilities = probs
        self.L = L
        self.normalization = Normalization.parse(normalization)
        self.support_epsilon = float(support_epsilon)
        self.norm = float(norm)
        self._support = None

    @classmethod
    def from_sector(cls, codes, amplitudes, L: int, normalization,
                    norm: float = None,
                    support_epsilon: float = SUPPORT_EPSILON):
        """ Builds a distribution from even-sector X amplitudes """
        weights = np.abs(np.asarray(amplitudes)) ** 2
        norm = float(np.sum(weights)) if norm is None else norm
        probs = np.zeros(1 << L)
        probs[codes] = weights
        normalization = Normalization.parse(normalization)
        if normalization is Normalization.NORMALIZED:
            probs /= norm
        return cls(probs, normalization, support_epsilon, norm)

    @classmethod
    def uniform(cls, codes, L: int):
        """ Uniform distribution over the given codes """
        probs = np.zeros(1 << L)
        codes = np.asarray(codes, dtype=np.int64)
        probs[codes] = 1.0 / codes.size
        return cls(probs)

    def _compute_support(self):
        if self._support is None:
            codes = np.flatnonzero(self.probabilities > self.support_epsilon)
            self._support = (codes, self.probabilities[codes])
        return self._support

    @property
    def support_codes(self):
        return self._compute_support()[0]

    @property
    def support_probabilities(self):
        return self._compute_support()[1]

    @property
    def total(self) -> float:
        return float(np.sum(self.probabilities))

    def probability(self, sigma) -> float:
        return float(self.probabilities[int(sigma)])

    def odd_weight(self) -> float:
        """ Total probability carried by odd-parity strings """
        odd = popcount_parity(np.arange(self.probabilities.size), self.L)
        return float(np.sum(self.probabilities[odd.astype(bool)]))


def born_distribution(state: StateVector,
                      normalization=Normalization.NORMALIZED,
                      cap: int = DEFAULT_ENUM_CAP,
                      support_epsilon: float = SUPPORT_EPSILON
                      ) -> BornDistribution:
    """
    P(sigma) = |<sigma|psi>|^2 over all X-basis strings.

    In normalized mode the weights are divided by the squared state norm,
    which matters for complex-time (unnormalized) states.

    :raises CapacityError: when state.L exceeds the enumeration cap
    """
    if state.L > cap:
        raise CapacityError(
            "Born distribution for L={0} exceeds the enumeration cap {1}"
            .format(state.L, cap), cap=cap)
    probs = np.abs(x_basis_transform(state)) ** 2
    norm = state.norm
    normalization = Normalization.parse(normalization)
    if normalization is Normalization.NORMALIZED:
        probs /= norm
    return BornDistribution(probs, normalization, support_epsilon, norm)


def free_energy(P: BornDistribution, sigma) -> float:
    """ f(sigma) = -ln P(sigma) / L, or math.inf outside the support """
    if isinstance(sigma, Bitstring) and sigma.L != P.L:
        raise ConfigError("Bitstring length {0} does not match L={1}".format(
            sigma.L, P.L))
    prob = P.probability(sigma)
    if prob <= P.support_epsilon:
        return math.inf
    return -math.log(prob) / P.L


def free_energies(P: BornDistribution):
    """ Finite free energies of the support, aligned with support_codes """
    return -np.log(P.support_probabilities) / P.L


def _moment_kernel(probs, n: MomentIndex, L: int) -> float:
    """ sum P^n f / sum P^n over strictly positive probs """
    if probs.size == 0:
        raise DomainError("Moment average over an empty support")
    log_probs = np.log(probs)
    if n.is_infinite:
        return float(-np.max(log_probs) / L)
    energies = -log_probs / L
    if n.n == 0:
        return float(np.mean(energies))
    weights = np.exp(n.n * (log_probs - np.max(log_probs)))
    return float(np.dot(weights, energies) / np.sum(weights))


def moment_free_energy(P: BornDistribution, n) -> float:
    """
    n-th moment average f_n = sum P^n f / sum P^n over the support.

    n = 0 is the equal-weight mean over the support, n = inf the minimum f.

    :raises DomainError: for an empty support
    """
    return _moment_kernel(P.support_probabilities, MomentIndex.parse(n), P.L)


@dataclass(frozen=True)
class PEResult(object):
    """ Participation entropy S_q of one distribution """
    q: float
    S_q: float
    L: int


def participation_entropy(P: BornDistribution, q: float) -> PEResult:
    """
    Renyi participation entropy of the support-normalized distribution.

    q = 1 is the Shannon entropy, q = 0 the log of the support size.
    """
    q = float(q)
    if q < 0 or math.isnan(q):
        raise ConfigError("q must be >= 0, got {0}".format(q))
    probs = P.support_probabilities
    if probs.size == 0:
        raise DomainError("Participation entropy of an empty support")
    log_probs = np.log(probs) - math.log(np.sum(probs))
    if q == 0:
        value = math.log(probs.size)
    elif q == 1:
        value = float(-np.dot(np.exp(log_probs), log_probs))
    else:
        value = float(special.logsumexp(q * log_probs) / (1 - q))
    return PEResult(q, max(value, 0.0), P.L)


@dataclass(frozen=True)
class MultifractalFit(object):
    """ Least-squares S_q = D_q L ln2 + intercept """
    q: float
    D_q: float
    intercept: float
    r_squared: float
    sizes: tuple

    def to_dict(self) -> dict:
        return {"q": self.q, "D_q": self.D_q, "intercept": self.intercept,
                "r_squared": self.r_squared, "sizes": list(self.sizes)}


def multifractal_fit(points, q: float = None) -> MultifractalFit:
    """
    Fits S_q against L with a free intercept; D_q = slope / ln 2.

    :param points: PEResult instances or (L, S_q) pairs
    :raises InputError: with fewer than 3 distinct sizes
    """
    sizes, values = [], []
    for point in points:
        if isinstance(point, PEResult):
            q = point.q if q is None else q
            sizes.append(point.L)
            values.append(point.S_q)
        else:
            sizes.append(point[0])
            values.append(point[1])
    if len(set(sizes)) < 3:
        raise InputError("Multifractal fit needs >= 3 distinct sizes, got "
                         "{0}".format(sorted(set(sizes))))
    fit = stats.linregress(np.asarray(sizes, float), np.asarray(values, float))
    return MultifractalFit(q=float("nan") if q is None else float(q),
                           D_q=float(fit.slope / math.log(2)),
                           intercept=float(fit.intercept),
                           r_squared=float(fit.rvalue ** 2),
                           sizes=tuple(sorted(set(sizes))))


@dataclass
class SpectrumFrame(object):
    """
    The k lowest and k highest finite levels at one time.

    ``levels`` holds (Bitstring, f) sorted ascending by f; ``ranks`` holds
    the position of each level in the full sorted spectrum.
    """
    time: float
    levels: list
    ranks: list
    reference: float
    support_size: int

    @property
    def reference_rank(self):
        """ Rank of +...+ among the listed levels, or None """
        for rank, (sigma, _) in zip(self.ranks, self.levels):
            if sigma.code == 0:
                return rank
        return None


def _sorted_support(P: BornDistribution):
    codes = P.support_codes
    energies = free_energies(P)
    order = np.lexsort((codes, energies))
    return codes[order], energies[order]


def spectrum_frame(P: BornDistribution, time: float, k: int) -> SpectrumFrame:
    """ The k lowest and k highest finite f-levels, with f(+...+) flagged """
    if k < 1:
        raise ConfigError("k must be >= 1")
    codes, energies = _sorted_support(P)
    count = codes.size
    if count <= 2 * k:
        ranks = list(range(count))
    else:
        ranks = list(range(k)) + list(range(count - k, count))
    levels = [(Bitstring(codes[r], P.L), float(energies[r])) for r in ranks]
    return SpectrumFrame(time, levels, ranks,
                         free_energy(P, Bitstring.all_plus(P.L)), count)


def ground_bitstring(P: BornDistribution) -> Bitstring:
    """ argmin f over the support; ties go to the smallest code """
    codes, _ = _sorted_support(P)
    if codes.size == 0:
        raise DomainError("Ground bitstring of an empty support")
    return Bitstring(codes[0], P.L)


@dataclass
class SampleRecord(object):
    """ N Born samples: observed codes (ascending) and their counts """
    seed: int
    N: int
    L: int
    codes: np.ndarray = field(repr=False)
    counts: np.ndarray = field(repr=False)

    def as_dict(self) -> dict:
        return {Bitstring(c, self.L): int(n)
                for c, n in zip(self.codes, self.counts)}

    @property
    def probabilities(self):
        return self.counts / self.N


def sample(P: BornDistribution, N: int, seed: int) -> SampleRecord:
    """
    N inverse-CDF draws over the support from a counter-based generator.

    Draws come in Philox counter blocks, so the record depends only on
    (P, N, seed).
    """
    if N < 1:
        raise ConfigError("Sample count must be >= 1")
    codes, probs = P.support_codes, P.support_probabilities
    if codes.size == 0:
        raise DomainError("Cannot sample from an empty support")
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    hits = np.zeros(codes.size, dtype=np.int64)
    for block, start in enumerate(range(0, N, _SAMPLE_BATCH)):
        size = min(_SAMPLE_BATCH, N - start)
        uniforms = philox_generator(seed, 1, block).random(size)
        index = np.searchsorted(cdf, uniforms, side="right")
        np.minimum(index, codes.size - 1, out=index)
        hits += np.bincount(index, minlength=codes.size)
    observed = hits > 0
    LOG.debug("Sampled %d shots over %d distinct strings", N,
              int(np.sum(observed)))
    return SampleRecord(seed, N, P.L, codes[observed], hits[observed])


def estimate_from_samples(record: SampleRecord, n) -> float:
    """ Plug-in f_n on the empirical distribution count / N """
    return _moment_kernel(record.probabilities, MomentIndex.parse(n),
                          record.L)


def bootstrap_error(record: SampleRecord, n,
                    resamples: int = BOOTSTRAP_RESAMPLES) -> float:
    """ Standard deviation of the plug-in f_n over multinomial resamples """
    n = MomentIndex.parse(n)
    rng = philox_generator(record.seed, 2, record.N)
    probs = record.probabilities
    estimates = np.empty(resamples)
    for indx in range(resamples):
        counts = rng.multinomial(record.N, probs)
        counts = counts[counts > 0]
        estimates[indx] = _moment_kernel(counts / record.N, n, record.L)
    return float(np.std(estimates, ddof=1)) if resamples > 1 else 0.0
