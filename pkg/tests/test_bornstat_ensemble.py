"""
Tests Born distributions, free energies, moments, entropies and sampling
"""

import math
import unittest

import numpy as np
from hypothesis import given, settings, strategies as st

from context import bornstat
from bornstat import bornstat_ensemble as bens
from bornstat.bornstat_evolution import (StateVector, exact_evolve,
                                         initial_plus_state, trotter_evolve)
from bornstat.bornstat_model import Bitstring, ModelParams, enumerate_even
from bornstat.bornstat_errors import (CapacityError, ConfigError, DomainError,
                                      InputError)

from bornstat_testing import set_external_loggers, BornstatTestCase


def _distribution(L=8, h=0.2, t=0.6):
    return bens.born_distribution(exact_evolve(ModelParams(L=L, h=h), t))


#: Probability vectors over 2^3 codes with at least one positive entry
_weights = st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=8,
                    max_size=8).filter(lambda w: sum(w) > 1e-3)


def _from_weights(weights):
    probs = np.asarray(weights) / np.sum(weights)
    return bens.BornDistribution(probs)


@set_external_loggers("TestBornDistribution", bens.LOG)
class TestBornDistribution(BornstatTestCase):
    """ Test cases for born_distribution """

    def test_initial_state_is_deterministic(self):
        dist = bens.born_distribution(initial_plus_state(5))
        self.assertAllClose(dist.probability(Bitstring.all_plus(5)), 1.0)
        np.testing.assert_array_equal(dist.support_codes, [0])

    def test_normalized_sum(self):
        dist = _distribution()
        self.assertAllClose(dist.total, 1.0)
        self.assertLess(dist.odd_weight(), 1e-20)

    def test_support_is_even(self):
        dist = _distribution(L=6)
        self.assertTrue(set(dist.support_codes) <= set(enumerate_even(6)))

    def test_raw_mode_keeps_norm(self):
        params = ModelParams(L=4)
        state = trotter_evolve(params, 4, complex(0.1, -0.05))
        raw = bens.born_distribution(state, "raw")
        normed = bens.born_distribution(state, "normalized")
        self.assertAllClose(raw.total, state.norm, atol=1e-12)
        self.assertAllClose(normed.total, 1.0)
        self.assertAllClose(raw.probabilities / state.norm,
                            normed.probabilities)

    def test_capacity(self):
        with self.assertRaises(CapacityError):
            bens.born_distribution(initial_plus_state(6), cap=4)

    def test_invalid_length(self):
        self.assertRaises(ConfigError, bens.BornDistribution, np.ones(6))


class TestFreeEnergy(BornstatTestCase):
    """ Test cases for free_energy """

    def test_definition(self):
        dist = _distribution()
        sigma = Bitstring(0b11, 8)
        expected = -math.log(dist.probability(sigma)) / 8
        self.assertAllClose(bens.free_energy(dist, sigma), expected)

    def test_odd_string_is_infinite(self):
        dist = _distribution()
        self.assertEqual(bens.free_energy(dist, Bitstring(1, 8)), math.inf)

    def test_length_mismatch(self):
        self.assertRaises(ConfigError, bens.free_energy, _distribution(),
                          Bitstring(0, 4))

    def test_free_energies_align_with_support(self):
        dist = _distribution(L=6)
        energies = bens.free_energies(dist)
        self.assertEqual(energies.size, dist.support_codes.size)
        self.assertAllClose(np.exp(-6 * energies),
                            dist.support_probabilities)


class TestMoments(BornstatTestCase):
    """ Test cases for moment_free_energy """

    def test_uniform_distribution(self):
        """ Testing every moment of a uniform law equals ln(count)/L """
        codes = enumerate_even(6)
        dist = bens.BornDistribution.uniform(codes, 6)
        for n in (0, 1, 3.5, "inf"):
            self.assertAllClose(bens.moment_free_energy(dist, n),
                                5 * math.log(2) / 6)

    def test_limits(self):
        dist = _distribution()
        energies = bens.free_energies(dist)
        self.assertAllClose(bens.moment_free_energy(dist, 0),
                            np.mean(energies))
        self.assertAllClose(bens.moment_free_energy(dist, "inf"),
                            np.min(energies))
        self.assertAllClose(bens.moment_free_energy(dist, "∞"),
                            np.min(energies))

    def test_first_moment_is_entropy_rate(self):
        dist = _distribution()
        shannon = bens.participation_entropy(dist, 1).S_q
        self.assertAllClose(8 * bens.moment_free_energy(dist, 1), shannon,
                            atol=1e-9)

    def test_ordering_at_quench_times(self):
        """ Testing f_inf <= ... <= f_1 <= f_0 and f_1 <= ln 2 """
        params = ModelParams(L=10)
        orders = [0, 1, 2, 3, 4, 5, "inf"]
        for t in np.linspace(0.1, 3 * math.pi, 7):
            dist = bens.born_distribution(exact_evolve(params, t))
            values = [bens.moment_free_energy(dist, n) for n in orders]
            for high, low in zip(values, values[1:]):
                self.assertLessEqual(low, high + 1e-12)
            self.assertLessEqual(values[1], math.log(2))

    def test_invalid_order(self):
        dist = _distribution()
        self.assertRaises(ConfigError, bens.moment_free_energy, dist, -1)
        self.assertRaises(ConfigError, bens.moment_free_energy, dist, "two")

    def test_moment_index(self):
        self.assertTrue(bens.MomentIndex.parse("inf").is_infinite)
        self.assertEqual(str(bens.MomentIndex.parse("inf")), "inf")
        self.assertEqual(str(bens.MomentIndex.parse("2")), "2")
        self.assertEqual(str(bens.MomentIndex.parse(0.5)), "0.5")

    @settings(max_examples=50, deadline=None)
    @given(_weights, st.floats(min_value=0.0, max_value=8.0),
           st.floats(min_value=0.0, max_value=8.0))
    def test_monotone_in_order(self, weights, n_a, n_b):
        dist = _from_weights(weights)
        low, high = sorted((n_a, n_b))
        self.assertLessEqual(bens.moment_free_energy(dist, high),
                             bens.moment_free_energy(dist, low) + 1e-9)


class TestParticipationEntropy(BornstatTestCase):
    """ Test cases for participation_entropy """

    def test_q_zero_counts_support(self):
        dist = _distribution(L=6)
        result = bens.participation_entropy(dist, 0)
        self.assertAllClose(result.S_q, math.log(dist.support_codes.size))
        self.assertEqual(result.L, 6)

    def test_uniform(self):
        dist = bens.BornDistribution.uniform(enumerate_even(6), 6)
        for q in (0, 1, 2, 5):
            self.assertAllClose(bens.participation_entropy(dist, q).S_q,
                                5 * math.log(2), atol=1e-12)

    def test_collision_entropy(self):
        dist = _distribution()
        probs = dist.support_probabilities
        expected = -math.log(np.sum(probs ** 2))
        self.assertAllClose(bens.participation_entropy(dist, 2).S_q, expected,
                            atol=1e-8)

    def test_invalid(self):
        self.assertRaises(ConfigError, bens.participation_entropy,
                          _distribution(), -0.5)

    @settings(max_examples=50, deadline=None)
    @given(_weights, st.floats(min_value=0.0, max_value=6.0),
           st.floats(min_value=0.0, max_value=6.0))
    def test_monotone_in_q(self, weights, q_a, q_b):
        dist = _from_weights(weights)
        low, high = sorted((q_a, q_b))
        self.assertLessEqual(bens.participation_entropy(dist, high).S_q,
                             bens.participation_entropy(dist, low).S_q + 1e-9)


class TestMultifractalFit(BornstatTestCase):

    def test_exact_line(self):
        points = [(L, 0.7 * L * math.log(2) - 0.3) for L in (6, 8, 10)]
        fit = bens.multifractal_fit(points, q=2)
        self.assertAllClose(fit.D_q, 0.7)
        self.assertAllClose(fit.intercept, -0.3)
        self.assertEqual(fit.sizes, (6, 8, 10))

    def test_too_few_sizes(self):
        self.assertRaises(InputError, bens.multifractal_fit,
                          [(6, 1.0), (8, 2.0)])


class TestSpectrum(BornstatTestCase):
    """ Test cases for spectrum_frame and ground_bitstring """

    def test_frame_edges(self):
        dist = _distribution(L=8)
        frame = bens.spectrum_frame(dist, 0.6, 3)
        self.assertEqual(len(frame.levels), 6)
        values = [value for _, value in frame.levels]
        self.assertEqual(values, sorted(values))
        self.assertEqual(frame.ranks[:3], [0, 1, 2])
        self.assertEqual(frame.ranks[-1], frame.support_size - 1)
        self.assertAllClose(frame.reference,
                            bens.free_energy(dist, Bitstring.all_plus(8)))

    def test_small_support_lists_everything(self):
        dist = bens.BornDistribution.uniform([0, 3], 2)
        frame = bens.spectrum_frame(dist, 0.0, 5)
        self.assertEqual(frame.ranks, [0, 1])
        self.assertEqual(frame.reference_rank, 0)

    def test_ground_ties_go_to_smallest_code(self):
        dist = bens.BornDistribution.uniform([5, 3, 6], 3)
        self.assertEqual(bens.ground_bitstring(dist), Bitstring(3, 3))

    def test_ground_at_zero_time(self):
        dist = bens.born_distribution(initial_plus_state(4))
        self.assertEqual(str(bens.ground_bitstring(dist)), "++++")

    def test_empty_support(self):
        dist = bens.BornDistribution(np.zeros(4))
        self.assertRaises(DomainError, bens.ground_bitstring, dist)
        self.assertRaises(DomainError, bens.moment_free_energy, dist, 1)


@set_external_loggers("TestSampling", bens.LOG)
class TestSampling(BornstatTestCase):
    """ Test cases for sample and the plug-in estimators """

    def test_reproducible(self):
        dist = _distribution()
        first = bens.sample(dist, 5000, seed=3)
        second = bens.sample(dist, 5000, seed=3)
        np.testing.assert_array_equal(first.codes, second.codes)
        np.testing.assert_array_equal(first.counts, second.counts)
        self.assertEqual(int(np.sum(first.counts)), 5000)

    def test_samples_stay_in_support(self):
        dist = _distribution(L=6)
        record = bens.sample(dist, 2000, seed=1)
        self.assertTrue(set(record.codes) <= set(dist.support_codes))
        for sigma in record.as_dict():
            self.assertEqual(sigma.L, 6)

    def test_deterministic_distribution(self):
        record = bens.sample(bens.born_distribution(initial_plus_state(3)),
                             100, seed=0)
        self.assertEqual(record.as_dict(), {Bitstring(0, 3): 100})
        self.assertAllClose(bens.estimate_from_samples(record, 1), 0.0)

    def test_plug_in_underestimates_f0(self):
        """ Testing unseen strings bias the equal-weight mean downward """
        dist = _distribution(L=10, t=0.8)
        record = bens.sample(dist, 2000, seed=4)
        self.assertLessEqual(bens.estimate_from_samples(record, 0),
                             bens.moment_free_energy(dist, 0) + 1e-12)

    def test_estimates_converge(self):
        dist = _distribution(L=6)
        record = bens.sample(dist, 200000, seed=2)
        self.assertAllClose(bens.estimate_from_samples(record, 1),
                            bens.moment_free_energy(dist, 1), atol=5e-3)

    def test_bootstrap_error(self):
        dist = _distribution(L=6)
        small = bens.sample(dist, 500, seed=0)
        large = bens.sample(dist, 50000, seed=0)
        err_small = bens.bootstrap_error(small, 1)
        err_large = bens.bootstrap_error(large, 1)
        self.assertGreater(err_small, 0.0)
        self.assertLess(err_large, err_small)
        self.assertEqual(err_small, bens.bootstrap_error(small, 1))

    def test_invalid(self):
        self.assertRaises(ConfigError, bens.sample, _distribution(), 0, 0)


def main():
    unittest.main()


if __name__ == '__main__':
    main()
