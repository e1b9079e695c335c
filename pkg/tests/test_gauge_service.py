"""
Unit tests for the subset-enumeration gauge oracle
"""
import logging
import math

import numpy as np
import pytest

from pconvex.config import reset_settings
from pconvex.core.combination import combination_weight, eval_combination
from pconvex.core.types import GeneratorSet, PBody
from pconvex.exceptions import BudgetExceededError, DimensionMismatchError, InputValidationError
from pconvex.services.gauge_service import (
    gauge_bruteforce,
    gauge_many,
    get_gauge_oracle,
    membership
)
from pconvex.utils.cache_manager import get_cache_manager


def lp_gauge(x, p):
    return float(np.sum(np.abs(x) ** p) ** (1.0 / p))


class TestGaugeBruteforce:
    """Test cases for single-point gauges and their witnesses"""

    def test_generator_on_boundary(self, lp_half_body):
        value, witness = gauge_bruteforce([1.0, 0.0], lp_half_body)
        assert value == pytest.approx(1.0, abs=1e-12)
        assert [(t.index, t.sign) for t in witness.terms] == [(0, 1)]

    def test_diagonal_boundary_point(self, lp_half_body):
        value, witness = gauge_bruteforce([0.25, 0.25], lp_half_body)
        assert value == pytest.approx(1.0, abs=1e-12)
        assert len(witness) == 2
        np.testing.assert_allclose(witness.lambdas, [0.25, 0.25], rtol=1e-12)

    def test_zero_vector(self, lp_half_body):
        value, witness = gauge_bruteforce([0.0, 0.0], lp_half_body)
        assert value == 0.0
        assert len(witness) == 0

    def test_homogeneous_example(self, lp_half_body):
        value, _ = gauge_bruteforce([1.0, 1.0], lp_half_body)
        assert value == pytest.approx(4.0, rel=1e-12)

    def test_negative_coordinates_use_signs(self, lp_half_body):
        value, witness = gauge_bruteforce([-0.25, 0.5], lp_half_body)
        assert value == pytest.approx(lp_gauge([-0.25, 0.5], 0.5), rel=1e-12)
        assert [t.sign for t in witness.terms] == [-1, 1]

    def test_acceptance_agrees_with_lp_formula(self):
        rng = np.random.default_rng(17)
        for n in (1, 2, 3, 4):
            for p in (0.3, 0.5, 0.8, 1.0):
                body = PBody.lp_ball(n, p)
                for x in rng.standard_normal((200, n)):
                    value, _ = gauge_bruteforce(x, body)
                    assert value == pytest.approx(lp_gauge(x, p), rel=1e-9)

    def test_small_coordinate_is_kept(self):
        body = PBody.lp_ball(2, 0.3)
        value, witness = gauge_bruteforce([1.0, 1e-11], body)
        assert value == pytest.approx(1.0016716011744158, rel=1e-9)
        assert value == pytest.approx(lp_gauge([1.0, 1e-11], 0.3), rel=1e-12)
        assert [(t.index, t.lam) for t in witness.terms] == [(0, 1.0), (1, 1e-11)]

    def test_small_coordinate_leaves_the_ball(self):
        # (1, 1e-11) has l_0.3 gauge about 1.0017, outside any 1e-10 slack
        inside, witness = membership([1.0, 1e-11], PBody.lp_ball(2, 0.3))
        assert not inside
        assert witness is None

    def test_rounding_noise_is_dropped(self, three_point_generators):
        body = PBody(three_point_generators, 0.5)
        _, witness = gauge_bruteforce([0.5, 0.5], body)
        assert all(t.lam > 1e-12 for t in witness.terms)

    def test_symmetric_in_sign(self, gluskin_2d):
        rng = np.random.default_rng(23)
        for x in rng.standard_normal((50, 2)):
            assert gauge_bruteforce(-x, gluskin_2d.body)[0] == gauge_bruteforce(x, gluskin_2d.body)[0]

    def test_extra_generator_shortens_gauge(self, three_point_generators):
        body = PBody(three_point_generators, 0.5)
        value, witness = gauge_bruteforce([0.5, 0.5], body)
        assert value == pytest.approx(1.0, rel=1e-12)
        assert [(t.index, t.sign) for t in witness.terms] == [(2, 1)]

    def test_witness_reproduces_point(self, gluskin_2d):
        rng = np.random.default_rng(4)
        for x in rng.standard_normal((25, 2)):
            value, witness = gauge_bruteforce(x, gluskin_2d.body)
            np.testing.assert_allclose(eval_combination(witness, gluskin_2d.generators), x,
                                       atol=1e-10)
            assert len(witness) <= 2
            assert combination_weight(witness, 0.5) == pytest.approx(value ** 0.5, rel=1e-9)

    def test_gluskin_generators_inside_ball(self, gluskin_2d):
        for g in gluskin_2d.generators.points:
            value, _ = gauge_bruteforce(g, gluskin_2d.body)
            assert value <= 1.0 + 1e-9

    def test_dimension_mismatch(self, lp_half_body):
        with pytest.raises(DimensionMismatchError):
            gauge_bruteforce([1.0, 0.0, 0.0], lp_half_body)

    def test_budget_guard(self, monkeypatch, three_point_generators):
        monkeypatch.setenv("PCONVEX_GAUGE_BUDGET", "10")
        reset_settings()
        body = PBody(three_point_generators, 0.5)
        with pytest.raises(BudgetExceededError) as exc_info:
            gauge_bruteforce([0.5, 0.5], body)
        assert exc_info.value.required == math.comb(6, 2)
        assert exc_info.value.limit == 10

    def test_budget_checked_before_cache(self, three_point_generators):
        body = PBody(three_point_generators, 0.5)
        get_gauge_oracle(body)
        with pytest.raises(BudgetExceededError):
            get_gauge_oracle(body, budget=14)

    def test_rejects_bad_tolerance(self, lp_half_body):
        with pytest.raises(InputValidationError):
            get_gauge_oracle(lp_half_body, tol=0.0)


class TestOracleCache:
    """Test cases for oracle sharing through the cache manager"""

    def test_oracle_reused(self, lp_half_body):
        first = get_gauge_oracle(lp_half_body)
        second = get_gauge_oracle(PBody(GeneratorSet(np.eye(2)), 0.5))
        stats = get_cache_manager().get_stats()

        assert first is second
        assert stats["size"] == 1
        assert stats["hits"] == 1

    def test_exponent_is_part_of_key(self, lp_half_body):
        assert get_gauge_oracle(lp_half_body) is not get_gauge_oracle(lp_half_body.with_exponent(1.0))

    def test_build_logs_cache_footprint(self, lp_half_body, three_point_generators, caplog):
        caplog.set_level(logging.DEBUG, logger="pconvex.services.gauge_service")
        get_gauge_oracle(lp_half_body)
        get_gauge_oracle(PBody(three_point_generators, 0.5))
        messages = [r.getMessage() for r in caplog.records if "cache already holds" in r.getMessage()]

        assert len(messages) == 2
        assert "holds 0 oracles" in messages[0]
        assert "holds 1 oracles" in messages[1]

    def test_oracle_arrays_read_only(self, lp_half_body):
        oracle = get_gauge_oracle(lp_half_body)
        with pytest.raises(ValueError):
            oracle.inverses[0, 0, 0] = 2.0


class TestBatchGauges:
    """Test cases for gauge_many and membership"""

    def test_matches_single_point(self, gluskin_2d):
        points = np.random.default_rng(8).standard_normal((50, 2))
        batch = gauge_many(points, gluskin_2d.body)
        single = [gauge_bruteforce(x, gluskin_2d.body)[0] for x in points]
        np.testing.assert_allclose(batch, single, rtol=1e-13)

    def test_thread_count_does_not_change_result(self, gluskin_2d):
        points = np.random.default_rng(9).standard_normal((10_000, 2))
        one = gauge_many(points, gluskin_2d.body, threads=1)
        four = gauge_many(points, gluskin_2d.body, threads=4)
        np.testing.assert_array_equal(one, four)

    def test_empty_batch(self, lp_half_body):
        assert gauge_many(np.zeros((0, 2)), lp_half_body).shape == (0,)

    def test_rejects_bad_shape(self, lp_half_body):
        with pytest.raises(InputValidationError):
            gauge_many(np.zeros((3, 3)), lp_half_body)
        with pytest.raises(InputValidationError):
            gauge_many([[np.inf, 0.0]], lp_half_body)

    def test_membership_examples(self, lp_half_body):
        inside, witness = membership([1.0, 0.0], lp_half_body)
        assert inside
        assert witness.terms[0].lam == pytest.approx(1.0)

        inside, _ = membership([0.25, 0.25], lp_half_body)
        assert inside

        inside, witness = membership([0.3, 0.3], lp_half_body)
        assert not inside
        assert witness is None
        assert gauge_bruteforce([0.3, 0.3], lp_half_body)[0] == pytest.approx(1.2, rel=1e-12)
