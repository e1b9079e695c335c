"""
Tests for error handling and edge cases
"""
import io
import json
import math
from unittest.mock import patch

import numpy as np
import pytest
from pydantic import ValidationError

from pconvex.cli import main
from pconvex.cli.error_handlers import EXCEPTION_HANDLERS, handle_exception
from pconvex.core.combination import combination_weight, eval_combination, split_to_unit_weight
from pconvex.core.types import GeneratorSet, LinearMap, PBody, PCombination
from pconvex.exceptions import (
    BudgetExceededError,
    CombinationValidationError,
    DimensionMismatchError,
    ExponentValidationError,
    InputValidationError,
    NumericalFailureError,
    OutputError,
    PConvexError
)
from pconvex.models import BodyFile
from pconvex.services.caratheodory_service import caratheodory_reduce, caratheodory_zero
from pconvex.services.gauge_service import gauge_bruteforce
from pconvex.services.gluskin_service import RandomSpaceSpec, random_gluskin_space, volume_mc
from pconvex.services.norm_service import PNormedSpace, check_pnorm_axioms, q_envelope


class TestExceptionHandlers:
    """Test the mapping from exceptions to exit codes and error objects"""

    def setup_method(self):
        self.stream = io.StringIO()

    def handle(self, exc):
        code = handle_exception(exc, "run_test", self.stream)
        return code, json.loads(self.stream.getvalue())

    def test_input_validation(self):
        code, payload = self.handle(InputValidationError("bad", field="x", error_code="BAD"))
        assert code == 2
        assert payload["error"] == "InputValidationError"
        assert payload["details"] == {"field": "x", "error_code": "BAD"}
        assert payload["run_id"] == "run_test"

    def test_subclasses_keep_their_names(self):
        code, payload = self.handle(DimensionMismatchError(2, 3))
        assert code == 2
        assert payload["error"] == "DimensionMismatchError"
        assert payload["details"]["expected"] == 2
        assert payload["details"]["actual"] == 3

    def test_exponent_error(self):
        code, payload = self.handle(ExponentValidationError("p out of range", 1.5))
        assert code == 2
        assert payload["details"]["value"] == 1.5

    def test_budget(self):
        code, payload = self.handle(BudgetExceededError("gauge subset enumeration", 15, 3))
        assert code == 3
        assert payload["details"] == {"resource": "gauge subset enumeration",
                                      "required": 15, "limit": 3}

    def test_numerical(self):
        code, payload = self.handle(NumericalFailureError("singular", details={"cond": 1e20}))
        assert code == 4
        assert payload["message"] == "singular"

    def test_output_error_reports_reason(self):
        code, payload = self.handle(OutputError("/nope/x.csv", original_error=OSError("denied")))
        assert code == 2
        assert payload["details"]["reason"] == "denied"

    def test_pydantic_validation(self):
        with pytest.raises(ValidationError) as exc_info:
            BodyFile(p=2.0, dim=1, generators=[[1.0]])
        code, payload = self.handle(exc_info.value)
        assert code == 2
        assert payload["error"] == "ValidationError"
        assert payload["message"] == "Input does not match the BodyFile format"
        assert payload["details"]["error_count"] == 1
        assert payload["details"]["validation_errors"][0]["field"] == "p"

    def test_base_error(self):
        code, payload = self.handle(PConvexError("generic failure"))
        assert code == 4
        assert payload["error"] == "PConvexError"

    def test_memory_error(self):
        code, payload = self.handle(MemoryError())
        assert code == 3
        assert payload["error"] == "MemoryError"

    def test_unexpected_error_hides_internals(self):
        code, payload = self.handle(KeyError("secret"))
        assert code == 4
        assert payload["error"] == "InternalError"
        assert "secret" not in payload["message"]
        assert payload["details"] == {"type": "KeyError"}

    def test_handlers_ordered_subclass_first(self):
        types = [exc_type for exc_type, _ in EXCEPTION_HANDLERS]
        for i, earlier in enumerate(types):
            for later in types[i + 1:]:
                assert not issubclass(later, earlier) or later is earlier


class TestCommandFailures:
    """Test failures raised deep inside a command"""

    def test_memory_error_during_command(self, body_file, capsys):
        with patch("pconvex.cli.commands.geometry.gauge_bruteforce", side_effect=MemoryError()):
            assert main(["gauge", str(body_file), "1,0"]) == 3
        assert "MemoryError" in capsys.readouterr().err

    def test_unexpected_error_during_command(self, body_file, capsys):
        with patch("pconvex.cli.commands.geometry.gauge_bruteforce", side_effect=RuntimeError("x")):
            assert main(["gauge", str(body_file), "1,0"]) == 4
        assert "InternalError" in capsys.readouterr().err

    def test_unwritable_output(self, tmp_path, capsys):
        out = tmp_path / "missing" / "volume.csv"
        assert main(["experiment", "volume", "--samples", "10", "--seed", "0",
                     "--output", str(out)]) == 2
        assert "OutputError" in capsys.readouterr().err

    def test_bad_vector_text(self, body_file, capsys):
        assert main(["gauge", str(body_file), "a,b"]) == 2
        assert "INVALID_VECTOR" in capsys.readouterr().err

    def test_bad_tolerance(self, body_file, capsys):
        assert main(["gauge", str(body_file), "1,0", "--tol", "0.5"]) == 2
        assert "INVALID_TOLERANCE" in capsys.readouterr().err

    def test_bad_environment(self, body_file, capsys, monkeypatch):
        monkeypatch.setenv("PCONVEX_TOL", "-1")
        assert main(["gauge", str(body_file), "1,0"]) == 2
        assert "INVALID_ENVIRONMENT" in capsys.readouterr().err


class TestEdgeCases:
    """Boundary inputs of the core operations"""

    def test_one_dimensional_reduction(self):
        gens = GeneratorSet(np.array([[1.0], [-2.0], [0.5]]))
        comb = PCombination.from_terms([(0, 1, 0.1), (1, 1, 0.02), (2, -1, 0.1)], 1)
        result = caratheodory_reduce(comb, gens, 0.5)
        assert result.term_count == 1
        assert eval_combination(result.combination, gens)[0] == pytest.approx(
            eval_combination(comb, gens)[0], abs=1e-15)

    def test_one_dimensional_zero(self):
        gens = GeneratorSet(np.array([[1.0], [2.0]]))
        comb = PCombination.from_terms([(0, 1, 0.2), (1, -1, 0.1), (0, 1, 0.0)], 1)
        result = caratheodory_zero(comb, gens, 0.5)
        assert result.term_count <= 2

    def test_small_exponent(self):
        body = PBody.lp_ball(2, 0.05)
        value, _ = gauge_bruteforce([0.5, 0.5], body)
        assert value == pytest.approx(2 ** (1 / 0.05) * 0.5, rel=1e-9)

    def test_linear_exponent_allowed_for_bodies(self):
        body = PBody.lp_ball(2, 1.0)
        assert gauge_bruteforce([0.5, -0.5], body)[0] == pytest.approx(1.0)

    def test_tiny_and_huge_vectors_scale(self, gluskin_2d):
        x = np.array([0.3, -0.7])
        base, _ = gauge_bruteforce(x, gluskin_2d.body)
        assert gauge_bruteforce(1e-150 * x, gluskin_2d.body)[0] == pytest.approx(1e-150 * base,
                                                                                 rel=1e-9)
        assert gauge_bruteforce(1e150 * x, gluskin_2d.body)[0] == pytest.approx(1e150 * base,
                                                                                rel=1e-9)

    def test_split_small_coefficient(self):
        comb = PCombination.from_terms([(0, 1, 0.01)], 2)
        result = split_to_unit_weight(comb, 0.5)
        assert combination_weight(result, 0.5) == pytest.approx(1.0, abs=1e-9)
        np.testing.assert_allclose(eval_combination(result, GeneratorSet(np.eye(2))), [0.01, 0.0],
                                   rtol=1e-9)

    def test_combination_of_wrong_dimension(self, three_point_generators):
        comb = PCombination.from_terms([(0, 1, 0.1)], 3)
        with pytest.raises((CombinationValidationError, DimensionMismatchError)):
            caratheodory_reduce(comb, three_point_generators, 0.5)

    def test_nearly_singular_map(self):
        T = LinearMap(np.array([[1.0, 1.0], [1.0, 1.0 + 1e-14]]))
        with pytest.raises(NumericalFailureError):
            T.inverse()

    def test_single_sample_reports(self, lp_half_space):
        report = check_pnorm_axioms(lp_half_space, 1, seed=0)
        assert report.samples == 1
        assert report.passed

    def test_one_sample_volume(self, lp_half_space):
        estimate = volume_mc(lp_half_space, 1, seed=0)
        assert estimate.hits in (0, 1)
        assert estimate.std_error == 0.0

    def test_envelope_of_envelope(self, gluskin_2d):
        envelope = q_envelope(q_envelope(gluskin_2d, 0.75), 1.0)
        assert envelope.p == 1.0
        with pytest.raises(ExponentValidationError):
            q_envelope(envelope, 0.75)

    def test_largest_seed(self):
        space = random_gluskin_space(RandomSpaceSpec(2, 0.5, 2 ** 63 - 1))
        assert space.generators.points.shape == (4, 2)
        with pytest.raises(InputValidationError):
            RandomSpaceSpec(2, 0.5, 2 ** 63)

    def test_non_finite_space_input(self):
        with pytest.raises(InputValidationError):
            PNormedSpace.from_generators([[1.0, math.inf], [0.0, 1.0]], 0.5)
