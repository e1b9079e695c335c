"""
JSON file formats for bodies, combinations and linear maps.

Files are parsed with the standard json module (floats are read as float64 and
written with repr, which is the shortest exact decimal) and validated with
pydantic.
"""

import json
import math
import logging
from pathlib import Path
from typing import Any, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from pconvex.core.types import GeneratorSet, LinearMap, PBody, PCombination, PExponent, Term
from pconvex.exceptions import InputValidationError, OutputError
from pconvex.utils.error_utils import get_standard_message

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def read_json(path: PathLike) -> Any:
    """
    Read a JSON document.

    Raises:
        InputValidationError: If the file is missing or not valid JSON
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as e:
        raise InputValidationError(get_standard_message("missing_file", path=path), field="file",
                                   details={"path": str(path)}, error_code="MISSING_FILE") from e
    except OSError as e:
        raise InputValidationError(f"Cannot read '{path}': {e}", field="file",
                                   details={"path": str(path)}, error_code="UNREADABLE_FILE") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputValidationError(get_standard_message("malformed_json", path=path, reason=e.msg),
                                   field="file", details={"path": str(path), "line": e.lineno},
                                   error_code="MALFORMED_JSON") from e


def write_json(path: PathLike, payload: Any) -> None:
    """Write payload as UTF-8 JSON with LF line endings."""
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            json.dump(payload, handle, indent=2, allow_nan=False)
            handle.write("\n")
    except OSError as e:
        raise OutputError(str(path), original_error=e) from e


def _check_finite_rows(rows: List[List[float]], dim: int, field_name: str) -> None:
    for i, row in enumerate(rows):
        if len(row) != dim:
            raise ValueError(f"{field_name}[{i}] has {len(row)} coordinates, expected {dim}")
        if not all(math.isfinite(v) for v in row):
            raise ValueError(f"{field_name}[{i}] has non-finite entries")


class BodyFile(BaseModel):
    """A symmetric p-body: p-conv of +-generators."""

    p: float = Field(..., gt=0.0, le=1.0)
    dim: int = Field(..., ge=1)
    generators: List[List[float]] = Field(..., min_length=1)
    name: Optional[str] = None

    @model_validator(mode="after")
    def _check_shape(self) -> "BodyFile":
        _check_finite_rows(self.generators, self.dim, "generators")
        return self

    def to_body(self, tol: Optional[float] = None) -> PBody:
        generators = GeneratorSet(np.array(self.generators, dtype=np.float64))
        if tol is None:
            return PBody(generators, PExponent(self.p))
        return PBody(generators, PExponent(self.p), tol)

    @classmethod
    def from_body(cls, body: PBody, name: Optional[str] = None) -> "BodyFile":
        return cls(p=body.p.value, dim=body.dim, name=name,
                   generators=[[float(v) for v in row] for row in body.generators.points])

    @classmethod
    def load(cls, path: PathLike) -> "BodyFile":
        body_file = cls.model_validate(read_json(path))
        logger.debug(f"Loaded body '{body_file.name}' from {path}: "
                     f"{len(body_file.generators)} generators in R^{body_file.dim}")
        return body_file

    def save(self, path: PathLike) -> None:
        write_json(path, self.model_dump(exclude_none=True))


class TermModel(BaseModel):
    """One term of a combination; serialized with the key 'lambda'."""

    model_config = ConfigDict(populate_by_name=True)

    index: int = Field(..., ge=0)
    sign: Literal[1, -1] = 1
    lam: float = Field(..., ge=0.0, alias="lambda", allow_inf_nan=False)


class CombinationFile(BaseModel):
    dim: int = Field(..., ge=1)
    terms: List[TermModel] = Field(default_factory=list)

    def to_combination(self) -> PCombination:
        return PCombination(tuple(Term(t.index, t.sign, t.lam) for t in self.terms), self.dim)

    @classmethod
    def from_combination(cls, comb: PCombination) -> "CombinationFile":
        return cls(dim=comb.dim,
                   terms=[TermModel(index=t.index, sign=t.sign, lam=t.lam) for t in comb.terms])

    @classmethod
    def load(cls, path: PathLike) -> "CombinationFile":
        return cls.model_validate(read_json(path))

    def to_json_dict(self) -> dict:
        return self.model_dump(by_alias=True)


class MapFile(BaseModel):
    """Matrix of a linear map on R^n, row-major."""

    dim: int = Field(..., ge=1)
    matrix: List[List[float]]

    @model_validator(mode="after")
    def _check_shape(self) -> "MapFile":
        if len(self.matrix) != self.dim:
            raise ValueError(f"matrix has {len(self.matrix)} rows, expected {self.dim}")
        _check_finite_rows(self.matrix, self.dim, "matrix")
        return self

    def to_map(self) -> LinearMap:
        return LinearMap(np.array(self.matrix, dtype=np.float64))

    @classmethod
    def from_map(cls, T: LinearMap) -> "MapFile":
        return cls(dim=T.dim, matrix=[[float(v) for v in row] for row in T.matrix])

    @classmethod
    def load(cls, path: PathLike) -> "MapFile":
        return cls.model_validate(read_json(path))
