"""Self-testing analysis of XOR games."""

import json
from collections.abc import Sequence

from . import _xorst
from ._xorst import PreconditionError, ValidationError, __version__

__all__ = [
    "PreconditionError",
    "ValidationError",
    "__version__",
    "classify",
    "compute_qf",
    "compute_qf_prime",
    "eval_z",
    "ghz_device_report",
    "jordan_decompose",
    "robustness",
]


def _players(table: Sequence[float]) -> int:
    n = len(table).bit_length() - 1
    if n < 1 or len(table) != 1 << n:
        raise ValidationError(f"table length {len(table)} is not a power of two >= 2")
    return n


def compute_qf(table: Sequence[float]) -> float:
    return _xorst.compute_qf(_players(table), list(table))


def compute_qf_prime(table: Sequence[float]) -> float:
    return _xorst.compute_qf_prime(_players(table), list(table))


def eval_z(table: Sequence[float], theta: Sequence[float]) -> float:
    return _xorst.eval_Z(_players(table), list(table), list(theta))


def classify(table: Sequence[float]) -> dict:
    return json.loads(_xorst.classify_json(_players(table), list(table)))


def robustness(table: Sequence[float], strategy_class: str = "t", samples: int = 200, seed: int = 1) -> dict:
    return json.loads(_xorst.robustness_json(_players(table), list(table), strategy_class, samples, seed))


def jordan_decompose(pair: dict) -> dict:
    return json.loads(_xorst.jordan_json(json.dumps(pair)))


def ghz_device_report(device: dict) -> dict:
    return json.loads(_xorst.ghz_json(json.dumps(device)))
