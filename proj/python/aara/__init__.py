"""Python bindings for the aara resource analyser."""

import json
from fractions import Fraction

from . import _core
from ._core import EvalError, MachineError, SourceError, amp_program, compile_tm, run_tm

__all__ = [
    "EvalError",
    "MachineError",
    "SourceError",
    "amp_program",
    "analyze",
    "certify_tm",
    "compile_tm",
    "ip",
    "run",
    "run_tm",
]


def run(source, inputs, metric="time", fuel=None):
    """Evaluate `source` on literal input values. Returns (value text, cost)."""
    args = {} if fuel is None else {"fuel": fuel}
    value, cost = _core.run(source, list(inputs), metric, **args)
    return value, Fraction(cost)


def analyze(source, mode="uni", degree=2, metric="tick", require_output=None, name="program"):
    return json.loads(_core.analyze(source, mode, degree, metric, require_output, name))


def ip(source, name="program"):
    return json.loads(_core.ip(source, name))


def certify_tm(machine, max_len=8, name="machine"):
    return json.loads(_core.certify_tm(machine, max_len, name))
