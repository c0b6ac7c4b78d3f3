"""Symbolic RPM puzzles with simulated perception noise, an abductive solver
and an LLM prompting harness.

Puzzles and evaluation records are plain dicts with the same layout as the
JSONL files written by the ``ravenx`` command-line tool.
"""

import json

from . import _core
from ._core import RavenxError, parse_answer, snr_db

__all__ = [
    "RavenxError",
    "apply_uncertainty",
    "arithmetic_accuracy",
    "emit_report",
    "generate",
    "parse_answer",
    "render_prompt",
    "score",
    "snr_db",
    "solve",
    "task_accuracy",
    "train",
    "validate",
]


def _dump(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def generate(grid_cols=3, range_m=10, n=1, seed=0):
    return [json.loads(line) for line in _core.generate(grid_cols, range_m, n, seed)]


def apply_uncertainty(puzzle, n_confounders=0, smoothing="none", param=0.0, seed=0,
                      smooth_confounders=True):
    line = _core.apply_uncertainty(_dump(puzzle), n_confounders, smoothing, param, seed,
                                   smooth_confounders)
    return json.loads(line)


def validate(puzzle):
    return _core.validate(_dump(puzzle))


def score(puzzle, entropy_weighting=True, include_confounders=True, priors=None):
    return _core.score(_dump(puzzle), entropy_weighting, include_confounders, priors)


def solve(puzzles, entropy_weighting=True, threads=1):
    lines = _core.solve([_dump(p) for p in puzzles], entropy_weighting, threads)
    return [json.loads(line) for line in lines]


def train(puzzles, epochs=50, lr=0.1, batch_size=0, tau=1.0, seed=0, entropy_weighting=True):
    """Returns (rule prior logits by rule name, loss trace)."""
    return _core.train([_dump(p) for p in puzzles], epochs, lr, batch_size, tau, seed,
                       entropy_weighting)


def render_prompt(puzzle, style=None):
    return _core.render_prompt(_dump(puzzle), style)


def task_accuracy(records):
    return _core.task_accuracy([_dump(r) for r in records])


def arithmetic_accuracy(records, puzzles):
    return _core.arithmetic_accuracy([_dump(r) for r in records], [_dump(p) for p in puzzles])


def emit_report(records, puzzles, fmt="markdown"):
    return _core.emit_report([_dump(r) for r in records], [_dump(p) for p in puzzles], fmt)
