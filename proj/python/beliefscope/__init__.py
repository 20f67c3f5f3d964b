"""Exact inference for tree-structured recognition networks.

Specs, evidence, scenes and beliefs are plain dicts here; streams and
traces are lists of dicts (one per JSONL line). Strings are passed through
untouched, so raw JSON text works too.
"""

import json

from . import _core
from ._core import (
    CapExceeded,
    ContractError,
    Error,
    EvidenceError,
    ImpossibleEvidence,
    ParseError,
    UnknownName,
    ValidationError,
    builtin_model_names,
    scenario_names,
    semi_static_prior,
)

__all__ = [
    "CapExceeded", "ContractError", "Error", "EvidenceError", "ImpossibleEvidence", "ParseError",
    "UnknownName", "ValidationError", "brute_force", "builtin_model", "builtin_model_names",
    "compile_rule", "diagnostics", "eval_relation", "generate_stream", "infer", "infer_scene",
    "run_cli", "scenario_names", "semi_static_prior", "track",
]


def _doc(x):
    if x is None:
        return ""
    return x if isinstance(x, str) else json.dumps(x)


def _lines(x):
    if isinstance(x, str):
        return x
    return "".join(json.dumps(line) + "\n" for line in x)


def _parse_lines(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def diagnostics(spec):
    """Validation problems of a model spec; empty when it is well formed."""
    return _core.diagnostics(_doc(spec))


def infer(spec, evidence=None, schedule_seed=0):
    """Posterior marginals {node: {state: p}} by message passing."""
    return json.loads(_core.infer(_doc(spec), _doc(evidence), schedule_seed))["beliefs"]


def brute_force(spec, evidence=None, cap=1 << 20):
    """Posterior marginals by full joint enumeration."""
    return json.loads(_core.brute_force(_doc(spec), _doc(evidence), cap))["beliefs"]


def infer_scene(spec, scene, tau=2.0, epsilon=2.0):
    """Binds features to regions, evaluates relations, and infers."""
    return json.loads(_core.infer_scene(_doc(spec), _doc(scene), tau, epsilon))["beliefs"]


def track(spec, stream, mode="paper", window=None, tau=2.0, epsilon=2.0, delta=10.0):
    """Belief trace over a frame stream for a temporal or dynamic model."""
    return _parse_lines(_core.track(_doc(spec), _lines(stream), mode, window, tau, epsilon, delta))


def eval_relation(kind, a, b, tau=2.0, epsilon=2.0):
    """State index of relation `kind` between two region dicts."""
    return _core.eval_relation(kind, json.dumps({"regions": [a, b]}), tau, epsilon)


def generate_stream(scenario, seed=0, frames=10):
    return _parse_lines(_core.generate_stream(scenario, seed, frames))


def compile_rule(text):
    return json.loads(_core.compile_rule(text))


def builtin_model(name):
    return json.loads(_core.builtin_model(name))


def run_cli(args, stdin=""):
    """Runs one CLI command in-process; returns (exit_code, stdout, stderr)."""
    return _core.run_cli(list(args), stdin)
