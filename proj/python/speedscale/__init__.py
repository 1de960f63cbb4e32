"""Non-preemptive speed-scaling schedulers, relaxations and exact oracles.

Instances, schedules and results are plain dicts in the same JSON layout the
``speedscale`` command-line tool reads and writes.
"""

import json

from . import _core
from ._core import (
    ContractViolation,
    InfeasibleError,
    ParseError,
    SizeLimitError,
    __version__,
    gap_beta,
    generalized_bell,
)

__all__ = [
    "ContractViolation",
    "InfeasibleError",
    "ParseError",
    "SizeLimitError",
    "__version__",
    "brute_force",
    "export_lp1",
    "gap_beta",
    "generalized_bell",
    "generate_gap_family",
    "generate_random",
    "reduce_three_dm",
    "solve",
    "solve_lp1",
    "validate",
    "yds",
]


def _text(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def yds(instance):
    """Preemptive single-processor optimum: ``{"energy", "level_speeds"}``."""
    return json.loads(_core.yds(_text(instance)))


def solve_lp1(instance, epsilon=0.5, non_preemption=True, cells=0):
    """Relaxation value and support; ``cells > 0`` replaces the landmark grid by a uniform one."""
    return json.loads(_core.solve_lp1(_text(instance), epsilon, non_preemption, cells))


def export_lp1(instance, cells, non_preemption=True):
    """Materialized relaxation on a uniform grid: objective, lower bounds and rows.

    Costs are energies divided by ``cost_scale``.
    """
    return json.loads(_core.export_lp1(_text(instance), cells, non_preemption))


def solve(instance, epsilon=0.5, strategy="lp"):
    """Rounded schedule for one processor, window algorithm for several."""
    return json.loads(_core.solve(_text(instance), epsilon, strategy))


def brute_force(instance, epsilon=0.5, cells=0, cap=None):
    """Exact optimum over grid-aligned non-preemptive schedules."""
    if cap is None:
        return json.loads(_core.brute_force(_text(instance), epsilon, cells))
    return json.loads(_core.brute_force(_text(instance), epsilon, cells, cap))


def validate(instance, schedule):
    """Violation messages; empty when the schedule is feasible."""
    return json.loads(_core.validate(_text(instance), _text(schedule)))


def generate_random(n, m=1, alpha=2.0, seed=1):
    return json.loads(_core.generate_random(n, m, alpha, seed))


def generate_gap_family(n, alpha=2.0):
    return json.loads(_core.generate_gap_family(n, alpha))


def reduce_three_dm(tdm, alpha=2.0):
    """Scheduling instance of a 3DM instance ``{"q", "triples"}``."""
    return json.loads(_core.reduce_three_dm(_text(tdm), alpha))
