"""Work-unit budgeting.

A "work unit" is one inner-loop visit (a tuple enumerated, a table cell
written, a pair hashed).  The cap comes from the CIRCLEKIT_BUDGET
environment variable; operations that would exceed it refuse up front
with the required amount instead of grinding away.
"""

import os

from .errors import BudgetError

DEFAULT_BUDGET = 2_000_000_000


def work_budget() -> int:
    raw = os.environ.get("CIRCLEKIT_BUDGET", "")
    if not raw:
        return DEFAULT_BUDGET
    try:
        value = int(float(raw))
    except ValueError:
        return DEFAULT_BUDGET
    return max(1, value)


def check_budget(required: int, label: str = "") -> None:
    budget = work_budget()
    if required > budget:
        raise BudgetError(required, budget, label)
