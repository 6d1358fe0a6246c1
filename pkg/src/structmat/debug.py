"""Runtime norm-bound assertions.

Enabled with ``set_debug(True)`` or the ``STRUCTMAT_DEBUG`` environment
variable. Every check is counted per bound name so a test run can confirm
that the bounds were actually exercised.
"""

from __future__ import annotations

import math
import os
from collections import Counter

from .errors import BoundViolation

_state = {"on": os.environ.get("STRUCTMAT_DEBUG", "") not in ("", "0")}
checks: Counter = Counter()
violations: Counter = Counter()


def enabled() -> bool:
    return _state["on"]


def set_debug(flag: bool) -> None:
    _state["on"] = bool(flag)


def reset() -> None:
    checks.clear()
    violations.clear()


def stats() -> dict[str, tuple[int, int]]:
    return {k: (checks[k], violations[k]) for k in sorted(set(checks) | set(violations))}


def _lg_sum(a: float, b: float) -> float:
    hi, lo = max(a, b), min(a, b)
    if hi == -math.inf:
        return hi
    return hi + math.log2(1.0 + 2.0 ** (lo - hi))


def check(lemma: str, observed_lg: float, bound_lg: float, ell: float | None = None) -> None:
    """Assert ``2^observed_lg <= 2^bound_lg + 2^-ell``.

    ``observed_lg`` is the log2 of a computed norm. The optional ``2^-ell``
    term absorbs the approximation error of the computed quantity.
    """
    if not _state["on"]:
        return
    checks[lemma] += 1
    limit = bound_lg if ell is None else _lg_sum(bound_lg, -ell)
    if observed_lg > limit + 1e-9:
        violations[lemma] += 1
        raise BoundViolation(
            f"{lemma}: observed 2^{observed_lg:.3f} exceeds bound 2^{limit:.3f}"
        )
