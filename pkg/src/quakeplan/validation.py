"""Input validation helpers shared by the library, estimators, and CLI."""
from __future__ import annotations

from .model import InvestmentPlan, ValidationError


def as_invest_vector(plan, n_links: int) -> tuple[int, ...]:
    """Normalize a plan-like value to a 0/1 tuple of length n_links.

    Accepts an InvestmentPlan, a 0/1 string, or any sequence of 0/1 entries,
    always interpreted in ascending link-id order.
    """
    if isinstance(plan, InvestmentPlan):
        vec = plan.invest
    elif isinstance(plan, str):
        vec = InvestmentPlan.from_string(plan).invest
    else:
        try:
            vec = tuple(int(b) for b in plan)
        except (TypeError, ValueError):
            raise ValidationError(f"cannot interpret {plan!r} as an investment vector") from None
    if len(vec) != n_links:
        raise ValidationError(f"plan has {len(vec)} entries for {n_links} links")
    if any(b not in (0, 1) for b in vec):
        raise ValidationError("plan entries must be 0 or 1")
    return vec


def check_permutation(permutation, link_ids) -> tuple[int, ...]:
    """Check that permutation is a rearrangement of link_ids; return it as a tuple."""
    try:
        perm = tuple(int(e) for e in permutation)
    except (TypeError, ValueError):
        raise ValidationError(f"cannot interpret {permutation!r} as a permutation") from None
    if sorted(perm) != sorted(link_ids):
        raise ValidationError(f"permutation {perm} is not a rearrangement of the link ids")
    return perm


def check_probability(value: float, name: str) -> float:
    if not 0.0 <= value <= 1.0:
        raise ValidationError(f"{name}={value} outside [0, 1]")
    return value
