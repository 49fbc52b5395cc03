"""Shadow-price tuning against a daily redemption budget.

Projected redemption is weakly decreasing in the shadow price whenever every
customer's coupon sensitivity is nonnegative, so the smallest feasible
shadow price can be found by bisection: start at the revenue-maximizing
value (the lower bound, 1 by default), and only tighten when the budget is
exceeded.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import (
    AllocationModel,
    CustomerRecord,
    DiscountSet,
    feature_matrix,
    myopic_assign,
    projected_redemption,
)

__all__ = ["InfeasibleBudgetError", "BudgetConfig", "tune_lambda"]

logger = logging.getLogger(__name__)


class InfeasibleBudgetError(RuntimeError):
    """Redemption exceeds the budget even at the top of the search interval."""


@dataclass(frozen=True)
class BudgetConfig:
    """Budget inputs: average basket value, daily budget, search interval."""

    basket_value: float
    budget: float
    lambda_bounds: tuple[float, float] = (1.0, 10.0)
    tolerance: float = 1e-6

    def __post_init__(self) -> None:
        if self.basket_value <= 0:
            raise ValueError("basket value must be positive")
        if self.budget < 0:
            raise ValueError("budget cannot be negative")
        lo, hi = self.lambda_bounds
        if not lo <= hi:
            raise ValueError("lambda bounds must be ordered")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")


def tune_lambda(
    model: AllocationModel,
    customers: Sequence[CustomerRecord] | np.ndarray,
    config: BudgetConfig,
    discounts: DiscountSet | None = None,
) -> float:
    """Smallest shadow price (within tolerance) meeting the budget.

    Returns the lower bound when it is already feasible; raises
    :class:`InfeasibleBudgetError` when even the upper bound overspends.
    Customers with negative sensitivity break the monotonicity this search
    relies on, so their share is logged when present.
    """
    discounts = discounts or DiscountSet()
    X = feature_matrix(customers)
    negative = float(np.mean(model.sensitivity(X) < 0)) if X.shape[0] else 0.0
    if negative > 0:
        logger.warning(
            "%.1f%% of customers have negative coupon sensitivity; "
            "redemption may not be monotone in the shadow price",
            100.0 * negative,
        )

    def redemption(lam: float) -> float:
        return projected_redemption(
            model, X, myopic_assign(model, X, lam, discounts), config.basket_value
        )

    lo, hi = config.lambda_bounds
    if redemption(lo) <= config.budget:
        return lo
    if redemption(hi) > config.budget:
        raise InfeasibleBudgetError(
            f"redemption {redemption(hi):.6g} exceeds budget {config.budget:.6g} "
            f"at the interval top {hi}"
        )
    while hi - lo > config.tolerance:
        mid = 0.5 * (lo + hi)
        if redemption(mid) <= config.budget:
            hi = mid
        else:
            lo = mid
    return hi
