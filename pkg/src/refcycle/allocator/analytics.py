"""Reference-effect diagnostics on coupon datasets.

Two views of the same question — does a big recent coupon depress purchases?

* :func:`reference_correlations`: raw correlation of the purchase indicator
  with the max (and, for comparison, the mean) coupon over the trailing
  window, per memory length.
* :func:`monotonicity_table`: percent change in purchase rate when the
  trailing max lies in the small-coupon group instead of the large-coupon
  group, split by the current coupon's group.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .population import CouponDataset

__all__ = [
    "EmptyCellError",
    "CorrelationRow",
    "MonotonicityRow",
    "reference_correlations",
    "monotonicity_table",
]


class EmptyCellError(RuntimeError):
    """A conditioning cell has no rows or no purchases."""


@dataclass(frozen=True)
class CorrelationRow:
    memory: int
    corr_max: float | None
    corr_avg: float | None


@dataclass(frozen=True)
class MonotonicityRow:
    memory: int
    small_coupon_pct: float
    large_coupon_pct: float


def _windows(coupons: np.ndarray, memory: int):
    """Trailing-window view: windows[:, t] covers days t..t+memory-1 and is
    paired with day t+memory targets."""
    views = np.lib.stride_tricks.sliding_window_view(coupons, memory, axis=1)
    return views[:, :-1, :]


def _pearson(a: np.ndarray, b: np.ndarray) -> float | None:
    if a.size == 0 or np.all(a == a[0]) or np.all(b == b[0]):
        return None
    return float(np.corrcoef(a, b)[0, 1])


def reference_correlations(
    dataset: CouponDataset, memory_lengths: Sequence[int]
) -> list[CorrelationRow]:
    """Correlation of purchases with trailing-max and trailing-mean coupons.

    Rows whose window would reach before day 1 are skipped.  Degenerate
    (zero-variance) metrics are reported as None.
    """
    _, coupons, purchases = dataset.panel()
    horizon = coupons.shape[1]
    if max(memory_lengths) + 1 > horizon:
        raise ValueError("dataset is shorter than the longest requested window")
    rows = []
    for memory in memory_lengths:
        if memory < 1:
            raise ValueError("memory lengths must be positive")
        windows = _windows(coupons, memory)
        targets = purchases[:, memory:].ravel()
        rows.append(CorrelationRow(
            memory=memory,
            corr_max=_pearson(windows.max(axis=2).ravel(), targets),
            corr_avg=_pearson(windows.mean(axis=2).ravel(), targets),
        ))
    return rows


def _group_mask(values: np.ndarray, group: Sequence[float]) -> np.ndarray:
    mask = np.zeros(values.shape, dtype=bool)
    for member in group:
        mask |= np.isclose(values, member, rtol=0.0, atol=1e-9)
    return mask


def monotonicity_table(
    dataset: CouponDataset,
    memory_lengths: Sequence[int],
    small: Sequence[float] = (0.12, 0.15),
    large: Sequence[float] = (0.17, 0.20),
) -> list[MonotonicityRow]:
    """Percent purchase-rate lift from a small-group reference, per memory
    length and per current-coupon group.

    Entry = 100 * (rate | reference in small) / (rate | reference in large)
    - 100, computed separately for rows whose current coupon is small/large.
    Raises :class:`EmptyCellError` when a conditioning cell is empty or the
    large-reference cell has no purchases.
    """
    _, coupons, purchases = dataset.panel()
    horizon = coupons.shape[1]
    if max(memory_lengths) + 1 > horizon:
        raise ValueError("dataset is shorter than the longest requested window")
    rows = []
    for memory in memory_lengths:
        reference = _windows(coupons, memory).max(axis=2).ravel()
        current = coupons[:, memory:].ravel()
        bought = purchases[:, memory:].ravel()
        ref_small = _group_mask(reference, small)
        ref_large = _group_mask(reference, large)
        pcts = []
        for group in (small, large):
            in_group = _group_mask(current, group)
            cells = []
            for ref_mask in (ref_small, ref_large):
                selected = bought[in_group & ref_mask]
                if selected.size == 0:
                    raise EmptyCellError(
                        f"no rows with coupon group {group} for window {memory}"
                    )
                cells.append(float(np.mean(selected)))
            rate_small_ref, rate_large_ref = cells
            if rate_large_ref == 0.0:
                raise EmptyCellError(
                    f"no purchases in the large-reference cell for window {memory}"
                )
            pcts.append(100.0 * (rate_small_ref / rate_large_ref - 1.0))
        rows.append(MonotonicityRow(memory, pcts[0], pcts[1]))
    return rows
