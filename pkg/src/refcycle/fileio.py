"""Stable file formats: gain tables, cycles, allocation models, datasets.

Gain tables travel as JSON objects ``{"prices": [...], "memory": m,
"gains": [[row per reference, lowest first], ...]}`` or as CSV with a header
row of prices (memory supplied out of band).  Cycles are whitespace-separated
price values.  Datasets are CSV panels with a JSON sidecar naming the
reference feature column and the discount set.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .allocator import AllocationModel, CouponDataset, CustomerRecord, DiscountSet
from .core import GainTable, GeneratorCycle, PriceCycle, PriceGrid, as_price

__all__ = [
    "format_price",
    "parse_price_list",
    "parse_cycle_text",
    "format_cycle",
    "gain_table_to_dict",
    "gain_table_from_dict",
    "load_gain_table",
    "save_gain_table",
    "load_model",
    "save_model",
    "save_dataset",
    "load_dataset",
    "customers_from_dataset",
]


def format_price(price: Fraction) -> str:
    """Exact decimal string when the denominator allows it, else "num/den"."""
    if price.denominator == 1:
        return str(price.numerator)
    for digits in range(1, 13):
        scaled = price * 10**digits
        if scaled.denominator == 1:
            text = f"{price.numerator / price.denominator:.{digits}f}"
            if Fraction(text) == price:
                return text
    return f"{price.numerator}/{price.denominator}"


def parse_price_list(text: str) -> list[Fraction]:
    tokens = text.replace(",", " ").split()
    if not tokens:
        raise ValueError("empty price list")
    return [as_price(token) for token in tokens]


def parse_cycle_text(text: str, grid: PriceGrid) -> PriceCycle:
    return PriceCycle.from_prices(grid, parse_price_list(text))


def format_cycle(cycle: PriceCycle | GeneratorCycle, grid: PriceGrid) -> str:
    tokens = cycle.tokens if isinstance(cycle, PriceCycle) else cycle.values
    return " ".join(format_price(grid.prices[t]) for t in tokens)


def gain_table_to_dict(table: GainTable) -> dict:
    return {
        "prices": [format_price(p) for p in table.grid.prices],
        "memory": table.grid.memory,
        "gains": [list(row) for row in table.gains],
    }


def gain_table_from_dict(payload: dict) -> GainTable:
    grid = PriceGrid.from_values(payload["prices"], int(payload["memory"]))
    return GainTable.from_rows(grid, payload["gains"])


def load_gain_table(path: str | Path, memory: int | None = None) -> GainTable:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        if memory is None:
            raise ValueError("CSV gain tables need an explicit memory length")
        with path.open(newline="") as handle:
            rows = [row for row in csv.reader(handle) if row]
        grid = PriceGrid.from_values([as_price(cell) for cell in rows[0]], memory)
        return GainTable.from_rows(grid, [[float(cell) for cell in row] for row in rows[1:]])
    payload = json.loads(path.read_text())
    table = gain_table_from_dict(payload)
    if memory is not None and memory != table.grid.memory:
        raise ValueError(
            f"--memory {memory} conflicts with the file's memory {table.grid.memory}"
        )
    return table


def save_gain_table(table: GainTable, path: str | Path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with path.open("w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow([format_price(p) for p in table.grid.prices])
            writer.writerows([[repr(g) for g in row] for row in table.gains])
        return
    path.write_text(json.dumps(gain_table_to_dict(table), indent=2) + "\n")


def load_model(path: str | Path) -> tuple[AllocationModel, DiscountSet]:
    payload = json.loads(Path(path).read_text())
    model = AllocationModel(
        feature_names=tuple(payload["feature_names"]),
        alpha_weights=np.asarray(payload["alpha_weights"], dtype=float),
        beta_weights=np.asarray(payload["beta_weights"], dtype=float),
        pivot=float(payload.get("pivot", 0.15)),
    )
    discounts = DiscountSet(tuple(payload["discounts"])) if "discounts" in payload else DiscountSet()
    return model, discounts


def save_model(model: AllocationModel, discounts: DiscountSet, path: str | Path) -> None:
    payload = {
        "feature_names": list(model.feature_names),
        "alpha_weights": [float(w) for w in model.alpha_weights],
        "beta_weights": [float(w) for w in model.beta_weights],
        "pivot": model.pivot,
        "discounts": list(discounts.values),
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def _sidecar_path(path: Path) -> Path:
    return path.with_name(path.name + ".meta.json")


def save_dataset(dataset: CouponDataset, path: str | Path) -> Path:
    """Write the CSV panel plus its JSON sidecar; returns the sidecar path."""
    path = Path(path)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["customer_id", "day", *dataset.feature_names, "coupon_value", "purchased"]
        )
        for i in range(dataset.num_rows):
            writer.writerow([
                int(dataset.customer_ids[i]),
                int(dataset.days[i]),
                *[repr(float(x)) for x in dataset.features[i]],
                repr(float(dataset.coupons[i])),
                int(dataset.purchases[i]),
            ])
    sidecar = _sidecar_path(path)
    sidecar.write_text(json.dumps({
        "feature_columns": list(dataset.feature_names),
        "reference_feature": dataset.reference_feature,
        "discounts": list(dataset.discounts),
        "memory": dataset.memory,
    }, indent=2) + "\n")
    return sidecar


def load_dataset(path: str | Path) -> CouponDataset:
    path = Path(path)
    meta = json.loads(_sidecar_path(path).read_text())
    feature_names = tuple(meta["feature_columns"])
    ids, days, coupons, purchases = [], [], [], []
    features = []
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        expected = ["customer_id", "day", *feature_names, "coupon_value", "purchased"]
        if header != expected:
            raise ValueError(f"unexpected dataset header {header!r}")
        for row in reader:
            if not row:
                continue
            ids.append(int(row[0]))
            days.append(int(row[1]))
            features.append([float(cell) for cell in row[2:-2]])
            coupons.append(float(row[-2]))
            purchases.append(int(row[-1]))
    return CouponDataset(
        feature_names=feature_names,
        reference_feature=meta["reference_feature"],
        discounts=tuple(float(v) for v in meta["discounts"]),
        memory=int(meta["memory"]),
        customer_ids=np.asarray(ids),
        days=np.asarray(days),
        features=np.asarray(features, dtype=float),
        coupons=np.asarray(coupons, dtype=float),
        purchases=np.asarray(purchases, dtype=int),
    )


def customers_from_dataset(dataset: CouponDataset) -> list[CustomerRecord]:
    """One record per customer: latest-day features, full coupon history."""
    records: dict[int, CustomerRecord] = {}
    latest_day: dict[int, int] = {}
    order = np.lexsort((dataset.days, dataset.customer_ids))
    for i in order:
        cid = int(dataset.customer_ids[i])
        day = int(dataset.days[i])
        if cid not in records:
            records[cid] = CustomerRecord(cid, dataset.features[i], [])
            latest_day[cid] = day
        record = records[cid]
        record.history.append((float(dataset.coupons[i]), int(dataset.purchases[i])))
        if day >= latest_day[cid]:
            record.features = dataset.features[i]
            latest_day[cid] = day
    return [records[cid] for cid in sorted(records)]
