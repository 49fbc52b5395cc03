"""Polynomial-time optimal price cycles via the reduced per-price process.

Restricting attention to cycles of distinct prices (each increase held for
``memory`` steps, each decrease offered once) collapses the exponential state
space to one state per price: offering p from reference r earns g(r, p) per
step over k(r, p) = 1 + (memory-1)*[r < p] steps.  The best cycle maximizes
the ratio of total gain to total time, found here by parametric search:
bisection on the mean with positive-cycle detection on edge profits
g(r, p)*k(r, p) - mean*k(r, p), followed by exact rational re-scoring of the
extracted cycle until no improving cycle remains.  The returned mean is exact
for the instance, the bias vector solves the average-reward optimality
equations, and ties are broken to the lexicographically least canonical
generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import GainTable, GeneratorCycle, PriceCycle, expand, expansion_count

__all__ = [
    "SolveResult",
    "transition_steps",
    "generator_objective",
    "solve",
    "bellman_residual",
]

# beyond this many prices, equal-value generators are not enumerated for
# tie-breaking and the first extracted optimal cycle is returned
_TIE_ENUMERATION_LIMIT = 8


def transition_steps(memory: int, reference_index: int, price_index: int) -> int:
    """Steps k(r, p) consumed by offering price p from reference r."""
    return expansion_count(memory, reference_index, price_index)


def generator_objective(generator: GeneratorCycle, table: GainTable) -> float:
    """Per-step average gain of a distinct-price cycle.

    Equals sum_t g(v[t-1], v[t]) * k_t / sum_t k_t, which matches
    :func:`refcycle.core.cycle_objective` of the expansion because the
    reference while offering v[t] is always the previous value.
    """
    return float(_generator_objective_exact(generator, table))


def _generator_objective_exact(generator: GeneratorCycle, table: GainTable) -> Fraction:
    n = len(table.grid)
    if any(v >= n for v in generator.values):
        raise ValueError("generator value out of range for grid")
    memory = table.grid.memory
    values = generator.values
    d = len(values)
    total = Fraction(0)
    steps = 0
    for t, v in enumerate(values):
        prev = values[(t - 1) % d]
        k = transition_steps(memory, prev, v)
        total += Fraction(table.gains[prev][v]) * k
        steps += k
    return total / steps


@dataclass(frozen=True)
class SolveResult:
    """Optimal mean, optimality-equation bias, and the optimal cycle.

    ``assumption_violated`` flags gain tables that are not reference-monotone;
    the result is then only the best distinct-price cycle, which may be beaten
    by cycles revisiting a price (see the oracle).
    """

    opt: float
    bias: tuple[float, ...]
    generator: GeneratorCycle
    cycle: PriceCycle
    assumption_violated: bool
    opt_exact: Fraction

    def __post_init__(self) -> None:
        if len(self.bias) == 0:
            raise ValueError("bias vector cannot be empty")


def _reduced_weights(table: GainTable, mean: Fraction) -> list[list[Fraction]]:
    n = len(table.grid)
    memory = table.grid.memory
    out = []
    for r in range(n):
        row = []
        for p in range(n):
            k = transition_steps(memory, r, p)
            row.append((Fraction(table.gains[r][p]) - mean) * k)
        out.append(row)
    return out


def _find_positive_cycle(reduced: list[list[Fraction]]) -> list[int] | None:
    """Node cycle with positive total reduced weight, or None.

    Longest-walk relaxation from an implicit zero source; a relaxation that
    survives n rounds exposes a positive cycle in the predecessor graph.
    """
    n = len(reduced)
    dist = [Fraction(0)] * n
    pred = [-1] * n
    for _ in range(n):
        changed = False
        for u in range(n):
            du = dist[u]
            row = reduced[u]
            for v in range(n):
                cand = du + row[v]
                if cand > dist[v]:
                    dist[v] = cand
                    pred[v] = u
                    changed = True
        if not changed:
            return None
    start = None
    for u in range(n):
        du = dist[u]
        row = reduced[u]
        for v in range(n):
            if du + row[v] > dist[v]:
                pred[v] = u
                start = v
                break
        if start is not None:
            break
    if start is None:
        return None
    v = start
    for _ in range(n):
        v = pred[v]
    cycle = [v]
    u = pred[v]
    while u != v:
        cycle.append(u)
        u = pred[u]
    cycle.reverse()
    return cycle


def _cycle_ratio(nodes: list[int], table: GainTable) -> Fraction:
    return _generator_objective_exact(GeneratorCycle(tuple(nodes)), table)


def _source_potentials(reduced: list[list[Fraction]]) -> list[Fraction]:
    """Longest-walk potentials; requires no positive cycle in ``reduced``."""
    n = len(reduced)
    h = [Fraction(0)] * n
    for _ in range(n + 1):
        changed = False
        for u in range(n):
            base = h[u]
            for v in range(n):
                cand = base + reduced[u][v]
                if cand > h[v]:
                    h[v] = cand
                    changed = True
        if not changed:
            return h
    raise AssertionError("positive cycle present at the claimed optimum")


def _tight_simple_cycles(tight: list[list[int]]) -> list[tuple[int, ...]]:
    """All simple cycles of the tight subgraph, each from its least node."""
    n = len(tight)
    cycles: list[tuple[int, ...]] = []
    for s in range(n):
        path: list[int] = [s]
        on_path = {s}

        def extend() -> None:
            u = path[-1]
            for v in tight[u]:
                if v == s:
                    cycles.append(tuple(path))
                elif v > s and v not in on_path:
                    path.append(v)
                    on_path.add(v)
                    extend()
                    on_path.remove(v)
                    path.pop()

        extend()
    return cycles


def solve(table: GainTable) -> SolveResult:
    """Best distinct-price cycle, its exact mean, and the bias vector.

    Bisection narrows the mean to within 1e-12 of the optimum, the extracted
    cycle is re-scored exactly, and re-probing at the exact ratio repeats
    until no cycle improves on it; the final mean is the exact optimum.
    """
    n = len(table.grid)
    gains = [g for row in table.gains for g in row]
    lo = Fraction(min(gains)) - 1
    hi = Fraction(max(gains))
    width_target = Fraction("1e-12") * (1 + Fraction(max(gains)) - Fraction(min(gains)))
    while hi - lo > width_target:
        mid = (lo + hi) / 2
        if _find_positive_cycle(_reduced_weights(table, mid)) is not None:
            lo = mid
        else:
            hi = mid
    candidate = _find_positive_cycle(_reduced_weights(table, lo))
    assert candidate is not None, "optimum strictly exceeds the bracket floor"
    opt = _cycle_ratio(candidate, table)
    while True:
        better = _find_positive_cycle(_reduced_weights(table, opt))
        if better is None:
            break
        candidate = better
        opt = _cycle_ratio(candidate, table)

    reduced = _reduced_weights(table, opt)
    potentials = _source_potentials(reduced)
    tight = [
        [v for v in range(n) if potentials[u] + reduced[u][v] == potentials[v]]
        for u in range(n)
    ]
    if n <= _TIE_ENUMERATION_LIMIT:
        optimal = _tight_simple_cycles(tight)
        assert optimal, "the optimal cycle is tight by construction"
        generator = GeneratorCycle(min(optimal))
    else:
        generator = GeneratorCycle(tuple(candidate)).canonical()

    bias = _bias_to_cycle(reduced, set(generator.values))
    base = bias[0]
    bias = [b - base for b in bias]
    return SolveResult(
        opt=float(opt),
        bias=tuple(float(b) for b in bias),
        generator=generator,
        cycle=expand(generator, table.grid),
        assumption_violated=not table.reference_monotone(),
        opt_exact=opt,
    )


def _bias_to_cycle(reduced: list[list[Fraction]], targets: set[int]) -> list[Fraction]:
    """Best total reduced weight of a walk into the optimal cycle's nodes.

    This is a fixed point of the optimality operator: on the cycle the next
    cycle edge keeps the value, elsewhere some path into the cycle attains it.
    """
    n = len(reduced)
    h: list[Fraction | None] = [Fraction(0) if u in targets else None for u in range(n)]
    for _ in range(n + 1):
        changed = False
        for u in range(n):
            for v in range(n):
                if h[v] is None:
                    continue
                cand = reduced[u][v] + h[v]
                if h[u] is None or cand > h[u]:
                    h[u] = cand
                    changed = True
        if not changed:
            break
    assert all(value is not None for value in h)
    return h  # type: ignore[return-value]


def bellman_residual(result: SolveResult, table: GainTable) -> float:
    """Worst violation of the average-reward optimality equations.

    For each reference r the bias must satisfy
    h(r) = max_p (g(r, p) - opt) * k(r, p) + h(p); a valid solve result keeps
    the maximum absolute gap at floating-point noise.
    """
    n = len(table.grid)
    memory = table.grid.memory
    worst = 0.0
    for r in range(n):
        best = max(
            (table.gains[r][p] - result.opt) * transition_steps(memory, r, p)
            + result.bias[p]
            for p in range(n)
        )
        worst = max(worst, abs(result.bias[r] - best))
    return worst
