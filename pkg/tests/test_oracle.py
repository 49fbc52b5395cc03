"""Exact verifiers: state graph, max-mean cycle, generator enumeration, replay."""

from fractions import Fraction

import pytest

from refcycle.core import GainTable, GeneratorCycle, PriceCycle, cycle_objective, expand
from refcycle.instances import integer_grid, random_monotone_table, random_table
from refcycle.oracle import (
    NodeBudgetError,
    StateGraph,
    exact_objective,
    exhaustive_generators,
    max_mean_cycle,
    optimal_cycles_unique,
    simulate,
)


def brute_force_max_mean(graph: StateGraph) -> Fraction:
    """Independent oracle: enumerate every simple cycle of the state graph."""
    index = graph.node_index()
    succ = [
        [(index[graph.successor(node, a)], graph.edge_weight(node, a))
         for a in range(graph.num_actions)]
        for node in graph.nodes
    ]
    n = len(succ)
    best: list[Fraction | None] = [None]

    def extend(start: int, node: int, on_path: set[int], weight: Fraction, length: int):
        for nxt, w in succ[node]:
            if nxt == start:
                mean = (weight + w) / (length + 1)
                if best[0] is None or mean > best[0]:
                    best[0] = mean
            elif nxt > start and nxt not in on_path:
                on_path.add(nxt)
                extend(start, nxt, on_path, weight + w, length + 1)
                on_path.remove(nxt)

    for start in range(n):
        extend(start, start, {start}, Fraction(0), 0)
    assert best[0] is not None
    return best[0]


def strictness_instance() -> GainTable:
    """Non-monotone table whose optimum needs a repeated price: max mean 4/5
    via cycle 13323, while the best distinct-price cycle reaches only 3/4."""
    grid = integer_grid(3, 2)
    return GainTable.from_rows(grid, [
        [0.0, 0.1, 1.0],
        [1.0, 0.0, 1.0],
        [0.0, 0.0, 0.0],
    ])


# --- state graph -------------------------------------------------------------


def test_state_graph_shape(demo_table):
    graph = StateGraph.build(demo_table)
    assert graph.num_nodes == 16
    assert graph.num_actions == 4
    assert graph.successor((2, 0), 3) == (0, 3)
    assert graph.edge_weight((2, 0), 3) == Fraction(1)  # reference 1, price 4


def test_node_budget(demo_table):
    with pytest.raises(NodeBudgetError):
        StateGraph.build(demo_table, node_budget=15)


# --- max mean cycle ----------------------------------------------------------


def test_demo_instance_value_and_witness(demo_table):
    result = max_mean_cycle(StateGraph.build(demo_table))
    assert result.value == 1.0
    assert result.value_exact == Fraction(1)
    assert result.nodes == 16
    assert cycle_objective(result.cycle, demo_table) == result.value
    # several cycles attain 1.0 here; the deterministic witness is the
    # five-step expansion of generator (1, 2, 3)
    assert result.cycle.tokens == (0, 1, 1, 2, 2)


def test_constant_table():
    grid = integer_grid(3, 2)
    table = GainTable.from_rows(grid, [[0.25] * 3] * 3)
    result = max_mean_cycle(StateGraph.build(table))
    assert result.value == 0.25


def test_matches_brute_force_enumeration(rng):
    for _ in range(25):
        n = int(rng.integers(2, 4))
        memory = int(rng.integers(1, 3))
        table = (random_monotone_table if rng.random() < 0.5 else random_table)(
            rng, n, memory
        )
        graph = StateGraph.build(table)
        result = max_mean_cycle(graph)
        assert result.value_exact == brute_force_max_mean(graph)
        assert exact_objective(result.cycle, table) == result.value_exact


def test_witness_objective_matches_value(rng):
    for _ in range(10):
        table = random_monotone_table(rng, 4, 2)
        result = max_mean_cycle(StateGraph.build(table))
        assert cycle_objective(result.cycle, table) == pytest.approx(result.value, abs=1e-12)


# --- exhaustive generator search ----------------------------------------------


def test_exhaustive_single_price():
    grid = integer_grid(1, 2)
    table = GainTable.from_rows(grid, [[0.625]])
    result = exhaustive_generators(table)
    assert result.value == 0.625
    assert result.best.values == (0,)


def test_exhaustive_on_demo_table(demo_table):
    # generator (1,2,3) collects the same unit gains as the mixed cycle, so
    # the enumeration reaches 1.0 here as well
    result = exhaustive_generators(demo_table)
    assert result.value == 1.0
    assert result.best.values == (0, 1, 2)


def test_exhaustive_on_two_price_unique_instance():
    grid = integer_grid(2, 2)
    table = GainTable.from_rows(grid, [[0.0, 0.5], [2.0, 0.5]])
    result = exhaustive_generators(table)
    assert result.value == 1.0
    assert result.best.values == (0, 1)


def test_exhaustive_agrees_with_expansion_objective(rng):
    table = random_monotone_table(rng, 3, 2)
    result = exhaustive_generators(table)
    assert cycle_objective(expand(result.best, table.grid), table) == pytest.approx(
        result.value, abs=1e-12
    )


def test_exhaustive_size_guard(rng):
    table = random_monotone_table(rng, 4, 1)
    with pytest.raises(ValueError):
        exhaustive_generators(table, max_prices=3)


def test_monotone_tables_need_no_repeated_prices(rng):
    for _ in range(20):
        n = int(rng.integers(2, 5))
        memory = int(rng.integers(1, 4))
        table = random_monotone_table(rng, n, memory)
        full = max_mean_cycle(StateGraph.build(table))
        reduced = exhaustive_generators(table)
        assert full.value_exact == reduced.value_exact


def test_nonmonotone_gap_is_witnessed():
    table = strictness_instance()
    full = max_mean_cycle(StateGraph.build(table))
    reduced = exhaustive_generators(table)
    assert full.value_exact == Fraction(4, 5)
    assert reduced.value_exact == Fraction(3, 4)
    assert reduced.best.values == (0, 2, 1)
    assert full.value_exact > reduced.value_exact


def test_nonmonotone_never_below_generators(rng):
    for _ in range(15):
        table = random_table(rng, 3, 2)
        full = max_mean_cycle(StateGraph.build(table))
        reduced = exhaustive_generators(table)
        assert full.value_exact >= reduced.value_exact


# --- uniqueness analysis -------------------------------------------------------


def test_unique_cycle_reported(demo_table):
    grid = integer_grid(2, 2)
    unique_table = GainTable.from_rows(grid, [[0.0, 0.5], [2.0, 0.5]])
    value, cycle = optimal_cycles_unique(StateGraph.build(unique_table))
    assert value == Fraction(1)
    assert cycle is not None and cycle.tokens == (0, 1, 1)

    value, cycle = optimal_cycles_unique(StateGraph.build(demo_table))
    assert value == Fraction(1)
    assert cycle is None  # 12233 and 414243 both attain the optimum


# --- replay -------------------------------------------------------------------


def test_simulate_constant(demo_table):
    steps = simulate(PriceCycle.from_prices(demo_table.grid, [2]), demo_table, 10)
    assert len(steps) == 10
    # start state is all-top-price, so the first reference is the top price
    assert steps[0].reference == Fraction(4)
    assert all(s.price == Fraction(2) for s in steps)
    assert steps[-1].reference == Fraction(2)
    assert steps[-1].gain == demo_table.gains[1][1]


def test_simulate_running_average_converges(demo_table):
    cycle = PriceCycle.from_prices(demo_table.grid, [4, 1, 4, 2, 4, 3])
    steps = simulate(cycle, demo_table, 600)
    average = sum(s.gain for s in steps) / len(steps)
    assert abs(average - 1.0) <= 0.01


def test_simulate_expansion_reference_is_previous_value(rng):
    grid = integer_grid(4, 3)
    table = random_monotone_table(rng, 4, 3)
    generator = GeneratorCycle((0, 2, 1))
    cycle = expand(generator, grid)
    steps = simulate(cycle, table, 3 * len(cycle) + len(cycle))
    d = len(generator)
    # after one full lap the reference while offering values[t] is values[t-1]
    offsets = []
    position = 0
    for t, v in enumerate(generator.values):
        count = 1 + (grid.memory - 1) * (v > generator.values[(t - 1) % d])
        offsets.extend([generator.values[(t - 1) % d]] * count)
        position += count
    c = len(cycle)
    for t in range(c, 3 * c):
        expected_ref = grid.prices[offsets[t % c]]
        assert steps[t].reference == expected_ref


def test_simulate_policy_callable(demo_table):
    steps = simulate(lambda state: min(state), demo_table, 5)
    assert len(steps) == 5
    with pytest.raises(ValueError):
        simulate(lambda state: 9, demo_table, 2)
    with pytest.raises(ValueError):
        simulate(PriceCycle((0,)), demo_table, 0)
