"""Tests for the CRO-SL reef operators and iteration loop."""

from collections import Counter

import numpy as np
import pytest

from reefopt.core import ConfigError
from reefopt.engine import Coral, EncodingSpec, Problem, Reef, RunParams, SphereProblem
from reefopt.engine.cro import (
    Evaluator,
    budding,
    depredation,
    initialize_reef,
    iterate,
    make_rng,
    run,
    settle,
)
from reefopt.substrates import SubstrateConfig
from reefopt.telemetry import RunTelemetry


class ScriptedRng:
    """Returns pre-set slot indices from integers() and fixed values from random()."""

    def __init__(self, slots, uniform=0.0):
        self.slots = list(slots)
        self.uniform = uniform
        self.calls = 0

    def integers(self, *_args, **_kwargs):
        self.calls += 1
        return self.slots.pop(0)

    def random(self):
        return self.uniform


class ConstantProblem(Problem):
    kind = "constant"

    def __init__(self):
        super().__init__(EncodingSpec.uniform(3, 0.0, 1.0))

    def evaluate(self, genome):
        return 1.0


class HalfInfeasibleProblem(Problem):
    kind = "half"

    def __init__(self):
        super().__init__(EncodingSpec.uniform(2, -1.0, 1.0))

    def evaluate(self, genome):
        return float("nan") if genome[0] > 0 else float(genome[1] ** 2)


def _params(**overrides) -> RunParams:
    base = dict(
        substrates=(SubstrateConfig("GM"), SubstrateConfig("DE")),
        reef_size=20,
        rho0=0.6,
        iterations=30,
        seed=3,
    )
    base.update(overrides)
    return RunParams(**base)


def _reef(fitness, size=None) -> Reef:
    """Reef over a 1-gene encoding whose occupants' genomes equal their slot index."""
    size = size or len(fitness)
    reef = Reef.empty(size, 1, EncodingSpec.uniform(1, 0.0, 100.0))
    for slot, f in enumerate(fitness):
        if f is not None:
            reef.place(slot, Coral(np.array([float(slot)]), f, True))
    return reef


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------


def test_params_fraction_sum():
    with pytest.raises(ConfigError, match="fa \\+ engine.fd"):
        _params(fa=0.6, fd=0.5)


def test_params_rho0_open_interval():
    with pytest.raises(ConfigError, match="rho0"):
        _params(rho0=1.0)


def test_params_reef_must_split_evenly():
    with pytest.raises(ConfigError, match="not divisible"):
        _params(reef_size=21)


def test_params_duplicate_substrate_names():
    with pytest.raises(ConfigError, match="unique"):
        _params(substrates=(SubstrateConfig("GM"), SubstrateConfig("GM")))


@pytest.mark.parametrize("rho0, expected", [(0.6, 120), (0.9, 180)])
def test_occupied_at_start(rho0, expected):
    assert _params(reef_size=200, rho0=rho0).occupied_at_start == expected


def test_digest_ignores_seed():
    assert _params(seed=1).digest() == _params(seed=2).digest()
    assert _params(seed=1).digest() != _params(seed=1, pd=0.2).digest()


# ---------------------------------------------------------------------------
# Initialization
# ---------------------------------------------------------------------------


def test_initialize_without_seeds():
    params = _params(reef_size=200, rho0=0.6)
    reef = initialize_reef(params, SphereProblem(4), make_rng(0))
    assert reef.n_occupied == 120
    assert reef.size - reef.n_occupied == 80
    occupied = reef.occupied_slots()
    assert {reef.provenance[s] for s in occupied} == {"random"}
    assert reef.best_ever.fitness == pytest.approx(reef.fitness[occupied].min())


def test_initialize_slot_provenance_with_seed():
    params = _params(reef_size=10, rho0=0.5, perturb_fraction=0.5)
    seed = np.zeros(3)
    reef = initialize_reef(params, SphereProblem(3), make_rng(1), seeds=[seed])
    counts = Counter(reef.provenance[s] for s in reef.occupied_slots())
    assert counts == {"seed": 1, "perturbed": 2, "random": 2}
    first = reef.occupied_slots()[0]
    assert reef.provenance[first] == "seed"
    assert reef.best_ever.fitness == 0.0


def test_initialize_too_many_seeds():
    params = _params(reef_size=10, rho0=0.2)
    seeds = [np.full(3, float(k)) for k in range(3)]
    with pytest.raises(ConfigError, match="exceed"):
        initialize_reef(params, SphereProblem(3), make_rng(0), seeds=seeds)


def test_initialize_occupants_distinct():
    params = _params(reef_size=20, rho0=0.5)
    reef = initialize_reef(params, SphereProblem(2), make_rng(5))
    rows = reef.genomes[reef.occupied_slots()]
    assert len(np.unique(rows, axis=0)) == len(rows)


# ---------------------------------------------------------------------------
# Settlement, budding, depredation
# ---------------------------------------------------------------------------


def test_settle_replaces_worse_on_second_attempt():
    reef = _reef([5.0, 1.0, None, None])
    rng = ScriptedRng([1, 0])
    larva = Coral(np.array([42.0]), 3.0, True)
    assert settle(reef, larva, 2, rng)
    assert reef.fitness[0] == 3.0
    assert reef.genomes[0, 0] == 42.0
    assert reef.fitness[1] == 1.0
    assert rng.calls == 2


def test_settle_gives_up_after_kappa_attempts():
    reef = _reef([1.0, 1.0, None])
    rng = ScriptedRng([0, 1, 2])
    larva = Coral(np.array([42.0]), 2.0, True)
    assert not settle(reef, larva, 2, rng)
    assert reef.n_occupied == 2
    assert rng.calls == 2


def test_settle_equal_fitness_does_not_displace():
    reef = _reef([2.0])
    assert not settle(reef, Coral(np.array([9.0]), 2.0, True), 1, ScriptedRng([0]))


def test_settle_takes_empty_slot():
    reef = _reef([1.0, None])
    assert settle(reef, Coral(np.array([9.0]), 50.0, True), 1, ScriptedRng([1]))
    assert reef.n_occupied == 2


def test_settle_rejects_duplicate():
    reef = _reef([4.0, None])
    rng = ScriptedRng([1])
    assert not settle(reef, Coral(np.array([0.0]), 4.0, True), 3, rng)
    assert rng.calls == 0


def test_settle_rejects_duplicate_whatever_its_cost():
    # a cost jump between genomes within the duplicate tolerance
    reef = _reef([4.0, None])
    rng = ScriptedRng([1])
    assert not settle(reef, Coral(np.array([1e-13]), 3.1, True), 3, rng)
    assert rng.calls == 0
    assert reef.contains_genome(np.array([0.0]))


def test_settle_rejects_unevaluated():
    reef = _reef([None])
    assert not settle(reef, Coral(np.array([1.0])), 1, ScriptedRng([0]))


def test_depredation_removes_worst_higher_slot_first():
    reef = _reef([1.0, 3.0, 3.0, 2.0])
    removed = depredation(reef, fd=0.25, pd=1.0, rng=np.random.default_rng(0))
    assert removed == 1
    assert reef.occupancy.tolist() == [True, True, False, True]


def test_depredation_floor_of_fraction():
    reef = _reef([1.0, 3.0, 3.0, 2.0])
    assert depredation(reef, fd=0.6, pd=1.0, rng=np.random.default_rng(0)) == 2
    assert reef.occupancy.tolist() == [True, False, False, True]


def test_depredation_skipped_with_zero_probability():
    reef = _reef([1.0, 3.0])
    assert depredation(reef, fd=1.0, pd=0.0, rng=np.random.default_rng(0)) == 0
    assert reef.n_occupied == 2


def test_budding_clones_rejected_as_duplicates():
    reef = _reef([1.0, 2.0, 3.0, 4.0, None, None, None, None])
    attempts, settled = budding(reef, fa=0.5, kappa=3, rng=np.random.default_rng(0))
    assert (attempts, settled) == (2, 0)
    assert reef.n_occupied == 4


def test_budding_ceil_of_fraction():
    reef = _reef([1.0, 2.0, 3.0])
    assert budding(reef, fa=0.1, kappa=1, rng=np.random.default_rng(0))[0] == 1


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def test_evaluator_rejects_non_finite_costs():
    with Evaluator(HalfInfeasibleProblem()) as evaluator:
        corals = evaluator.evaluate_many([np.array([0.5, 0.2]), np.array([-0.5, 0.2])])
    assert not corals[0].evaluated
    assert corals[0].fitness == float("inf")
    assert corals[1].evaluated
    assert corals[1].fitness == pytest.approx(0.04)
    assert evaluator.evaluations == 2


def test_evaluator_clamps_before_evaluating():
    with Evaluator(SphereProblem(2, -1.0, 1.0)) as evaluator:
        coral = evaluator.evaluate(np.array([3.0, -3.0]))
    assert coral.genome.tolist() == [1.0, -1.0]
    assert coral.fitness == 2.0


def test_threaded_evaluator_keeps_order():
    genomes = [np.array([float(k), 0.0]) for k in range(-3, 4)]
    problem = SphereProblem(2, -5.0, 5.0)
    with Evaluator(problem, threads=3) as evaluator:
        costs = [c.fitness for c in evaluator.evaluate_many(genomes)]
    assert costs == [float(k * k) for k in range(-3, 4)]


# ---------------------------------------------------------------------------
# Full runs
# ---------------------------------------------------------------------------


def test_run_is_reproducible():
    problem = SphereProblem(5)
    best_a, tel_a = run(_params(), problem)
    best_b, tel_b = run(_params(), problem)
    assert best_a.fitness == best_b.fitness
    assert np.array_equal(best_a.genome, best_b.genome)
    assert tel_a.records == tel_b.records
    assert tel_a.evaluations == tel_b.evaluations


def test_run_threads_do_not_change_the_result():
    problem = SphereProblem(5)
    best_a, tel_a = run(_params(), problem, threads=1)
    best_b, tel_b = run(_params(), problem, threads=4)
    assert best_a.fitness == best_b.fitness
    assert tel_a.records == tel_b.records


def test_different_seeds_differ():
    problem = SphereProblem(5)
    _, tel_a = run(_params(seed=1), problem)
    _, tel_b = run(_params(seed=2), problem)
    assert tel_a.records != tel_b.records


def test_run_invariants():
    problem = SphereProblem(5)
    best, telemetry = run(_params(iterations=60), problem)
    series = telemetry.best_fitness_series()
    assert len(telemetry.records) == 60
    assert np.all(np.diff(series) <= 0)
    assert best.fitness == series[-1]
    assert telemetry.seed == 3
    assert telemetry.generator == "PCG64"
    for record in telemetry.records:
        assert all(s <= p for p, s in zip(record.produced, record.settled))
        if record.best_substrate is not None:
            assert record.produced[record.best_substrate] > 0


def test_sphere_is_driven_down():
    params = _params(
        substrates=(SubstrateConfig("HS"), SubstrateConfig("DE"), SubstrateConfig("GM")),
        reef_size=60,
        iterations=200,
    )
    best, telemetry = run(params, SphereProblem(5))
    assert best.fitness < 1.0
    assert best.fitness < telemetry.records[0].best_fitness


def test_brooding_only_run_flags_nothing():
    _, telemetry = run(_params(pb=0.0, iterations=5), SphereProblem(3))
    for record in telemetry.records:
        assert record.best_substrate is None
        assert sum(record.produced[:2]) == 0
        assert record.produced[telemetry.brooding_index] > 0


def test_stagnation_regenerates_and_keeps_best():
    params = _params(
        substrates=(SubstrateConfig("GM"),), reef_size=10, iterations=4, stagnation_window=1
    )
    problem = ConstantProblem()
    rng = make_rng(0)
    reef = initialize_reef(params, problem, rng)
    best = reef.best_ever.copy()
    telemetry = RunTelemetry(substrate_names=["gm"])
    for _ in range(params.iterations):
        reef = iterate(reef, params, problem, rng, telemetry)
    assert all(record.regenerated for record in telemetry.records)
    assert np.array_equal(reef.best_ever.genome, best.genome)
    assert reef.stagnation == 0


def test_zero_iterations():
    best, telemetry = run(_params(iterations=0), SphereProblem(3))
    assert telemetry.records == []
    assert best is not None


class IntegerSphereProblem(Problem):
    kind = "integer-sphere"

    def __init__(self):
        super().__init__(EncodingSpec.uniform(3, -2.0, 2.0, kind="integer"))

    def evaluate(self, genome):
        return float(np.dot(genome, genome))


class StepProblem(ConstantProblem):
    """Constant cost that the test can lower between iterations."""

    level = 1.0

    def evaluate(self, genome):
        return self.level


def _regenerations(problem, iterations, window, lower_at=None):
    params = _params(
        substrates=(SubstrateConfig("GM"),),
        reef_size=10,
        iterations=iterations,
        stagnation_window=window,
    )
    rng = make_rng(0)
    reef = initialize_reef(params, problem, rng)
    telemetry = RunTelemetry(substrate_names=["gm"])
    for t in range(iterations):
        if t == lower_at:
            problem.level = 0.5
        reef = iterate(reef, params, problem, rng, telemetry)
    return [record.iteration for record in telemetry.records if record.regenerated]


def test_stagnation_fires_every_window():
    assert _regenerations(StepProblem(), 300, 100) == [99, 199, 299]


def test_improvement_restarts_the_stagnation_count():
    assert _regenerations(StepProblem(), 300, 100, lower_at=99) == [199, 299]


def _assert_distinct(reef):
    rows = reef.genomes[reef.occupied_slots()]
    for row in rows:
        assert reef.encoding.equal_rows(rows, row).sum() == 1


@pytest.mark.parametrize(
    "problem, substrates",
    [
        (IntegerSphereProblem(), (SubstrateConfig("GM"), SubstrateConfig("TwoPx"))),
        (SphereProblem(2), (SubstrateConfig("HS", params={"hmcr": 1.0, "par": 0.0}),)),
    ],
    ids=["integer", "harmony-copies"],
)
def test_occupants_stay_distinct_through_a_run(problem, substrates):
    params = _params(
        substrates=substrates,
        reef_size=20,
        iterations=100,
        budding_enabled=True,
        fa=0.2,
        stagnation_window=15,
    )
    rng = make_rng(5)
    reef = initialize_reef(params, problem, rng)
    _assert_distinct(reef)
    telemetry = RunTelemetry(substrate_names=[s.name for s in substrates])
    for _ in range(params.iterations):
        reef = iterate(reef, params, problem, rng, telemetry)
        _assert_distinct(reef)


@pytest.mark.slow
@pytest.mark.parametrize("seed", [1, 2, 3])
def test_sphere_oracle(seed):
    params = RunParams(
        substrates=tuple(SubstrateConfig(kind) for kind in ("HS", "DE", "TwoPx", "MPx", "GM")),
        reef_size=120,
        iterations=1000,
        seed=seed,
    )
    best, _ = run(params, SphereProblem(10, -5.0, 5.0))
    assert best.fitness < 1e-2
