"""Tests for the S11 antenna score and its surrogate problem."""

import numpy as np
import pytest

from reefopt.core import ConfigError
from reefopt.problems import (
    AntennaTraceProblem,
    S11Trace,
    antenna_fitness,
    evaluate_solution,
    load_trace,
    synth_trace,
)
from reefopt.problems.antenna import frequency_axis


def _flat(value: float, freq=None) -> S11Trace:
    freq = np.arange(2400.0, 2502.0, 2.0) if freq is None else np.asarray(freq, dtype=float)
    return S11Trace(freq, np.full(len(freq), value))


def test_flat_matched_trace():
    trace = _flat(-15.0)
    assert len(trace.window()) == 51
    assert antenna_fitness(trace) == pytest.approx(43.8)


def test_flat_unmatched_trace():
    assert antenna_fitness(_flat(-5.0)) == pytest.approx(1.0)


def test_threshold_is_strict():
    trace = S11Trace(np.array([2400.0, 2450.0]), np.array([-10.0, -10.0]))
    assert antenna_fitness(trace) == pytest.approx(2.0)


def test_out_of_window_samples_are_ignored():
    inside = _flat(-12.0)
    freq = np.concatenate([[2300.0, 2350.0], inside.freq_mhz, [2550.0]])
    s11 = np.concatenate([[-40.0, -1.0], inside.s11_db, [-30.0]])
    assert antenna_fitness(S11Trace(freq, s11)) == pytest.approx(antenna_fitness(inside))


def test_deeper_sample_never_lowers_the_score():
    trace = _flat(-8.0)
    deeper = trace.s11_db.copy()
    deeper[10] = -20.0
    assert antenna_fitness(S11Trace(trace.freq_mhz, deeper)) > antenna_fitness(trace)


def test_empty_window_rejected():
    with pytest.raises(ConfigError, match="no samples"):
        antenna_fitness(_flat(-15.0, freq=[2000.0, 2100.0]))


def test_trace_needs_ascending_frequencies():
    with pytest.raises(ConfigError, match="ascending"):
        S11Trace(np.array([2450.0, 2400.0]), np.array([-1.0, -2.0]))


def test_load_trace_csv(tmp_path):
    path = tmp_path / "s11.csv"
    path.write_text("freq_mhz,s11_db\n2400,-15\n2450,-15\n2500,-15\n\n")
    trace = load_trace(path)
    assert trace.freq_mhz.tolist() == [2400.0, 2450.0, 2500.0]
    assert antenna_fitness(trace) == pytest.approx(0.8 * 3 + 3.0)


def test_load_trace_bad_row(tmp_path):
    path = tmp_path / "s11.csv"
    path.write_text("freq_mhz,s11_db\n2400,deep\n")
    with pytest.raises(ConfigError, match="row 1"):
        load_trace(path)


def test_load_trace_bad_header(tmp_path):
    path = tmp_path / "s11.csv"
    path.write_text("f,s\n")
    with pytest.raises(ConfigError, match="expected header"):
        load_trace(path)


def test_frequency_axis():
    freq = frequency_axis()
    assert len(freq) == 151
    assert freq[[0, -1]].tolist() == [2300.0, 2600.0]


def test_surrogate_matched_at_resonance():
    trace = synth_trace(2450.0, 10.0, 50.0)
    k = int(np.argmin(trace.s11_db))
    assert trace.freq_mhz[k] == pytest.approx(2450.0, abs=2.0)
    assert trace.s11_db[k] < -40.0


def test_surrogate_mismatched_load():
    trace = synth_trace(2450.0, 10.0, 150.0)
    assert trace.s11_db.min() == pytest.approx(20 * np.log10(0.5), abs=0.01)


def test_problem_minimises_negated_score():
    problem = AntennaTraceProblem()
    genome = np.array([2450.0, 5.0, 50.0])
    score = antenna_fitness(problem.trace(genome))
    assert problem.evaluate(genome) == pytest.approx(-score)
    assert problem.describe(genome)["score"] == pytest.approx(score)
    assert len(problem.encoding) == 3


def test_centred_resonator_beats_detuned():
    problem = AntennaTraceProblem()
    centred = problem.evaluate(np.array([2450.0, 5.0, 50.0]))
    detuned = problem.evaluate(np.array([2650.0, 40.0, 150.0]))
    assert centred < detuned


def test_solution_with_trace_file(tmp_path):
    path = tmp_path / "measured.csv"
    path.write_text("freq_mhz,s11_db\n2400,-5\n2500,-5\n")
    cost = evaluate_solution(AntennaTraceProblem(), {"trace": "measured.csv"}, base_dir=tmp_path)
    assert cost == pytest.approx(-1.0)
