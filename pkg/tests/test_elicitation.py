import math
from dataclasses import replace

import pytest

from conftest import quality
from lifeyears.elicitation import (
    ACTIVE,
    CONVERGED,
    INCONSISTENT,
    INDIFFERENT,
    KIND_QUALITY,
    PREFER_A,
    PREFER_B,
    SessionState,
    aggregate,
    estimate,
    intervention_value,
    next_question,
    run_simulated_session,
    simulate_respondent,
    start_quality_session,
    start_sigma_session,
    submit_answer,
    _preference,
)
from lifeyears.elicitation_errors import (
    BadBracketError,
    EmptyInputError,
    InvalidQualityWeightError,
    NotConvergedError,
    SessionFinishedError,
    UnsupportedTruthFamilyError,
)
from lifeyears.evaluators import LinearPaly, QalyPaly
from lifeyears.model import FULL_HEALTH, IMPAIRED


def truth(sigma: float, q_a: float) -> QalyPaly:
    return QalyPaly(sigma, quality(q_a))


def test_quality_session_first_question_is_geometric_midpoint():
    s = start_quality_session(IMPAIRED, 1000.0, 64_000.0, 1e-3)
    q = next_question(s)
    assert q.current_value == pytest.approx(8000.0)
    assert q.adjustable == "count"
    assert q.left.count == 1000.0 and q.left.productivity == 0.0
    assert q.right.state == IMPAIRED and q.right.productivity == 0.0
    assert q.left.duration_years == q.right.duration_years == 1.0


def test_quality_session_bad_brackets():
    with pytest.raises(BadBracketError):
        start_quality_session(IMPAIRED, 64_000.0, 1000.0)
    with pytest.raises(BadBracketError):
        start_quality_session(IMPAIRED, 500.0, 2000.0)  # below the base count
    with pytest.raises(BadBracketError):
        start_quality_session(IMPAIRED, 1000.0, 2000.0, tolerance=0.0)


def test_sigma_session_brackets():
    s = start_sigma_session(0.5, 0.01, 2.0, 1e-3)
    assert s.status == ACTIVE
    with pytest.raises(BadBracketError):
        start_sigma_session(0.5, 0.01, 2.5)  # exceeds 1/q
    with pytest.raises(InvalidQualityWeightError):
        start_sigma_session(0.0, 0.01, 1.0)
    # default upper bound is 1/q
    assert start_sigma_session(0.25).hi == pytest.approx(4.0)


def test_sigma_question_shape():
    s = start_sigma_session(0.5, 0.4, 0.8, 1e-3, state=IMPAIRED)
    q = next_question(s)
    assert q.adjustable == "duration_years"
    assert q.current_value == pytest.approx(0.6)
    assert q.left.count == q.right.count == 1.0
    assert q.right.productivity == 1.0 and q.left.productivity == 0.0


def test_answers_move_the_bracket():
    s = start_quality_session(IMPAIRED, 1000.0, 4000.0, 1e-6)
    mid = s.midpoint()
    assert mid == pytest.approx(2000.0)
    s_a = submit_answer(s, PREFER_A)
    assert (s_a.lo, s_a.hi) == (mid, 4000.0)
    s_b = submit_answer(s, PREFER_B)
    assert (s_b.lo, s_b.hi) == (1000.0, mid)


def test_bracket_monotone_and_width_shrinks():
    s = start_quality_session(IMPAIRED, 1000.0, 64_000.0, 1e-4)
    widths = [s.bracket_width()]
    los, his = [s.lo], [s.hi]
    t = truth(0.5, 0.37)
    while s.status == ACTIVE:
        s = submit_answer(s, simulate_respondent(t, s))
        los.append(s.lo)
        his.append(s.hi)
        widths.append(s.bracket_width())
    assert all(a <= b for a, b in zip(los, los[1:]))
    assert all(a >= b for a, b in zip(his, his[1:]))
    assert all(a > b for a, b in zip(widths, widths[1:]))
    assert s.status == CONVERGED


def test_indifferent_converges_immediately():
    s = start_quality_session(IMPAIRED)
    done = submit_answer(s, INDIFFERENT)
    assert done.status == CONVERGED
    assert done.converged_value == pytest.approx(8000.0)
    assert estimate(done).value == pytest.approx(0.125)


def test_finished_session_rejects_further_interaction():
    done = submit_answer(start_quality_session(IMPAIRED), INDIFFERENT)
    with pytest.raises(SessionFinishedError):
        submit_answer(done, PREFER_A)
    with pytest.raises(SessionFinishedError):
        next_question(done)


def test_estimate_needs_convergence():
    s = start_quality_session(IMPAIRED)
    with pytest.raises(NotConvergedError):
        estimate(s)


def test_contradictory_answers_on_degenerate_bracket_mark_inconsistent():
    lo = 2000.0
    hi = math.nextafter(lo, math.inf)
    s = SessionState(KIND_QUALITY, IMPAIRED, lo, hi, tolerance=1e-300)
    first = submit_answer(s, PREFER_A)
    assert first.status == INCONSISTENT
    s2 = SessionState(KIND_QUALITY, IMPAIRED, lo, hi, tolerance=1e-300)
    second = submit_answer(s2, PREFER_B)
    assert second.status == INCONSISTENT
    assert "bracket" in second.inconsistency


def test_estimate_formulas():
    done = replace(
        start_quality_session(IMPAIRED), status=CONVERGED, converged_value=2000.0
    )
    assert estimate(done).value == pytest.approx(0.5)
    assert not estimate(done).clamped
    done_base = replace(
        start_quality_session(IMPAIRED), status=CONVERGED, converged_value=1000.0
    )
    assert estimate(done_base).value == pytest.approx(1.0)

    sig = replace(
        start_sigma_session(0.5, 0.01, 2.0), status=CONVERGED, converged_value=0.8
    )
    assert estimate(sig).value == pytest.approx(4.0 / 7.0, abs=1e-12)


def test_simulated_respondent_requires_mix_family():
    s = start_quality_session(IMPAIRED)
    with pytest.raises(UnsupportedTruthFamilyError):
        simulate_respondent(LinearPaly(), s)


def test_quality_round_trip_and_question_count():
    t = truth(0.5, 0.25)
    s = run_simulated_session(t, start_quality_session(IMPAIRED, 1000.0, 64_000.0, 1e-3))
    assert s.status == CONVERGED
    assert estimate(s).value == pytest.approx(0.25, rel=2e-3)
    assert s.questions_asked <= 15


@pytest.mark.parametrize("q_a", [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
def test_quality_round_trip_grid(q_a):
    t = truth(0.4, q_a)
    s = run_simulated_session(t, start_quality_session(IMPAIRED, 1000.0, 64_000.0, 1e-3))
    assert estimate(s).value == pytest.approx(q_a, rel=2e-3)


@pytest.mark.parametrize("sigma", [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
def test_sigma_round_trip_grid(sigma):
    q_a = 0.5
    t = truth(sigma, q_a)
    s = run_simulated_session(t, start_sigma_session(q_a, 0.01, 2.0, 1e-3, state=IMPAIRED))
    assert estimate(s).value == pytest.approx(sigma, rel=2e-3)


def test_quality_estimate_is_independent_of_the_mixing_weight():
    results = []
    for sigma in (0.3, 0.7):
        s = run_simulated_session(
            truth(sigma, 0.4), start_quality_session(IMPAIRED, 1000.0, 64_000.0, 1e-3)
        )
        results.append(estimate(s).value)
    assert results[0] == results[1]


def test_full_weight_converges_to_the_base_count():
    t = truth(0.6, 1.0)
    s = run_simulated_session(t, start_quality_session(IMPAIRED, 1000.0, 64_000.0, 1e-3))
    assert s.converged_value == pytest.approx(1000.0, rel=2e-3)
    assert estimate(s).value == pytest.approx(1.0, rel=2e-3)


def test_preference_comparator_is_scale_invariant():
    for a, b in [(3.0, 5.0), (5.0, 3.0), (2.0, 2.0), (1e-9, 2e-9)]:
        base = _preference(a, b)
        for c in (1e-6, 1.0, 1e6):
            assert _preference(c * a, c * b) == base


def test_intervention_values_under_mix():
    t = truth(0.5, 0.25)
    s = start_quality_session(IMPAIRED, 1000.0, 64_000.0)
    q = next_question(s)
    # side A: 1000 people, zero productivity, one year at full health
    assert intervention_value(t, q.left) == pytest.approx(0.5 * 1000.0)
    # side B: 8000 people, zero productivity, one year impaired
    assert intervention_value(t, q.right) == pytest.approx(0.5 * 0.25 * 8000.0)


def test_estimates_stay_in_unit_interval():
    for q_a in (0.05, 0.5, 1.0):
        for sigma in (0.05, 0.95):
            s = run_simulated_session(
                truth(sigma, q_a), start_sigma_session(q_a, 0.001, None, 1e-3, state=IMPAIRED)
            )
            est = estimate(s)
            assert 0.0 <= est.value <= 1.0


def test_aggregate_summaries():
    summary = aggregate([0.4, 0.5, 0.6])
    assert summary.median == pytest.approx(0.5)
    assert summary.n == 3
    single = aggregate([0.5])
    assert single.median == 0.5 and single.iqr == 0.0
    with pytest.raises(EmptyInputError):
        aggregate([])


def test_aggregate_of_many_simulated_respondents():
    t = truth(0.5, 0.25)
    estimates = []
    for _ in range(100):
        s = run_simulated_session(t, start_quality_session(IMPAIRED, 1000.0, 64_000.0, 1e-3))
        estimates.append(estimate(s).value)
    summary = aggregate(estimates)
    assert abs(summary.median - 0.25) < 1e-2


def test_replaying_the_answer_log_reproduces_the_estimate():
    t = truth(0.35, 0.6)
    done = run_simulated_session(t, start_quality_session(IMPAIRED, 1000.0, 64_000.0, 1e-3))
    fresh = start_quality_session(IMPAIRED, 1000.0, 64_000.0, 1e-3)
    for _, answer in done.history:
        fresh = submit_answer(fresh, answer)
    assert fresh.status == CONVERGED
    assert estimate(fresh).value == estimate(done).value
