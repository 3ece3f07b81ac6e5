import pytest

from conftest import quality
from lifeyears.evaluators import (
    LinearPaly,
    PowerPqaly,
    Pqaly,
    QalyPaly,
    QalyPqaly,
    QualityWeightTable,
    ProductivityValueCurve,
)
from lifeyears.model import FULL_HEALTH, IMPAIRED, Distribution, reference_distributions
from lifeyears.thresholds import (
    ParameterOutOfRangeError,
    ParametricFamily,
    brute_force_crossings,
    difference,
    difference_svg,
    find_thresholds,
    hybrid_table,
    render_table,
    single_attribute_table,
)


@pytest.fixture
def pair():
    return reference_distributions()


def quality_sweep(q_start: float = 0.5) -> ParametricFamily:
    return ParametricFamily(Pqaly(quality(q_start)), "q:impaired", 0.0, 1.0)


def test_difference_zero_at_multiplicative_threshold(pair):
    healthy, impaired = pair
    fam = quality_sweep()
    assert difference(fam, 5.0 / 13.0, healthy, impaired) == pytest.approx(0.0, abs=1e-9)


def test_difference_constant_for_parameterless_family(pair):
    healthy, impaired = pair
    fam = ParametricFamily(LinearPaly(), None, 0.0, 1.0)
    for theta in (0.0, 0.37, 1.0):
        assert difference(fam, theta, healthy, impaired) == pytest.approx(-40.0, abs=1e-9)


def test_difference_of_identical_distributions_is_zero(pair):
    healthy, _ = pair
    fam = quality_sweep()
    assert difference(fam, 0.2, healthy, healthy) == 0.0


def test_difference_rejects_out_of_range(pair):
    healthy, impaired = pair
    fam = quality_sweep()
    with pytest.raises(ParameterOutOfRangeError):
        difference(fam, 1.5, healthy, impaired)


def test_parametric_family_rejects_unknown_parameter():
    with pytest.raises(ValueError):
        ParametricFamily(LinearPaly(), "sigma", 0.0, 1.0)
    with pytest.raises(ValueError):
        ParametricFamily(Pqaly(quality(0.5)), "q:unlisted", 0.0, 1.0)
    with pytest.raises(ValueError):
        ParametricFamily(LinearPaly(), None, 1.0, 0.0)


def test_multiplicative_quality_threshold(pair):
    healthy, impaired = pair
    report = find_thresholds(quality_sweep(), healthy, impaired, grid_n=1024, tol=1e-9)
    assert len(report.crossings) == 1
    assert report.crossings[0] == pytest.approx(5.0 / 13.0, abs=1e-9)
    assert report.signs == (1, -1)
    assert report.prefer_first_on() == [(0.0, report.crossings[0])]


@pytest.mark.parametrize("q_a", [0.0, 0.2, 0.4, 0.8])
def test_additive_mix_threshold_formula(pair, q_a):
    healthy, impaired = pair
    fam = ParametricFamily(QalyPaly(0.5, quality(q_a)), "sigma", 0.0, 1.0)
    report = find_thresholds(fam, healthy, impaired, grid_n=1024, tol=1e-9)
    assert len(report.crossings) == 1
    assert report.crossings[0] == pytest.approx(4.0 / (13.0 - 9.0 * q_a), abs=1e-9)
    # below the crossing the impaired-state scenario wins, above it loses
    assert report.signs == (-1, 1)


def test_mixed_multiplicative_threshold_at_point_four(pair):
    healthy, impaired = pair
    q = quality(0.4)
    fam = ParametricFamily(QalyPqaly(0.5, q, q), "delta", 0.0, 1.0)
    report = find_thresholds(fam, healthy, impaired, grid_n=1024, tol=1e-9)
    # the closed forms 65(1+delta) and 66+10*delta cross at delta = 1/55
    assert len(report.crossings) == 1
    assert report.crossings[0] == pytest.approx(1.0 / 55.0, abs=1e-9)


def test_identical_pair_is_degenerate(pair):
    healthy, _ = pair
    report = find_thresholds(quality_sweep(), healthy, healthy, grid_n=64, tol=1e-9)
    assert report.degenerate
    assert report.crossings == ()
    assert report.prefer_first_on() == []


def test_no_crossing_reports_single_sign(pair):
    healthy, impaired = pair
    fam = ParametricFamily(LinearPaly(), None, 0.0, 1.0)
    report = find_thresholds(fam, healthy, impaired, grid_n=64, tol=1e-9)
    assert report.crossings == ()
    assert report.signs == (-1,)


def test_brute_force_agrees_on_fixture_sweeps(pair):
    healthy, impaired = pair
    sweeps = [
        quality_sweep(),
        ParametricFamily(QalyPaly(0.5, quality(0.4)), "sigma", 0.0, 1.0),
        ParametricFamily(QalyPqaly(0.5, quality(0.4), quality(0.4)), "delta", 0.0, 1.0),
        ParametricFamily(QalyPqaly(0.5, quality(0.3), quality(0.8)), "delta", 0.0, 1.0),
    ]
    for fam in sweeps:
        report = find_thresholds(fam, healthy, impaired, grid_n=1024, tol=1e-9)
        scan = brute_force_crossings(fam, healthy, impaired, points=20_000)
        assert len(scan) == len(report.crossings)
        for found, ref in zip(report.crossings, scan):
            assert found == pytest.approx(ref, abs=1e-4)


def test_power_sweep_with_two_reversals():
    # totals q*p^gamma*t: 0.01^gamma + 0.892 against 0.9^gamma dips below
    # zero near gamma 0.84 and recovers before 1
    q = QualityWeightTable({FULL_HEALTH: 1.0, IMPAIRED: 1.0})
    d_first = Distribution.of([(IMPAIRED, 0.01, 1.0), (FULL_HEALTH, 1.0, 0.892)])
    d_second = Distribution.of([(IMPAIRED, 0.9, 1.0)])
    fam = ParametricFamily(PowerPqaly(0.5, q), "gamma", 0.05, 0.995)
    report = find_thresholds(fam, d_first, d_second, grid_n=2048, tol=1e-9)
    scan = brute_force_crossings(fam, d_first, d_second, points=100_000)
    assert len(report.crossings) == 2
    assert len(scan) == 2
    for found, ref in zip(report.crossings, scan):
        assert found == pytest.approx(ref, abs=1e-4)
    assert report.signs == (1, -1, 1)


# ---------------------------------------------------------------------------
# fixture tables
# ---------------------------------------------------------------------------


def test_single_attribute_table_closed_forms():
    v = ProductivityValueCurve.from_pairs([(0.0, 0.3), (0.5, 0.7), (1.0, 1.0)])
    rows = {r.label: r for r in single_attribute_table(0.5, 0.4, v)}
    assert rows["qaly"].first == pytest.approx(130.0)
    assert rows["qaly"].second == pytest.approx(40.0 + 90.0 * 0.5)
    assert rows["linear_paly"].first == pytest.approx(65.0)
    assert rows["linear_paly"].second == pytest.approx(105.0)
    assert rows["affine_paly"].first == pytest.approx(130.0 - 65.0 * 0.4)
    assert rows["affine_paly"].second == pytest.approx(130.0 - 25.0 * 0.4)
    assert rows["gen_paly"].first == pytest.approx(40.0 + 50.0 * 0.7 + 40.0 * 0.3)
    assert rows["gen_paly"].second == pytest.approx(80.0 + 50.0 * 0.7)


def test_single_attribute_table_full_weight_collapses():
    v = ProductivityValueCurve.from_pairs([(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)])
    rows = {r.label: r for r in single_attribute_table(1.0, 0.5, v)}
    assert rows["qaly"].first == rows["qaly"].second == pytest.approx(130.0)
    assert rows["qaly"].preference == "indifferent"


def test_hybrid_table_closed_forms():
    rows = {r.label: r for r in hybrid_table(0.5, 0.8, 0.3, 0.6)}
    assert rows["pqaly"].first == pytest.approx(65.0)
    assert rows["pqaly"].second == pytest.approx(40.0 + 65.0 * 0.5)
    assert rows["qaly_pqaly"].first == pytest.approx(65.0 * 1.3)
    assert rows["qaly_pqaly"].second == pytest.approx(40.0 + 90.0 * 0.3 * 0.5 + 65.0 * 0.7 * 0.8)
    assert rows["qaly_paly"].first == pytest.approx(65.0 * 1.6)
    assert rows["qaly_paly"].second == pytest.approx(105.0 - 65.0 * 0.6 + 90.0 * 0.5 * 0.6)


def test_hybrid_table_zero_weights_prefer_the_healthy_scenario():
    for delta in (0.0, 0.3, 1.0):
        rows = {r.label: r for r in hybrid_table(0.0, 0.0, delta, 0.5)}
        assert rows["qaly_pqaly"].preference == "prefer_first"


def test_hybrid_table_collapse_at_full_weights():
    rows = {r.label: r for r in hybrid_table(1.0, 1.0, 1.0, 0.5)}
    assert rows["qaly_pqaly"].first == pytest.approx(130.0)
    assert rows["qaly_pqaly"].second == pytest.approx(130.0)


def test_render_table_is_stable():
    v = ProductivityValueCurve.from_pairs([(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)])
    text1 = render_table(single_attribute_table(0.5, 0.5, v))
    text2 = render_table(single_attribute_table(0.5, 0.5, v))
    assert text1 == text2
    assert "qaly" in text1 and "ranking" in text1


def test_difference_svg_renders(pair):
    healthy, impaired = pair
    svg = difference_svg(quality_sweep(), healthy, impaired, points=32)
    assert svg.startswith("<svg") and svg.endswith("</svg>")
    assert "polyline" in svg
