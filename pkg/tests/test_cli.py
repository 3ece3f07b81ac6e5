import json

import pytest

from conftest import quality
from lifeyears import io as lio
from lifeyears.cli import main
from lifeyears.evaluators import LinearPaly, Pqaly, QalyPaly
from lifeyears.model import reference_distributions, reference_registry


@pytest.fixture
def files(tmp_path):
    healthy, impaired = reference_distributions()
    paths = {
        "healthy": tmp_path / "healthy.csv",
        "impaired": tmp_path / "impaired.csv",
        "registry": tmp_path / "registry.csv",
        "linear": tmp_path / "linear.json",
        "pqaly": tmp_path / "pqaly.json",
        "truth": tmp_path / "truth.json",
    }
    lio.write_distribution_csv(healthy, paths["healthy"])
    lio.write_distribution_csv(impaired, paths["impaired"])
    lio.write_registry_csv(reference_registry(), paths["registry"])
    lio.write_spec(LinearPaly(), paths["linear"])
    lio.write_spec(Pqaly(quality(0.5)), paths["pqaly"])
    lio.write_spec(QalyPaly(4.0 / 7.0, quality(0.5)), paths["truth"])
    return {k: str(v) for k, v in paths.items()}


def run(capsys, *argv) -> tuple[int, str]:
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_evaluate_healthy_total(files, capsys):
    code, out = run(
        capsys, "evaluate", "--dist", files["healthy"], "--spec", files["linear"],
        "--registry", files["registry"], "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["total"] == 65
    assert payload["contributions"] == [40, 20, 0, 5, 0]
    assert payload["healthy_productive_years"] == [40, 20, 0, 5, 0]


def test_evaluate_impaired_total(files, capsys):
    code, out = run(capsys, "evaluate", "--dist", files["impaired"], "--spec", files["linear"])
    assert code == 0
    assert "total: 105" in out


def test_evaluate_header_only_csv(files, capsys, tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("person_id,health_state,productivity,lifetime_years\n")
    code, out = run(capsys, "evaluate", "--dist", str(empty), "--spec", files["linear"], "--format", "json")
    assert code == 0
    assert json.loads(out)["total"] == 0


def test_evaluate_invalid_distribution_fails(files, capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("person_id,health_state,productivity,lifetime_years\n0,impaired,1.4,10\n")
    code = main(
        ["evaluate", "--dist", str(bad), "--spec", files["linear"], "--registry", files["registry"]]
    )
    assert code == 1
    assert "out_of_range_productivity" in capsys.readouterr().err


def test_parse_error_carries_line_number(files, capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("person_id,health_state,productivity,lifetime_years\n0,impaired,x,10\n")
    code = main(["evaluate", "--dist", str(bad), "--spec", files["linear"]])
    assert code == 1
    assert "line 2" in capsys.readouterr().err


def test_compare_output(files, capsys):
    code, out = run(
        capsys, "compare", "--a", files["healthy"], "--b", files["impaired"],
        "--spec", files["linear"], "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["result"] == "prefer_second"
    assert payload["first"] == 65 and payload["second"] == 105


def test_thresholds_multiplicative_quality(files, capsys):
    code, out = run(
        capsys, "thresholds", "--a", files["healthy"], "--b", files["impaired"],
        "--family", "pqaly", "--param", "q:impaired", "--range", "0,1",
        "--registry", files["registry"], "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["crossings"] == [pytest.approx(5.0 / 13.0, abs=1e-6)]


def test_thresholds_svg_flag(files, capsys, tmp_path):
    svg = tmp_path / "plot.svg"
    code, _ = run(
        capsys, "thresholds", "--a", files["healthy"], "--b", files["impaired"],
        "--family", "pqaly", "--param", "q:impaired", "--range", "0,1",
        "--registry", files["registry"], "--svg", str(svg),
    )
    assert code == 0
    assert svg.read_text().startswith("<svg")


def test_tables_hybrid_row(files, capsys):
    code, out = run(capsys, "tables", "--qa", "0.5", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    pq = next(r for r in payload["hybrid"] if r["evaluator"] == "pqaly")
    assert pq["first"] == 65 and pq["second"] == 72.5


def test_axioms_report_and_exit_code(files, capsys):
    code, out = run(
        capsys, "axioms", "--spec", files["pqaly"], "--trials", "400",
        "--seed", "42", "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["defects"] == []
    results = {row["axiom"]: row["result"] for row in payload["axioms"]}
    assert results["TIUP"] == "pass"
    assert results["PI"] == "fail"


def test_simulate_quality(files, capsys):
    code, out = run(
        capsys, "elicit", "simulate", "--truth", files["truth"], "-k", "5",
        "--kind", "quality", "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["parameter"] == "quality_weight"
    assert payload["aggregate"]["n"] == 5
    assert payload["aggregate"]["median"] == pytest.approx(0.5, rel=2e-3)


def test_simulate_sigma_aggregate(files, capsys):
    code, out = run(
        capsys, "elicit", "simulate", "--truth", files["truth"], "-k", "20",
        "--kind", "sigma", "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["aggregate"]["median"] == pytest.approx(4.0 / 7.0, abs=2e-3)


def test_simulate_rejects_zero_sessions(files, capsys):
    code = main(["elicit", "simulate", "--truth", files["truth"], "-k", "0"])
    assert code == 1
    assert "at least one session" in capsys.readouterr().err


def test_simulate_rejects_non_mix_truth(files, capsys):
    code = main(["elicit", "simulate", "--truth", files["linear"], "-k", "3"])
    assert code == 1


def test_outputs_are_byte_stable(files, capsys):
    args = [
        "axioms", "--spec", files["pqaly"], "--trials", "300", "--seed", "7",
        "--format", "json",
    ]
    _, first = run(capsys, *args)
    _, second = run(capsys, *args)
    assert first == second
