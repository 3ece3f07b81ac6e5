"""File formats: distributions, registries and evaluator specifications.

Distributions travel as CSV with a required header
``person_id,health_state,productivity,lifetime_years`` or as a JSON array
of objects with the same four keys. Registries are CSV
``health_state,is_full_health`` with exactly one true row. Evaluator
specifications are JSON ``{"family": ..., "params": {...}}`` with any
weight tables inlined; the encoding round-trips float values losslessly.
"""

from __future__ import annotations

import csv
import io as _io
import json
from pathlib import Path
from typing import Any

from .evaluators import (
    AffinePaly,
    EvaluatorSpec,
    GainTransform,
    GenHpye,
    GenPaly,
    Hpye,
    HpyeTable,
    LinearPaly,
    PowerPqaly,
    Pqaly,
    Qaly,
    QalyPaly,
    QalyPqaly,
    QualityWeightTable,
    Weighted,
    WeightSurface,
)
from .model import Distribution, HealthRegistry, Profile


class FileFormatError(ValueError):
    """A data file is malformed; the message carries the line number."""


DIST_HEADER = ["person_id", "health_state", "productivity", "lifetime_years"]


def _parse_float(text: str, line: int, column: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise FileFormatError(f"line {line}: {column} {text!r} is not a number") from None


def read_distribution_csv(path: str | Path) -> Distribution:
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_distribution_csv(fh.read())


def parse_distribution_csv(text: str) -> Distribution:
    reader = csv.reader(_io.StringIO(text))
    rows = list(reader)
    if not rows:
        raise FileFormatError("line 1: missing header")
    if [c.strip() for c in rows[0]] != DIST_HEADER:
        raise FileFormatError(
            f"line 1: header must be {','.join(DIST_HEADER)}, got {','.join(rows[0])}"
        )
    profiles = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 4:
            raise FileFormatError(f"line {lineno}: expected 4 columns, got {len(row)}")
        _, state, p_text, t_text = (c.strip() for c in row)
        if not state:
            raise FileFormatError(f"line {lineno}: empty health_state")
        profiles.append(
            Profile(
                state,
                _parse_float(p_text, lineno, "productivity"),
                _parse_float(t_text, lineno, "lifetime_years"),
            )
        )
    return Distribution(tuple(profiles))


def write_distribution_csv(d: Distribution, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(DIST_HEADER)
        for i, prof in enumerate(d):
            writer.writerow([i, prof.state, repr(prof.productivity), repr(prof.lifetime)])


def parse_distribution_json(text: str) -> Distribution:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"line {exc.lineno}: {exc.msg}") from None
    if not isinstance(data, list):
        raise FileFormatError("line 1: expected a JSON array of person objects")
    profiles = []
    for i, obj in enumerate(data):
        if not isinstance(obj, dict) or not set(DIST_HEADER) <= set(obj):
            raise FileFormatError(f"entry {i}: expected keys {', '.join(DIST_HEADER)}")
        profiles.append(
            Profile(str(obj["health_state"]), float(obj["productivity"]), float(obj["lifetime_years"]))
        )
    return Distribution(tuple(profiles))


def read_distribution(path: str | Path) -> Distribution:
    """Load CSV or JSON depending on the file suffix (default CSV)."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        return parse_distribution_json(text)
    return parse_distribution_csv(text)


def read_registry_csv(path: str | Path) -> HealthRegistry:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows or [c.strip() for c in rows[0]] != ["health_state", "is_full_health"]:
        raise FileFormatError("line 1: header must be health_state,is_full_health")
    states: set[str] = set()
    full: list[str] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise FileFormatError(f"line {lineno}: expected 2 columns")
        state, flag = row[0].strip(), row[1].strip().lower()
        if flag not in ("true", "false"):
            raise FileFormatError(f"line {lineno}: is_full_health must be true or false")
        states.add(state)
        if flag == "true":
            full.append(state)
    if len(full) != 1:
        raise FileFormatError(f"registry must mark exactly one full-health state, got {len(full)}")
    return HealthRegistry(frozenset(states), full[0])


def write_registry_csv(registry: HealthRegistry, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["health_state", "is_full_health"])
        for state in registry.sorted_states():
            writer.writerow([state, "true" if state == registry.full_health else "false"])


# ---------------------------------------------------------------------------
# evaluator-spec JSON
# ---------------------------------------------------------------------------


def _table_to_json(table: QualityWeightTable) -> dict[str, float]:
    return dict(sorted(table.weights.items()))


def _table_from_json(data: Any) -> QualityWeightTable:
    return QualityWeightTable({str(k): float(v) for k, v in data.items()})


def spec_to_json(spec: EvaluatorSpec) -> dict[str, Any]:
    fam = spec.family
    params: dict[str, Any]
    if fam == "qaly":
        params = {"q": _table_to_json(spec.q)}
    elif fam == "gen_paly":
        params = {"v": [[p, v] for p, v in spec.v.nodes]}
    elif fam == "affine_paly":
        params = {"alpha": spec.alpha}
    elif fam == "linear_paly":
        params = {}
    elif fam == "pqaly":
        params = {"q": _table_to_json(spec.q)}
    elif fam == "qaly_pqaly":
        params = {"delta": spec.delta, "q": _table_to_json(spec.q), "r": _table_to_json(spec.r)}
    elif fam == "qaly_paly":
        params = {"sigma": spec.sigma, "q": _table_to_json(spec.q)}
    elif fam == "power_pqaly":
        params = {"gamma": spec.gamma, "q": _table_to_json(spec.q)}
    elif fam == "weighted":
        params = {
            "w": {
                "p_nodes": list(spec.w.p_nodes),
                "rows": {s: list(r) for s, r in sorted(spec.w.rows.items())},
                "full_health": spec.w.full_health,
            }
        }
    elif fam in ("hpye", "gen_hpye"):
        params = {
            "f": {
                "p_nodes": list(spec.f.p_nodes),
                "t_nodes": list(spec.f.t_nodes),
                "rows": {s: [list(r) for r in g] for s, g in sorted(spec.f.values.items())},
                "full_health": spec.f.full_health,
            }
        }
        if fam == "gen_hpye":
            g = spec.g
            if g.kind == "identity":
                params["g"] = {"kind": "identity"}
            elif g.kind == "power":
                params["g"] = {"kind": "power", "exponent": g.exponent}
            else:
                params["g"] = {"kind": "affine", "slope": g.slope, "intercept": g.intercept}
    else:
        raise ValueError(f"unknown family {fam!r}")
    return {"family": fam, "params": params}


def _surface_from_json(data: Any) -> WeightSurface:
    return WeightSurface(
        p_nodes=tuple(float(x) for x in data["p_nodes"]),
        rows={str(s): tuple(float(v) for v in row) for s, row in data["rows"].items()},
        full_health=str(data["full_health"]),
    )


def _hpye_from_json(data: Any) -> HpyeTable:
    return HpyeTable(
        p_nodes=tuple(float(x) for x in data["p_nodes"]),
        t_nodes=tuple(float(x) for x in data["t_nodes"]),
        values={
            str(s): tuple(tuple(float(v) for v in row) for row in grid)
            for s, grid in data["rows"].items()
        },
        full_health=str(data["full_health"]),
    )


def spec_from_json(data: dict[str, Any]) -> EvaluatorSpec:
    try:
        fam = data["family"]
        params = data.get("params", {})
        if fam == "qaly":
            return Qaly(_table_from_json(params["q"]))
        if fam == "gen_paly":
            return GenPaly(_curve_from_json(params["v"]))
        if fam == "affine_paly":
            return AffinePaly(float(params["alpha"]))
        if fam == "linear_paly":
            return LinearPaly()
        if fam == "pqaly":
            return Pqaly(_table_from_json(params["q"]))
        if fam == "qaly_pqaly":
            return QalyPqaly(
                float(params["delta"]),
                _table_from_json(params["q"]),
                _table_from_json(params["r"]),
            )
        if fam == "qaly_paly":
            return QalyPaly(float(params["sigma"]), _table_from_json(params["q"]))
        if fam == "power_pqaly":
            return PowerPqaly(float(params["gamma"]), _table_from_json(params["q"]))
        if fam == "weighted":
            return Weighted(_surface_from_json(params["w"]))
        if fam == "hpye":
            return Hpye(_hpye_from_json(params["f"]))
        if fam == "gen_hpye":
            return GenHpye(_transform_from_json(params["g"]), _hpye_from_json(params["f"]))
    except (KeyError, TypeError) as exc:
        raise FileFormatError(f"malformed evaluator spec: {exc}") from None
    raise FileFormatError(f"unknown evaluator family {fam!r}")


def _curve_from_json(data: Any):
    from .evaluators import ProductivityValueCurve

    return ProductivityValueCurve(tuple((float(p), float(v)) for p, v in data))


def _transform_from_json(data: Any) -> GainTransform:
    kind = data["kind"]
    if kind == "identity":
        return GainTransform("identity")
    if kind == "power":
        return GainTransform("power", exponent=float(data["exponent"]))
    if kind == "affine":
        return GainTransform(
            "affine", slope=float(data["slope"]), intercept=float(data.get("intercept", 0.0))
        )
    raise FileFormatError(f"unknown transform kind {kind!r}")


def read_spec(path: str | Path) -> EvaluatorSpec:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"line {exc.lineno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise FileFormatError("spec file must hold a JSON object")
    return spec_from_json(data)


def write_spec(spec: EvaluatorSpec, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(spec_to_json(spec), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def infer_registry(spec: EvaluatorSpec) -> HealthRegistry | None:
    """Best-effort registry from a spec's tables.

    Works when the tables identify full health unambiguously: a unique
    weight-1 state for quality tables, or the declared full-health label
    of surface and grid tables. Returns None for table-less families.
    """
    fam = spec.family
    if fam in ("qaly", "pqaly", "qaly_paly", "power_pqaly", "qaly_pqaly"):
        weights = spec.q.weights
        ones = [s for s, w in sorted(weights.items()) if w == 1.0]
        if len(ones) != 1:
            raise FileFormatError(
                "cannot infer the full-health state from the quality table; pass a registry"
            )
        return HealthRegistry(frozenset(weights), ones[0])
    if fam == "weighted":
        return HealthRegistry(frozenset(spec.w.rows), spec.w.full_health)
    if fam in ("hpye", "gen_hpye"):
        return HealthRegistry(frozenset(spec.f.values), spec.f.full_health)
    return None
