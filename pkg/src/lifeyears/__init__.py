"""Population health and productivity evaluation toolkit."""

from .model import (
    Distribution,
    HealthRegistry,
    Profile,
    ValidationIssue,
    permute,
    reference_distributions,
    reference_registry,
    replace_profile,
    validate_distribution,
)
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
    ProductivityValueCurve,
    Qaly,
    QalyPaly,
    QalyPqaly,
    QualityWeightTable,
    Weighted,
    WeightSurface,
    compare,
    evaluate,
    hpye_of_profile,
    per_profile_contributions,
)
from .axioms import (
    Axiom,
    AxiomVerdict,
    CheckConfig,
    ConformanceReport,
    check_axiom,
    check_axiom_set,
    conformance_report,
    expected_matrix,
    replay_witness,
    sample_spec,
)
from .thresholds import (
    ParametricFamily,
    ThresholdReport,
    difference,
    find_thresholds,
    hybrid_table,
    single_attribute_table,
)
from .elicitation import (
    EstimateSummary,
    SessionState,
    TradeOffQuestion,
    aggregate,
    estimate,
    next_question,
    run_simulated_session,
    simulate_respondent,
    start_quality_session,
    start_sigma_session,
    submit_answer,
)

__version__ = "0.1.0"
