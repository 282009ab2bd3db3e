"""Active induction of decision sets approximating black-box classifiers."""

from .actions import (
    Action,
    apply_action,
    candidate_cutpoints,
    compute_cutpoints,
    generate_actions,
)
from .errors import (
    ActiveRulesError,
    DatasetError,
    OracleError,
    RegionExhaustedError,
    SchemaError,
    StaleActionError,
    ValidationError,
)
from .metrics import Metrics, evaluate, interpretability_metrics
from .objective import (
    Estimate,
    ObjectiveParams,
    action_bounds,
    empirical_theta,
    incremental_update,
    objective_estimate,
)
from .oracle import (
    Oracle,
    make_boxes_oracle,
    make_linear_oracle,
    make_subprocess_oracle,
)
from .rules import (
    Condition,
    DecisionSet,
    EMPTY_SET,
    Interval,
    Rule,
    ValueSet,
    condition_satisfies,
    coverage_count,
    interval_condition,
    predict,
    relative_density,
    render_decision_set,
    render_rule,
    rule_covers,
    rule_volume,
    value_condition,
)
from .sampling import (
    CandidatePool,
    counterfactual_modify,
    generate_pool,
    select_query_instance,
)
from .schema import (
    AttributeSpec,
    InputSpace,
    Instance,
    LabeledInstance,
    instance_distance,
    load_schema,
    load_schema_file,
    parse_dataset,
    serialize_dataset,
)
from .search import (
    SearchConfig,
    SearchResult,
    SearchState,
    lucb_select,
    run_search,
)

__version__ = "0.1.0"
