"""Decision support for innovation projects.

The package models a project as an AND/OR hierarchy of goals and solution
alternatives, enumerates the admissible configurations in a deterministic
order, scores them from aggregated node characteristics, filters them
through monotone production rules and constraint bounds, stores measures in
a dual-star schema for rollups and reports, induces new rules from labeled
examples, and exposes all of it through a CLI and a small HTTP service.

Hot kernels (configuration enumeration and rule closure) run on a compiled
extension when it is available and fall back to pure Python otherwise; set
``INNOTREE_PURE_PYTHON=1`` to force the fallback.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .engine import (
    Engine,
    EngineConfig,
    EngineSnapshot,
    ScoringSettings,
    WhatIfRequest,
    WhatIfResponse,
    load_config,
    load_snapshot,
    validate_snapshot,
    whatif,
)
from .errors import (
    BindingError,
    CharacteristicMissingError,
    ConfigFormatError,
    DatasetFormatError,
    DegeneratePivotError,
    EnumerationError,
    FormatError,
    InnotreeError,
    MiningError,
    ModelFormatError,
    NotDerivedError,
    ReportFormatError,
    ReportQueryError,
    RulesFormatError,
    SchemaFormatError,
    ScoringError,
    SeriesParamRequiredError,
    SeriesRangeError,
    SnapshotError,
    StarIntegrityError,
    UnknownGroupError,
    UnknownNodeError,
    UnknownReportError,
    UnknownTableError,
)
from .mining import (
    LabeledDataset,
    TreeLeaf,
    TreeSplit,
    classify,
    entropy,
    induce,
    information_gain,
    load_dataset,
    parse_dataset,
    rules_classify,
    tree_to_rules,
)
from .model import (
    Attribute,
    Bound,
    CharacteristicSchema,
    CharacteristicTable,
    ConstraintSet,
    DecisionHierarchy,
    HierarchyNode,
    ModelDocument,
    Series,
    homogeneity_check,
    load_model,
    lookup_characteristic,
    model_to_dict,
    parse_model,
    validate_constraints,
    validate_hierarchy,
)
from .reports import (
    DynamicQueryDef,
    ReportConfig,
    StaticReportDef,
    load_report_config,
    parse_report_config,
    render_static,
    run_dynamic,
    validate_report_config,
)
from .rules import (
    VETO_FACT,
    Binding,
    ClosureResult,
    Rule,
    RuleBase,
    explain,
    forward_chain,
    ground_facts,
    load_rulebase,
    parse_rulebase,
    selection_fact,
    validate_bindings,
    validate_rules_against_model,
)
from .star import (
    DualStarSchema,
    FactRow,
    FactTable,
    GroupAggregate,
    fact_table_csv,
    load_schema,
    parse_fact_table_csv,
    parse_schema,
    rollup,
    select_main_fact_table,
    store_schema,
)
from .validation import Violation
from .variants import (
    Configuration,
    EnumerationResult,
    Score,
    admissible,
    aggregate_attributes,
    count_admissible,
    enumerate_configurations,
    iter_admissible_selections,
    rank,
    score,
    selection_status,
)

__version__ = "1.0.0"
