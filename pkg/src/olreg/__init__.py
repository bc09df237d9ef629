"""Online regression under known example sequences and forecasting predictors."""

from .core import (
    ContractViolationError,
    EmptyClassError,
    EmptyExpertError,
    ExampleSequence,
    InvalidInputError,
    LabeledExample,
    LossSpec,
    RegretReport,
    accumulate_regret,
    best_in_class_loss,
    loss,
    run_online,
)
from .mwa import MultiplicativeWeights, learning_rate, regret_bound
from .hypotheses import (
    FunctionClass,
    bounded_variation_class,
    constant_class,
    junta_hyperplane_class,
    load_table_class,
    ramp_class,
    table_class,
)
from .complexity import (
    CoverResult,
    FatShatteringResult,
    ShatteringCertificate,
    covering_number_linf,
    empirical_rademacher,
    fat_shattering_dimension,
    verify_shattering,
)
from .transductive import (
    ExpertTable,
    TransductiveLearner,
    build_expert_table,
    transductive_regret_bound,
)
from .predictors import (
    LazyConsistentPredictor,
    MistakeLog,
    corrupted_predictor,
    lds_predictor,
    mistake_metrics,
    perfect_predictor,
    repeat_last_predictor,
    shifted_predictor,
)
from .augmented import (
    IntervalPartitionLearner,
    MetaHedgeLearner,
    RestartOnMissLearner,
    derive_seed,
    epsilon_grid,
    epsilon_grid_learner,
    interval_partition,
    partition_grid,
    partition_grid_learner,
)
from .streams import (
    gen_lds_sparse,
    gen_rademacher_hard,
    label_with_noise,
    read_stream_csv,
    write_stream_csv,
)
from .harness import (
    ExperimentConfig,
    ExperimentResult,
    reproduce_figure,
    run_experiment,
    write_result_csv,
    write_sidecar,
)

__version__ = "0.1.0"
