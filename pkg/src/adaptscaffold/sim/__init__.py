from .curriculum import TRAINING_LEVELS, Curriculum, CurriculumError, Item
from .experiment import (
    Corpus,
    corpus_from_logs,
    history_phase,
    simulate_population,
    student_id,
    thresholds_from_logs,
    train_policy,
)
from .session import (
    CONDITIONS,
    PHASES,
    MissingPolicy,
    Policies,
    SessionState,
    StudentStreams,
    TimeNormalizer,
    assign_problem_type,
    TooFewStudents,
    VariantPool,
    build_transitions,
    decision_test_score,
    finish_session,
    fit_time_bounds,
    ps_override,
    raw_decision_features,
    run_session,
    score_log,
    start_session,
    stratified_assign,
)
from .student import (
    AttemptOutcome,
    MissingVariant,
    PopulationConfig,
    SimStudentParams,
    apply_gain,
    make_variant,
    p_correct,
    sample_student,
    simulate_attempt,
)
