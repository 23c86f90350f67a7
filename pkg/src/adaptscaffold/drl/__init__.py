from .ddqn import (
    ACTIONS,
    DatasetTooSmall,
    DdqnConfig,
    OutOfRange,
    TrainedPolicy,
    Transition,
    compute_reward,
    ddqn_targets,
    double_q_targets,
    select_action,
    train_ddqn,
)
from .features import FEATURE_NAMES, REGISTRY, STATE_DIM, Normalizer, RegistryMismatch, extract_state, raw_features
from .network import Adam, QNetwork, ShapeMismatch
