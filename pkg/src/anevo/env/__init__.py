from .centering import (
    CenteringConfig,
    CenteringEnv,
    CenteringState,
    Command,
    LocationClass,
    Start,
    centering_rollout,
    centering_step,
    classify_location,
    correct_command,
    evaluate_centering,
    true_location,
)
from .flappy import (
    FLAP,
    NO_FLAP,
    FlappyConfig,
    FlappyEnv,
    FlappyState,
    evaluate_flappy,
    flappy_observe,
    flappy_reset,
    flappy_rollout,
    flappy_step,
    max_flappy_score,
)
