"""Solvers for zero-sum stochastic games with commutative transitions."""

from .commutativity import CommuteWitness, check_commutative, commute_pair, simplex_grid
from .dist import Dist
from .dynamics import (
    AuxiliaryGame,
    CycleReport,
    classify_actions,
    detect_cycle,
    phi_eta,
    reach,
    uniform_value_estimate,
)
from .game import GameSpec, MatrixGame, ValueTable, linear_extension
from .gallery import gallery
from .matrix import matrix_value
from .play import evaluate_strategy, exact_play_distribution, gamma_lambda, gamma_n, simulate
from .strategies import (
    Behavioral,
    BlockSchedule,
    ConcatenationSchedule,
    Mixture,
    PureSequence,
    Stationary,
    build_block_schedule,
    build_concatenation,
)
from .staircase import staircase_mixed_strategy
from .transforms import AbsorbingGameSpec, absorbing_to_commutative, aumann_maschler_game, belief_game
from .values import discounted_value, value_iterate_n

__all__ = [name for name in dir() if not name.startswith("_")]
