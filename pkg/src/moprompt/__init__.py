"""Multi-objective evolutionary prompt optimization: token cost vs. error rate."""
from .emo import (
    Individual,
    ObjectiveVector,
    crowding_distance,
    dominates,
    fast_non_dominated_sort,
    hypervolume_2d,
    nsga2_select,
    roulette_select,
)
from .tokenizer import count_tokens, tokenize

__version__ = "0.1.0"
