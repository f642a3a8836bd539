"""Parser-ensemble blending, rule-based enhanced dependencies and UD evaluation."""

__version__ = "0.1.0"

from .blend import blend_sentence, blend_treebank, build_vote_graph, fix_roots, vote_labels
from .conllu import (
    AlignmentError,
    ConlluError,
    Sentence,
    Token,
    Treebank,
    TreeValidationError,
    parse_conllu,
    read_conllu,
    serialize_conllu,
    split_folds,
    validate_tree,
    write_conllu,
)
from .enhance import RuleConfig, enhance_sentence, enhance_treebank, register_filter
from .evaluate import CONLL18, POLEVAL2018, EvalReport, evaluate
from .graph import WeightedArcGraph, brute_force_arborescences, cle_decode
from .search import BlendCombination, ParserGroup, enumerate_combinations, realize, search_best
