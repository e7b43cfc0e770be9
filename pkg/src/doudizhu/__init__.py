"""Dou Di Zhu: rules engine, decomposition search, agents and service."""

from .cards import (
    CardError,
    CardGroup,
    CardMultiset,
    Category,
    beats,
    category_score,
    classify,
    format_cards,
    parse_cards,
)
from .decomp import Decomposition, DecompositionSample, decompositions, enumerate_dfs, enumerate_dlx
from .engine import (
    GameRecord,
    GameState,
    IllegalMove,
    Observation,
    Seat,
    apply_move,
    deal,
    export_record,
    import_record,
    observe,
    rewards,
)
from .movegen import ActionCatalog, Move, PASS, enumerate_all_moves, is_pass, legal_moves
from .rhcp import RhcpConfig, RhcpSolver, best_group, rhcp_act, strategy_score

__all__ = [
    "ActionCatalog", "CardError", "CardGroup", "CardMultiset", "Category",
    "Decomposition", "DecompositionSample", "GameRecord", "GameState",
    "IllegalMove", "Move", "Observation", "PASS", "RhcpConfig", "RhcpSolver",
    "Seat", "apply_move", "beats", "best_group", "category_score", "classify",
    "deal", "decompositions", "enumerate_all_moves", "enumerate_dfs",
    "enumerate_dlx", "export_record", "format_cards", "import_record",
    "is_pass", "legal_moves", "observe", "parse_cards", "rewards", "rhcp_act",
    "strategy_score",
]
