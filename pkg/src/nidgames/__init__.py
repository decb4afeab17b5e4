"""Simulator for the token games behind lower bounds on approximating normalized information distance."""

from .core import BitStr, Grid, GridState, Player, TokenPlacement, UPair, canonical_pair
from .referee import AliceMove, BobMove, GameConfig, GameState, Verdict
from .match import run_match, replay, revalidate
from .transcript import Transcript

__all__ = [
    "BitStr", "Grid", "GridState", "Player", "TokenPlacement", "UPair", "canonical_pair",
    "AliceMove", "BobMove", "GameConfig", "GameState", "Verdict",
    "run_match", "replay", "revalidate", "Transcript",
]
