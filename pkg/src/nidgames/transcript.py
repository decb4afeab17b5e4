"""JSON Lines transcripts.

Line 1 is ``{"config": {...}}``, then one record per half-turn
``{round, player, placements: [{grid, col, row}], f_default?, f_updates: [{lo, hi, value}]}``
and finally ``{"verdict": {...}}``.  Rationals are written as "p/q" strings.
A half-turn in which a strategy failed is written as ``{round, player, error}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .core import Grid, Player, TokenPlacement, UPair
from .referee import AliceMove, BobMove, GameConfig, Verdict, frac_str


class MalformedTranscript(ValueError):
    pass


@dataclass
class Transcript:
    config: GameConfig
    records: list = field(default_factory=list)
    verdict: Optional[Verdict] = None
    # final per-pair series, kept in memory only
    series: dict = field(default_factory=dict, repr=False)

    def to_lines(self) -> list:
        lines = [json.dumps({"config": self.config.to_dict()}, sort_keys=True)]
        lines += [json.dumps(r, sort_keys=True, separators=(",", ":")) for r in self.records]
        if self.verdict is not None:
            lines.append(json.dumps({"verdict": self.verdict.to_dict()}, sort_keys=True))
        return lines

    def dumps(self) -> str:
        return "\n".join(self.to_lines()) + "\n"

    def write(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def loads(cls, text: str) -> "Transcript":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise MalformedTranscript("empty transcript")
        try:
            objs = [json.loads(ln) for ln in lines]
            config = GameConfig.from_dict(objs[0]["config"])
        except (ValueError, KeyError, TypeError) as e:
            raise MalformedTranscript(f"bad header: {e}") from e
        verdict = None
        records = []
        for i, obj in enumerate(objs[1:], start=2):
            if "verdict" in obj:
                if i != len(objs):
                    raise MalformedTranscript(f"line {i}: verdict before end of transcript")
                verdict = Verdict.from_dict(obj["verdict"])
            else:
                if not {"round", "player"} <= obj.keys():
                    raise MalformedTranscript(f"line {i}: missing round/player")
                records.append(obj)
        return cls(config, records, verdict)

    @classmethod
    def read(cls, path) -> "Transcript":
        return cls.loads(Path(path).read_text())


def placement_to_json(p: TokenPlacement) -> dict:
    col = [p.column.lo, p.column.hi] if p.grid is Grid.Z else p.column
    return {"grid": p.grid.value, "col": col, "row": p.row}


def placement_from_json(d: dict, player: Player) -> TokenPlacement:
    grid = Grid(d["grid"])
    col = UPair(*sorted(d["col"])) if grid is Grid.Z else int(d["col"])
    return TokenPlacement(grid, col, int(d["row"]), player)


def alice_record(round_no: int, move: Optional[AliceMove]) -> dict:
    placements = move.placements if move is not None else []
    return {"round": round_no, "player": "alice", "placements": [placement_to_json(p) for p in placements]}


def bob_record(round_no: int, move: BobMove) -> dict:
    rec = {
        "round": round_no,
        "player": "bob",
        "placements": [placement_to_json(p) for p in move.placements],
        "f_updates": [
            {"lo": p.lo, "hi": p.hi, "value": frac_str(v)}
            for p, v in sorted(move.f_updates.items(), key=lambda kv: kv[0].index)
        ],
    }
    if move.f_default is not None:
        rec["f_default"] = frac_str(move.f_default)
    return rec


def error_record(round_no: int, player: Player, message: str) -> dict:
    return {"round": round_no, "player": player.value, "error": message}


def move_from_record(rec: dict):
    try:
        player = Player(rec["player"])
        placements = [placement_from_json(d, player) for d in rec.get("placements", [])]
        if player is Player.ALICE:
            return AliceMove(placements)
        updates = {UPair(min(u["lo"], u["hi"]), max(u["lo"], u["hi"])): Fraction(u["value"]) for u in rec.get("f_updates", [])}
        f_default = Fraction(rec["f_default"]) if "f_default" in rec else None
        return BobMove(placements, f_default, updates)
    except (KeyError, ValueError, TypeError) as e:
        raise MalformedTranscript(f"round {rec.get('round')}: {e}") from e
