"""The seven-level tutor structure."""

from __future__ import annotations

from dataclasses import dataclass

from ..logic.proof import Problem

TRAINING_LEVELS = (2, 3, 4, 5, 6)


@dataclass(frozen=True)
class Item:
    problem: Problem
    section: str  # intro | pretest | training | level_end | posttest

    @property
    def level(self) -> int:
        return self.problem.level

    @property
    def slot(self) -> int:
        return self.problem.index


class CurriculumError(ValueError):
    pass


@dataclass(frozen=True)
class Curriculum:
    items: tuple[Item, ...]

    @classmethod
    def from_bank(cls, bank: dict[str, Problem]) -> "Curriculum":
        def get(pid):
            if pid not in bank:
                raise CurriculumError(f"problem bank lacks {pid}")
            return bank[pid]

        items = [Item(get("1.1"), "intro"), Item(get("1.2"), "intro"), Item(get("1.3"), "pretest"), Item(get("1.4"), "pretest")]
        for lv in TRAINING_LEVELS:
            items += [Item(get(f"{lv}.{k}"), "training") for k in (1, 2, 3)]
            items.append(Item(get(f"{lv}.4"), "level_end"))
        items += [Item(get(f"7.{k}"), "posttest") for k in range(1, 7)]
        cur = cls(tuple(items))
        cur.check()
        return cur

    def check(self) -> None:
        levels = sorted({i.level for i in self.items})
        if levels != list(range(1, 8)):
            raise CurriculumError(f"expected levels 1..7, got {levels}")
        diffs = [max(i.problem.difficulty for i in self.items if i.level == lv and i.section == "training")
                 for lv in TRAINING_LEVELS]
        lows = [min(i.problem.difficulty for i in self.items if i.level == lv and i.section == "training")
                for lv in TRAINING_LEVELS]
        if any(hi >= lo_next for hi, lo_next in zip(diffs, lows[1:])):
            raise CurriculumError("training levels must have strictly increasing difficulty")

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)
