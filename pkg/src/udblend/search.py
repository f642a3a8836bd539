"""Exhaustive search over how many instances of each parser group to blend.

A combination fixes a count per group; the first ``count`` instances of that
group enter the ensemble.  Every non-empty combination is blended and scored
by LAS against a development treebank.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .blend import DEFAULT_ROOT_FALLBACK, blend_treebank, check_aligned
from .conllu import Treebank
from .evaluate import CONLL18, Conventions, EvalReport, check_token_alignment, eval_las


@dataclass(frozen=True)
class ParserGroup:
    name: str
    outputs: tuple[Treebank, ...]

    def __post_init__(self):
        object.__setattr__(self, "outputs", tuple(self.outputs))
        if not self.outputs:
            raise ValueError(f"group {self.name!r} has no instances")

    @property
    def size(self) -> int:
        return len(self.outputs)


@dataclass(frozen=True)
class BlendCombination:
    names: tuple[str, ...]
    counts: tuple[int, ...]

    @classmethod
    def from_mapping(cls, counts: Mapping[str, int]) -> "BlendCombination":
        return cls(tuple(counts), tuple(counts.values()))

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.names, self.counts))

    @property
    def total(self) -> int:
        return sum(self.counts)

    def __str__(self) -> str:
        return " ".join(f"{n}={c}" for n, c in zip(self.names, self.counts))


@dataclass(frozen=True)
class RankedCombination:
    rank: int
    combination: BlendCombination
    report: EvalReport

    @property
    def las(self) -> float:
        return self.report.f1


def count_combinations(groups: Sequence[ParserGroup]) -> int:
    return math.prod(g.size + 1 for g in groups) - 1


def enumerate_combinations(groups: Sequence[ParserGroup]) -> Iterator[BlendCombination]:
    """Every count vector in ``0..size`` per group except all zeros, lexicographically."""
    if not groups:
        raise ValueError("need at least one parser group")
    names = tuple(g.name for g in groups)
    for counts in itertools.product(*(range(g.size + 1) for g in groups)):
        if any(counts):
            yield BlendCombination(names, counts)


def realize(c: BlendCombination, groups: Sequence[ParserGroup]) -> list[Treebank]:
    if not any(c.counts):
        raise ValueError("a combination needs at least one instance")
    counts = c.as_dict()
    unknown = set(counts) - {g.name for g in groups}
    if unknown:
        raise ValueError(f"combination names unknown groups {sorted(unknown)}")
    out: list[Treebank] = []
    for g in groups:
        k = counts.get(g.name, 0)
        if not 0 <= k <= g.size:
            raise ValueError(f"group {g.name!r} has {g.size} instances, combination asks for {k}")
        out.extend(g.outputs[:k])
    return out


# state shared with worker processes
_STATE: dict = {}


def _init_worker(groups, dev_gold, conventions, root_fallback):
    _STATE.update(groups=groups, dev_gold=dev_gold, conventions=conventions, root_fallback=root_fallback)


def _evaluate(c: BlendCombination) -> EvalReport:
    blended = blend_treebank(realize(c, _STATE["groups"]), root_fallback=_STATE["root_fallback"])
    return eval_las(_STATE["dev_gold"], blended, _STATE["conventions"])


def _rank_key(c: BlendCombination, r: EvalReport):
    return (-Fraction(2 * r.correct, r.gold_total + r.system_total or 1), c.total, c.counts)


def search_best(
    groups: Sequence[ParserGroup],
    dev_gold: Treebank,
    jobs: int = 1,
    conventions: Conventions = CONLL18,
    root_fallback: str = DEFAULT_ROOT_FALLBACK,
) -> tuple[BlendCombination, EvalReport, list[RankedCombination]]:
    """Blend and score every combination; return the best one and the full ranking.

    Ties on LAS go to fewer instances, then to the smaller count vector.
    """
    names = [g.name for g in groups]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate group names in {names}")
    for g in groups:
        check_aligned([dev_gold, *g.outputs])
        for tb in g.outputs:
            check_token_alignment(dev_gold, tb)
    combos = list(enumerate_combinations(groups))
    args = (tuple(groups), dev_gold, conventions, root_fallback)
    if jobs > 1 and len(combos) > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=args) as pool:
            reports = list(pool.map(_evaluate, combos, chunksize=max(1, len(combos) // (8 * jobs))))
    else:
        _init_worker(*args)
        try:
            reports = [_evaluate(c) for c in combos]
        finally:
            _STATE.clear()
    order = sorted(range(len(combos)), key=lambda i: _rank_key(combos[i], reports[i]))
    ranking = [RankedCombination(rank, combos[i], reports[i]) for rank, i in enumerate(order, 1)]
    return ranking[0].combination, ranking[0].report, ranking


def format_ranking(ranking: Sequence[RankedCombination]) -> str:
    """TSV report: one column per group count, then LAS and rank."""
    if not ranking:
        return ""
    names = ranking[0].combination.names
    lines = ["\t".join([*names, "las", "rank"])]
    for r in ranking:
        lines.append("\t".join([*map(str, r.combination.counts), f"{r.las:.2f}", str(r.rank)]))
    return "\n".join(lines) + "\n"
