"""Rule-based conversion of basic trees into enhanced dependency graphs.

Only conjuncts (tokens attached with ``conj``) receive new arcs:

* the head rule gives a conjunct its grandparent as an extra head, labelled
  with the relation of the conjunct's parent;
* the children rule makes every non-conjunct sibling of a conjunct its
  dependent, keeping the sibling's own label.

The children rule over-generates, so its arcs pass through a chain of named
filters.  Filters are predicates that return True for arcs to drop; they only
ever see children-rule arcs.  Three are built in (``labels``, ``advmod1``,
``obj``); more can be added with :func:`register_filter`.
"""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple

from .conllu import ROOT_DEPREL, Sentence, TreeValidationError, Treebank, validate_tree

CONJ = "conj"
DEFAULT_ALLOWED_LABELS = (
    "case",
    "nsubj",
    "mark",
    "obl",
    "advmod",
    "amod",
    "cop",
    "obj",
    "discourse:comment",
    "advcl",
)
DEFAULT_FILTERS = ("labels", "advmod1", "obj")


class Origin(enum.Enum):
    BASIC = "basic"
    HEAD_RULE = "head"
    CHILDREN_RULE = "children"


class EnhancedArc(NamedTuple):
    dependent: int
    head: int
    label: str
    origin: Origin


@dataclass(frozen=True)
class RuleConfig:
    enable_head: bool = True
    enable_children: bool = True
    enabled_filters: tuple[str, ...] = DEFAULT_FILTERS
    allowed_labels: tuple[str, ...] = DEFAULT_ALLOWED_LABELS

    def __post_init__(self):
        object.__setattr__(self, "enabled_filters", tuple(self.enabled_filters))
        object.__setattr__(self, "allowed_labels", tuple(self.allowed_labels))

    @classmethod
    def no_rules(cls) -> "RuleConfig":
        return cls(enable_head=False, enable_children=False, enabled_filters=())


FilterPredicate = Callable[[Sentence, EnhancedArc, RuleConfig], bool]


class FilterRegistry:
    def __init__(self, filters: dict[str, FilterPredicate] | None = None):
        self._filters: dict[str, FilterPredicate] = dict(filters or {})

    def register(self, name: str, predicate: FilterPredicate) -> None:
        if name in self._filters:
            raise ValueError(f"filter {name!r} is already registered")
        self._filters[name] = predicate

    def __getitem__(self, name: str) -> FilterPredicate:
        try:
            return self._filters[name]
        except KeyError:
            raise KeyError(f"unknown filter {name!r}; registered: {', '.join(self._filters)}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._filters

    def names(self) -> list[str]:
        return list(self._filters)

    def copy(self) -> "FilterRegistry":
        return FilterRegistry(self._filters)


# -- rules --------------------------------------------------------------------


def apply_head_rule(s: Sentence) -> set[EnhancedArc]:
    arcs = set()
    for t in s:
        if t.deprel != CONJ or t.head == 0:
            continue
        parent = s[t.head]
        label = ROOT_DEPREL if parent.head == 0 else parent.deprel
        arcs.add(EnhancedArc(t.id, parent.head, label, Origin.HEAD_RULE))
    return arcs


def apply_children_rule(s: Sentence) -> set[EnhancedArc]:
    arcs = set()
    for t in s:
        if t.deprel != CONJ or t.head == 0:
            continue
        for sib in s:
            if sib.head == t.head and sib.id != t.id and sib.deprel != CONJ:
                arcs.add(EnhancedArc(sib.id, t.id, sib.deprel, Origin.CHILDREN_RULE))
    return arcs


def basic_arcs(s: Sentence) -> set[EnhancedArc]:
    return {EnhancedArc(t.id, t.head, t.deprel, Origin.BASIC) for t in s}


# -- filters ------------------------------------------------------------------


def _labels(s: Sentence, arc: EnhancedArc, cfg: RuleConfig) -> bool:
    return arc.label not in cfg.allowed_labels


def _advmod1(s: Sentence, arc: EnhancedArc, cfg: RuleConfig) -> bool:
    # the conjunct has its own adverbial modifier
    return arc.label == "advmod" and any(c.deprel == "advmod" for c in s.children(arc.head))


def _obj(s: Sentence, arc: EnhancedArc, cfg: RuleConfig) -> bool:
    # objects preceding the conjunct belong to the first conjunct only
    return arc.label == "obj" and arc.dependent < arc.head


FILTERS = FilterRegistry({"labels": _labels, "advmod1": _advmod1, "obj": _obj})


def register_filter(name: str, predicate: FilterPredicate, registry: FilterRegistry = FILTERS) -> None:
    """Make ``predicate`` available under ``name`` in :attr:`RuleConfig.enabled_filters`.

    The predicate is called as ``predicate(sentence, arc, config)`` for each
    children-rule arc and returns True when the arc should be removed.
    """
    registry.register(name, predicate)


def _apply_filter(
    name: str, s: Sentence, arcs: Iterable[EnhancedArc], cfg: RuleConfig, registry: FilterRegistry
) -> set[EnhancedArc]:
    pred = registry[name]
    return {a for a in arcs if a.origin is not Origin.CHILDREN_RULE or not pred(s, a, cfg)}


def filter_labels(s: Sentence, arcs, cfg: RuleConfig = RuleConfig()) -> set[EnhancedArc]:
    return _apply_filter("labels", s, arcs, cfg, FILTERS)


def filter_advmod1(s: Sentence, arcs, cfg: RuleConfig = RuleConfig()) -> set[EnhancedArc]:
    return _apply_filter("advmod1", s, arcs, cfg, FILTERS)


def filter_obj(s: Sentence, arcs, cfg: RuleConfig = RuleConfig()) -> set[EnhancedArc]:
    return _apply_filter("obj", s, arcs, cfg, FILTERS)


# -- pipeline -----------------------------------------------------------------


def enhanced_arcs(
    s: Sentence, cfg: RuleConfig = RuleConfig(), registry: FilterRegistry = FILTERS
) -> set[EnhancedArc]:
    """Rule-introduced arcs (head rule plus surviving children-rule arcs)."""
    for name in cfg.enabled_filters:
        registry[name]  # fail early on unknown names
    arcs: set[EnhancedArc] = set()
    if cfg.enable_head:
        arcs |= apply_head_rule(s)
    if cfg.enable_children:
        children = apply_children_rule(s)
        for name in cfg.enabled_filters:
            children = _apply_filter(name, s, children, cfg, registry)
        arcs |= children
    return arcs


def enhance_sentence(
    s: Sentence, cfg: RuleConfig = RuleConfig(), registry: FilterRegistry = FILTERS
) -> Sentence:
    """Replace the DEPS column with basic arcs plus rule-introduced arcs."""
    violations = validate_tree(s)
    if violations:
        raise TreeValidationError(s.sent_id, violations)
    per_token: dict[int, set[tuple[int, str]]] = {t.id: {(t.head, t.deprel)} for t in s}
    for a in enhanced_arcs(s, cfg, registry):
        per_token[a.dependent].add((a.head, a.label))
    tokens = tuple(dataclasses.replace(t, enhanced=frozenset(per_token[t.id])) for t in s)
    return dataclasses.replace(s, tokens=tokens)


def enhance_treebank(
    tb: Treebank, cfg: RuleConfig = RuleConfig(), registry: FilterRegistry = FILTERS
) -> Treebank:
    return Treebank(tuple(enhance_sentence(s, cfg, registry) for s in tb))


# -- rule diagnostics -----------------------------------------------------------


@dataclass
class RuleScore:
    correct: int = 0
    predicted: int = 0
    gold: int = 0

    @property
    def precision(self) -> float:
        return 100.0 * self.correct / self.predicted if self.predicted else 0.0

    @property
    def recall(self) -> float:
        return 100.0 * self.correct / self.gold if self.gold else 0.0

    @property
    def f1(self) -> float:
        total = self.predicted + self.gold
        return 200.0 * self.correct / total if total else 0.0


def score_rule_arcs(
    gold: Treebank,
    rule: str,
    cfg: RuleConfig | None = None,
    registry: FilterRegistry = FILTERS,
) -> RuleScore:
    """Score one rule's arcs on gold trees against the gold enhanced graphs.

    ``rule="head"`` compares head-rule arcs with the extra (non-basic) heads of
    conjuncts; ``rule="children"`` compares children-rule arcs (filtered
    through ``cfg.enabled_filters`` when ``cfg`` is given) with extra arcs
    from a conjunct to one of its basic siblings.
    """
    score = RuleScore()
    for s in gold:
        extra = {(t.id, h, lab) for t in s for h, lab in t.enhanced if (h, lab) != (t.head, t.deprel)}
        if rule == "head":
            pred = {(a.dependent, a.head, a.label) for a in apply_head_rule(s)}
            target = {e for e in extra if s[e[0]].deprel == CONJ}
        elif rule == "children":
            arcs = apply_children_rule(s)
            if cfg is not None:
                for name in cfg.enabled_filters:
                    arcs = _apply_filter(name, s, arcs, cfg, registry)
            pred = {(a.dependent, a.head, a.label) for a in arcs}
            target = {
                e for e in extra if e[1] != 0 and s[e[1]].deprel == CONJ and s[e[0]].head == s[e[1]].head
            }
        else:
            raise ValueError(f"unknown rule {rule!r}")
        score.correct += len(pred & target)
        score.predicted += len(pred)
        score.gold += len(target)
    return score
