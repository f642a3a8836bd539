"""Shared-task evaluation metrics over token-aligned treebanks.

Gold tokenization is assumed: system and gold files must have the same
sentences with the same word forms.  Tagging scores, LAS, MLAS and BLEX follow
the CoNLL 2018 UD scorer by default; :data:`POLEVAL2018` reproduces the
variant used for the Polish enhanced-dependency task.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Literal, Sequence

from .conllu import AlignmentError, Sentence, Token, Treebank, sem_label, DEFAULT_SEM_KEY

CONTENT_DEPRELS = frozenset(
    """nsubj obj iobj csubj ccomp xcomp obl vocative expl dislocated advcl advmod
    discourse nmod appos nummod acl amod conj fixed flat compound list parataxis
    orphan goeswith reparandum root dep""".split()
)
FUNCTIONAL_DEPRELS = frozenset("aux cop mark det clf case cc".split())
UNIVERSAL_FEATURES = frozenset(
    """PronType NumType Poss Reflex Foreign Abbr Gender Animacy Number Case
    Definite Degree VerbForm Mood Tense Aspect Voice Evident Polarity Person
    Polite""".split()
)


@dataclass(frozen=True)
class Conventions:
    """Knobs on which scorer implementations disagree."""

    name: str
    strip_subtypes: bool
    features: frozenset[str] | None  # None keeps every feature
    content_deprels: frozenset[str]
    functional_deprels: frozenset[str]
    elas: Literal["arcs", "tokens"]
    slas_content_only: bool
    # cut DEPS labels at their first subtype colon ("3:discourse:comment" -> discourse)
    truncate_deps_labels: bool


CONLL18 = Conventions(
    name="conll18",
    strip_subtypes=True,
    features=UNIVERSAL_FEATURES,
    content_deprels=CONTENT_DEPRELS,
    functional_deprels=FUNCTIONAL_DEPRELS,
    elas="arcs",
    slas_content_only=False,
    truncate_deps_labels=False,
)

POLEVAL2018 = Conventions(
    name="poleval2018",
    strip_subtypes=False,
    features=None,
    content_deprels=CONTENT_DEPRELS - {"goeswith", "reparandum", "dep"},
    functional_deprels=FUNCTIONAL_DEPRELS,
    elas="tokens",
    slas_content_only=True,
    truncate_deps_labels=True,
)

CONVENTIONS = {c.name: c for c in (CONLL18, POLEVAL2018)}

METRICS = ("lemma", "upos", "xpos", "ufeats", "uas", "las", "clas", "mlas", "blex", "elas", "slas")
DISPLAY_NAMES = {
    "lemma": "Lemmas",
    "upos": "UPOS",
    "xpos": "XPOS",
    "ufeats": "UFeats",
    "uas": "UAS",
    "las": "LAS",
    "clas": "CLAS",
    "mlas": "MLAS",
    "blex": "BLEX",
    "elas": "ELAS",
    "slas": "SLAS",
}


@dataclass(frozen=True)
class EvalReport:
    metric: str
    correct: int
    gold_total: int
    system_total: int

    @property
    def precision(self) -> float:
        return 100.0 * self.correct / self.system_total if self.system_total else 0.0

    @property
    def recall(self) -> float:
        return 100.0 * self.correct / self.gold_total if self.gold_total else 0.0

    @property
    def f1(self) -> float:
        total = self.system_total + self.gold_total
        return 200.0 * self.correct / total if total else 0.0

    def as_dict(self) -> dict:
        return {
            "metric": self.metric,
            "precision": round(self.precision, 2),
            "recall": round(self.recall, 2),
            "f1": round(self.f1, 2),
            "correct": self.correct,
            "gold_total": self.gold_total,
            "system_total": self.system_total,
        }

    def __str__(self) -> str:
        return f"{self.metric}: P={self.precision:.2f} R={self.recall:.2f} F1={self.f1:.2f}"


# -- helpers ------------------------------------------------------------------


def check_token_alignment(gold: Treebank, system: Treebank) -> None:
    if len(gold) != len(system):
        raise AlignmentError(f"gold has {len(gold)} sentences, system has {len(system)}")
    for i, (g, s) in enumerate(zip(gold, system)):
        if len(g) != len(s):
            raise AlignmentError(f"sentence {i}: gold has {len(g)} tokens, system has {len(s)}")
        for gt, st in zip(g, s):
            if gt.form != st.form:
                raise AlignmentError(f"sentence {i}, token {gt.id}: form {st.form!r} != gold {gt.form!r}")


def _universal(deprel: str) -> str:
    return deprel.split(":", 1)[0]


def _deprel(tok: Token, conv: Conventions) -> str:
    return _universal(tok.deprel) if conv.strip_subtypes else tok.deprel


def _feats(tok: Token, conv: Conventions) -> str:
    items = tok.feats_string.split("|")
    if conv.features is not None:
        items = [f for f in items if f.split("=", 1)[0] in conv.features]
    return "|".join(sorted(items))


def _is_content(tok: Token, conv: Conventions) -> bool:
    return _universal(tok.deprel) in conv.content_deprels


def _is_functional(tok: Token, conv: Conventions) -> bool:
    return _universal(tok.deprel) in conv.functional_deprels


KeyFn = Callable[[Token, Token, Sentence], object]  # (token, gold counterpart, sentence)
FilterFn = Callable[[Token], bool]


def _score(
    metric: str,
    gold: Treebank,
    system: Treebank,
    key: KeyFn,
    keep: FilterFn | None = None,
) -> EvalReport:
    check_token_alignment(gold, system)
    correct = gold_total = system_total = 0
    for gs, ss in zip(gold, system):
        for gt, st in zip(gs, ss):
            g_in = keep is None or keep(gt)
            gold_total += g_in
            system_total += keep is None or keep(st)
            if g_in and key(gt, gt, gs) == key(st, gt, ss):
                correct += 1
    return EvalReport(metric, correct, gold_total, system_total)


# -- metrics -------------------------------------------------------------------


def eval_tagging(
    gold: Treebank,
    system: Treebank,
    field: Literal["lemma", "upos", "xpos", "ufeats"],
    conventions: Conventions = CONLL18,
) -> EvalReport:
    """Per-token tag accuracy, reported as P/R/F1 (all equal under gold tokenization).

    A gold lemma of ``_`` accepts any system lemma, as in the official scorer.
    """
    if field == "lemma":
        key = lambda t, g, s: t.lemma if g.lemma != "_" else "_"  # noqa: E731
    elif field == "upos":
        key = lambda t, g, s: t.upos  # noqa: E731
    elif field == "xpos":
        key = lambda t, g, s: t.xpos  # noqa: E731
    elif field == "ufeats":
        key = lambda t, g, s: _feats(t, conventions)  # noqa: E731
    else:
        raise ValueError(f"unknown tagging field {field!r}")
    return _score(field, gold, system, key)


def eval_uas(gold: Treebank, system: Treebank, conventions: Conventions = CONLL18) -> EvalReport:
    return _score("uas", gold, system, lambda t, g, s: t.head)


def eval_las(gold: Treebank, system: Treebank, conventions: Conventions = CONLL18) -> EvalReport:
    """A token matches when head and dependency label both agree with gold."""
    return _score("las", gold, system, lambda t, g, s: (t.head, _deprel(t, conventions)))


def eval_clas(gold: Treebank, system: Treebank, conventions: Conventions = CONLL18) -> EvalReport:
    return _score(
        "clas",
        gold,
        system,
        lambda t, g, s: (t.head, _deprel(t, conventions)),
        lambda t: _is_content(t, conventions),
    )


def _functional_children(s: Sentence, head: int, conv: Conventions) -> list:
    return [
        (c.id, _deprel(c, conv), c.upos, _feats(c, conv))
        for c in s
        if c.head == head and _is_functional(c, conv)
    ]


def eval_mlas(gold: Treebank, system: Treebank, conventions: Conventions = CONLL18) -> EvalReport:
    """Content-word LAS that also checks UPOS, features and attached function words."""
    conv = conventions

    def key(t: Token, g: Token, s: Sentence):
        return (t.head, _deprel(t, conv), t.upos, _feats(t, conv), _functional_children(s, t.id, conv))

    return _score("mlas", gold, system, key, lambda t: _is_content(t, conv))


def eval_blex(gold: Treebank, system: Treebank, conventions: Conventions = CONLL18) -> EvalReport:
    """Content-word LAS that also checks the lemma."""
    conv = conventions

    def key(t: Token, g: Token, s: Sentence):
        return (t.head, _deprel(t, conv), t.lemma if g.lemma != "_" else "_")

    return _score("blex", gold, system, key, lambda t: _is_content(t, conv))


def _deps_label(label: str, conv: Conventions) -> str:
    return _universal(label) if conv.truncate_deps_labels else label


def eval_elas(gold: Treebank, system: Treebank, conventions: Conventions = CONLL18) -> EvalReport:
    """Enhanced-graph score.

    ``arcs`` mode: P/R/F1 over (dependent, head, label) arcs read from DEPS,
    system arcs matched one-to-one against gold arcs.  ``tokens`` mode: a
    token counts when its basic arc and its whole enhanced head set (the
    basic arc included) match gold.
    """
    check_token_alignment(gold, system)
    if conventions.elas == "tokens":
        conv = conventions

        def key(t: Token, g: Token, s: Sentence):
            arcs = {(t.head, t.deprel)} | {(h, _deps_label(lab, conv)) for h, lab in t.enhanced}
            return (t.head, t.deprel, sorted(arcs))

        return _score("elas", gold, system, key)

    def arcs(tb: Treebank) -> Counter:
        return Counter((i, t.id, h, lab) for i, s in enumerate(tb) for t in s for h, lab in t.enhanced)

    g_arcs, s_arcs = arcs(gold), arcs(system)
    matched = sum((g_arcs & s_arcs).values())
    return EvalReport("elas", matched, sum(g_arcs.values()), sum(s_arcs.values()))


def eval_slas(
    gold: Treebank,
    system: Treebank,
    conventions: Conventions = CONLL18,
    misc_key: str = DEFAULT_SEM_KEY,
) -> EvalReport:
    """LAS that also requires the semantic label to agree (absent matches absent)."""
    conv = conventions
    keep = (lambda t: _is_content(t, conv)) if conv.slas_content_only else None
    return _score(
        "slas",
        gold,
        system,
        lambda t, g, s: (t.head, _deprel(t, conv), sem_label(t, misc_key)),
        keep,
    )


_DISPATCH = {
    "uas": eval_uas,
    "las": eval_las,
    "clas": eval_clas,
    "mlas": eval_mlas,
    "blex": eval_blex,
    "elas": eval_elas,
    "slas": eval_slas,
}


def evaluate(
    gold: Treebank,
    system: Treebank,
    metrics: Iterable[str] = METRICS,
    conventions: Conventions = CONLL18,
) -> dict[str, EvalReport]:
    check_token_alignment(gold, system)
    out = {}
    for m in metrics:
        if m in ("lemma", "upos", "xpos", "ufeats"):
            out[m] = eval_tagging(gold, system, m, conventions)
        elif m in _DISPATCH:
            out[m] = _DISPATCH[m](gold, system, conventions)
        else:
            raise ValueError(f"unknown metric {m!r}; choose from {', '.join(METRICS)}")
    return out


def format_reports(reports: Sequence[EvalReport] | dict, fmt: Literal["tsv", "json"] = "tsv") -> str:
    if isinstance(reports, dict):
        reports = list(reports.values())
    if fmt == "json":
        return json.dumps([r.as_dict() for r in reports], indent=2) + "\n"
    lines = ["metric\tprecision\trecall\tf1\tcorrect\tgold_total\tsystem_total"]
    for r in reports:
        lines.append(
            f"{DISPLAY_NAMES.get(r.metric, r.metric)}\t{r.precision:.2f}\t{r.recall:.2f}\t{r.f1:.2f}"
            f"\t{r.correct}\t{r.gold_total}\t{r.system_total}"
        )
    return "\n".join(lines) + "\n"
