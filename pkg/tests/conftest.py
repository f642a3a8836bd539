import dataclasses
import io
import random
from pathlib import Path

import pytest

from udblend.conllu import Sentence, Token, Treebank, parse_conllu, read_conllu, serialize_conllu
from udblend.synthetic import noisy_parse

DATA = Path(__file__).parent / "data"
CORPUS = DATA / "corpus.conllu"
RULE_FIXTURES = DATA / "rules.conllu"

SEM_LABELS = ["Agent", "Patient", "Theme", "Location", "Time", "Manner"]


def mk(rows, sent_id="t1", deps=None):
    """Sentence from ``(form, head, deprel)`` rows; ``deps`` maps id -> DEPS string."""
    toks = []
    for i, (form, head, deprel) in enumerate(rows, 1):
        enhanced = frozenset()
        if deps and i in deps:
            enhanced = frozenset((int(h), lab) for h, _, lab in (x.partition(":") for x in deps[i].split("|")))
        toks.append(Token(id=i, form=form, lemma=form.lower(), upos="X", head=head, deprel=deprel, enhanced=enhanced))
    return Sentence(tuple(toks), (f"# sent_id = {sent_id}",))


def perturb(tb: Treebank, seed: int, p_tag: float = 0.1, p_deps: float = 0.15) -> Treebank:
    """Valid-tree system output: moved heads, relabelled arcs, wrong tags and DEPS."""
    rng = random.Random(seed)
    out = []
    for s in tb:
        noisy = noisy_parse(s, rng, p_head=0.12, p_label=0.12)
        toks = []
        for gt, t in zip(s, noisy):
            changes = {}
            if rng.random() < p_tag:
                changes["lemma"] = t.lemma + "x"
            if rng.random() < p_tag:
                changes["upos"] = rng.choice(["NOUN", "VERB", "ADJ", "X"])
            if rng.random() < p_tag:
                changes["xpos"] = "ign"
            if rng.random() < p_tag and t.feats:
                changes["feats"] = t.feats[:-1]
            enhanced = set(gt.enhanced)
            if enhanced and rng.random() < p_deps:
                enhanced.discard(rng.choice(sorted(enhanced)))
            if enhanced and rng.random() < p_deps:
                h = rng.choice([j for j in range(len(s) + 1) if j != t.id])
                enhanced.add((h, rng.choice(["obj", "nsubj", "conj", "advmod"])))
            changes["enhanced"] = frozenset(enhanced)
            toks.append(dataclasses.replace(t, **changes))
        out.append(dataclasses.replace(s, tokens=tuple(toks)))
    return Treebank(tuple(out))


def with_sem(tb: Treebank, seed: int, p_change: float = 0.0) -> Treebank:
    """Copy with an 11th semantic-label column and no multiword lines."""
    rng = random.Random(seed)
    out = []
    for s in tb:
        toks = []
        for t in s:
            label = rng.choice(SEM_LABELS + ["_", "_"])
            toks.append(dataclasses.replace(t, sem=label))
        out.append(dataclasses.replace(s, tokens=tuple(toks), multiword=()))
    return Treebank(tuple(out))


def resem(gold: Treebank, system: Treebank, seed: int, p: float) -> Treebank:
    """``system`` with the gold semantic labels, a fraction ``p`` of them changed."""
    rng = random.Random(seed)
    out = []
    for gs, ss in zip(gold, system):
        toks = []
        for gt, st in zip(gs, ss):
            sem = gt.sem
            if rng.random() < p:
                sem = rng.choice([x for x in SEM_LABELS + ["_"] if x != sem])
            toks.append(dataclasses.replace(st, sem=sem))
        out.append(dataclasses.replace(ss, tokens=tuple(toks), multiword=()))
    return Treebank(tuple(out))


def lines(tb: Treebank) -> list[str]:
    return serialize_conllu(tb).splitlines(keepends=True)


def stream(tb: Treebank) -> io.StringIO:
    return io.StringIO(serialize_conllu(tb))


@pytest.fixture(scope="session")
def corpus() -> Treebank:
    return read_conllu(CORPUS, require_tree=True)


@pytest.fixture(scope="session")
def rule_fixtures() -> Treebank:
    return read_conllu(RULE_FIXTURES, require_tree=True)


__all__ = ["mk", "perturb", "with_sem", "resem", "lines", "stream", "parse_conllu", "CORPUS", "RULE_FIXTURES", "DATA"]
