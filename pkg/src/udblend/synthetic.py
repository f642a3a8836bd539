"""Synthetic treebanks for exercising the pipeline without real data.

``coordination_treebank`` builds clause trees rich in coordination whose gold
enhanced graphs share dependents across conjuncts by a fixed policy, with a
controllable fraction of arcs perturbed.  ``noisy_parse`` imitates an
imperfect parser by moving subtrees and relabelling arcs while keeping every
output a valid tree.
"""

from __future__ import annotations

import dataclasses
import random
from dataclasses import dataclass, field

from .conllu import Sentence, Token, Treebank
from .enhance import (
    DEFAULT_ALLOWED_LABELS,
    apply_children_rule,
    apply_head_rule,
)

_UPOS = {
    "nsubj": "NOUN", "obj": "NOUN", "iobj": "NOUN", "obl": "NOUN", "nmod": "NOUN",
    "advmod": "ADV", "amod": "ADJ", "det": "DET", "case": "ADP", "cc": "CCONJ",
    "mark": "SCONJ", "aux": "AUX", "punct": "PUNCT", "xcomp": "VERB", "cop": "AUX",
    "discourse:comment": "PART", "advcl": "VERB", "nummod": "NUM",
}


@dataclass
class _Node:
    deprel: str
    upos: str
    left: list["_Node"] = field(default_factory=list)
    right: list["_Node"] = field(default_factory=list)


def _noun(rng: random.Random, deprel: str, depth: int) -> _Node:
    n = _Node(deprel, "NOUN")
    if deprel == "obl":
        n.left.append(_Node("case", "ADP"))
    if rng.random() < 0.4:
        n.left.append(_Node("det", "DET"))
    if rng.random() < 0.4:
        n.left.append(_Node("amod", "ADJ"))
    if rng.random() < 0.2:
        n.left.append(_Node("nummod", "NUM"))
    if rng.random() < 0.25:
        n.right.append(_Node("nmod", "NOUN"))
    if depth < 2 and rng.random() < 0.3:
        conj = _Node("conj", "NOUN", left=[_Node("cc", "CCONJ")])
        if rng.random() < 0.3:
            conj.left.append(_Node("amod", "ADJ"))
        n.right.append(conj)
    return n


def _clause(rng: random.Random, deprel: str, depth: int) -> _Node:
    v = _Node(deprel, "VERB")
    if rng.random() < 0.7:
        v.left.append(_noun(rng, "nsubj", depth + 1))
    if rng.random() < 0.3:
        v.left.append(_Node("aux", "AUX"))
    if rng.random() < 0.3:
        v.left.append(_Node("advmod", "ADV"))
    if rng.random() < 0.2:
        v.left.append(_noun(rng, "obj", depth + 1))
    if rng.random() < 0.1:
        v.left.insert(0, _Node("mark", "SCONJ"))
    if rng.random() < 0.05:
        v.left.append(_Node("discourse:comment", "PART"))
    right: list[_Node] = []
    if rng.random() < 0.5:
        right.append(_noun(rng, "obj", depth + 1))
    if rng.random() < 0.2:
        right.append(_noun(rng, "iobj", depth + 1))
    if rng.random() < 0.4:
        right.append(_noun(rng, "obl", depth + 1))
    if rng.random() < 0.25:
        right.append(_Node("advmod", "ADV"))
    if rng.random() < 0.1:
        right.append(_Node("xcomp", "VERB"))
    if depth < 2 and rng.random() < 0.7:
        conj = _Node("conj", "VERB", left=[_Node("cc", "CCONJ")])
        if rng.random() < 0.3:
            conj.left.append(_Node("advmod", "ADV"))
        if rng.random() < 0.3:
            conj.right.append(_noun(rng, "obj", depth + 1))
        right.insert(rng.randint(0, len(right)), conj)
        if rng.random() < 0.3:
            right.insert(right.index(conj), _Node("punct", "PUNCT"))
    v.right = right
    return v


def _linearize(root: _Node) -> list[tuple[_Node, _Node | None]]:
    out: list[tuple[_Node, _Node | None]] = []

    def walk(node: _Node, parent: _Node | None):
        for c in node.left:
            walk(c, node)
        out.append((node, parent))
        for c in node.right:
            walk(c, node)

    walk(root, None)
    return out


def shared_dependent(s: Sentence, dep: int, conjunct: int, allowed=DEFAULT_ALLOWED_LABELS) -> bool:
    """Gold policy: does sibling ``dep`` of ``conjunct`` also depend on it?"""
    sib = s[dep]
    if sib.deprel not in allowed:
        return False
    if sib.deprel == "advmod" and any(c.deprel == "advmod" for c in s.children(conjunct)):
        return False
    if sib.deprel == "obj" and dep < conjunct:
        return False
    return True


def random_tree(rng: random.Random, index: int = 0) -> Sentence:
    """One synthetic clause tree with an empty DEPS column."""
    root = _clause(rng, "root", 0)
    root.right.append(_Node("punct", "PUNCT"))
    order = _linearize(root)
    ids = {id(node): i for i, (node, _) in enumerate(order, 1)}
    tokens = []
    for i, (node, parent) in enumerate(order, 1):
        form = "." if node.deprel == "punct" and i == len(order) else f"{node.upos.lower()}{i}"
        tokens.append(
            Token(
                id=i,
                form=form,
                lemma=form.lower(),
                upos=node.upos,
                xpos=node.upos.lower(),
                feats=("Case=Nom",) if node.upos == "NOUN" else (),
                head=0 if parent is None else ids[id(parent)],
                deprel=node.deprel,
            )
        )
    return Sentence(tuple(tokens), (f"# sent_id = syn-{index}",))


def gold_enhanced(s: Sentence, rng: random.Random, noise: float = 0.0) -> Sentence:
    """Attach gold DEPS: basic arcs, grandparent heads and shared dependents.

    With probability ``noise`` each candidate arc's gold status is flipped.
    """
    deps = {t.id: {(t.head, t.deprel)} for t in s}
    for a in sorted(apply_head_rule(s)):
        if rng.random() >= noise:
            deps[a.dependent].add((a.head, a.label))
    for a in sorted(apply_children_rule(s)):
        keep = shared_dependent(s, a.dependent, a.head)
        if rng.random() < noise:
            keep = not keep
        if keep:
            deps[a.dependent].add((a.head, a.label))
    return dataclasses.replace(
        s, tokens=tuple(dataclasses.replace(t, enhanced=frozenset(deps[t.id])) for t in s)
    )


def coordination_treebank(n_sentences: int, seed: int = 0, noise: float = 0.05) -> Treebank:
    rng = random.Random(seed)
    return Treebank(tuple(gold_enhanced(random_tree(rng, i), rng, noise) for i in range(n_sentences)))


_LABELS = sorted(set(_UPOS) | {"conj", "nmod"})


def _subtree(s: Sentence, token_id: int) -> set[int]:
    out = {token_id}
    frontier = [token_id]
    while frontier:
        h = frontier.pop()
        for c in s.children(h):
            if c.id not in out:
                out.add(c.id)
                frontier.append(c.id)
    return out


def noisy_parse(s: Sentence, rng: random.Random, p_head: float = 0.1, p_label: float = 0.1) -> Sentence:
    """Perturbed copy of ``s`` that is still a single-rooted tree with empty DEPS."""
    tokens = list(s.tokens)
    for i, t in enumerate(tokens):
        if t.head == 0:
            continue
        if rng.random() < p_head:
            cur = Sentence(tuple(tokens))
            banned = _subtree(cur, t.id)
            options = [j for j in range(1, len(tokens) + 1) if j not in banned and j != t.head]
            if options:
                tokens[i] = t = dataclasses.replace(t, head=rng.choice(options))
        if rng.random() < p_label:
            tokens[i] = t = dataclasses.replace(t, deprel=rng.choice([x for x in _LABELS if x != t.deprel]))
    tokens = [dataclasses.replace(t, enhanced=frozenset()) for t in tokens]
    return dataclasses.replace(s, tokens=tuple(tokens))


def noisy_treebank(tb: Treebank, seed: int, p_head: float = 0.1, p_label: float = 0.1) -> Treebank:
    rng = random.Random(seed)
    return Treebank(tuple(noisy_parse(s, rng, p_head, p_label) for s in tb))


def strip_enhanced(tb: Treebank) -> Treebank:
    return Treebank(
        tuple(
            dataclasses.replace(s, tokens=tuple(dataclasses.replace(t, enhanced=frozenset()) for t in s))
            for s in tb
        )
    )
