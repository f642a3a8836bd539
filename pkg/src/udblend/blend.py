"""Consensus trees from several parsers' outputs (blending / reparsing).

Every predicted arc is a vote.  The vote graph is decoded with
Chu-Liu-Edmonds, each chosen arc takes its most frequent label, and excess
root dependents are chained onto one another.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ProcessPoolExecutor
from typing import Mapping, Sequence

from .conllu import ROOT_DEPREL, AlignmentError, Sentence, Treebank
from .graph import WeightedArcGraph, cle_decode

DEFAULT_ROOT_FALLBACK = "parataxis"


def build_vote_graph(predictions: Sequence[Sentence], index: int | None = None) -> WeightedArcGraph:
    if not predictions:
        raise ValueError("need at least one prediction")
    first = predictions[0]
    where = f"sentence {index}" if index is not None else "sentence"
    forms = [t.form for t in first]
    for k, p in enumerate(predictions[1:], 1):
        if len(p) != len(first):
            raise AlignmentError(f"{where}: prediction {k} has {len(p)} tokens, prediction 0 has {len(first)}")
        if [t.form for t in p] != forms:
            raise AlignmentError(f"{where}: prediction {k} has different word forms")
    g = WeightedArcGraph(len(first))
    for p in predictions:
        for t in p:
            g.add_vote(t.head, t.id, t.deprel)
    return g


def vote_labels(g: WeightedArcGraph, tree: Mapping[int, int]) -> dict[int, str]:
    """Most frequent label per tree arc; ties go to the smallest label string."""
    out = {}
    for dep, head in tree.items():
        counts = g.labels.get((head, dep))
        if not counts:
            raise KeyError(f"arc ({head}, {dep}) is not in the vote graph")
        out[dep] = min(counts.items(), key=lambda kv: (-kv[1], kv[0]))[0]
    return out


def fix_roots(s: Sentence, fallback: str = DEFAULT_ROOT_FALLBACK) -> Sentence:
    """Keep the first root dependent and chain every later one onto the previous.

    Tokens that end up under a non-root head but still carry ``root`` are
    relabelled with ``fallback``.
    """
    roots = [t.id for t in s if t.head == 0]
    if not roots:
        raise ValueError(f"sentence {s.sent_id!r} has no token attached to the root")
    new_head = {r: prev for prev, r in zip(roots, roots[1:])}
    tokens = []
    for t in s:
        head = new_head.get(t.id, t.head)
        if t.id == roots[0]:
            deprel = ROOT_DEPREL
        elif head != 0 and t.deprel == ROOT_DEPREL:
            deprel = fallback
        else:
            deprel = t.deprel
        if (head, deprel) != (t.head, t.deprel):
            t = dataclasses.replace(t, head=head, deprel=deprel)
        tokens.append(t)
    return dataclasses.replace(s, tokens=tuple(tokens))


def blend_sentence(
    predictions: Sequence[Sentence],
    donor: int = 0,
    root_fallback: str = DEFAULT_ROOT_FALLBACK,
    index: int | None = None,
) -> Sentence:
    """Blend aligned predictions of one sentence into a single tree.

    Forms, lemmas, tags, features, MISC, comments and multiword lines come
    from ``predictions[donor]``; the enhanced column is cleared.
    """
    g = build_vote_graph(predictions, index)
    tree = cle_decode(g)
    labels = vote_labels(g, tree)
    base = predictions[donor]
    tokens = tuple(
        dataclasses.replace(t, head=tree[t.id], deprel=labels[t.id], enhanced=frozenset()) for t in base
    )
    return fix_roots(dataclasses.replace(base, tokens=tokens), root_fallback)


def _blend_one(args):
    i, preds, donor, fallback = args
    return blend_sentence(preds, donor, fallback, index=i)


def check_aligned(inputs: Sequence[Treebank]) -> None:
    if not inputs:
        raise ValueError("need at least one treebank")
    n = len(inputs[0])
    for k, tb in enumerate(inputs[1:], 1):
        if len(tb) != n:
            raise AlignmentError(f"treebank {k} has {len(tb)} sentences, treebank 0 has {n}")
    for i in range(n):
        size = len(inputs[0][i])
        for k, tb in enumerate(inputs[1:], 1):
            if len(tb[i]) != size:
                raise AlignmentError(f"sentence {i}: treebank {k} has {len(tb[i])} tokens, treebank 0 has {size}")


def blend_treebank(
    inputs: Sequence[Treebank],
    donor: int = 0,
    root_fallback: str = DEFAULT_ROOT_FALLBACK,
    jobs: int = 1,
) -> Treebank:
    """Sentence-wise blend of aligned treebanks; output order follows the input."""
    check_aligned(inputs)
    work = [(i, [tb[i] for tb in inputs], donor, root_fallback) for i in range(len(inputs[0]))]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            out = list(pool.map(_blend_one, work, chunksize=max(1, len(work) // (4 * jobs))))
    else:
        out = [_blend_one(w) for w in work]
    return Treebank(tuple(out))
