import dataclasses
import itertools
import random

import pytest

from conftest import mk, perturb
from udblend.blend import (
    blend_sentence,
    blend_treebank,
    build_vote_graph,
    check_aligned,
    fix_roots,
    vote_labels,
)
from udblend.conllu import AlignmentError, Treebank, validate_tree
from udblend.graph import WeightedArcGraph, brute_force_arborescences, cle_decode
from udblend.synthetic import coordination_treebank, noisy_treebank

WORDS = ["Ala", "ma", "kota", "i", "psa"]


def tree(heads, labels=None):
    labels = labels or ["root" if h == 0 else "dep" for h in heads]
    return mk(list(zip(WORDS[: len(heads)], heads, labels)))


def test_vote_graph_counts():
    preds = [tree([2, 0, 2]), tree([2, 0, 2]), tree([3, 0, 2])]
    g = build_vote_graph(preds)
    assert g.weight[(2, 1)] == 2
    assert g.weight[(3, 1)] == 1
    assert g.weight[(0, 2)] == 3
    assert g.labels[(2, 3)]["dep"] == 3


def test_vote_graph_unanimity():
    g = build_vote_graph([tree([2, 0, 2])] * 3)
    assert g.weight == {(2, 1): 3, (0, 2): 3, (2, 3): 3}


def test_label_multiset_total():
    preds = [tree([2, 0], ["amod", "root"]), tree([2, 0], ["amod", "root"]), tree([2, 0], ["nmod", "root"])]
    g = build_vote_graph(preds)
    assert sum(g.labels[(2, 1)].values()) == 3
    assert vote_labels(g, {1: 2, 2: 0}) == {1: "amod", 2: "root"}


def test_label_tie_goes_to_smallest_string():
    g = WeightedArcGraph(1)
    g.add_vote(0, 1, "nmod")
    g.add_vote(0, 1, "amod")
    assert vote_labels(g, {1: 0}) == {1: "amod"}


def test_vote_labels_missing_arc():
    g = WeightedArcGraph.from_weights(2, {(0, 1): 1, (1, 2): 1})
    with pytest.raises(KeyError):
        vote_labels(g, {1: 0, 2: 0})


def test_alignment_errors():
    with pytest.raises(AlignmentError, match="sentence 4"):
        build_vote_graph([tree([0, 1]), tree([0, 1, 1])], index=4)
    other = mk([("X", 0, "root"), ("ma", 1, "dep")])
    with pytest.raises(AlignmentError, match="word forms"):
        build_vote_graph([tree([0, 1]), other])
    with pytest.raises(AlignmentError, match="1 sentences"):
        check_aligned([Treebank((tree([0]), tree([0]))), Treebank((tree([0]),))])
    with pytest.raises(AlignmentError, match="sentence 1"):
        check_aligned([Treebank((tree([0]), tree([0, 1]))), Treebank((tree([0]), tree([0])))])


def test_fix_roots_single_root_unchanged():
    s = tree([0, 1, 1])
    assert fix_roots(s) == s


def test_fix_roots_chain():
    heads = [2, 0, 2, 2, 0, 5, 5, 5, 0]
    s = mk([(f"w{i}", h, "root" if h == 0 else "dep") for i, h in enumerate(heads, 1)])
    fixed = fix_roots(s)
    assert fixed[2].head == 0 and fixed[2].deprel == "root"
    assert fixed[5].head == 2 and fixed[5].deprel == "parataxis"
    assert fixed[9].head == 5 and fixed[9].deprel == "parataxis"
    assert validate_tree(fixed) == []


def test_fix_roots_relabels_and_fallback():
    s = tree([0, 0], ["root", "root"])
    fixed = fix_roots(s, fallback="conj")
    assert (fixed[2].head, fixed[2].deprel) == (1, "conj")
    # an extra root dependent that already has a proper label keeps it
    s = tree([0, 0], ["root", "obj"])
    assert (fix_roots(s)[2].head, fix_roots(s)[2].deprel) == (1, "obj")
    # the surviving root is always labelled root
    assert fix_roots(tree([0, 1], ["nsubj", "dep"]))[1].deprel == "root"


def test_fix_roots_needs_a_root():
    with pytest.raises(ValueError, match="no token"):
        fix_roots(mk([("a", 2, "dep"), ("b", 1, "dep")]))


def test_blend_majority_tree():
    gold = tree([2, 0, 2, 5, 3], ["nsubj", "root", "obj", "cc", "conj"])
    wrong = tree([3, 0, 2, 3, 3], ["nsubj", "root", "obj", "cc", "conj"])
    other = tree([2, 0, 1, 5, 3], ["nsubj", "root", "iobj", "cc", "conj"])
    out = blend_sentence([gold, wrong, other])
    assert out.heads == gold.heads
    assert [t.deprel for t in out] == [t.deprel for t in gold]
    g = build_vote_graph([gold, wrong, other])
    assert brute_force_arborescences(g) == dict(zip(range(1, 6), gold.heads))


def test_blend_tie_is_deterministic():
    a = tree([0, 1, 1])
    b = tree([0, 3, 1])
    outs = {tuple(blend_sentence([a, b]).heads) for _ in range(100)}
    assert outs == {(0, 1, 1)}
    assert blend_sentence([b, a]).heads == [0, 1, 1]


def test_blend_copies_donor_columns():
    a = dataclasses.replace(tree([0, 1]), comments=("# sent_id = a",))
    b_tokens = tuple(dataclasses.replace(t, lemma="L", upos="NOUN") for t in tree([0, 1]))
    b = dataclasses.replace(a, tokens=b_tokens, comments=("# sent_id = b",))
    assert blend_sentence([a, b]).sent_id == "a"
    out = blend_sentence([a, b], donor=1)
    assert out.sent_id == "b" and out[1].lemma == "L"


def test_blend_clears_enhanced(corpus):
    out = blend_treebank([corpus])
    assert all(not t.enhanced for s in out for t in s)


def test_unanimity(corpus):
    out = blend_treebank([corpus] * 3)
    for gs, bs in zip(corpus, out):
        assert [(t.head, t.deprel) for t in gs] == [(t.head, t.deprel) for t in bs]


def test_outputs_are_valid_trees(corpus):
    inputs = [perturb(corpus, seed) for seed in range(5)]
    assert all(validate_tree(s) == [] for s in blend_treebank(inputs))


def test_permutation_invariance(corpus):
    inputs = [perturb(corpus, seed) for seed in range(4)]
    ref = blend_treebank(inputs)
    for perm in itertools.permutations(range(4)):
        out = blend_treebank([inputs[i] for i in perm], donor=perm.index(0))
        assert out == ref


def test_determinism_across_jobs():
    gold = coordination_treebank(60, seed=3)
    inputs = [noisy_treebank(gold, seed=s, p_head=0.2, p_label=0.2) for s in range(5)]
    ref = blend_treebank(inputs, jobs=1)
    for jobs in (2, 4, 8):
        assert blend_treebank(inputs, jobs=jobs) == ref


def test_decoder_matches_oracle_on_vote_graphs():
    rng = random.Random(7)
    gold = coordination_treebank(40, seed=5)
    small = Treebank(tuple(s for s in gold if len(s) <= 8))
    inputs = [noisy_treebank(small, seed=rng.randrange(10**6), p_head=0.3) for _ in range(4)]
    for i in range(len(small)):
        g = build_vote_graph([tb[i] for tb in inputs])
        assert cle_decode(g) == brute_force_arborescences(g)
