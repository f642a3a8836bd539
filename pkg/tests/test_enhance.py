import dataclasses

import pytest

from conftest import mk
from udblend.conllu import TreeValidationError, Treebank
from udblend.enhance import (
    FILTERS,
    EnhancedArc,
    Origin,
    RuleConfig,
    apply_children_rule,
    apply_head_rule,
    basic_arcs,
    enhance_sentence,
    enhance_treebank,
    enhanced_arcs,
    filter_advmod1,
    filter_labels,
    filter_obj,
    register_filter,
    score_rule_arcs,
)
from udblend.synthetic import coordination_treebank

H, C = Origin.HEAD_RULE, Origin.CHILDREN_RULE


def by_id(tb, sent_id):
    return next(s for s in tb if s.sent_id == sent_id)


def triples(arcs):
    return {(a.dependent, a.head, a.label) for a in arcs}


def rule_triples(s, cfg=RuleConfig()):
    return triples(enhanced_arcs(s, cfg))


# -- rule fixtures -------------------------------------------------------------


def test_head_rule_adds_root_arc(rule_fixtures):
    s = by_id(rule_fixtures, "head-rule")
    assert s[3].form == "pracują"
    assert triples(apply_head_rule(s)) == {(3, 0, "root")}
    out = enhance_sentence(s)
    assert out[3].enhanced == {(0, "root"), (1, "conj")}


def test_children_rule_adds_advmod_arc(rule_fixtures):
    s = by_id(rule_fixtures, "children-rule")
    assert (s[1].form, s[5].form) == ("Zawsze", "przerażały")
    assert (1, 5, "advmod") in triples(apply_children_rule(s))
    out = enhance_sentence(s)
    assert out[1].enhanced == {(3, "advmod"), (5, "advmod")}


def test_advmod1_filter_removes_arc(rule_fixtures):
    s = by_id(rule_fixtures, "advmod1-filter")
    assert (s[3].form, s[6].form) == ("obok", "miauknął")
    assert (3, 6, "advmod") in triples(apply_children_rule(s))
    assert (3, 6, "advmod") in rule_triples(s, RuleConfig(enabled_filters=("labels",)))
    assert (3, 6, "advmod") not in rule_triples(s)
    # the shared subject survives
    assert (1, 6, "nsubj") in rule_triples(s)


def test_obj_filter_removes_arc(rule_fixtures):
    s = by_id(rule_fixtures, "obj-filter")
    assert (s[2].form, s[4].form) == ("ręce", "śpiewają")
    assert (2, 4, "obj") in rule_triples(s, RuleConfig(enabled_filters=("labels", "advmod1")))
    assert (2, 4, "obj") not in rule_triples(s)
    assert enhance_sentence(s)[2].enhanced == {(1, "obj")}


def test_obj_after_both_conjuncts_is_kept(rule_fixtures):
    s = by_id(rule_fixtures, "obj-kept")
    assert (s[4].form, s[3].form) == ("ją", "doceniali")
    assert (4, 3, "obj") in rule_triples(s)


def test_figures_match_gold_deps(rule_fixtures, corpus):
    for s in rule_fixtures:
        gold = corpus[list(rule_fixtures).index(s)]
        out = enhance_sentence(s)
        if s.sent_id == "children-rule":
            # the gold graph also shares the preceding object, which the obj filter drops
            assert out[2].enhanced == {(3, "obj")}
            assert gold[2].enhanced == {(3, "obj"), (5, "obj")}
            continue
        assert [t.enhanced for t in out] == [t.enhanced for t in gold], s.sent_id


# -- rules ---------------------------------------------------------------------


def test_head_rule_chain_uses_parent_label():
    # 1 <-root- 0, 2 -conj-> 1, 3 -conj-> 2
    s = mk([("a", 0, "root"), ("b", 1, "conj"), ("c", 2, "conj")])
    assert triples(apply_head_rule(s)) == {(2, 0, "root"), (3, 1, "conj")}


def test_head_rule_non_root_parent():
    s = mk([("widzę", 0, "root"), ("psa", 1, "obj"), ("i", 4, "cc"), ("kota", 2, "conj")])
    assert triples(apply_head_rule(s)) == {(4, 1, "obj")}


def test_no_conj_no_arcs():
    s = mk([("Ala", 2, "nsubj"), ("ma", 0, "root"), ("kota", 2, "obj")])
    assert apply_head_rule(s) == set()
    assert apply_children_rule(s) == set()
    assert enhance_sentence(s)[1].enhanced == {(2, "nsubj")}


def test_children_rule_excludes_conj_siblings(corpus):
    s = by_id(corpus, "s19")  # two conjuncts of the same verb
    arcs = triples(apply_children_rule(s))
    assert (4, 6, "conj") not in arcs and (6, 4, "conj") not in arcs
    assert {(1, 4, "nsubj"), (1, 6, "nsubj")} <= arcs


def test_conj_sibling_exclusion_is_score_neutral(corpus):
    # without the exclusion, conj-labelled sibling arcs would be dropped by the labels filter anyway
    assert "conj" not in RuleConfig().allowed_labels


def test_rule_invariants(corpus):
    for s in corpus:
        for a in apply_head_rule(s):
            assert s[a.dependent].deprel == "conj" and a.origin is H
        for a in apply_children_rule(s):
            assert s[a.head].deprel == "conj" and a.origin is C


# -- filters -------------------------------------------------------------------


def test_filters_only_touch_children_arcs(rule_fixtures):
    s = by_id(rule_fixtures, "head-rule")
    arcs = {EnhancedArc(3, 0, "root", H), EnhancedArc(6, 3, "punct", C), EnhancedArc(5, 3, "nummod", C)}
    assert filter_labels(s, arcs) == {EnhancedArc(3, 0, "root", H)}
    kept = {EnhancedArc(5, 3, "nsubj", C)}
    assert filter_labels(s, kept) == kept


def test_advmod1_scope(rule_fixtures):
    s = by_id(rule_fixtures, "advmod1-filter")
    arcs = {EnhancedArc(3, 6, "advmod", C), EnhancedArc(1, 6, "nsubj", C)}
    assert filter_advmod1(s, arcs) == {EnhancedArc(1, 6, "nsubj", C)}
    # a conjunct without its own advmod keeps the arc
    s2 = by_id(rule_fixtures, "children-rule")
    assert filter_advmod1(s2, {EnhancedArc(1, 5, "advmod", C)}) == {EnhancedArc(1, 5, "advmod", C)}


def test_obj_scope(rule_fixtures):
    s = by_id(rule_fixtures, "obj-filter")
    arcs = {EnhancedArc(2, 4, "obj", C), EnhancedArc(2, 4, "advmod", C), EnhancedArc(5, 4, "obj", C)}
    assert filter_obj(s, arcs) == {EnhancedArc(2, 4, "advmod", C), EnhancedArc(5, 4, "obj", C)}


def test_filters_are_contractive(corpus):
    for s in corpus:
        arcs = apply_children_rule(s) | apply_head_rule(s)
        for f in (filter_labels, filter_advmod1, filter_obj):
            out = f(s, arcs)
            assert out <= arcs
            assert {a for a in arcs if a.origin is H} <= out


def test_filter_order_is_immaterial(corpus):
    for s in corpus:
        a = rule_triples(s, RuleConfig(enabled_filters=("labels", "advmod1", "obj")))
        b = rule_triples(s, RuleConfig(enabled_filters=("obj", "advmod1", "labels")))
        assert a == b


# -- pipeline ------------------------------------------------------------------


def test_no_rules_gives_basic_arcs(corpus):
    out = enhance_treebank(corpus, RuleConfig.no_rules())
    for s in out:
        assert all(t.enhanced == {(t.head, t.deprel)} for t in s)


def test_rules_keep_basic_columns(corpus):
    out = enhance_treebank(corpus)
    for a, b in zip(corpus, out):
        for ta, tb in zip(a, b):
            assert dataclasses.replace(ta, enhanced=frozenset()) == dataclasses.replace(tb, enhanced=frozenset())
            assert (tb.head, tb.deprel) in tb.enhanced
        assert a.comments == b.comments and a.multiword == b.multiword


def test_idempotent(corpus):
    once = enhance_treebank(corpus)
    assert enhance_treebank(once) == once


def test_enhance_rejects_invalid_tree():
    s = mk([("a", 0, "root"), ("b", 0, "root")], sent_id="bad")
    with pytest.raises(TreeValidationError, match="bad"):
        enhance_sentence(s)


def test_basic_arcs():
    s = mk([("a", 0, "root"), ("b", 1, "obj")])
    assert basic_arcs(s) == {EnhancedArc(1, 0, "root", Origin.BASIC), EnhancedArc(2, 1, "obj", Origin.BASIC)}


# -- registry ------------------------------------------------------------------


def test_unknown_filter():
    with pytest.raises(KeyError, match="nope"):
        enhanced_arcs(mk([("a", 0, "root")]), RuleConfig(enabled_filters=("nope",)))


def test_duplicate_registration():
    with pytest.raises(ValueError, match="already registered"):
        register_filter("labels", lambda s, a, c: False)


def test_noop_filter_changes_nothing(corpus):
    reg = FILTERS.copy()
    register_filter("noop", lambda s, a, c: False, registry=reg)
    cfg = RuleConfig(enabled_filters=("labels", "advmod1", "obj", "noop"))
    assert enhance_treebank(corpus, cfg, reg) == enhance_treebank(corpus)
    assert "noop" not in FILTERS


def test_remove_all_filter_gives_head_only(corpus):
    reg = FILTERS.copy()
    register_filter("everything", lambda s, a, c: True, registry=reg)
    cfg = RuleConfig(enabled_filters=("everything",))
    head_only = RuleConfig(enable_children=False, enabled_filters=())
    assert enhance_treebank(corpus, cfg, reg) == enhance_treebank(corpus, head_only)


def test_custom_filter_sees_children_arcs_only(rule_fixtures):
    seen = []
    reg = FILTERS.copy()
    register_filter("spy", lambda s, a, c: seen.append(a.origin) or False, registry=reg)
    enhance_treebank(rule_fixtures, RuleConfig(enabled_filters=("spy",)), reg)
    assert seen and set(seen) == {C}


# -- rule diagnostics -----------------------------------------------------------


def test_score_rule_arcs_on_synthetic_gold():
    gold = coordination_treebank(200, seed=4, noise=0.0)
    assert score_rule_arcs(gold, "head").f1 == 100.0
    filtered = score_rule_arcs(gold, "children", RuleConfig())
    assert filtered.precision == 100.0 and filtered.recall == 100.0
    raw = score_rule_arcs(gold, "children")
    assert raw.precision < 100.0 and raw.recall == 100.0
    with pytest.raises(ValueError):
        score_rule_arcs(gold, "siblings")


def test_score_rule_arcs_on_corpus(corpus):
    head = score_rule_arcs(corpus, "head")
    assert head.f1 == 100.0
    children = score_rule_arcs(corpus, "children", RuleConfig())
    assert children.recall < 100.0  # the s2 object is missed
    assert Treebank(()).n_tokens == 0
