"""
Blending several parsers
========================

Three imperfect "parsers" disagree on some arcs.  Their votes form a
weighted graph, the maximum spanning tree of that graph is the consensus
parse, and the consensus usually beats each input.
"""

from udblend.blend import blend_treebank, build_vote_graph
from udblend.evaluate import eval_las
from udblend.graph import cle_decode
from udblend.synthetic import coordination_treebank, noisy_treebank, strip_enhanced

gold = strip_enhanced(coordination_treebank(200, seed=0))
parsers = [noisy_treebank(gold, seed=s, p_head=0.15, p_label=0.1) for s in range(3)]

for i, p in enumerate(parsers):
    print(f"parser {i}: LAS {eval_las(gold, p).f1:.2f}")

# one sentence by hand: vote counts become arc weights
g = build_vote_graph([p[0] for p in parsers])
print("arcs with split votes:", {arc: w for arc, w in g.weight.items() if w < 3})
print("consensus heads:", cle_decode(g))

blended = blend_treebank(parsers)
print(f"blend:    LAS {eval_las(gold, blended).f1:.2f}")
