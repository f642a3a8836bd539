"""
Choosing how many instances to blend
====================================

Each parser architecture may be trained several times.  The search tries
every count per group (all zeros excluded), blends the first instances of
each group and keeps the combination with the best development LAS.
"""

from udblend.search import ParserGroup, count_combinations, format_ranking, search_best
from udblend.synthetic import coordination_treebank, noisy_treebank, strip_enhanced

dev = strip_enhanced(coordination_treebank(100, seed=1))
groups = [
    ParserGroup("strong", tuple(noisy_treebank(dev, seed=s, p_head=0.05, p_label=0.05) for s in range(3))),
    ParserGroup("weak", tuple(noisy_treebank(dev, seed=10 + s, p_head=0.25, p_label=0.2) for s in range(2))),
]
print(count_combinations(groups), "combinations")

best, report, ranking = search_best(groups, dev)
print("best:", best, f"LAS={report.f1:.2f}")
print(format_ranking(ranking[:5]), end="")

# group sizes of a larger setup only change the count
sizes = (8, 4, 4, 2, 2, 2, 2)
print("seven groups:", count_combinations([ParserGroup(str(i), (dev,) * n) for i, n in enumerate(sizes)]))
