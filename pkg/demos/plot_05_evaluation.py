"""
Scoring a system
================

The evaluator reports the shared-task metrics.  Two conventions are
available: the CoNLL 2018 scorer (subtypes stripped, universal features only)
and the Polish enhanced-dependency variant (full labels, token-level ELAS).
"""

from pathlib import Path

from udblend.conllu import read_conllu
from udblend.evaluate import CONLL18, POLEVAL2018, evaluate, format_reports
from udblend.synthetic import noisy_treebank

DATA = Path(__file__).resolve().parents[1] / "tests" / "data" / "corpus.conllu"
gold = read_conllu(DATA)
system = noisy_treebank(gold, seed=4, p_head=0.1, p_label=0.1)

print(format_reports(evaluate(gold, system, conventions=CONLL18)), end="")
print()
print(format_reports(evaluate(gold, system, ["las", "elas", "slas"], POLEVAL2018)), end="")
