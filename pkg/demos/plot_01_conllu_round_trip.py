"""
Reading and writing CoNLL-U
===========================

Parse a small treebank, look at one sentence, check it is a tree and write
it back unchanged.
"""

from pathlib import Path

from udblend.conllu import parse_conllu, serialize_conllu, validate_tree

DATA = Path(__file__).resolve().parents[1] / "tests" / "data" / "corpus.conllu"
text = DATA.read_text(encoding="utf-8")
tb = parse_conllu(text)
print(len(tb), "sentences,", tb.n_tokens, "tokens")

# sentences are indexed from 0, tokens by their CoNLL-U id
s = tb[5]
print(s.sent_id, [t.form for t in s])
print("multiword lines:", [m.line.split("\t")[1] for m in s.multiword])
print("enhanced heads of 'kupił':", sorted(s[6].enhanced))

# every sentence passes tree validation
print("violations:", sum(len(validate_tree(x)) for x in tb))

# serialization is canonical, so a canonical file comes back byte for byte
assert serialize_conllu(tb) == text
print("round trip ok")
