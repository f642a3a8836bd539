"""Reading, validating and writing CoNLL-U treebanks.

Tokens keep every column of their source line so that an already canonical
file survives a parse/serialize cycle byte for byte.  Multiword-token range
lines and sentence comments are carried along verbatim and never interpreted.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

ROOT_DEPREL = "root"
DEFAULT_SEM_KEY = "SemLabel"


class ConlluError(ValueError):
    """Malformed CoNLL-U input."""


class TreeValidationError(ConlluError):
    """A sentence is not a well-formed dependency tree."""

    def __init__(self, sent_id: str, violations: Sequence["Violation"]):
        self.sent_id = sent_id
        self.violations = list(violations)
        kinds = ", ".join(sorted({v.kind for v in violations}))
        super().__init__(f"sentence {sent_id!r} is not a valid tree: {kinds}")


class AlignmentError(ValueError):
    """Treebanks that should describe the same tokens do not line up."""


class InvariantError(RuntimeError):
    """Internal data violates a Token/Sentence invariant."""


@dataclass(frozen=True)
class Token:
    id: int
    form: str
    lemma: str = "_"
    upos: str = "_"
    xpos: str = "_"
    feats: tuple[str, ...] = ()
    head: int = 0
    deprel: str = "_"
    enhanced: frozenset[tuple[int, str]] = frozenset()
    misc: str = "_"
    # raw value of an optional 11th column; None when the line had 10 columns
    sem: str | None = None

    def __post_init__(self):
        if self.id < 1:
            raise InvariantError(f"token id must be >= 1, got {self.id}")
        if self.head < 0:
            raise InvariantError(f"token {self.id}: negative head {self.head}")
        if self.head == self.id:
            raise InvariantError(f"token {self.id} is its own head")
        if not isinstance(self.enhanced, frozenset):
            object.__setattr__(self, "enhanced", frozenset(self.enhanced))
        for h, _ in self.enhanced:
            if h == self.id:
                raise InvariantError(f"token {self.id} has an enhanced self-loop")
            if h < 0:
                raise InvariantError(f"token {self.id}: negative enhanced head {h}")

    @property
    def sem_label(self) -> str | None:
        return sem_label(self)

    @property
    def feats_string(self) -> str:
        return "|".join(self.feats) if self.feats else "_"

    @property
    def basic_arc(self) -> tuple[int, str]:
        return (self.head, self.deprel)


def sem_label(token: Token, misc_key: str = DEFAULT_SEM_KEY) -> str | None:
    """Semantic label of ``token``: the 11th column if present, else a MISC key."""
    if token.sem is not None:
        return None if token.sem == "_" else token.sem
    if token.misc == "_":
        return None
    for item in token.misc.split("|"):
        key, sep, value = item.partition("=")
        if sep and key == misc_key:
            return value
    return None


class MultiwordLine(NamedTuple):
    start: int
    end: int
    line: str


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    comments: tuple[str, ...] = ()
    multiword: tuple[MultiwordLine, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "comments", tuple(self.comments))
        object.__setattr__(self, "multiword", tuple(self.multiword))
        for i, tok in enumerate(self.tokens, 1):
            if tok.id != i:
                raise InvariantError(f"token ids must be 1..n in order; position {i} has id {tok.id}")

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def __getitem__(self, token_id: int) -> Token:
        """Token by its 1-based id."""
        if token_id < 1:
            raise IndexError(token_id)
        return self.tokens[token_id - 1]

    @property
    def sent_id(self) -> str:
        for c in self.comments:
            body = c[1:].strip()
            if body.startswith("sent_id"):
                key, sep, value = body.partition("=")
                if sep and key.strip() == "sent_id":
                    return value.strip()
        return ""

    @property
    def heads(self) -> list[int]:
        return [t.head for t in self.tokens]

    def children(self, token_id: int) -> list[Token]:
        return [t for t in self.tokens if t.head == token_id]


@dataclass(frozen=True)
class Treebank:
    sentences: tuple[Sentence, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self) -> Iterator[Sentence]:
        return iter(self.sentences)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Treebank(self.sentences[i])
        return self.sentences[i]

    @property
    def n_tokens(self) -> int:
        return sum(len(s) for s in self.sentences)


# -- parsing -----------------------------------------------------------------


def _int(value: str, what: str, where: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConlluError(f"{where}: non-integer {what} {value!r}") from None


def parse_deps(cell: str, where: str = "DEPS") -> frozenset[tuple[int, str]]:
    """Parse a DEPS cell (``_`` or ``h:label|h:label``) into (head, label) pairs."""
    if cell == "_":
        return frozenset()
    pairs = []
    for item in cell.split("|"):
        head, sep, label = item.partition(":")
        if not sep or not label:
            raise ConlluError(f"{where}: malformed DEPS item {item!r}")
        if "." in head:
            raise ConlluError(f"{where}: empty-node head {head!r} in DEPS is not supported")
        pairs.append((_int(head, "DEPS head", where), label))
    if len(set(pairs)) != len(pairs):
        raise ConlluError(f"{where}: duplicate DEPS item in {cell!r}")
    return frozenset(pairs)


def format_deps(enhanced: Iterable[tuple[int, str]]) -> str:
    arcs = sorted(enhanced)
    if not arcs:
        return "_"
    return "|".join(f"{h}:{label}" for h, label in arcs)


def _parse_block(lines: list[tuple[int, str]], index: int) -> Sentence:
    comments: list[str] = []
    tokens: list[Token] = []
    multiword: list[MultiwordLine] = []

    for lineno, line in lines:
        where = f"sentence {index + 1}, line {lineno}"
        if line.startswith("#"):
            if tokens or multiword:
                raise ConlluError(f"{where}: comment line after token lines")
            comments.append(line)
            continue
        cols = line.split("\t")
        if len(cols) not in (10, 11):
            raise ConlluError(f"{where}: expected 10 tab-separated columns, found {len(cols)}")
        tid = cols[0]
        if "." in tid:
            raise ConlluError(f"{where}: empty nodes ({tid}) are not supported")
        if "-" in tid:
            a, _, b = tid.partition("-")
            start, end = _int(a, "range start", where), _int(b, "range end", where)
            if start != len(tokens) + 1 or end < start:
                raise ConlluError(f"{where}: misplaced multiword range {tid}")
            multiword.append(MultiwordLine(start, end, line))
            continue
        token_id = _int(tid, "id", where)
        if token_id != len(tokens) + 1:
            if any(t.id == token_id for t in tokens):
                raise ConlluError(f"{where}: duplicate token id {token_id}")
            raise ConlluError(f"{where}: expected token id {len(tokens) + 1}, found {token_id}")
        head = _int(cols[6], "head", where)
        if head < 0:
            raise ConlluError(f"{where}: negative head {head}")
        if head == token_id:
            raise ConlluError(f"{where}: token {token_id} is its own head")
        enhanced = parse_deps(cols[8], where)
        if any(h == token_id for h, _ in enhanced):
            raise ConlluError(f"{where}: enhanced self-loop on token {token_id}")
        tokens.append(
            Token(
                id=token_id,
                form=cols[1],
                lemma=cols[2],
                upos=cols[3],
                xpos=cols[4],
                feats=() if cols[5] == "_" else tuple(cols[5].split("|")),
                head=head,
                deprel=cols[7],
                enhanced=enhanced,
                misc=cols[9],
                sem=cols[10] if len(cols) == 11 else None,
            )
        )

    if not tokens:
        raise ConlluError(f"sentence {index + 1}: block has no token lines")
    n = len(tokens)
    for mwt in multiword:
        if mwt.end > n:
            raise ConlluError(f"sentence {index + 1}: multiword range {mwt.start}-{mwt.end} exceeds {n} tokens")
    first_line = lines[0][0]
    for tok in tokens:
        if tok.head > n:
            raise ConlluError(
                f"sentence {index + 1} (from line {first_line}): head {tok.head} of token {tok.id} out of range 0..{n}"
            )
        for h, _ in tok.enhanced:
            if h > n:
                raise ConlluError(
                    f"sentence {index + 1} (from line {first_line}): enhanced head {h} of token {tok.id} out of range"
                )
    return Sentence(tuple(tokens), tuple(comments), tuple(multiword))


def _blocks(text: str) -> Iterator[list[tuple[int, str]]]:
    block: list[tuple[int, str]] = []
    for lineno, line in enumerate(text.split("\n"), 1):
        line = line.rstrip("\r")
        if line.strip():
            block.append((lineno, line))
        elif block:
            yield block
            block = []
    if block:
        yield block


def parse_conllu(text: str, require_tree: bool = False) -> Treebank:
    """Parse CoNLL-U text into a :class:`Treebank`.

    With ``require_tree`` every sentence must also pass :func:`validate_tree`,
    otherwise :class:`TreeValidationError` is raised.
    """
    sentences = [_parse_block(block, i) for i, block in enumerate(_blocks(text))]
    seen: set[str] = set()
    for i, s in enumerate(sentences):
        sid = s.sent_id
        if sid and sid in seen:
            warnings.warn(f"duplicate sent_id {sid!r} (sentence {i + 1})", stacklevel=2)
        seen.add(sid)
        if require_tree:
            violations = validate_tree(s)
            if violations:
                raise TreeValidationError(sid or f"#{i + 1}", violations)
    return Treebank(tuple(sentences))


def read_conllu(path, require_tree: bool = False) -> Treebank:
    with open(path, encoding="utf-8", newline="") as f:
        return parse_conllu(f.read(), require_tree=require_tree)


# -- serialization -----------------------------------------------------------


def token_line(tok: Token) -> str:
    cols = [
        str(tok.id),
        tok.form,
        tok.lemma,
        tok.upos,
        tok.xpos,
        tok.feats_string,
        str(tok.head),
        tok.deprel,
        format_deps(tok.enhanced),
        tok.misc,
    ]
    if tok.sem is not None:
        cols.append(tok.sem)
    return "\t".join(cols)


def serialize_sentence(s: Sentence) -> str:
    n = len(s)
    lines = list(s.comments)
    mwt_at = {m.start: m for m in s.multiword}
    for tok in s.tokens:
        if tok.head > n or any(h > n for h, _ in tok.enhanced):
            raise InvariantError(f"sentence {s.sent_id!r}: token {tok.id} has a head outside 0..{n}")
        if tok.id in mwt_at:
            lines.append(mwt_at[tok.id].line)
        lines.append(token_line(tok))
    return "\n".join(lines) + "\n\n"


def serialize_conllu(tb: Treebank | Iterable[Sentence]) -> str:
    """Canonical CoNLL-U text; every sentence is terminated by one blank line."""
    return "".join(serialize_sentence(s) for s in tb)


def write_conllu(tb: Treebank, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(serialize_conllu(tb))


# -- tree validation ---------------------------------------------------------


class Violation(NamedTuple):
    kind: str  # head-out-of-range | cycle | multiple-roots | root-deprel | unreachable
    token: int | None
    detail: str


def validate_tree(s: Sentence) -> list[Violation]:
    """Report every way in which the basic HEAD/DEPREL columns fail to form a tree."""
    n = len(s)
    heads = [0] + s.heads
    violations: list[Violation] = []

    bad = {t.id for t in s if not 0 <= t.head <= n}
    for t in s:
        if t.id in bad:
            violations.append(Violation("head-out-of-range", t.id, f"head {t.head} not in 0..{n}"))

    roots = [t.id for t in s if t.head == 0]
    if len(roots) > 1:
        violations.append(Violation("multiple-roots", roots[1], f"tokens {roots} all attach to 0"))

    for t in s:
        if t.deprel == ROOT_DEPREL and t.head != 0:
            violations.append(Violation("root-deprel", t.id, f"deprel root with head {t.head}"))

    # 0 = unvisited, 1 = on current path, 2 = done
    state = [0] * (n + 1)
    state[0] = 2
    for start in range(1, n + 1):
        path = []
        node = start
        while state[node] == 0:
            state[node] = 1
            path.append(node)
            if node in bad:
                break
            node = heads[node]
        if node not in bad and state[node] == 1:
            cycle = path[path.index(node):]
            violations.append(Violation("cycle", min(cycle), f"cycle through tokens {sorted(cycle)}"))
        for p in path:
            state[p] = 2

    children: dict[int, list[int]] = {}
    for t in s:
        if t.id not in bad:
            children.setdefault(t.head, []).append(t.id)
    reached = {0}
    stack = [0]
    while stack:
        for c in children.get(stack.pop(), ()):
            if c not in reached:
                reached.add(c)
                stack.append(c)
    for t in s:
        if t.id not in reached:
            violations.append(Violation("unreachable", t.id, "not reachable from the root"))
    return violations


# -- jackknifing -------------------------------------------------------------


def split_folds(tb: Treebank, k: int) -> list[tuple[Treebank, Treebank]]:
    """Contiguous k-fold split; the first ``len(tb) % k`` folds get one extra sentence."""
    n = len(tb)
    if k < 2 or k > n:
        raise ValueError(f"k must be in 2..{n}, got {k}")
    base, extra = divmod(n, k)
    bounds = [0]
    for i in range(k):
        bounds.append(bounds[-1] + base + (1 if i < extra else 0))
    sents = tb.sentences
    return [
        (Treebank(sents[: bounds[i]] + sents[bounds[i + 1]:]), Treebank(sents[bounds[i]: bounds[i + 1]]))
        for i in range(k)
    ]
