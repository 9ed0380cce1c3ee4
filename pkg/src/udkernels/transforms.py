"""Tree transforms feeding the kernel engine.

Dependency trees become lexical-centered trees (LCT) where every token
contributes a lexical node plus two syntactic children (dependency
relation, then POS) followed by the subtrees of its dependents in
surface order. Constituency trees are parsed from bracketed text and
can be reduced to the smallest subtree enclosing two entity spans.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .conllu import DepTree, Token
from .errors import BracketError

LEXICAL = "lexical"
SYNTACTIC = "syntactic"


@dataclass(frozen=True)
class LabeledTree:
    """Ordered labeled tree consumed by the kernels."""

    label: str
    kind: str = SYNTACTIC
    children: tuple = ()
    pos_tag: str | None = None

    def is_leaf(self) -> bool:
        return not self.children

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def iter_nodes(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(node.children)


def syn(label: str, *children) -> LabeledTree:
    return LabeledTree(label=label, kind=SYNTACTIC, children=tuple(children))


def lex(label: str, pos: str, *children) -> LabeledTree:
    return LabeledTree(label=label, kind=LEXICAL, children=tuple(children), pos_tag=pos)


def _lct_word(token: Token, lowercase: bool) -> str:
    word = token.lemma if token.lemma not in (None, "", "_") else token.form
    return word.lower() if lowercase else word


def to_lct(tree: DepTree, lowercase: bool = True) -> LabeledTree:
    """Lexical-centered tree of a dependency sentence.

    Every token yields exactly three nodes, so the result has 3 * len(tree)
    nodes in total. Punctuation is kept; filtering is a feature-layer
    concern.
    """

    def build(node_id: int) -> LabeledTree:
        token = tree.token(node_id)
        kids = [syn(token.deprel), syn(token.upos)]
        kids.extend(build(c) for c in tree.children(node_id))
        return lex(_lct_word(token, lowercase), token.upos, *kids)

    return build(tree.root_id)


def dependents(tree: DepTree, node_id: int) -> tuple:
    """Direct dependents of a token, in surface order."""
    return tree.children(node_id)


def shortest_path(tree: DepTree, e1: int, e2: int) -> tuple:
    """Interior token ids on the undirected head-path from e1 to e2.

    Endpoints are excluded; ids are ordered from the e1 side to the e2
    side. Adjacent tokens (direct head relation) yield ().
    """
    if e1 == e2:
        raise ValueError(f"{tree.sent_id}: path endpoints must differ, got {e1}")
    ids = {t.id for t in tree.tokens}

    def chain(node: int) -> list:
        out = [node]
        seen = {node}
        while True:
            head = tree.token(node).head
            if head == 0 or head not in ids or head in seen:
                return out
            out.append(head)
            seen.add(head)
            node = head

    up1 = chain(e1)
    up2 = chain(e2)
    on2 = {n: i for i, n in enumerate(up2)}
    for i, node in enumerate(up1):
        if node in on2:
            full = up1[: i + 1] + up2[: on2[node]][::-1]
            return tuple(full[1:-1])
    raise ValueError(f"{tree.sent_id}: no path between {e1} and {e2}")


@dataclass(frozen=True)
class MweConfig:
    """Which dependency relations glue tokens into one multiword unit."""

    relations: frozenset = frozenset({"fixed"})
    scope: str = "sdp_and_dependents"  # or "whole_tree"

    def __post_init__(self):
        if not self.relations:
            raise ValueError("MweConfig.relations must not be empty")
        if self.scope not in ("sdp_and_dependents", "whole_tree"):
            raise ValueError(f"unknown scope {self.scope!r}")
        object.__setattr__(self, "relations", frozenset(self.relations))


def collapse_mwe(tree: DepTree, cfg: MweConfig, targets) -> tuple:
    """Merge multiword expressions under the target tokens.

    A target that has a child attached by one of cfg.relations absorbs
    that child and, transitively, the child's own such children. The
    merged token keeps the head, deprel, and UPOS of the chain's top
    node; form and lemma are the surface-ordered members joined by
    single spaces. Returns the rebuilt tree and an old-id -> new-id map
    covering every original token.
    """
    targets = set(targets)
    for t in targets:
        tree.token(t)
    absorbed: dict = {}  # member id -> chain top id
    groups: dict = {}  # chain top id -> sorted member ids
    for top in sorted(targets):
        if top in absorbed:
            continue
        members = [top]
        queue = [top]
        while queue:
            node = queue.pop()
            for child in tree.children(node):
                if tree.token(child).deprel in cfg.relations and child not in members:
                    members.append(child)
                    queue.append(child)
        if len(members) > 1:
            groups[top] = sorted(members)
            for m in members:
                absorbed[m] = top
    if not groups:
        return tree, {t.id: t.id for t in tree.tokens}

    member_of = {m: top for top, ms in groups.items() for m in ms}
    # each surviving slot is keyed by the smallest old id it represents
    slots = []
    for tok in tree.tokens:
        if tok.id in member_of:
            top = member_of[tok.id]
            if tok.id == min(groups[top]):
                slots.append(top)
        else:
            slots.append(tok.id)
    new_id = {}
    for pos, rep in enumerate(slots, start=1):
        if rep in groups:
            for m in groups[rep]:
                new_id[m] = pos
        else:
            new_id[rep] = pos

    new_tokens = []
    for pos, rep in enumerate(slots, start=1):
        src = tree.token(rep)
        if rep in groups:
            members = [tree.token(m) for m in groups[rep]]
            form = " ".join(m.form for m in members)
            lemma = " ".join(
                m.lemma if m.lemma not in (None, "", "_") else m.form for m in members
            )
        else:
            form, lemma = src.form, src.lemma
        head = 0 if src.head == 0 else new_id[src.head]
        new_tokens.append(
            Token(
                id=pos,
                form=form,
                lemma=lemma,
                upos=src.upos,
                xpos=src.xpos,
                feats=dict(src.feats),
                head=head,
                deprel=src.deprel,
                misc=dict(src.misc),
            )
        )
    collapsed = DepTree(
        sent_id=tree.sent_id,
        tokens=tuple(new_tokens),
        text=tree.text,
        metadata=dict(tree.metadata),
    )
    return collapsed, new_id


@dataclass(frozen=True)
class ConstTree:
    """Constituency node; leaves carry token text and a 1-based span."""

    label: str
    children: tuple = ()
    span: tuple = (0, 0)

    def is_leaf(self) -> bool:
        return not self.children

    def leaves(self) -> list:
        if self.is_leaf():
            return [self]
        out = []
        for c in self.children:
            out.extend(c.leaves())
        return out


_SPECIALS = set("()^\\ \t")


def _escape(atom: str) -> str:
    return "".join("\\" + ch if ch in _SPECIALS else ch for ch in atom)


def _tokenize_sexpr(line: str, where: str):
    tokens = []
    buf = []
    start = 0
    i = 0
    while i < len(line):
        ch = line[i]
        if ch == "\\":
            if i + 1 >= len(line):
                raise BracketError(f"{where}, offset {i}: dangling escape")
            if not buf:
                start = i
            buf.append(line[i + 1])
            i += 2
            continue
        if ch in "()" or ch.isspace():
            if buf:
                tokens.append(("atom", "".join(buf), start))
                buf = []
            if ch == "(":
                tokens.append(("open", ch, i))
            elif ch == ")":
                tokens.append(("close", ch, i))
            i += 1
            continue
        if not buf:
            start = i
        buf.append(ch)
        i += 1
    if buf:
        tokens.append(("atom", "".join(buf), start))
    return tokens


def _parse_const_line(line: str, where: str) -> ConstTree:
    tokens = _tokenize_sexpr(line, where)
    if not tokens:
        raise BracketError(f"{where}: empty tree")
    pos = 0
    leaf_counter = [0]

    def parse() -> ConstTree:
        nonlocal pos
        kind, value, off = tokens[pos]
        if kind == "atom":
            pos += 1
            leaf_counter[0] += 1
            n = leaf_counter[0]
            return ConstTree(label=value, span=(n, n))
        if kind != "open":
            raise BracketError(f"{where}, offset {off}: unexpected ')'")
        pos += 1
        if pos >= len(tokens) or tokens[pos][0] != "atom":
            raise BracketError(f"{where}, offset {off}: missing node label")
        label = tokens[pos][1]
        pos += 1
        children = []
        while pos < len(tokens) and tokens[pos][0] != "close":
            children.append(parse())
        if pos >= len(tokens):
            raise BracketError(f"{where}, offset {off}: unbalanced parentheses")
        pos += 1  # the close
        if not children:
            leaf_counter[0] += 1
            n = leaf_counter[0]
            return ConstTree(label=label, span=(n, n))
        span = (children[0].span[0], children[-1].span[1])
        return ConstTree(label=label, children=tuple(children), span=span)

    tree = parse()
    if pos != len(tokens):
        kind, _, off = tokens[pos]
        raise BracketError(f"{where}, offset {off}: trailing content after tree")
    return tree


def parse_bracketed(text: str, source: str = "<string>") -> list:
    """Parse one bracketed constituency tree per nonempty line."""
    trees = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        trees.append(_parse_const_line(line, f"{source}:line {lineno}"))
    return trees


def const_to_bracketed(tree: ConstTree) -> str:
    if tree.is_leaf():
        return _escape(tree.label)
    inner = " ".join(const_to_bracketed(c) for c in tree.children)
    return f"({_escape(tree.label)} {inner})"


def extract_pet(tree: ConstTree, span1: tuple, span2: tuple) -> ConstTree:
    """Smallest subtree covering both spans, outside branches pruned.

    Spans are 1-based inclusive token ranges. Every subtree lying fully
    outside [min(starts), max(ends)] is dropped at any depth; the result
    keeps original span annotations.
    """
    for span in (span1, span2):
        if span[0] > span[1]:
            raise ValueError(f"bad span {span}")
        if span[0] < tree.span[0] or span[1] > tree.span[1]:
            raise ValueError(f"span {span} outside sentence span {tree.span}")
    if not (span1[1] < span2[0] or span2[1] < span1[0]):
        raise ValueError(f"entity spans {span1} and {span2} overlap")
    lo = min(span1[0], span2[0])
    hi = max(span1[1], span2[1])

    node = tree
    while True:
        inner = [c for c in node.children if c.span[0] <= lo and hi <= c.span[1]]
        if not inner:
            break
        node = inner[0]

    def prune(n: ConstTree) -> ConstTree:
        if n.is_leaf():
            return n
        kept = [prune(c) for c in n.children if not (c.span[1] < lo or c.span[0] > hi)]
        return replace(n, children=tuple(kept))

    return prune(node)


def const_to_labeled(tree: ConstTree, pos: str | None = None) -> LabeledTree:
    """Constituency tree as a LabeledTree; leaves become lexical nodes."""
    if tree.is_leaf():
        return LabeledTree(label=tree.label, kind=LEXICAL, pos_tag=pos or "X")
    kids = tuple(const_to_labeled(c, pos=tree.label) for c in tree.children)
    return LabeledTree(label=tree.label, kind=SYNTACTIC, children=kids)


def labeled_to_sexpr(tree: LabeledTree, annotate: bool = True) -> str:
    """Bracketed form of a LabeledTree.

    With annotate, lexical nodes render as label^POS so the expression
    parses back to an equal tree; without it the output is the plain
    inspection form.
    """
    atom = _escape(tree.label)
    if annotate and tree.kind == LEXICAL:
        atom += "^" + _escape(tree.pos_tag or "X")
    if not tree.children:
        return f"({atom})"
    inner = " ".join(labeled_to_sexpr(c, annotate) for c in tree.children)
    return f"({atom} {inner})"


def labeled_from_sexpr(text: str) -> LabeledTree:
    tokens = _tokenize_sexpr(text, "<sexpr>")
    if not tokens:
        raise BracketError("<sexpr>: empty expression")
    pos = 0

    def split_atom(raw_slice: str):
        # re-scan the raw text to tell an escaped caret from a separator
        parts = []
        buf = []
        i = 0
        while i < len(raw_slice):
            ch = raw_slice[i]
            if ch == "\\" and i + 1 < len(raw_slice):
                buf.append(raw_slice[i + 1])
                i += 2
                continue
            if ch == "^":
                parts.append("".join(buf))
                buf = []
                i += 1
                continue
            buf.append(ch)
            i += 1
        parts.append("".join(buf))
        return parts

    def parse() -> LabeledTree:
        nonlocal pos
        kind, value, off = tokens[pos]
        if kind != "open":
            raise BracketError(f"<sexpr>, offset {off}: expected '('")
        pos += 1
        if pos >= len(tokens) or tokens[pos][0] != "atom":
            raise BracketError(f"<sexpr>, offset {off}: missing node label")
        _, _, atom_off = tokens[pos]
        raw = _raw_atom(text, atom_off)
        parts = split_atom(raw)
        pos += 1
        children = []
        while pos < len(tokens) and tokens[pos][0] != "close":
            children.append(parse())
        if pos >= len(tokens):
            raise BracketError(f"<sexpr>, offset {off}: unbalanced parentheses")
        pos += 1
        if len(parts) == 2:
            return LabeledTree(
                label=parts[0], kind=LEXICAL, children=tuple(children), pos_tag=parts[1]
            )
        return LabeledTree(label=parts[0], kind=SYNTACTIC, children=tuple(children))

    tree = parse()
    if pos != len(tokens):
        raise BracketError("<sexpr>: trailing content after tree")
    return tree


def _raw_atom(text: str, start: int) -> str:
    out = []
    i = start
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            out.append(ch)
            out.append(text[i + 1])
            i += 2
            continue
        if ch in "()" or ch.isspace():
            break
        out.append(ch)
        i += 1
    return "".join(out)
