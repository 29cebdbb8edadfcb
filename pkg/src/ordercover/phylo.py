"""Rooted binary trees, triplet consistency, and triplet-cover systems.

Trees are leaf-labelled by 1..n, every internal node has exactly two
children, and child order is kept: a tree carries its planar embedding.
A triplet (a | b, c) asserts that b and c are more closely related to
each other than to a; a tree is consistent with it when the path from
leaf a to the root avoids the path between leaves b and c, equivalently
when the meet of b and c lies strictly below the meet of all three.

``caterpillar_from_ordering`` turns a total order into the caterpillar
whose i-th leaf from the root is the label at position i, with the spine
as the second child so the left-to-right leaf order reads back the
ordering exactly.  A caterpillar built from phi is consistent with
(x1 | x2, x3) precisely when phi puts x1 before both x2 and x3, which
ties triplet covers to pattern-set constructions: ``construct_ept_set``
materialises the caterpillars of a {123, 132} system, and
``nbet_from_trees`` reads the leaf orders of any covering tree set back
into a nonbetweenness system.

Newick text uses integer leaf labels, nested parentheses, and a closing
semicolon, one tree per line; parsing and serialising preserve child
order and never recurse (caterpillars are as deep as n).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .core import (
    Constraint,
    Ordering,
    OrderSystem,
    VerificationReport,
    _finish_report,
)
from .constructions import construct_etp_system

#: The pattern set whose systems map onto triplet covers via caterpillars.
CATERPILLAR_PATTERNS = frozenset({"123", "132"})


@dataclass(frozen=True)
class TreeNode:
    """A rooted binary tree node: a labelled leaf or an ordered pair of
    subtrees.  Structural equality includes child order."""

    label: int | None = None
    children: tuple[TreeNode, ...] = ()

    def __post_init__(self):
        if self.label is None:
            if len(self.children) != 2:
                raise ValueError("internal nodes need exactly two children")
        else:
            if self.children:
                raise ValueError("leaves cannot have children")
            if not isinstance(self.label, int) or self.label < 1:
                raise ValueError(f"leaf label must be a positive integer, got {self.label!r}")

    @property
    def is_leaf(self) -> bool:
        return self.label is not None


def leaf(label: int) -> TreeNode:
    return TreeNode(label=label)


def node(left: TreeNode, right: TreeNode) -> TreeNode:
    return TreeNode(children=(left, right))


@dataclass(frozen=True)
class TreeSet:
    """A finite set of rooted binary trees over a common leaf set 1..n."""

    n: int
    trees: tuple[TreeNode, ...]

    def __post_init__(self):
        for t in self.trees:
            labels = leaf_labels(t)
            if sorted(labels) != list(range(1, self.n + 1)):
                raise ValueError(f"tree leaves {sorted(labels)} are not 1..{self.n}")

    @property
    def size(self) -> int:
        return len(self.trees)


def leaf_labels(root: TreeNode) -> list[int]:
    """Leaf labels in left-to-right embedding order (iterative, deep-safe)."""
    out: list[int] = []
    stack = [root]
    while stack:
        cur = stack.pop()
        if cur.is_leaf:
            out.append(cur.label)
        else:
            stack.extend(reversed(cur.children))
    return out


def leaf_count(root: TreeNode) -> int:
    return len(leaf_labels(root))


def caterpillar_from_ordering(phi: Ordering) -> TreeNode:
    """The caterpillar whose i-th leaf below the root is phi's i-th label.

    The deepest cherry holds the last two labels; each spine node hangs
    its leaf first and the spine second, so the left-to-right leaf order
    equals the tuple form.
    """
    if phi.n < 2:
        raise ValueError("a caterpillar needs at least two leaves")
    labels = phi.tuple_form
    cur = node(leaf(labels[-2]), leaf(labels[-1]))
    for lab in labels[-3::-1]:
        cur = node(leaf(lab), cur)
    return cur


def leaf_order(root: TreeNode) -> Ordering:
    """The total order given by listing leaf labels left to right."""
    return Ordering(tuple(leaf_labels(root)))


def _leaf_paths(root: TreeNode) -> dict[int, tuple[int, ...]]:
    """Label -> path of node ids from the root to that leaf."""
    paths: dict[int, tuple[int, ...]] = {}
    stack: list[tuple[TreeNode, tuple[int, ...]]] = [(root, (id(root),))]
    while stack:
        cur, path = stack.pop()
        if cur.is_leaf:
            if cur.label in paths:
                raise ValueError(f"duplicate leaf label {cur.label}")
            paths[cur.label] = path
        else:
            for ch in cur.children:
                stack.append((ch, path + (id(ch),)))
    return paths


def _common_prefix_len(p: tuple[int, ...], q: tuple[int, ...]) -> int:
    k = 0
    for a, b in zip(p, q):
        if a != b:
            break
        k += 1
    return k


def is_consistent(root: TreeNode, triplet: Constraint) -> bool:
    """Is the tree consistent with (a | b, c)?  True when the meet of b
    and c lies strictly below the meet of a with either of them."""
    a, b, c = triplet
    if a == b or b == c or a == c:
        raise ValueError(f"triplet {triplet} has repeated labels")
    paths = _leaf_paths(root)
    for x in (a, b, c):
        if x not in paths:
            raise ValueError(f"label {x} is not a leaf of the tree")
    depth_bc = _common_prefix_len(paths[b], paths[c])
    depth_ab = _common_prefix_len(paths[a], paths[b])
    return depth_bc > depth_ab


def _lca_depth_matrix(root: TreeNode, n: int) -> np.ndarray:
    """depths[x, y] = depth of the meet of leaves x and y (root depth 0)."""
    depths = np.zeros((n + 1, n + 1), dtype=np.int32)
    # Post-order accumulation of leaf sets, writing cross-child blocks.
    stack: list[tuple[TreeNode, int, bool]] = [(root, 0, False)]
    sets: dict[int, np.ndarray] = {}
    while stack:
        cur, depth, expanded = stack.pop()
        if cur.is_leaf:
            sets[id(cur)] = np.array([cur.label], dtype=np.int64)
            continue
        if not expanded:
            stack.append((cur, depth, True))
            for ch in cur.children:
                stack.append((ch, depth + 1, False))
            continue
        left, right = (sets.pop(id(ch)) for ch in cur.children)
        depths[np.ix_(left, right)] = depth
        depths[np.ix_(right, left)] = depth
        sets[id(cur)] = np.concatenate([left, right])
    return depths


def enumerate_triplets(n: int):
    """All n * C(n-1, 2) triplets (a | b, c) with b < c."""
    for a in range(1, n + 1):
        for b, c in combinations((x for x in range(1, n + 1) if x != a), 2):
            yield (a, b, c)


#: Verification is backed by quadratic meet-depth matrices; the exhaustive
#: grid is cubic in n.  Refuse sizes where that stops being sensible.
MAX_VERIFY_N_SAMPLED = 8192
MAX_VERIFY_N_EXHAUSTIVE = 2048


def verify_ept(
    ts: TreeSet,
    *,
    sample: int | None = None,
    seed: int = 0,
    violation_cap: int | None = 100,
) -> VerificationReport:
    """Check that every triplet (or a seeded sample) is consistent with at
    least one tree; uncovered triplets are reported as (a, b, c), b < c."""
    n = ts.n
    if n < 3:
        raise ValueError(f"triplets need n >= 3, got n = {n}")

    if sample is not None:
        if sample < 1:
            raise ValueError("sample count must be positive")
        if n > MAX_VERIFY_N_SAMPLED:
            raise ValueError(f"sampled tree verification supports n <= {MAX_VERIFY_N_SAMPLED}")
        rng = np.random.default_rng(seed)
        draws = rng.integers(1, n + 1, size=(sample, 3), dtype=np.int64)
        while True:
            bad = (
                (draws[:, 0] == draws[:, 1])
                | (draws[:, 1] == draws[:, 2])
                | (draws[:, 0] == draws[:, 2])
            )
            k = int(bad.sum())
            if not k:
                break
            draws[bad] = rng.integers(1, n + 1, size=(k, 3), dtype=np.int64)
        a, b, c = draws[:, 0], draws[:, 1], draws[:, 2]
        covered = np.zeros(sample, dtype=bool)
        for t in ts.trees:  # one quadratic matrix alive at a time
            m = _lca_depth_matrix(t, n)
            covered |= m[b, c] > m[a, b]
        bad_rows = draws[~covered]
        bad_rows[:, 1:] = np.sort(bad_rows[:, 1:], axis=1)
        violations = sorted({tuple(int(v) for v in row) for row in bad_rows})
        return _finish_report("sampled", "triplets", sample, violations, violation_cap, seed)

    if n > MAX_VERIFY_N_EXHAUSTIVE:
        raise ValueError(
            f"exhaustive tree verification supports n <= {MAX_VERIFY_N_EXHAUSTIVE}; use sampling"
        )
    mats = [_lca_depth_matrix(t, n)[1:, 1:] for t in ts.trees]
    labels = np.arange(n)
    checked = 0
    violations = []
    block = max(1, (1 << 24) // max(n * n, 1))
    for lo in range(0, n, block):
        hi = min(lo + block, n)
        a_idx = labels[lo:hi, None, None]
        b_idx = labels[None, :, None]
        c_idx = labels[None, None, :]
        covered = np.zeros((hi - lo, n, n), dtype=bool)
        for mm in mats:
            # Axes (a, b, c); consistency is depth(meet(b,c)) > depth(meet(a,b)).
            covered |= mm[None, :, :] > mm[lo:hi, :, None]
        valid = (a_idx != b_idx) & (a_idx != c_idx) & (b_idx < c_idx)
        checked += int(valid.sum())
        for a, b, c in np.argwhere(valid & ~covered):
            violations.append((int(a) + lo + 1, int(b) + 1, int(c) + 1))
    violations.sort()
    return _finish_report("exhaustive", "triplets", checked, violations, violation_cap, None)


def construct_ept_set(n: int) -> TreeSet:
    """Caterpillars of a {123, 132} pattern system: a triplet cover of
    size at most twice the minimum nonbetweenness size."""
    system = construct_etp_system(n, CATERPILLAR_PATTERNS)
    return TreeSet(n, tuple(caterpillar_from_ordering(phi) for phi in system.orderings))


def nbet_from_trees(ts: TreeSet) -> OrderSystem:
    """Leaf orders of the stored embeddings; a triplet cover yields a
    system nonbetween-satisfying every constraint."""
    tuples = dict.fromkeys(tuple(leaf_labels(t)) for t in ts.trees)
    return OrderSystem.from_tuples(ts.n, tuples)


# ---------------------------------------------------------------------------
# Newick I/O
# ---------------------------------------------------------------------------


class NewickParseError(ValueError):
    """Malformed Newick text; the message names the offending position."""


def newick_serialize(root: TreeNode) -> str:
    """Nested-parenthesis form with integer leaf labels, child order kept."""
    out: list[str] = []
    stack: list[object] = [root]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
        elif item.is_leaf:
            out.append(str(item.label))
        else:
            left, right = item.children
            stack.extend([")", right, ",", left, "("])
    return "".join(out) + ";"


def newick_parse(text: str) -> TreeNode:
    """Parse a single semicolon-terminated Newick tree.

    Only binary internal nodes and positive-integer leaf labels are
    accepted; labels must be exactly 1..n.  Errors name the 0-based
    character position.
    """
    pos = 0
    length = len(text)

    def skip_ws():
        nonlocal pos
        while pos < length and text[pos].isspace():
            pos += 1

    def fail(msg: str):
        raise NewickParseError(f"{msg} at position {pos}")

    # Shift-reduce over an explicit stack; stack holds TreeNodes and '(' / ','.
    stack: list[object] = []
    seen: dict[int, int] = {}
    skip_ws()
    while True:
        if pos >= length:
            fail("unexpected end of input")
        ch = text[pos]
        if ch == "(" or ch.isdigit():
            if stack and not isinstance(stack[-1], str):
                fail("expected ',' or ')' after a subtree")
        if ch == "(":
            stack.append("(")
            pos += 1
        elif ch.isdigit():
            start = pos
            while pos < length and text[pos].isdigit():
                pos += 1
            label = int(text[start:pos])
            if label < 1:
                pos = start
                fail(f"leaf label {label} is not a positive integer")
            if label in seen:
                pos = start
                fail(f"duplicate leaf label {label} (first seen at position {seen[label]})")
            seen[label] = start
            stack.append(leaf(label))
        elif ch == ",":
            if not stack or isinstance(stack[-1], str):
                fail("',' without a left subtree")
            stack.append(",")
            pos += 1
            skip_ws()
            continue
        elif ch == ")":
            if (
                len(stack) < 4
                or isinstance(stack[-1], str)
                or stack[-2] != ","
                or isinstance(stack[-3], str)
                or stack[-4] != "("
            ):
                fail("')' does not close a binary '(left,right' group")
            right = stack.pop()
            stack.pop()
            left = stack.pop()
            stack.pop()
            stack.append(node(left, right))
            pos += 1
        else:
            fail(f"unexpected character {ch!r}")
        skip_ws()
        # After a completed subtree, expect ',', ')' or the final ';'.
        if pos < length and text[pos] == ";" and not isinstance(stack[-1], str):
            if len(stack) != 1:
                fail("';' before all groups were closed")
            pos += 1
            skip_ws()
            if pos != length:
                fail("trailing text after ';'")
            break
    root = stack[0]
    if isinstance(root, str):
        raise NewickParseError("empty input")
    labels = sorted(leaf_labels(root))
    missing = sorted(set(range(1, len(labels) + 1)) - set(labels))
    if missing:
        raise NewickParseError(
            f"leaf labels must be exactly 1..{len(labels)}; missing {missing}"
        )
    return root


def serialize_tree_set(ts: TreeSet) -> str:
    """One Newick line per tree."""
    return "".join(newick_serialize(t) + "\n" for t in ts.trees)


def parse_tree_set(text: str) -> TreeSet:
    """Parse one Newick tree per non-blank line into a common-n tree set."""
    trees = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            trees.append(newick_parse(line))
        except NewickParseError as exc:
            raise NewickParseError(f"line {lineno}: {exc}") from None
    if not trees:
        raise NewickParseError("no trees found")
    n = leaf_count(trees[0])
    for lineno, t in enumerate(trees, start=1):
        if leaf_count(t) != n:
            raise NewickParseError(
                f"tree {lineno} has {leaf_count(t)} leaves, expected {n}"
            )
    return TreeSet(n, tuple(trees))
