"""Tuple-selection strategies.

Every strategy is an immutable object with a ``name`` and a ``selector(params)``
method returning a fresh per-run callable ``select(vertex, chips) -> k chips``.
Selectors work on chip *ranks* within the vertex's current ascending chip set,
so a strategy behaves identically whatever labels reach a subtree.
"""
from __future__ import annotations

import random
from collections import defaultdict, deque
from pathlib import Path
from typing import NamedTuple, Optional, Sequence

from .errors import ChipFireError, IllegalFiringError
from .tree import (
    FiringPlan,
    Selector,
    Strategy,
    TreeParams,
    initial_configuration,
    layer_start,
    position_in_layer,
    stabilize_with_plan,
)

RANDOM_GENERATOR = "mt19937/v1"

__all__ = [
    "FiringPlan",
    "Strategy",
    "identity_strategy",
    "unbundle_strategy",
    "compose",
    "pattern_embedding_strategy",
    "random_strategy",
    "target_strategy",
    "run_strategy",
    "parse_strategy",
    "parse_compose_spec",
]


def _grouped_pick(chips: tuple, k: int, group: int) -> tuple:
    # Chips split into consecutive rank-groups of ``group``; the lowest group may
    # already be partially fired.  Within it, child c receives the c-th
    # consecutive sub-block, which is what repeatedly firing ranks
    # {0, m, 2m, ...} of the shrinking group achieves.
    size = len(chips) % group or group
    m = size // k
    return tuple(chips[i * m] for i in range(k))


class GroupedBundle:
    """Split each vertex's chips into rank-groups and bundle inside each group.

    ``group_size(layer, params)`` gives the group length at a layer.  With the
    whole vertex as one group this is identity bundling; with groups of size k
    it is unbundling.
    """

    def __init__(self, name: str, group_size):
        self.name = name
        self._group_size = group_size

    def selector(self, params: TreeParams) -> Selector:
        k = params.k
        sizes = {t: self._group_size(t, params) for t in range(1, params.ell + 1)}

        def select(v: int, chips: tuple) -> tuple:
            t, _ = position_in_layer(v, k)
            return _grouped_pick(chips, k, sizes[t])

        return select

    def __repr__(self):
        return f"<Strategy {self.name}>"


def identity_strategy() -> GroupedBundle:
    """Bundle everywhere; the stable permutation is the identity."""
    return GroupedBundle("identity", lambda t, p: p.k ** (p.ell - t + 1))


def unbundle_strategy() -> GroupedBundle:
    """Fire consecutive rank-blocks of k; the stable permutation is Z_k(ell)."""
    return GroupedBundle("unbundle", lambda t, p: p.k)


class RandomStrategy:
    def __init__(self, seed: int):
        self.seed = int(seed)
        self.name = f"random:{self.seed}"

    def selector(self, params: TreeParams) -> Selector:
        rng = random.Random(self.seed)
        k = params.k

        def select(v: int, chips: tuple) -> tuple:
            idx = sorted(rng.sample(range(len(chips)), k))
            return tuple(chips[i] for i in idx)

        return select

    def __repr__(self):
        return f"<Strategy {self.name} ({RANDOM_GENERATOR})>"


def random_strategy(seed: int) -> RandomStrategy:
    return RandomStrategy(seed)


class _Split:
    """Upper layers 1..n handled by one selector, each layer-(n+1) subtree by its own child."""

    def __init__(self, n: int, children: Sequence):
        self.n = n
        self.children = tuple(children)

    def _upper(self, params: TreeParams) -> Selector:
        raise NotImplementedError

    def selector(self, params: TreeParams) -> Selector:
        k, ell, n = params.k, params.ell, self.n
        if n < 0 or n > ell:
            raise ChipFireError(f"split depth {n} must lie in 0..{ell}")
        if len(self.children) != k**n:
            raise ChipFireError(f"depth {n} needs {k**n} child strategies, got {len(self.children)}")
        upper = self._upper(params)
        sub = TreeParams(k, ell - n)
        child_selects = [c.selector(sub) for c in self.children]

        def select(v: int, chips: tuple) -> tuple:
            t, off = position_in_layer(v, k)
            if t <= n:
                return upper(v, chips)
            d = t - n - 1
            i, local = divmod(off, k**d)
            return child_selects[i](layer_start(d + 1, k) + local, chips)

        return select

    def __repr__(self):
        return f"<Strategy {self.name}>"


class Composed(_Split):
    """``top`` bundled over layers 1..n, ``children[i]`` below the i-th layer-(n+1) vertex.

    The top strategy is run once on k**n chips; its plan is then replayed on
    each of the k**(ell-n) stride groups {j, j+m, j+2m, ...} of the root's
    chips (m = k**(ell-n)), so every layer-(n+1) vertex receives a block of
    consecutive ranks.
    """

    def __init__(self, n: int, top, children: Sequence):
        super().__init__(n, children)
        self.top = top
        self.name = f"compose({n}, {top.name}, [{', '.join(c.name for c in self.children)}])"

    def _upper(self, params: TreeParams) -> Selector:
        k, n = params.k, self.n
        m = k ** (params.ell - n)
        top_plan = stabilize_with_plan(initial_configuration(TreeParams(k, n)), self.top)
        queues: Optional[dict] = None

        def select(v: int, chips: tuple) -> tuple:
            nonlocal queues
            if queues is None:
                # Layer-synchronous runs reach the root first, with every chip.
                queues = defaultdict(deque)
                for j in range(m):
                    for e in top_plan.events:
                        queues[e.vertex].append(tuple(chips[(x - 1) * m + j] for x in e.tuple))
            return queues[v].popleft()

        return select


def compose(n: int, top, children: Sequence) -> Composed:
    children = list(children)
    if not children:
        raise ChipFireError("compose needs at least one child strategy")
    k_guess = round(len(children) ** (1 / n)) if n else None
    if n and k_guess**n != len(children):
        raise ChipFireError(f"{len(children)} children is not a power k**{n}")
    return Composed(n, top, children)


class TargetStrategy:
    """Reproduces a given stable permutation, if it is reachable.

    At each vertex the i-th firing sends the i-th smallest chip of each child's
    target set; the ballot property of reachable dispersions makes that tuple
    increasing.  Unreachable targets fail with ``IllegalFiringError``.
    """

    def __init__(self, perm: Sequence[int]):
        self.perm = tuple(perm)
        self.name = "target:" + ",".join(map(str, self.perm))

    def selector(self, params: TreeParams) -> Selector:
        if len(self.perm) != params.num_chips:
            raise ChipFireError(f"target has {len(self.perm)} chips, tree holds {params.num_chips}")
        k, ell, perm = params.k, params.ell, self.perm

        def select(v: int, chips: tuple) -> tuple:
            t, off = position_in_layer(v, k)
            width = k ** (ell - t)
            start = off * width * k
            here = set(chips)
            out = []
            for j in range(k):
                block = perm[start + j * width : start + (j + 1) * width]
                avail = [c for c in block if c in here]
                if not avail:
                    raise IllegalFiringError(f"target unreachable: child {j + 1} of v{v} has no pending chip")
                out.append(min(avail))
            if any(a >= b for a, b in zip(out, out[1:])):
                raise IllegalFiringError(f"target unreachable: v{v} would fire {tuple(out)}")
            return tuple(out)

        return select


def target_strategy(perm: Sequence[int]) -> TargetStrategy:
    return TargetStrategy(perm)


def run_strategy(params: TreeParams, strategy, **kw) -> FiringPlan:
    return stabilize_with_plan(initial_configuration(params), strategy, **kw)


class Embedding(NamedTuple):
    strategy: "_EmbeddingStrategy"
    params: TreeParams
    witness_chips: tuple
    witness_positions: tuple  # 1-based positions in the stable permutation


class _EmbeddingStrategy(_Split):
    def __init__(self, n: int, k: int, name: str):
        super().__init__(n, [unbundle_strategy()] * (k**n))
        self.name = name
        self._top = GroupedBundle(name, lambda t, p: p.k ** (n - t + 1))

    def _upper(self, params: TreeParams) -> Selector:
        return self._top.selector(params)


def pattern_embedding_strategy(P: Sequence[int], k: int) -> Embedding:
    """Strategy on k**(2n) chips whose stable permutation contains ``P`` (|P| = k**n).

    The top n layers bundle inside rank-groups of k**(n-t+1) chips, which sends
    chips c, c + k**n, c + 2k**n, ... to the c-th layer-(n+1) vertex; the rest of
    the tree is finished with unbundling.  Chips i + (P_i - 1) k**n realize ``P``.
    """
    P = tuple(P)
    if sorted(P) != list(range(1, len(P) + 1)):
        raise ChipFireError(f"{P} is not a permutation")
    n, size = 0, 1
    while size < len(P):
        size *= k
        n += 1
    if size != len(P):
        raise ChipFireError(f"pattern length {len(P)} is not a power of {k}")
    strategy = _EmbeddingStrategy(n, k, "embed:" + ",".join(map(str, P)))
    params = TreeParams(k, 2 * n)
    chips = tuple(i + (p - 1) * size for i, p in enumerate(P, start=1))
    result = run_strategy(params, strategy).result
    where = {c: pos for pos, c in enumerate(result, start=1)}
    return Embedding(strategy, params, chips, tuple(where[c] for c in chips))


def parse_strategy(name: str, *, base_dir: Optional[Path] = None):
    """Resolve a CLI strategy name: identity, unbundle, random:<seed>, compose:<file>."""
    name = name.strip()
    if name == "identity":
        return identity_strategy()
    if name == "unbundle":
        return unbundle_strategy()
    kind, sep, arg = name.partition(":")
    if sep and kind == "random":
        try:
            return random_strategy(int(arg))
        except ValueError:
            raise ChipFireError(f"random strategy needs an integer seed, got {arg!r}") from None
    if sep and kind == "compose":
        path = Path(arg)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        try:
            text = path.read_text()
        except OSError as exc:
            raise ChipFireError(f"cannot read compose spec {path}: {exc}") from None
        return parse_compose_spec(text)
    raise ChipFireError(f"unknown strategy {name!r}")


def parse_compose_spec(text: str):
    """Parse an indentation tree of strategy names.

    A ``compose <n>`` line owns the more-indented lines below it: first the top
    strategy, then the k**n subtree strategies from left to right.  Any entry may
    itself be a nested ``compose`` block.  ``#`` starts a comment::

        compose 1
            unbundle
            identity
            random:7
    """
    lines = []
    for raw in text.splitlines():
        body = raw.split("#", 1)[0].rstrip()
        if body.strip():
            lines.append((len(body) - len(body.lstrip()), body.strip()))
    if not lines:
        raise ChipFireError("empty compose spec")

    def parse(i: int) -> tuple:
        indent, word = lines[i]
        head, _, arg = word.partition(" ")
        if head != "compose":
            if arg:
                raise ChipFireError(f"unexpected text after strategy name: {word!r}")
            if word.startswith("compose:"):
                raise ChipFireError("nested compose blocks must be inline, not compose:<file>")
            return parse_strategy(word), i + 1
        try:
            n = int(arg)
        except ValueError:
            raise ChipFireError(f"compose needs an integer depth, got {arg!r}") from None
        parts = []
        j = i + 1
        while j < len(lines) and lines[j][0] > indent:
            child_indent = lines[j][0]
            part, j = parse(j)
            parts.append(part)
            if j < len(lines) and indent < lines[j][0] != child_indent:
                raise ChipFireError(f"inconsistent indentation near {lines[j][1]!r}")
        if len(parts) < 2:
            raise ChipFireError("compose block needs a top strategy and at least one child")
        return compose(n, parts[0], parts[1:]), j

    strategy, end = parse(0)
    if end != len(lines):
        raise ChipFireError(f"trailing content after compose spec: {lines[end][1]!r}")
    return strategy
