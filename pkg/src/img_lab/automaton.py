"""Exact word problem for finite-state recursions.

The recursion's generators are closed under taking sections (words are freely
reduced on the way). When that closure is finite we get a Mealy automaton whose
states are words. Equal states are merged by partition refinement, and products
of two states that equal a single state are tabulated in the same way. An
element is then a tuple of state classes; its sections are tuples of the same
length or shorter, so the section closure of any element is finite and
breadth-first search over it decides triviality.
"""

from __future__ import annotations

from collections import deque
from typing import Hashable, Sequence

from .wreath import Perm, WreathRecursion, perm_compose
from .words import Word, inverse


class UndecidedError(RuntimeError):
    """The search hit its element bound before reaching a verdict."""


class NotFiniteStateError(RuntimeError):
    """The state closure of the generators exceeds the configured bound."""


def refine(perms: Sequence[Hashable], trans: Sequence[Sequence[int]]) -> list[int]:
    """Moore partition refinement; returns a block id per node."""
    label = {}
    block = [label.setdefault(p, len(label)) for p in perms]
    while True:
        sig: dict[tuple, int] = {}
        new = [sig.setdefault((block[i], tuple(block[j] for j in t)), len(sig)) for i, t in enumerate(trans)]
        if len(sig) == len(set(block)):
            return new
        block = new


class Automaton:
    def __init__(self, rec: WreathRecursion, max_states: int = 5000):
        self.rec = rec
        d = rec.degree
        start: list[Word] = [()]
        for g in rec.generators:
            start.append(((g, 1),))
            if g not in rec.involutions:
                start.append(((g, -1),))
        index = {w: i for i, w in enumerate(start)}
        states = list(start)
        perms: list[Perm] = []
        trans: list[list[int]] = []
        i = 0
        while i < len(states):
            # keep the state set closed under inverses as well as sections
            inv_w = rec.reduce(inverse(states[i]))
            if inv_w not in index:
                index[inv_w] = len(states)
                states.append(inv_w)
            p, secs = rec.first_level(states[i])
            row = []
            for s in secs:
                j = index.get(s)
                if j is None:
                    j = index[s] = len(states)
                    states.append(s)
                    if len(states) > max_states:
                        raise NotFiniteStateError(
                            f"{rec.name}: more than {max_states} states in the section closure"
                        )
                row.append(j)
            perms.append(p)
            trans.append(row)
            i += 1
        self.states = states
        self.state_index = index
        blocks = refine(perms, trans)
        # one representative per class, the shortlex-least word; identity is class 0
        order = sorted(range(len(states)), key=lambda k: (len(states[k]), states[k]))
        remap: dict[int, int] = {blocks[0]: 0}
        for k in order:
            remap.setdefault(blocks[k], len(remap))
        self.state_class = [remap[b] for b in blocks]
        n = len(remap)
        self.reps: list[Word] = [()] * n
        seen = set()
        for k in order:
            c = self.state_class[k]
            if c not in seen:
                seen.add(c)
                self.reps[c] = states[k]
        self.perm = [perms[0]] * n
        self.trans = [[0] * d for _ in range(n)]
        for k in range(len(states)):
            c = self.state_class[k]
            self.perm[c] = perms[k]
            self.trans[c] = [self.state_class[j] for j in trans[k]]
        self.identity_perm = tuple(range(d))
        self.inv = [self._class_of_word(rec.reduce(inverse(w))) for w in self.reps]
        self.pair = self._pair_table()
        self._memo: dict[tuple[int, ...], bool] = {}

    @property
    def size(self) -> int:
        return len(self.reps)

    def _class_of_word(self, w: Word) -> int:
        return self.state_class[self.state_index[w]]

    def _pair_table(self) -> dict[tuple[int, int], int]:
        n = self.size
        nodes: dict[tuple[int, ...], int] = {}
        keys: list[tuple[int, ...]] = []

        def node(key: tuple[int, ...]) -> int:
            key = tuple(c for c in key if c != 0)
            if key not in nodes:
                nodes[key] = len(keys)
                keys.append(key)
            return nodes[key]

        node(())
        for c in range(1, n):
            node((c,))
        for p in range(1, n):
            for q in range(1, n):
                node((p, q))
        perms, trans = [], []
        i = 0
        while i < len(keys):
            key = keys[i]
            perms.append(self.perm_of(key))
            trans.append([node(s) for s in self._raw_sections(key)])
            i += 1
        blocks = refine(perms, trans)
        single_of_block = {blocks[nodes[()]]: 0}
        for c in range(1, n):
            single_of_block.setdefault(blocks[nodes[(c,)]], c)
        table = {}
        for p in range(1, n):
            for q in range(1, n):
                b = blocks[nodes[(p, q)]]
                if b in single_of_block:
                    table[(p, q)] = single_of_block[b]
        return table

    # -- elements -----------------------------------------------------------
    def element(self, word: Word) -> tuple[int, ...]:
        out = []
        for letter in word:
            w = self.rec.reduce((letter,))
            if w not in self.state_index:
                raise KeyError(f"letter {letter} is not a state")
            out.append(self._class_of_word(w))
        return self.reduce(out)

    def reduce(self, elem: Sequence[int]) -> tuple[int, ...]:
        stack: list[int] = []
        for c in elem:
            if c == 0:
                continue
            stack.append(c)
            while len(stack) >= 2:
                r = self.pair.get((stack[-2], stack[-1]))
                if r is None:
                    break
                stack.pop()
                stack.pop()
                if r != 0:
                    stack.append(r)
        return tuple(stack)

    def inverse(self, elem: Sequence[int]) -> tuple[int, ...]:
        return self.reduce([self.inv[c] for c in reversed(elem)])

    def perm_of(self, elem: Sequence[int]) -> Perm:
        p = self.identity_perm
        for c in reversed(elem):
            p = perm_compose(self.perm[c], p)
        return p

    def _raw_sections(self, elem: Sequence[int]) -> list[tuple[int, ...]]:
        d = self.rec.degree
        out = []
        for x in range(d):
            y = x
            secs = []
            for c in reversed(elem):
                secs.append(self.trans[c][y])
                y = self.perm[c][y]
            secs.reverse()
            out.append(tuple(secs))
        return out

    def sections(self, elem: Sequence[int]) -> list[tuple[int, ...]]:
        return [self.reduce(s) for s in self._raw_sections(elem)]

    def is_trivial(self, elem: Sequence[int], bound: int = 10**6) -> bool:
        start = self.reduce(elem)
        memo = self._memo
        if start in memo:
            return memo[start]
        seen = {start}
        queue = deque([start])
        verdict = True
        while queue:
            e = queue.popleft()
            if not e:
                continue
            known = memo.get(e)
            if known is True:
                continue
            if known is False or self.perm_of(e) != self.identity_perm:
                verdict = False
                break
            for s in self.sections(e):
                if s not in seen:
                    seen.add(s)
                    queue.append(s)
                    if len(seen) > bound:
                        raise UndecidedError(f"closure exceeded {bound} elements")
        if verdict:
            # every element of an exhausted closure is trivial
            for e in seen:
                memo[e] = True
        else:
            memo[start] = False
        return verdict

    def to_word(self, elem: Sequence[int]) -> Word:
        return self.rec.reduce([lt for c in elem for lt in self.reps[c]])


class Canonicalizer:
    """Pick one representative per group element.

    Elements are bucketed by their action on a fixed level; inside a bucket the
    exact triviality test decides. The representative of an element is the
    first equal element ever registered.
    """

    def __init__(self, automaton: Automaton, level: int = 3):
        self.A = automaton
        self.level = level
        self.buckets: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
        self._cache: dict[tuple[int, ...], tuple[int, ...]] = {}

    def signature(self, elem: tuple[int, ...]) -> tuple[int, ...]:
        A, d = self.A, self.A.rec.degree
        out = [0] * d**self.level
        stack = [(elem, 0, 0, 0)]
        while stack:
            e, depth, src, dst = stack.pop()
            if depth == self.level:
                out[src] = dst
                continue
            p = A.perm_of(e)
            for x, s in enumerate(A.sections(e)):
                stack.append((s, depth + 1, src * d + x, dst * d + p[x]))
        return tuple(out)

    def __call__(self, elem: tuple[int, ...]) -> tuple[int, ...]:
        elem = self.A.reduce(elem)
        hit = self._cache.get(elem)
        if hit is not None:
            return hit
        bucket = self.buckets.setdefault(self.signature(elem), [])
        for rep in bucket:
            if self.A.is_trivial(elem + self.A.inverse(rep)):
                self._cache[elem] = rep
                return rep
        bucket.append(elem)
        self._cache[elem] = elem
        return elem
