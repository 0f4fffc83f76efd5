"""Small finite-automaton toolkit: NFAs with epsilon moves, determinisation,
complement, product -- just what the cross-section and language intersection
constructions need."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class NFA:
    alphabet: tuple
    starts: frozenset
    finals: frozenset
    # (state, symbol) -> frozenset of states; symbol None = epsilon
    transitions: dict = field(default_factory=dict)

    def states(self):
        out = set(self.starts) | set(self.finals)
        for (p, _), qs in self.transitions.items():
            out.add(p)
            out.update(qs)
        return out

    def step(self, state, symbol):
        return self.transitions.get((state, symbol), frozenset())

    def eps_closure(self, states) -> frozenset:
        out = set(states)
        stack = list(states)
        while stack:
            p = stack.pop()
            for q in self.step(p, None):
                if q not in out:
                    out.add(q)
                    stack.append(q)
        return frozenset(out)

    def accepts(self, word) -> bool:
        current = self.eps_closure(self.starts)
        for ch in word:
            nxt = set()
            for p in current:
                nxt.update(self.step(p, ch))
            current = self.eps_closure(nxt)
            if not current:
                return False
        return bool(current & self.finals)

    def determinize(self) -> "NFA":
        """Subset construction; the result has no epsilon moves and is total."""
        start = self.eps_closure(self.starts)
        sink = frozenset()
        seen = {start}
        stack = [start]
        transitions = {}
        while stack:
            cur = stack.pop()
            for ch in self.alphabet:
                nxt = set()
                for p in cur:
                    nxt.update(self.step(p, ch))
                nxt = self.eps_closure(nxt)
                transitions[(cur, ch)] = frozenset([nxt])
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        if sink not in seen:
            seen.add(sink)
            for ch in self.alphabet:
                transitions[(sink, ch)] = frozenset([sink])
        finals = frozenset(s for s in seen if s & self.finals)
        return NFA(self.alphabet, frozenset([start]), finals, transitions)

    def complement(self) -> "NFA":
        """Complement of a determinised automaton over the same alphabet."""
        det = self.determinize()
        finals = frozenset(s for s in det.states() if s not in det.finals)
        return NFA(det.alphabet, det.starts, finals, det.transitions)

    def intersect(self, other: "NFA") -> "NFA":
        """Product of two epsilon-free automata."""
        starts = frozenset(
            (p, q) for p in self.eps_closure(self.starts) for q in other.eps_closure(other.starts)
        )
        transitions = {}
        seen = set(starts)
        stack = list(starts)
        while stack:
            p, q = stack.pop()
            for ch in self.alphabet:
                nxts = [
                    (a, b)
                    for a in self.step(p, ch)
                    for b in other.step(q, ch)
                ]
                if nxts:
                    transitions[((p, q), ch)] = frozenset(nxts)
                    for st in nxts:
                        if st not in seen:
                            seen.add(st)
                            stack.append(st)
        finals = frozenset(
            (p, q) for (p, q) in seen if p in self.finals and q in other.finals
        )
        return NFA(self.alphabet, starts, finals, transitions)

    def trim(self) -> "NFA":
        """Drop states that are unreachable or cannot reach a final state."""
        reachable = set(self.eps_closure(self.starts))
        stack = list(reachable)
        while stack:
            p = stack.pop()
            for ch in list(self.alphabet) + [None]:
                for q in self.step(p, ch):
                    if q not in reachable:
                        reachable.add(q)
                        stack.append(q)
        back = {}
        for (p, ch), qs in self.transitions.items():
            for q in qs:
                back.setdefault(q, set()).add(p)
        alive = set(self.finals) & reachable
        stack = list(alive)
        while stack:
            q = stack.pop()
            for p in back.get(q, ()):
                if p in reachable and p not in alive:
                    alive.add(p)
                    stack.append(p)
        transitions = {}
        for (p, ch), qs in self.transitions.items():
            if p in alive:
                kept = frozenset(q for q in qs if q in alive)
                if kept:
                    transitions[(p, ch)] = kept
        return NFA(
            self.alphabet,
            frozenset(s for s in self.starts if s in alive),
            frozenset(self.finals & alive),
            transitions,
        )


def add_transition(transitions: dict, p, symbol, q):
    key = (p, symbol)
    cur = transitions.get(key, frozenset())
    transitions[key] = cur | {q}
