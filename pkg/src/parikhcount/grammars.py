"""Context-free grammars: text format, reduction, normal form, chart parsing.

Grammar file format: one rule per line, ``S -> a S b | eps``.  Tokens are
whitespace-separated; uppercase-initial tokens are nonterminals, single
lowercase letters are terminals, ``eps`` is the empty word.  The first
left-hand side is the start symbol.  A final line ``bounds: u1, u2, ...``
supplies bounding words for the language pipeline.

Nonterminal identifiers are opaque hashables so synthesised grammars (state
triples from automaton products) can use tuples directly.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Grammar:
    """Productions over an explicitly ordered terminal alphabet."""

    terminals: tuple
    nonterminals: tuple
    start: object
    productions: dict  # nonterminal -> tuple of right-hand sides (tuples)

    def rhs(self, nt):
        return self.productions.get(nt, ())

    def is_terminal(self, symbol) -> bool:
        return symbol in self._terminal_set

    @property
    def _terminal_set(self):
        return set(self.terminals)


def make_grammar(terminals, start, productions) -> Grammar:
    terminals = tuple(terminals)
    prods = {}
    nts = []
    for nt, rhss in productions.items():
        if nt not in prods:
            nts.append(nt)
        cleaned = []
        for rhs in rhss:
            cleaned.append(tuple(rhs))
        prods[nt] = tuple(dict.fromkeys(cleaned))
    if start not in prods:
        prods[start] = ()
        nts.insert(0, start)
    return Grammar(terminals, tuple(nts), start, prods)


class GrammarParseError(ValueError):
    pass


def parse_grammar(text: str):
    """Parse the rule text; returns (Grammar, bounding words or None)."""
    rules: dict = {}
    order: list = []
    bounds = None
    terminals = set()
    for ln_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("bounds:"):
            bounds = [w.strip() for w in line[len("bounds:") :].split(",")]
            bounds = [w for w in bounds if w]
            if not bounds or any(not w for w in bounds):
                raise GrammarParseError(f"line {ln_no}: empty bounding word")
            for w in bounds:
                for ch in w:
                    if not (ch.isalpha() and ch.islower()):
                        raise GrammarParseError(
                            f"line {ln_no}: bounding words must be lowercase letters"
                        )
                    terminals.add(ch)
            continue
        if "->" not in line:
            raise GrammarParseError(f"line {ln_no}: missing '->'")
        lhs, rhs_text = line.split("->", 1)
        lhs = lhs.strip()
        if not lhs or not lhs[0].isupper():
            raise GrammarParseError(f"line {ln_no}: bad nonterminal {lhs!r}")
        if lhs not in rules:
            rules[lhs] = []
            order.append(lhs)
        for alt in rhs_text.split("|"):
            symbols = []
            for tok in alt.split():
                if tok == "eps":
                    continue
                if tok[0].isupper():
                    symbols.append(tok)
                elif len(tok) == 1 and tok.isalpha():
                    symbols.append(tok)
                    terminals.add(tok)
                else:
                    raise GrammarParseError(
                        f"line {ln_no}: bad token {tok!r} (terminals are single lowercase letters)"
                    )
            rules[lhs].append(tuple(symbols))
    if not order:
        raise GrammarParseError("no rules found")
    grammar = make_grammar(tuple(sorted(terminals)), order[0], rules)
    return reduce_grammar(grammar), bounds


def parse_grammar_file(path) -> tuple:
    with open(path, "r", encoding="ascii") as fh:
        return parse_grammar(fh.read())


def reduce_grammar(g: Grammar) -> Grammar:
    """Remove unproductive and unreachable nonterminals.

    The start symbol is always kept; a start with no surviving productions
    denotes the empty language.
    """
    terminal_set = set(g.terminals)
    productive = set()
    changed = True
    while changed:
        changed = False
        for nt in g.nonterminals:
            if nt in productive:
                continue
            for rhs in g.rhs(nt):
                if all(s in terminal_set or s in productive for s in rhs):
                    productive.add(nt)
                    changed = True
                    break
    reachable = set()
    stack = [g.start]
    while stack:
        nt = stack.pop()
        if nt in reachable:
            continue
        reachable.add(nt)
        for rhs in g.rhs(nt):
            if all(s in terminal_set or s in productive for s in rhs):
                for s in rhs:
                    if s not in terminal_set and s not in reachable:
                        stack.append(s)
    keep = (reachable & productive) | {g.start}
    prods = {}
    for nt in g.nonterminals:
        if nt not in keep:
            continue
        rhss = [
            rhs
            for rhs in g.rhs(nt)
            if all(s in terminal_set or s in keep and s in productive for s in rhs)
        ]
        prods[nt] = tuple(rhss)
    return make_grammar(g.terminals, g.start, prods)


def is_empty_language(g: Grammar) -> bool:
    g = reduce_grammar(g)
    return not g.rhs(g.start)


# ---------------------------------------------------------------------------
# Chomsky-style normal form and CYK membership


@dataclass(frozen=True)
class ChartGrammar:
    """Binary/terminal rules for CYK, plus whether the language has epsilon."""

    terminals: tuple
    start: object
    nullable_start: bool
    terminal_owners: dict  # letter -> frozenset of nonterminals
    pair_owners: dict      # (B, C) -> frozenset of nonterminals


def cnf_form(g: Grammar) -> ChartGrammar:
    g = reduce_grammar(g)
    terminal_set = set(g.terminals)
    counter = [0]

    def fresh():
        counter[0] += 1
        return ("_n", counter[0])

    prods: list = []
    for nt in g.nonterminals:
        for rhs in g.rhs(nt):
            prods.append((nt, list(rhs)))

    # TERM: isolate terminals in long right sides
    wrappers: dict = {}
    for idx, (nt, rhs) in enumerate(prods):
        if len(rhs) >= 2:
            new_rhs = []
            for s in rhs:
                if s in terminal_set:
                    if s not in wrappers:
                        wrappers[s] = fresh()
                    new_rhs.append(wrappers[s])
                else:
                    new_rhs.append(s)
            prods[idx] = (nt, new_rhs)
    for letter, wrapper in wrappers.items():
        prods.append((wrapper, [letter]))

    # BIN: binarize
    out = []
    for nt, rhs in prods:
        while len(rhs) > 2:
            head = fresh()
            out.append((nt, [rhs[0], head]))
            nt, rhs = head, rhs[1:]
        out.append((nt, rhs))
    prods = out

    # DEL: nullable elimination
    nullable = set()
    changed = True
    while changed:
        changed = False
        for nt, rhs in prods:
            if nt in nullable:
                continue
            if all(s in nullable for s in rhs):
                nullable.add(nt)
                changed = True
    expanded = set()
    for nt, rhs in prods:
        options = [[]]
        for s in rhs:
            new_options = []
            for opt in options:
                new_options.append(opt + [s])
                if s in nullable:
                    new_options.append(list(opt))
            options = new_options
        for opt in options:
            if opt:
                expanded.add((nt, tuple(opt)))

    # UNIT: unit-chain closure
    unit: dict = {}
    for nt, rhs in expanded:
        if len(rhs) == 1 and rhs[0] not in terminal_set:
            unit.setdefault(nt, set()).add(rhs[0])
    closure: dict = {}

    def close(nt):
        if nt in closure:
            return closure[nt]
        seen = {nt}
        stack = [nt]
        while stack:
            cur = stack.pop()
            for nxt in unit.get(cur, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        closure[nt] = seen
        return seen

    terminal_owners: dict = {}
    pair_owners: dict = {}
    all_nts = {nt for nt, _ in expanded}
    for nt in all_nts:
        for target in close(nt):
            for owner, rhs in expanded:
                if owner != target:
                    continue
                if len(rhs) == 1 and rhs[0] in terminal_set:
                    terminal_owners.setdefault(rhs[0], set()).add(nt)
                elif len(rhs) == 2:
                    pair_owners.setdefault(tuple(rhs), set()).add(nt)
    terminal_owners = {k: frozenset(v) for k, v in terminal_owners.items()}
    pair_owners = {k: frozenset(v) for k, v in pair_owners.items()}
    return ChartGrammar(
        g.terminals,
        g.start,
        g.start in nullable,
        terminal_owners,
        pair_owners,
    )


def parse_member(cg: ChartGrammar, word: str) -> bool:
    """CYK membership test against the normal-form chart grammar."""
    n = len(word)
    if n == 0:
        return cg.nullable_start
    table = [[frozenset() for _ in range(n + 1)] for _ in range(n)]
    for i, ch in enumerate(word):
        table[i][i + 1] = cg.terminal_owners.get(ch, frozenset())
        if not table[i][i + 1]:
            return False
    for span in range(2, n + 1):
        for i in range(n - span + 1):
            j = i + span
            found = set()
            for mid in range(i + 1, j):
                left = table[i][mid]
                right = table[mid][j]
                if not left or not right:
                    continue
                for b in left:
                    for c in right:
                        owners = cg.pair_owners.get((b, c))
                        if owners:
                            found.update(owners)
            table[i][j] = frozenset(found)
    return cg.start in table[0][n]


def generate_words(g: Grammar, maxlen: int, cap: int = 500_000) -> set:
    """All words of the language with length <= maxlen, by length DP.

    Bounded languages are sparse, so the per-length word sets stay small;
    ``cap`` guards against accidentally dense grammars.
    """
    cg = cnf_form(g)
    if not cg.terminal_owners and not cg.nullable_start:
        return set()
    by_nt: dict = {}
    for letter, owners in cg.terminal_owners.items():
        for nt in owners:
            by_nt.setdefault(nt, {}).setdefault(1, set()).add(letter)
    total = 0
    for length in range(2, maxlen + 1):
        for (b, c), owners in cg.pair_owners.items():
            for lb in range(1, length):
                lc = length - lb
                left = by_nt.get(b, {}).get(lb)
                right = by_nt.get(c, {}).get(lc)
                if not left or not right:
                    continue
                for wl in left:
                    for wr in right:
                        w = wl + wr
                        for nt in owners:
                            bucket = by_nt.setdefault(nt, {}).setdefault(length, set())
                            if w not in bucket:
                                bucket.add(w)
                                total += 1
                                if total > cap:
                                    raise RuntimeError(
                                        "word generation exceeded its budget"
                                    )
    out = set()
    if cg.nullable_start:
        out.add("")
    for length, words in by_nt.get(cg.start, {}).items():
        if length <= maxlen:
            out.update(words)
    return out