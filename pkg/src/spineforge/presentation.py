"""Group presentations and their occurrence normalization.

Normalization rewrites a finite presentation so that every generator
occurs in exactly three relators, once in each.  A generator appearing k
times is split into k copies tied together by a cycle of cancelling
relators g#1 g#2^-1, ..., g#k g#1^-1: the k-1 chain relators plus the
closing one give every copy exactly two chain occurrences on top of its
single occurrence in a rewritten original relator.  Generators with a
single occurrence keep their name and receive a four-generator padding
gadget instead; generators that never occur first get a trivial relator
g g^-1 and then split.  Each step is one of the four elementary Tietze
moves and the full sequence is emitted as a replayable audit trail.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class PresentationError(Exception):
    pass


def word_to_str(word):
    return "".join(sym + ("" if sign > 0 else "-1") for sym, sign in word)


def invert_word(word):
    return tuple((sym, -sign) for sym, sign in reversed(word))


def reduce_word(word):
    out = []
    for sym, sign in word:
        if out and out[-1][0] == sym and out[-1][1] == -sign:
            out.pop()
        else:
            out.append((sym, sign))
    return tuple(out)


@dataclass
class Presentation:
    generators: list
    relators: list  # list of words; word = tuple of (symbol, +1/-1)

    def __post_init__(self):
        if len(set(self.generators)) != len(self.generators):
            raise PresentationError("duplicate generator symbols")
        for g in self.generators:
            if not g:
                raise PresentationError("empty generator name")
        gset = set(self.generators)
        for w in self.relators:
            for sym, sign in w:
                if sym not in gset:
                    raise PresentationError("relator uses undeclared symbol %r" % sym)
                if sign not in (1, -1):
                    raise PresentationError("bad sign %r" % sign)

    def occurrences(self, sym):
        """List of (relator index, position) pairs."""
        out = []
        for ri, w in enumerate(self.relators):
            for pos, (s, _) in enumerate(w):
                if s == sym:
                    out.append((ri, pos))
        return out

    def to_text(self):
        lines = ["gens " + " ".join(self.generators)]
        for w in self.relators:
            lines.append("rel " + word_to_str(w))
        return "\n".join(lines) + "\n"


def _tokenize_word(text, symbols):
    """Greedy longest-match tokenization of a relator word."""
    by_len = sorted(symbols, key=len, reverse=True)
    word = []
    i = 0
    while i < len(text):
        for sym in by_len:
            if text.startswith(sym, i):
                i += len(sym)
                sign = 1
                if text.startswith("-1", i):
                    sign = -1
                    i += 2
                word.append((sym, sign))
                break
        else:
            raise PresentationError("cannot tokenize %r at position %d" % (text, i))
    return tuple(word)


def parse_presentation(text):
    """Parse the presentation file format: `gens a b ...`, `rel word` lines."""
    generators = None
    relators = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(None, 1)
        if parts[0] == "gens":
            if generators is not None:
                raise PresentationError("duplicate gens line")
            generators = parts[1].split() if len(parts) > 1 else []
            if not generators:
                raise PresentationError("gens line declares no generators")
        elif parts[0] == "rel":
            if generators is None:
                raise PresentationError("rel before gens")
            if len(parts) < 2:
                raise PresentationError("empty relator line")
            relators.append(_tokenize_word(parts[1].strip(), generators))
        else:
            raise PresentationError("unknown directive %r" % parts[0])
    if generators is None:
        raise PresentationError("missing gens line")
    return Presentation(generators=generators, relators=relators)


# ---------------------------------------------------------------------------
# Tietze moves


@dataclass(frozen=True)
class TietzeMove:
    kind: str  # add_relator | remove_relator | add_generator | remove_generator
    payload: tuple

    def __str__(self):
        if self.kind == "add_relator":
            return "add_relator %s" % word_to_str(self.payload[0])
        if self.kind == "remove_relator":
            return "remove_relator %d" % self.payload[0]
        if self.kind == "add_generator":
            return "add_generator %s := %s" % (self.payload[0], word_to_str(self.payload[1]))
        return "remove_generator %s (defining relator %d)" % (self.payload[0], self.payload[1])


def replay_audit(pres, moves):
    """Apply a Tietze move sequence mechanically; raises on malformed moves."""
    gens = list(pres.generators)
    rels = [tuple(w) for w in pres.relators]
    for mv in moves:
        if mv.kind == "add_relator":
            (word,) = mv.payload
            for sym, _ in word:
                if sym not in gens:
                    raise PresentationError("add_relator uses unknown %r" % sym)
            rels.append(tuple(word))
        elif mv.kind == "remove_relator":
            (idx,) = mv.payload
            if not 0 <= idx < len(rels):
                raise PresentationError("remove_relator index %d out of range" % idx)
            rels.pop(idx)
        elif mv.kind == "add_generator":
            sym, defining = mv.payload
            if sym in gens:
                raise PresentationError("add_generator duplicate %r" % sym)
            for s, _ in defining:
                if s not in gens:
                    raise PresentationError("defining word uses unknown %r" % s)
            gens.append(sym)
            rels.append(((sym, 1),) + invert_word(defining))
        elif mv.kind == "remove_generator":
            sym, idx = mv.payload
            if sym not in gens:
                raise PresentationError("remove_generator unknown %r" % sym)
            if not 0 <= idx < len(rels):
                raise PresentationError("remove_generator relator index out of range")
            defrel = rels[idx]
            occ = [s for s, _ in defrel if s == sym]
            if len(occ) != 1:
                raise PresentationError("defining relator must contain %r exactly once" % sym)
            for ri, w in enumerate(rels):
                if ri != idx and any(s == sym for s, _ in w):
                    raise PresentationError("%r still occurs in relator %d" % (sym, ri))
            rels.pop(idx)
            gens.remove(sym)
        else:
            raise PresentationError("unknown move kind %r" % mv.kind)
    return Presentation(generators=gens, relators=rels)


# ---------------------------------------------------------------------------
# normalization


@dataclass
class NormalizedPresentation:
    presentation: Presentation
    # provenance: final generator -> word over the input's generators
    provenance: dict
    audit: list
    source: Presentation

    def verify_normal_form(self):
        """Every generator occurs in exactly 3 relators, once in each."""
        p = self.presentation
        for g in p.generators:
            occ = p.occurrences(g)
            if len(occ) != 3:
                return "generator %r occurs %d times, expected 3" % (g, len(occ))
            if len({ri for ri, _ in occ}) != 3:
                return "generator %r occurs twice in one relator" % (g,)
        return None


def _copy_name(sym, j):
    return "%s#%d" % (sym, j)


def _aux_name(sym, j):
    return "%s#a%d" % (sym, j)


def normalize_presentation(pres):
    """Rewrite so every generator occurs in exactly 3 relators, once each.

    Generators already satisfying the property are left untouched
    (idempotence); the presented group is unchanged, witnessed by the
    emitted Tietze audit.
    """
    moves = []
    gens = list(pres.generators)
    rels = [tuple(w) for w in pres.relators]

    # state mutators mirroring replay_audit semantics exactly
    def add_relator(w):
        moves.append(TietzeMove("add_relator", (w,)))
        rels.append(w)

    def remove_relator_by_content(w):
        idx = rels.index(w)
        moves.append(TietzeMove("remove_relator", (idx,)))
        rels.pop(idx)

    def add_generator(name, defining):
        moves.append(TietzeMove("add_generator", (name, defining)))
        gens.append(name)
        rels.append(((name, 1),) + invert_word(defining))

    def remove_generator(name, defining_rel):
        idx = rels.index(defining_rel)
        moves.append(TietzeMove("remove_generator", (name, idx)))
        rels.pop(idx)
        gens.remove(name)

    # trivial relators for generators that never occur
    occurring = {s for w in rels for s, _ in w}
    for g in list(gens):
        if g not in occurring:
            add_relator(((g, 1), (g, -1)))

    def occ_count(sym):
        return sum(1 for w in rels for s, _ in w if s == sym)

    def once_each(sym):
        return all(sum(1 for s, _ in w if s == sym) <= 1 for w in rels)

    split_gens = []
    gadget_gens = []
    for g in list(gens):
        k = occ_count(g)
        if k == 3 and once_each(g):
            continue
        if k == 1:
            gadget_gens.append(g)
        else:
            split_gens.append((g, k))

    provenance = {g: ((g, 1),) for g in pres.generators}

    # copies g#j := g
    for g, k in split_gens:
        for j in range(1, k + 1):
            name = _copy_name(g, j)
            add_generator(name, ((g, 1),))
            provenance[name] = ((g, 1),)

    # rewrite relators containing split generators, consuming copy indices
    # in reading order; always take the first offender, so the surviving
    # offenders keep their relative order
    split_set = {g for g, _ in split_gens}
    counters = {g: 0 for g in split_set}

    def defining_shape(name, base):
        return ((name, 1), (base, -1))

    def is_defining(w):
        return any(w == defining_shape(_copy_name(g, j), g) for g, k in split_gens for j in range(1, k + 1))

    while True:
        target = None
        for w in rels:
            if is_defining(w):
                continue
            if any(s in split_set for s, _ in w):
                target = w
                break
        if target is None:
            break
        neww = []
        for s, sign in target:
            if s in split_set:
                counters[s] += 1
                neww.append((_copy_name(s, counters[s]), sign))
            else:
                neww.append((s, sign))
        add_relator(tuple(neww))
        remove_relator_by_content(target)

    # chain cycles g#1 -> g#2 -> ... -> g#k -> g#1
    for g, k in split_gens:
        for j in range(1, k):
            add_relator(((_copy_name(g, j), 1), (_copy_name(g, j + 1), -1)))
        add_relator(((_copy_name(g, k), 1), (_copy_name(g, 1), -1)))

    # drop the defining relators (consequences of the chains) and the
    # original generators
    for g, k in split_gens:
        for j in range(2, k + 1):
            remove_relator_by_content(defining_shape(_copy_name(g, j), g))
        remove_generator(g, defining_shape(_copy_name(g, 1), g))
        del provenance[g]

    # padding gadget for single-occurrence generators: aux a,b = x, c = a,
    # d = b, plus consequences c d^-1 and a c^-1 d b^-1
    for g in gadget_gens:
        a, b, c, d = (_aux_name(g, j) for j in range(1, 5))
        for name, base in ((a, g), (b, g), (c, a), (d, b)):
            add_generator(name, ((base, 1),))
            provenance[name] = provenance[base]
        add_relator(((c, 1), (d, -1)))
        add_relator(((a, 1), (c, -1), (d, 1), (b, -1)))

    final = Presentation(generators=list(gens), relators=list(rels))
    np = NormalizedPresentation(
        presentation=final, provenance=provenance, audit=moves, source=pres
    )
    err = np.verify_normal_form()
    if err is not None:
        raise AssertionError("normalization failed its own contract: %s" % err)
    return np


def evaluate_word(word, assign, mul, identity, inv):
    """Fold a word through a group: assign maps symbols to elements."""
    acc = identity
    for sym, sign in word:
        x = assign[sym]
        acc = mul(acc, x if sign > 0 else inv(x))
    return acc
