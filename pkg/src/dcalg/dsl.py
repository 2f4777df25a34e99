"""The ``.qvr`` text format.

    # comment
    vertex 1
    vertex 2
    arrow a: 1 -> 2 weight 1
    relation a s b - b s a
    superpotential x x y - 1/4 y^4
    mark 1

Words are arrow names separated by spaces.  A token that is not an arrow
name is split into arrow names when that can be done in exactly one way, so
``asb`` works as well as ``a s b``.  ``name^k`` repeats an arrow and
``(b s)^k`` a word.  ``idempotent <name>: <vertices>`` records a named
set of vertices.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .quiver import Polynomial, PresentationError, WeightedQuiverPresentation, Word, format_poly


class DslError(PresentationError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line, self.col = line, col
        loc = f"line {line}, column {col}: " if line else ""
        super().__init__(loc + message)


_IDENT = r"[A-Za-z_][A-Za-z0-9_']*|[0-9]+"
_ARROW_RE = re.compile(rf"^arrow\s+({_IDENT})\s*:\s*({_IDENT})\s*->\s*({_IDENT})\s+weight\s+(\S+)\s*$")
_TOKEN_RE = re.compile(r"\s*(?:(?P<sign>[+-])|(?P<num>\d+(?:/\d+)?)(?![A-Za-z_])|(?P<word>[A-Za-z_][A-Za-z0-9_']*(?:\^\d+)?|\([A-Za-z0-9_' ]*\)\^\d+))")


@dataclass
class InputDocument:
    presentation: WeightedQuiverPresentation
    superpotential: Optional[object] = None
    idempotents: Dict[str, Tuple[str, ...]] = field(default_factory=dict)
    locations: Dict[str, int] = field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, InputDocument):
            return NotImplemented
        sp = lambda d: None if d.superpotential is None else d.superpotential.terms
        return (self.presentation == other.presentation and sp(self) == sp(other)
                and self.idempotents == other.idempotents)


def _split_word(tok: str, names: Sequence[str]) -> List[Word]:
    """All ways to write tok as a concatenation of arrow names."""
    out: List[Word] = []

    def go(rest: str, acc: Tuple[str, ...]):
        if not rest:
            out.append(acc)
            return
        for n in names:
            if rest.startswith(n):
                go(rest[len(n):], acc + (n,))
    go(tok, ())
    return out


def parse_combination(text: str, pres: WeightedQuiverPresentation, line: int = 0,
                      col0: int = 0) -> List[Tuple[Word, Fraction]]:
    """Parse ``2 a b - 1/2 c^3 + d`` into (word, coefficient) pairs (zeros dropped, like terms merged)."""
    names = [a.name for a in pres.arrows]
    nameset = set(names)
    terms: Dict[Word, Fraction] = {}
    order: List[Word] = []
    pos = 0
    sign = 1
    coef: Optional[Fraction] = None
    word: List[str] = []
    started = False

    def flush(at: int):
        nonlocal sign, coef, word, started
        if not started:
            return
        c = Fraction(sign) * (coef if coef is not None else 1)
        if not word and coef is None:
            raise DslError("dangling sign", line, col0 + at + 1)
        w = tuple(word)
        if w not in terms:
            order.append(w)
            terms[w] = Fraction(0)
        terms[w] += c
        sign, coef, word, started = 1, None, [], False

    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise DslError(f"unexpected character {text[pos:].strip()[:1]!r}", line, col0 + pos + 1)
        start = m.start(m.lastgroup) if m.lastgroup else pos
        if m.group("sign"):
            if started:
                flush(start)
            elif sign == -1 and m.group("sign") == "-":
                raise DslError("double sign", line, col0 + start + 1)
            if m.group("sign") == "-":
                sign = -sign
            started = True
        elif m.group("num"):
            if word or coef is not None:
                raise DslError("coefficient must come before the word", line, col0 + start + 1)
            coef = Fraction(m.group("num"))
            if coef.denominator == 0:
                raise DslError("zero denominator", line, col0 + start + 1)
            started = True
        else:
            tok = m.group("word")
            rep = 1
            if "^" in tok:
                tok, e = tok.rsplit("^", 1)
                rep = int(e)
            parts: List[str] = []
            for piece in tok.strip("()").split():
                if piece in nameset:
                    parts.append(piece)
                    continue
                splits = _split_word(piece, names)
                if not splits:
                    raise DslError(f"unknown arrow {piece!r}", line, col0 + start + 1)
                if len(splits) > 1:
                    raise DslError(f"ambiguous word {piece!r}; separate arrows with spaces", line, col0 + start + 1)
                parts.extend(splits[0])
            if not parts:
                raise DslError("empty group", line, col0 + start + 1)
            word.extend(parts * rep)
            started = True
        pos = m.end()
    flush(pos)
    return [(w, terms[w]) for w in order if terms[w]]


def parse(text: str) -> InputDocument:
    from .ginzburg import Superpotential

    vertices: List[str] = []
    arrows: List[Tuple[str, str, str, int]] = []
    rel_lines: List[Tuple[int, int, str]] = []
    sp_lines: List[Tuple[int, int, str]] = []
    marked: List[str] = []
    named: Dict[str, Tuple[str, ...]] = {}
    locations: Dict[str, int] = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        stripped = body.strip()
        if not stripped:
            continue
        col = len(body) - len(body.lstrip()) + 1
        kw = stripped.split()[0]
        rest_col = body.index(kw) + len(kw)
        rest = body[rest_col:]
        if kw == "vertex":
            names = rest.split()
            if not names:
                raise DslError("vertex needs a name", ln, col)
            for n in names:
                if not re.fullmatch(_IDENT, n):
                    raise DslError(f"bad vertex name {n!r}", ln, col)
                if n in vertices:
                    raise DslError(f"duplicate vertex {n}", ln, col)
                vertices.append(n)
                locations[f"vertex {n}"] = ln
        elif kw == "arrow":
            m = _ARROW_RE.match(stripped)
            if not m:
                raise DslError("expected 'arrow <name>: <src> -> <tgt> weight <positive int>'", ln, col)
            name, s, t, w = m.groups()
            if not re.fullmatch(r"\d+", w) or int(w) < 1:
                raise DslError(f"arrow weight must be a positive integer, got {w}", ln, col + stripped.rindex(w))
            for v in (s, t):
                if v not in vertices:
                    raise DslError(f"unknown vertex {v}", ln, col + stripped.index(v))
            if any(a[0] == name for a in arrows) or name in vertices:
                raise DslError(f"duplicate name {name}", ln, col)
            arrows.append((name, s, t, int(w)))
            locations[f"arrow {name}"] = ln
        elif kw == "relation":
            rel_lines.append((ln, rest_col, rest))
        elif kw == "superpotential":
            sp_lines.append((ln, rest_col, rest))
        elif kw == "mark":
            for v in rest.split():
                if v not in vertices:
                    raise DslError(f"unknown vertex {v}", ln, col + body.index(v, rest_col) - col + 1)
                if v in marked:
                    raise DslError(f"vertex {v} marked twice", ln, col)
                marked.append(v)
        elif kw == "idempotent":
            m = re.match(rf"^\s*({_IDENT})\s*:(.*)$", rest)
            if not m:
                raise DslError("expected 'idempotent <name>: <vertices>'", ln, col)
            vs = tuple(m.group(2).split())
            for v in vs:
                if v not in vertices:
                    raise DslError(f"unknown vertex {v}", ln, col)
            named[m.group(1)] = vs
        else:
            raise DslError(f"unknown keyword {kw!r}", ln, col)
    if not vertices:
        raise DslError("no vertices")
    base = WeightedQuiverPresentation.build(vertices, arrows)
    rels = []
    for k, (ln, c0, txt) in enumerate(rel_lines):
        terms = parse_combination(txt, base, ln, c0)
        if not terms:
            raise DslError("relation is zero", ln, c0 + 1)
        poly = Polynomial.from_dict(dict(terms))
        try:
            base.relation_shape(poly, k)
        except PresentationError as exc:
            raise DslError(str(exc), ln, c0 + 1) from None
        rels.append(poly)
        locations[f"relation {k + 1}"] = ln
    pres = WeightedQuiverPresentation(base.vertices, base.arrows, tuple(rels), tuple(marked))
    sp = None
    if sp_lines:
        terms = []
        for ln, c0, txt in sp_lines:
            for w, c in parse_combination(txt, base, ln, c0):
                try:
                    s, t = base.word_ends(w) if w else (None, None)
                except PresentationError as exc:
                    raise DslError(str(exc), ln, c0 + 1) from None
                if not w or s != t:
                    raise DslError(f"superpotential word {' '.join(w)} is not a cycle", ln, c0 + 1)
                terms.append((w, c))
        sp = Superpotential.from_terms(pres, terms)
        locations["superpotential"] = sp_lines[0][0]
    return InputDocument(pres, sp, named, locations)


def to_text(doc: InputDocument) -> str:
    """Canonical text form; parse(to_text(d)) == d."""
    p = doc.presentation
    lines = [f"vertex {v}" for v in p.vertices]
    lines += [f"arrow {a.name}: {a.source} -> {a.target} weight {a.weight}" for a in p.arrows]
    lines += [f"relation {format_poly(r.terms)}" for r in p.relations]
    if doc.superpotential is not None and doc.superpotential.terms:
        lines.append(f"superpotential {format_poly(doc.superpotential.terms)}")
    if p.marked:
        lines.append("mark " + " ".join(p.marked))
    for name, vs in doc.idempotents.items():
        lines.append(f"idempotent {name}: " + " ".join(vs))
    return "\n".join(lines) + "\n"
