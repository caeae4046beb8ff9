"""Plain-text files for games and forms.

One directive per line; ``#`` starts a comment; blank lines are ignored.
A plurality game:

    form plurality
    candidates a b c
    tiebreak lex
    initial_scores 1 0 0
    voter w=1 actions=* prefs = a > b > c
    voter w=1 actions=* prefs = c > b > a

and a tabular one:

    form tabular
    candidates a b c d
    voter actions=c,d prefs = c > d > b > a
    voter actions=b,c prefs = b > c > a > d
    voter actions=a,b,d prefs = a > b > c > d
    map c b a -> a
    map c b b -> b
    ...

``form`` defaults to plurality, ``tiebreak`` (lex or random) to lex,
``initial_scores`` to zeros, ``w`` to 1 and ``actions`` to ``*`` (every
candidate). A ``utilities = 9 4 1`` line directly after a voter line
attaches cardinal utilities to that voter; values are ints, decimals, or
fractions like 3/2, all kept exact. ``map`` lines give a tabular form's
outcome per action profile (several winners for a tie) and must cover the
whole action space. Omitting every ``prefs`` yields a bare form instead of
a game; ``prefs`` and ``utilities`` are each all-or-nothing across voters.

``loads``/``dumps`` are inverse up to formatting: ``dumps`` writes a
canonical file, and ``loads(dumps(x)) == x`` for any game or form.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence, Union

from .core import (
    Game,
    GameSpecError,
    IvoteError,
    PluralityForm,
    PreferenceOrder,
    TabularForm,
    TieBreak,
    UtilityVector,
)

GameOrForm = Union[Game, PluralityForm, TabularForm]


class GameFileError(IvoteError, ValueError):
    """A game file failed to parse or describes an invalid game."""


def _fail(lineno: Optional[int], message: str):
    where = f"line {lineno}: " if lineno is not None else ""
    raise GameFileError(where + message)


def _number(token: str, lineno: int):
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        _fail(lineno, f"bad number {token!r}")


class _Voter:
    __slots__ = ("weight", "actions", "prefs", "utilities", "lineno")

    def __init__(self, weight, actions, prefs, lineno):
        self.weight = weight
        self.actions = actions  # None for "*", else tuple of names
        self.prefs = prefs  # None or tuple of names, best first
        self.utilities = None
        self.lineno = lineno


def _parse_voter_line(rest: str, lineno: int) -> _Voter:
    weight = None
    actions = None
    prefs = None
    tokens = rest.split()
    head = tokens
    for k, token in enumerate(tokens):
        if token == "prefs" or token.startswith("prefs="):
            head = tokens[:k]
            tail = " ".join(tokens[k:])[len("prefs"):].strip()
            if not tail.startswith("="):
                _fail(lineno, "expected '=' after 'prefs'")
            names = [s.strip() for s in tail[1:].split(">")]
            if any(not s for s in names):
                _fail(lineno, "empty name in preference ranking")
            prefs = tuple(names)
            break
    for token in head:
        key, sep, value = token.partition("=")
        if not sep:
            _fail(lineno, f"expected key=value before 'prefs', got {token!r}")
        if key == "w":
            try:
                weight = int(value)
            except ValueError:
                _fail(lineno, f"bad weight {value!r}")
        elif key == "actions":
            if value != "*":
                names = tuple(s for s in value.split(",") if s)
                if not names:
                    _fail(lineno, "empty action list")
                actions = names
        else:
            _fail(lineno, f"unknown voter option {key!r}")
    return _Voter(weight, actions, prefs, lineno)


def loads(text: str) -> GameOrForm:
    """Parse a game file; returns a Game, or a bare form if no prefs."""
    form_kind = None
    candidates = None
    tiebreak = None
    scores = None
    voters = []
    maps = []  # (labels, winners, lineno)
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 1)
        word = parts[0]
        rest = parts[1].strip() if len(parts) > 1 else ""
        if word in ("form", "candidates", "tiebreak", "initial_scores"):
            if word in seen:
                _fail(lineno, f"duplicate {word!r} line")
            seen.add(word)
        if word == "form":
            if rest not in ("plurality", "tabular"):
                _fail(lineno, f"unknown form kind {rest!r}")
            form_kind = rest
        elif word == "candidates":
            candidates = tuple(rest.split())
            if not candidates:
                _fail(lineno, "no candidate names given")
        elif word == "tiebreak":
            if rest == "lex":
                tiebreak = TieBreak.LEXICOGRAPHIC
            elif rest == "random":
                tiebreak = TieBreak.RANDOMIZED
            else:
                _fail(lineno, f"unknown tiebreak {rest!r} (use lex or random)")
        elif word == "initial_scores":
            try:
                scores = tuple(int(s) for s in rest.split())
            except ValueError:
                _fail(lineno, f"initial scores must be integers: {rest!r}")
        elif word == "voter":
            voters.append(_parse_voter_line(rest, lineno))
        elif word == "utilities":
            if not voters:
                _fail(lineno, "utilities line before any voter line")
            if voters[-1].utilities is not None:
                _fail(lineno, "voter already has utilities")
            body = rest
            if body.startswith("="):
                body = body[1:]
            values = tuple(_number(t, lineno) for t in body.split())
            if not values:
                _fail(lineno, "empty utilities line")
            voters[-1].utilities = values
        elif word == "map":
            left, sep, right = rest.partition("->")
            if not sep:
                _fail(lineno, "map line needs '->'")
            labels = tuple(left.split())
            winners = tuple(s for chunk in right.split() for s in chunk.split(","))
            if not labels or not winners:
                _fail(lineno, "map line needs actions and winners")
            maps.append((labels, winners, lineno))
        else:
            _fail(lineno, f"unknown directive {word!r}")
    if candidates is None:
        _fail(None, "missing 'candidates' line")
    if not voters:
        _fail(None, "no voter lines")
    if form_kind is None:
        form_kind = "tabular" if maps else "plurality"
    try:
        form = _build_form(form_kind, candidates, tiebreak, scores, voters, maps)
    except GameSpecError as e:
        raise GameFileError(str(e)) from e
    return _attach_game(form, candidates, voters)


def _build_form(form_kind, candidates, tiebreak, scores, voters, maps):
    cand_index = {s: c for c, s in enumerate(candidates)}
    if form_kind == "plurality":
        if maps:
            _fail(maps[0][2], "map lines require 'form tabular'")
        action_sets = None
        if any(v.actions is not None for v in voters):
            rows = []
            for v in voters:
                if v.actions is None:
                    rows.append(tuple(range(len(candidates))))
                else:
                    rows.append(_candidate_row(v.actions, cand_index, v.lineno))
            action_sets = tuple(rows)
        return PluralityForm(
            candidates,
            tuple(1 if v.weight is None else v.weight for v in voters),
            scores,
            tiebreak if tiebreak is not None else TieBreak.LEXICOGRAPHIC,
            action_sets,
        )
    # tabular
    if tiebreak is not None or scores is not None:
        _fail(None, "tiebreak/initial_scores apply to plurality forms only")
    for v in voters:
        if v.weight is not None:
            _fail(v.lineno, "tabular voters take no weight")
        if v.actions is None:
            _fail(v.lineno, "tabular voters need an explicit actions= list")
    labels = tuple(v.actions for v in voters)
    label_index = [{s: a for a, s in enumerate(row)} for row in labels]
    table = {}
    for parts, winners, lineno in maps:
        if len(parts) != len(voters):
            _fail(lineno, f"map line needs one action per voter ({len(voters)})")
        profile = []
        for i, s in enumerate(parts):
            if s not in label_index[i]:
                _fail(lineno, f"voter {i + 1} has no action {s!r}")
            profile.append(label_index[i][s])
        profile = tuple(profile)
        if profile in table:
            _fail(lineno, f"duplicate map line for {parts!r}")
        out = set()
        for s in winners:
            if s not in cand_index:
                _fail(lineno, f"unknown candidate {s!r}")
            out.add(cand_index[s])
        table[profile] = out
    return TabularForm(candidates, labels, table)


def _candidate_row(names: Sequence[str], cand_index, lineno) -> tuple:
    row = []
    for s in names:
        if s not in cand_index:
            _fail(lineno, f"unknown candidate {s!r} in action list")
        row.append(cand_index[s])
    return tuple(row)


def _attach_game(form, candidates, voters) -> GameOrForm:
    cand_index = {s: c for c, s in enumerate(candidates)}
    with_prefs = [v for v in voters if v.prefs is not None]
    if not with_prefs:
        for v in voters:
            if v.utilities is not None:
                _fail(v.lineno, "utilities require preference orders")
        return form
    if len(with_prefs) != len(voters):
        missing = next(v for v in voters if v.prefs is None)
        _fail(missing.lineno, "either every voter has prefs or none does")
    prefs = []
    for v in voters:
        ranking = []
        for s in v.prefs:
            if s not in cand_index:
                _fail(v.lineno, f"unknown candidate {s!r} in prefs")
            ranking.append(cand_index[s])
        try:
            prefs.append(PreferenceOrder(ranking))
        except GameSpecError as e:
            _fail(v.lineno, str(e))
    utilities = None
    with_utils = [v for v in voters if v.utilities is not None]
    if with_utils:
        if len(with_utils) != len(voters):
            missing = next(v for v in voters if v.utilities is None)
            _fail(missing.lineno, "either every voter has utilities or none does")
        utilities = []
        for v in voters:
            if len(v.utilities) != len(candidates):
                _fail(v.lineno, "need one utility value per candidate")
            try:
                utilities.append(UtilityVector(v.utilities))
            except GameSpecError as e:
                _fail(v.lineno, str(e))
    try:
        return Game(form, prefs, utilities)
    except GameSpecError as e:
        raise GameFileError(str(e)) from e


def load(path: str) -> GameOrForm:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        return loads(text)
    except GameFileError as e:
        raise GameFileError(f"{path}: {e}") from None


def load_game(path: str) -> Game:
    """Like ``load`` but requires preference orders."""
    got = load(path)
    if not isinstance(got, Game):
        raise GameFileError(f"{path}: file holds a bare form (no prefs lines)")
    return got


def _ranking_names(names, order: PreferenceOrder) -> str:
    return " > ".join(names[c] for c in order.ranking)


def dumps(obj: GameOrForm) -> str:
    """Canonical text for a game or bare form; ``loads`` inverts it."""
    if isinstance(obj, Game):
        form, prefs, utilities = obj.form, obj.prefs, obj.utilities
    else:
        form, prefs, utilities = obj, None, None
    lines = [f"form {form.kind}", "candidates " + " ".join(form.names)]
    if form.kind == "plurality":
        lines.append(f"tiebreak {form.tiebreak.value}")
        lines.append(
            "initial_scores " + " ".join(str(s) for s in form.initial_scores)
        )
        full = tuple(range(form.m))
        for i in range(form.n):
            row = form.action_sets[i]
            spec = "*" if row == full else ",".join(form.names[c] for c in row)
            line = f"voter w={form.weights[i]} actions={spec}"
            if prefs is not None:
                line += f" prefs = {_ranking_names(form.names, prefs[i])}"
            lines.append(line)
            if utilities is not None:
                lines.append(
                    "utilities = " + " ".join(str(v) for v in utilities[i].values)
                )
    else:
        for i in range(form.n):
            line = "voter actions=" + ",".join(form.action_labels[i])
            if prefs is not None:
                line += f" prefs = {_ranking_names(form.names, prefs[i])}"
            lines.append(line)
            if utilities is not None:
                lines.append(
                    "utilities = " + " ".join(str(v) for v in utilities[i].values)
                )
        for profile in sorted(form.table):
            parts = " ".join(
                form.action_labels[i][a] for i, a in enumerate(profile)
            )
            winners = " ".join(form.names[c] for c in sorted(form.table[profile]))
            lines.append(f"map {parts} -> {winners}")
    return "\n".join(lines) + "\n"


def dump(obj: GameOrForm, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))
