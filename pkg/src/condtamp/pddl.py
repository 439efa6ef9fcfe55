"""PDDL subset parser, grounder and STRIPS state semantics.

Supported requirements: ``:strips``, ``:typing``, ``:negative-preconditions``.
States are frozensets of ground atom indices (closed world).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

SUPPORTED_REQUIREMENTS = frozenset({":strips", ":typing", ":negative-preconditions"})
DEFAULT_GROUNDING_CAP = 10**6

State = frozenset  # frozenset[int]
Atom = tuple  # (predicate, arg0, arg1, ...)


class PDDLError(Exception):
    """Diagnostic carrying a source location.

    ``str(err)`` renders as ``file:line:col: error: message``.
    """

    def __init__(self, message: str, line: int = 0, col: int = 0, filename: str = "<string>"):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col
        self.filename = filename

    def __str__(self) -> str:
        return f"{self.filename}:{self.line}:{self.col}: error: {self.message}"


class PDDLSyntaxError(PDDLError):
    pass


class UnsupportedRequirement(PDDLError):
    pass


class UndeclaredSymbol(PDDLError):
    pass


class TypeMismatch(PDDLError):
    pass


class GroundingExplosion(Exception):
    pass


class NotApplicable(Exception):
    pass


# ---------------------------------------------------------------------------
# s-expressions


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    col: int


class SExpr(list):
    """A parenthesised list that remembers where it opened."""

    line = 0
    col = 0


def tokenize(text: str, filename: str = "<string>") -> Iterator[Token]:
    line, col = 1, 0
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 0
            i += 1
            continue
        col += 1
        if ch.isspace():
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield Token(ch, line, col)
            i += 1
        else:
            start, start_col = i, col
            while i < n and not text[i].isspace() and text[i] not in "();":
                i += 1
            col = start_col + (i - start) - 1
            yield Token(text[start:i].lower(), line, start_col)


def parse_sexpr(text: str, filename: str = "<string>") -> SExpr:
    stack: list[SExpr] = []
    result: Optional[SExpr] = None
    for tok in tokenize(text, filename):
        if tok.text == "(":
            node = SExpr()
            node.line, node.col = tok.line, tok.col
            stack.append(node)
        elif tok.text == ")":
            if not stack:
                raise PDDLSyntaxError("unbalanced ')'", tok.line, tok.col, filename)
            node = stack.pop()
            if stack:
                stack[-1].append(node)
            elif result is None:
                result = node
            else:
                raise PDDLSyntaxError("trailing expression after definition", tok.line, tok.col, filename)
        else:
            if not stack:
                raise PDDLSyntaxError(f"unexpected token {tok.text!r} outside parentheses", tok.line, tok.col, filename)
            stack[-1].append(tok)
    if stack:
        raise PDDLSyntaxError("unbalanced '(' (missing ')')", stack[-1].line, stack[-1].col, filename)
    if result is None:
        raise PDDLSyntaxError("empty input", 1, 1, filename)
    return result


def _loc(x) -> tuple[int, int]:
    return (x.line, x.col)


def _word(x, filename: str, what: str) -> Token:
    if not isinstance(x, Token):
        raise PDDLSyntaxError(f"expected {what}, found a list", *_loc(x), filename)
    return x


# ---------------------------------------------------------------------------
# domain / problem definitions


@dataclass(frozen=True)
class Literal:
    predicate: str
    args: tuple[str, ...]
    negated: bool = False

    def __str__(self) -> str:
        inner = "(" + " ".join((self.predicate,) + self.args) + ")"
        return f"(not {inner})" if self.negated else inner


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: tuple[tuple[str, str], ...]
    precon_pos: tuple[Literal, ...] = ()
    precon_neg: tuple[Literal, ...] = ()
    add: tuple[Literal, ...] = ()
    delete: tuple[Literal, ...] = ()


@dataclass(frozen=True)
class DomainDef:
    name: str
    requirements: tuple[str, ...] = ()
    types: tuple[tuple[str, str], ...] = ()  # (type, parent)
    constants: tuple[tuple[str, str], ...] = ()
    predicates: tuple[tuple[str, tuple[tuple[str, str], ...]], ...] = ()
    actions: tuple[ActionSchema, ...] = ()

    def type_parent(self) -> dict[str, str]:
        return dict(self.types)

    def is_subtype(self, t: str, ancestor: str) -> bool:
        if ancestor == "object" or t == ancestor:
            return True
        parents = self.type_parent()
        seen = set()
        while t in parents and t not in seen:
            seen.add(t)
            t = parents[t]
            if t == ancestor:
                return True
        return False

    def predicate_params(self) -> dict[str, tuple[tuple[str, str], ...]]:
        return dict(self.predicates)

    def action(self, name: str) -> ActionSchema:
        for a in self.actions:
            if a.name == name:
                return a
        raise KeyError(name)


@dataclass(frozen=True)
class ProblemDef:
    name: str
    domain_name: str
    objects: tuple[tuple[str, str], ...] = ()
    init: tuple[Atom, ...] = ()
    goal_pos: tuple[Atom, ...] = ()
    goal_neg: tuple[Atom, ...] = ()

    def with_objects(self, objects: Iterable[tuple[str, str]], init: Iterable[Atom] = ()) -> "ProblemDef":
        known = {o for o, _ in self.objects}
        extra = tuple((o, t) for o, t in objects if o not in known)
        more_init = tuple(a for a in init if a not in set(self.init))
        return ProblemDef(self.name, self.domain_name, self.objects + extra, self.init + more_init,
                          self.goal_pos, self.goal_neg)


def _typed_list(items: Sequence, filename: str, default: str = "object") -> list[tuple[str, str, Token]]:
    out: list[tuple[str, str, Token]] = []
    pending: list[Token] = []
    i = 0
    while i < len(items):
        tok = _word(items[i], filename, "name")
        if tok.text == "-":
            if i + 1 >= len(items):
                raise PDDLSyntaxError("type expected after '-'", tok.line, tok.col, filename)
            typ = _word(items[i + 1], filename, "type name")
            if typ.text.startswith("(") or not pending:
                raise PDDLSyntaxError("dangling type annotation", tok.line, tok.col, filename)
            out.extend((p.text, typ.text, p) for p in pending)
            pending = []
            i += 2
            continue
        pending.append(tok)
        i += 1
    out.extend((p.text, default, p) for p in pending)
    return out


def _parse_literal(expr, filename: str) -> Literal:
    if not isinstance(expr, list) or not expr:
        raise PDDLSyntaxError("expected a literal", *_loc(expr), filename)
    head = _word(expr[0], filename, "predicate name")
    if head.text == "not":
        if len(expr) != 2 or not isinstance(expr[1], list):
            raise PDDLSyntaxError("malformed negation", head.line, head.col, filename)
        inner = _parse_literal(expr[1], filename)
        if inner.negated:
            raise PDDLSyntaxError("double negation is not supported", head.line, head.col, filename)
        return Literal(inner.predicate, inner.args, True)
    if head.text in ("and", "or", "imply", "forall", "exists", "when", "="):
        raise PDDLSyntaxError(f"unsupported construct {head.text!r} in literal position",
                              head.line, head.col, filename)
    args = tuple(_word(a, filename, "argument").text for a in expr[1:])
    return Literal(head.text, args)


def _parse_conjunction(expr, filename: str) -> list[tuple[Literal, SExpr]]:
    if not isinstance(expr, list):
        raise PDDLSyntaxError("expected a condition", *_loc(expr), filename)
    if not expr:
        return []
    head = _word(expr[0], filename, "keyword")
    if head.text == "and":
        out = []
        for sub in expr[1:]:
            if isinstance(sub, list) and sub and isinstance(sub[0], Token) and sub[0].text == "and":
                out.extend(_parse_conjunction(sub, filename))
            else:
                out.append((_parse_literal(sub, filename), sub))
        return out
    return [(_parse_literal(expr, filename), expr)]


def _sections(root: SExpr, filename: str, kind: str) -> tuple[str, list]:
    if not root or _word(root[0], filename, "'define'").text != "define":
        raise PDDLSyntaxError("expected (define ...)", root.line, root.col, filename)
    if len(root) < 2 or not isinstance(root[1], list) or len(root[1]) != 2:
        raise PDDLSyntaxError(f"expected ({kind} <name>)", root.line, root.col, filename)
    hdr = root[1]
    if _word(hdr[0], filename, kind).text != kind:
        raise PDDLSyntaxError(f"expected ({kind} <name>)", hdr.line, hdr.col, filename)
    name = _word(hdr[1], filename, "name").text
    for sec in root[2:]:
        if not isinstance(sec, list) or not sec or not isinstance(sec[0], Token):
            raise PDDLSyntaxError("malformed section", *_loc(sec), filename)
    return name, list(root[2:])


def parse_domain(text: str, filename: str = "<domain>") -> DomainDef:
    root = parse_sexpr(text, filename)
    name, sections = _sections(root, filename, "domain")
    requirements: list[str] = []
    types: list[tuple[str, str]] = []
    constants: list[tuple[str, str]] = []
    predicates: list[tuple[str, tuple[tuple[str, str], ...]]] = []
    raw_actions: list[SExpr] = []
    type_tokens: list[tuple[str, str, Token]] = []
    const_tokens: list[tuple[str, str, Token]] = []

    for sec in sections:
        key = sec[0].text
        if key == ":requirements":
            for r in sec[1:]:
                r = _word(r, filename, "requirement")
                if r.text not in SUPPORTED_REQUIREMENTS:
                    raise UnsupportedRequirement(f"unsupported requirement {r.text}", r.line, r.col, filename)
                requirements.append(r.text)
        elif key == ":types":
            type_tokens = _typed_list(sec[1:], filename)
            types = [(t, p) for t, p, _ in type_tokens]
        elif key == ":constants":
            const_tokens = _typed_list(sec[1:], filename)
            constants = [(c, t) for c, t, _ in const_tokens]
        elif key == ":predicates":
            for p in sec[1:]:
                if not isinstance(p, list) or not p:
                    raise PDDLSyntaxError("malformed predicate declaration", *_loc(p), filename)
                pname = _word(p[0], filename, "predicate name").text
                params = tuple((v, t) for v, t, _ in _typed_list(p[1:], filename))
                if pname in dict(predicates):
                    raise PDDLSyntaxError(f"predicate {pname} declared twice", p.line, p.col, filename)
                predicates.append((pname, params))
        elif key == ":action":
            raw_actions.append(sec)
        else:
            raise PDDLSyntaxError(f"unknown domain section {key}", sec[0].line, sec[0].col, filename)

    declared_types = {"object"} | {t for t, _ in types}
    for t, parent, tok in type_tokens:
        if parent not in declared_types:
            raise UndeclaredSymbol(f"undeclared parent type {parent}", tok.line, tok.col, filename)
    partial = DomainDef(name, tuple(requirements), tuple(types), tuple(constants), tuple(predicates))
    for c, t, tok in const_tokens:
        if t not in declared_types:
            raise UndeclaredSymbol(f"undeclared type {t}", tok.line, tok.col, filename)
    for pname, params in predicates:
        for v, t in params:
            if t not in declared_types:
                raise UndeclaredSymbol(f"undeclared type {t} in predicate {pname}", root.line, root.col, filename)

    actions = []
    for sec in raw_actions:
        act = _parse_action(sec, partial, filename, declared_types)
        if any(a.name == act.name for a in actions):
            raise PDDLSyntaxError(f"action {act.name} declared twice", sec.line, sec.col, filename)
        actions.append(act)
    return DomainDef(name, tuple(requirements), tuple(types), tuple(constants), tuple(predicates), tuple(actions))


def _parse_action(sec: SExpr, dom: DomainDef, filename: str, declared_types: set[str]) -> ActionSchema:
    if len(sec) < 2:
        raise PDDLSyntaxError("action name expected", sec.line, sec.col, filename)
    name = _word(sec[1], filename, "action name").text
    params: list[tuple[str, str]] = []
    pre: list[tuple[Literal, SExpr]] = []
    eff: list[tuple[Literal, SExpr]] = []
    i = 2
    while i < len(sec):
        key = _word(sec[i], filename, "action keyword")
        if i + 1 >= len(sec):
            raise PDDLSyntaxError(f"value expected after {key.text}", key.line, key.col, filename)
        val = sec[i + 1]
        if key.text == ":parameters":
            if not isinstance(val, list):
                raise PDDLSyntaxError("parameter list expected", key.line, key.col, filename)
            for v, t, tok in _typed_list(val, filename):
                if not v.startswith("?"):
                    raise PDDLSyntaxError(f"parameter {v} must start with '?'", tok.line, tok.col, filename)
                if t not in declared_types:
                    raise UndeclaredSymbol(f"undeclared type {t}", tok.line, tok.col, filename)
                params.append((v, t))
        elif key.text == ":precondition":
            pre = _parse_conjunction(val, filename)
        elif key.text == ":effect":
            eff = _parse_conjunction(val, filename)
        else:
            raise PDDLSyntaxError(f"unknown action keyword {key.text}", key.line, key.col, filename)
        i += 2

    scope = dict(params)
    consts = dict(dom.constants)
    preds = dom.predicate_params()
    for lit, expr in pre + eff:
        if lit.predicate not in preds:
            raise UndeclaredSymbol(f"undeclared predicate {lit.predicate}", expr.line, expr.col, filename)
        decl = preds[lit.predicate]
        if len(decl) != len(lit.args):
            raise TypeMismatch(f"{lit.predicate} expects {len(decl)} arguments, got {len(lit.args)}",
                               expr.line, expr.col, filename)
        for arg, (_, want) in zip(lit.args, decl):
            if arg in scope:
                have = scope[arg]
            elif arg in consts:
                have = consts[arg]
            else:
                raise UndeclaredSymbol(f"undeclared symbol {arg} in action {name}", expr.line, expr.col, filename)
            if not dom.is_subtype(have, want):
                raise TypeMismatch(f"argument {arg} of type {have} is not a {want}", expr.line, expr.col, filename)
    add = tuple(lit for lit, _ in eff if not lit.negated)
    delete = tuple(Literal(lit.predicate, lit.args) for lit, _ in eff if lit.negated)
    clash = set(add) & set(delete)
    if clash:
        lit = sorted(clash, key=str)[0]
        raise PDDLSyntaxError(f"action {name} both adds and deletes {lit}", sec.line, sec.col, filename)
    return ActionSchema(
        name=name,
        params=tuple(params),
        precon_pos=tuple(lit for lit, _ in pre if not lit.negated),
        precon_neg=tuple(Literal(lit.predicate, lit.args) for lit, _ in pre if lit.negated),
        add=add,
        delete=delete,
    )


def parse_problem(text: str, domain: DomainDef, filename: str = "<problem>") -> ProblemDef:
    root = parse_sexpr(text, filename)
    name, sections = _sections(root, filename, "problem")
    domain_name = ""
    objects: list[tuple[str, str]] = list(domain.constants)
    init: list[Atom] = []
    goal: list[tuple[Literal, SExpr]] = []
    declared_types = {"object"} | {t for t, _ in domain.types}
    preds = domain.predicate_params()

    for sec in sections:
        key = sec[0].text
        if key == ":domain":
            domain_name = _word(sec[1], filename, "domain name").text
            if domain_name != domain.name:
                raise UndeclaredSymbol(f"problem refers to domain {domain_name}, loaded {domain.name}",
                                       sec.line, sec.col, filename)
        elif key == ":requirements":
            for r in sec[1:]:
                r = _word(r, filename, "requirement")
                if r.text not in SUPPORTED_REQUIREMENTS:
                    raise UnsupportedRequirement(f"unsupported requirement {r.text}", r.line, r.col, filename)
        elif key == ":objects":
            for o, t, tok in _typed_list(sec[1:], filename):
                if t not in declared_types:
                    raise TypeMismatch(f"object {o} has undeclared type {t}", tok.line, tok.col, filename)
                if o in dict(objects):
                    raise PDDLSyntaxError(f"object {o} declared twice", tok.line, tok.col, filename)
                objects.append((o, t))
        elif key == ":init":
            for expr in sec[1:]:
                lit = _parse_literal(expr, filename)
                if lit.negated:
                    raise PDDLSyntaxError("negative literal in :init", expr.line, expr.col, filename)
                init.append((lit, expr))
        elif key == ":goal":
            if len(sec) != 2:
                raise PDDLSyntaxError(":goal takes exactly one condition", sec.line, sec.col, filename)
            goal = _parse_conjunction(sec[1], filename)
        else:
            raise PDDLSyntaxError(f"unknown problem section {key}", sec[0].line, sec[0].col, filename)

    otype = dict(objects)
    for lit, expr in [(l, e) for l, e in init] + goal:
        if lit.predicate not in preds:
            raise UndeclaredSymbol(f"undeclared predicate {lit.predicate}", expr.line, expr.col, filename)
        decl = preds[lit.predicate]
        if len(decl) != len(lit.args):
            raise TypeMismatch(f"{lit.predicate} expects {len(decl)} arguments, got {len(lit.args)}",
                               expr.line, expr.col, filename)
        for arg, (_, want) in zip(lit.args, decl):
            if arg not in otype:
                raise UndeclaredSymbol(f"undeclared object {arg}", expr.line, expr.col, filename)
            if not domain.is_subtype(otype[arg], want):
                raise TypeMismatch(f"object {arg} of type {otype[arg]} is not a {want}", expr.line, expr.col, filename)

    init_atoms = []
    for lit, _ in init:
        atom = (lit.predicate,) + lit.args
        if atom not in init_atoms:
            init_atoms.append(atom)
    return ProblemDef(
        name=name,
        domain_name=domain_name or domain.name,
        objects=tuple(o for o in objects if o not in domain.constants),
        init=tuple(init_atoms),
        goal_pos=tuple((l.predicate,) + l.args for l, _ in goal if not l.negated),
        goal_neg=tuple((l.predicate,) + l.args for l, _ in goal if l.negated),
    )


# ---------------------------------------------------------------------------
# pretty printing


def _typed_str(items: Iterable[tuple[str, str]]) -> str:
    return " ".join(f"{v} - {t}" for v, t in items)


def _conj(lits: Sequence[Literal]) -> str:
    return "(and " + " ".join(str(l) for l in lits) + ")" if lits else "(and)"


def format_domain(d: DomainDef) -> str:
    lines = [f"(define (domain {d.name})"]
    if d.requirements:
        lines.append("  (:requirements " + " ".join(d.requirements) + ")")
    if d.types:
        lines.append("  (:types " + _typed_str(d.types) + ")")
    if d.constants:
        lines.append("  (:constants " + _typed_str(d.constants) + ")")
    if d.predicates:
        lines.append("  (:predicates")
        for name, params in d.predicates:
            inner = " ".join([name] + [f"{v} - {t}" for v, t in params])
            lines.append(f"    ({inner})")
        lines.append("  )")
    for a in d.actions:
        pre = list(a.precon_pos) + [Literal(l.predicate, l.args, True) for l in a.precon_neg]
        eff = list(a.add) + [Literal(l.predicate, l.args, True) for l in a.delete]
        lines.append(f"  (:action {a.name}")
        lines.append(f"    :parameters ({_typed_str(a.params)})")
        lines.append(f"    :precondition {_conj(pre)}")
        lines.append(f"    :effect {_conj(eff)})")
    lines.append(")")
    return "\n".join(lines) + "\n"


def format_problem(p: ProblemDef) -> str:
    def atom(a):
        return "(" + " ".join(a) + ")"

    goal = [atom(a) for a in p.goal_pos] + [f"(not {atom(a)})" for a in p.goal_neg]
    return "\n".join([
        f"(define (problem {p.name})",
        f"  (:domain {p.domain_name})",
        f"  (:objects {_typed_str(p.objects)})",
        "  (:init " + " ".join(atom(a) for a in p.init) + ")",
        "  (:goal (and " + " ".join(goal) + "))",
        ")",
    ]) + "\n"


# ---------------------------------------------------------------------------
# grounding


@dataclass(frozen=True)
class GroundAction:
    index: int
    schema: str
    args: tuple[str, ...]
    precon_pos: frozenset
    precon_neg: frozenset
    add: frozenset
    delete: frozenset

    @property
    def name(self) -> str:
        return "(" + " ".join((self.schema,) + self.args) + ")"

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class GroundTask:
    atoms: tuple[Atom, ...]
    actions: tuple[GroundAction, ...]
    init: State
    goal_pos: frozenset
    goal_neg: frozenset
    objects: tuple[tuple[str, str], ...] = ()
    static_true: frozenset = frozenset()  # static atoms (by name) true in init
    atom_index: dict = field(default_factory=dict, compare=False, repr=False)

    def index_of(self, atom: Atom) -> int:
        return self.atom_index[tuple(atom)]

    def state_of(self, atoms: Iterable[Atom]) -> State:
        return frozenset(self.atom_index[tuple(a)] for a in atoms)

    def atoms_of(self, state: State) -> list[Atom]:
        return [self.atoms[i] for i in sorted(state)]

    def action_named(self, name: str) -> GroundAction:
        for a in self.actions:
            if a.name == name:
                return a
        raise KeyError(name)

    def with_goal(self, goal_pos: Iterable[int], goal_neg: Iterable[int] = ()) -> "GroundTask":
        return GroundTask(self.atoms, self.actions, self.init, frozenset(goal_pos), frozenset(goal_neg),
                          self.objects, self.static_true, self.atom_index)

    def with_init(self, init: State) -> "GroundTask":
        return GroundTask(self.atoms, self.actions, frozenset(init), self.goal_pos, self.goal_neg,
                          self.objects, self.static_true, self.atom_index)


def static_predicates(domain: DomainDef) -> set[str]:
    fluent = {l.predicate for a in domain.actions for l in a.add + a.delete}
    return {name for name, _ in domain.predicates} - fluent


def _objects_by_type(domain: DomainDef, objects: Sequence[tuple[str, str]]) -> dict[str, list[str]]:
    all_types = {"object"} | {t for t, _ in domain.types}
    return {t: sorted(o for o, ot in objects if domain.is_subtype(ot, t)) for t in all_types}


def ground(domain: DomainDef, problem: ProblemDef, *, prune_static: bool = True,
           cap: int = DEFAULT_GROUNDING_CAP, prior: Optional[GroundTask] = None) -> GroundTask:
    """Instantiate every schema over all type-consistent bindings.

    Atoms and actions are ordered lexicographically. When ``prior`` is given
    (a grounding of the same domain over a subset of the objects), its atoms
    and actions keep their indices and new ones are appended, so states of
    ``prior`` remain valid states of the result.
    """
    objects = tuple(domain.constants) + tuple(o for o in problem.objects if o not in domain.constants)
    by_type = _objects_by_type(domain, objects)
    statics = static_predicates(domain) if prune_static else set()
    init_set = set(problem.init)
    goal_atoms = set(problem.goal_pos) | set(problem.goal_neg)

    def instantiate(params):
        pools = [by_type[t] for _, t in params]
        return itertools.product(*pools)

    atoms: set[Atom] = set()
    for pname, params in domain.predicates:
        for binding in instantiate(params):
            atom = (pname,) + binding
            if pname not in statics or atom in goal_atoms:
                atoms.add(atom)
    atoms |= {a for a in problem.init if a[0] not in statics}

    raw_actions = []
    count = 0
    for schema in sorted(domain.actions, key=lambda s: s.name):
        for binding in instantiate(schema.params):
            count += 1
            if count > cap:
                raise GroundingExplosion(f"more than {cap} ground actions")
            sub = dict(zip((v for v, _ in schema.params), binding))

            def g(lit: Literal) -> Atom:
                return (lit.predicate,) + tuple(sub.get(a, a) for a in lit.args)

            pos = [g(l) for l in schema.precon_pos]
            neg = [g(l) for l in schema.precon_neg]
            if statics:
                if any(a[0] in statics and a not in init_set for a in pos):
                    continue
                if any(a[0] in statics and a in init_set for a in neg):
                    continue
                pos = [a for a in pos if a[0] not in statics]
                neg = [a for a in neg if a[0] not in statics]
            raw_actions.append((schema.name, binding, pos, neg, [g(l) for l in schema.add],
                                [g(l) for l in schema.delete]))

    if prior is not None:
        order = list(prior.atoms) + sorted(atoms - set(prior.atoms))
    else:
        order = sorted(atoms)
    index = {a: i for i, a in enumerate(order)}

    built: dict[tuple, GroundAction] = {}
    for schema, binding, pos, neg, add, dele in raw_actions:
        built[(schema, binding)] = (schema, binding,
                                    frozenset(index[a] for a in pos), frozenset(index[a] for a in neg),
                                    frozenset(index[a] for a in add), frozenset(index[a] for a in dele))
    if prior is not None:
        keys = [(a.schema, a.args) for a in prior.actions if (a.schema, a.args) in built]
        keys += sorted(set(built) - set(keys))
    else:
        keys = sorted(built)
    actions = tuple(GroundAction(i, *built[k]) for i, k in enumerate(keys))
    init = frozenset(index[a] for a in problem.init if a in index)
    static_true = frozenset(a for a in problem.init if a[0] in statics)
    return GroundTask(
        atoms=tuple(order),
        actions=actions,
        init=init,
        goal_pos=frozenset(index[a] for a in problem.goal_pos),
        goal_neg=frozenset(index[a] for a in problem.goal_neg),
        objects=objects,
        static_true=static_true,
        atom_index=index,
    )


# ---------------------------------------------------------------------------
# semantics


def applicable(s: State, a: GroundAction) -> bool:
    return a.precon_pos <= s and not (a.precon_neg & s)


def apply(s: State, a: GroundAction) -> State:
    if not applicable(s, a):
        raise NotApplicable(a.name)
    return (s - a.delete) | a.add


def satisfies(s: State, goal_pos: frozenset, goal_neg: frozenset = frozenset()) -> bool:
    return goal_pos <= s and not (goal_neg & s)


def load_domain(path) -> DomainDef:
    with open(path, encoding="utf-8") as fh:
        return parse_domain(fh.read(), str(path))


def load_problem(path, domain: DomainDef) -> ProblemDef:
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read(), domain, str(path))
