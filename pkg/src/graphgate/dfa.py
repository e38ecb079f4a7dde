"""Compilation of policy expressions to table-driven DFAs.

Every compiled automaton reads bit-vector valuations over the
expression's atoms and stores its full transition function as a
precomputed table, so stepping is a single indexed lookup. Violation
states are absorbing; pending states mark an unfulfilled future
obligation at end of input.

State counts are fixed per form: forbidden 2; implication-future and
until 3; bounded response k+2; a chain with n obligations n+2 (n+1
progress states plus the violation state); boolean combinations take the
full |Q_left| x |Q_right| product.

`trace_oracle` is a separate direct evaluator of the finite-trace
semantics, used by the test suite as an independent reference for the
compiled automata. Keep the two implementations decoupled.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Collection, Optional, Sequence

from .policy import (
    And,
    Atom,
    Bounded,
    Chain,
    Forbidden,
    ImplFuture,
    Or,
    PolicyExpr,
    Until,
    atoms_of,
)

ATOM_LIMIT = 30


@dataclass(frozen=True)
class Dfa:
    atoms: tuple[Atom, ...]
    state_count: int
    initial: int
    transitions: tuple[int, ...]  # flat: state * valuation_count + valuation
    violating: frozenset[int]
    pending: frozenset[int]
    satisfied_absorbing: frozenset[int]

    @property
    def valuation_count(self) -> int:
        return 1 << len(self.atoms)


def step(dfa: Dfa, state: int, valuation: int) -> int:
    """Advance one step: pure table lookup."""
    if not 0 <= state < dfa.state_count:
        raise ValueError(f"state {state} out of range [0, {dfa.state_count})")
    return dfa.transitions[state * dfa.valuation_count + valuation]


def valuation_of_atoms(atoms: Sequence[Atom], true_atoms: Collection[Atom]) -> int:
    """Bitmask with bit i set iff atoms[i] is in true_atoms."""
    v = 0
    for i, atom in enumerate(atoms):
        if atom in true_atoms:
            v |= 1 << i
    return v


def _build(
    atoms: Sequence[Atom],
    state_count: int,
    fn: Callable[[int, int], int],
    violating: Collection[int],
    pending: Collection[int],
    satisfied: Collection[int] = (),
) -> Dfa:
    if len(atoms) > ATOM_LIMIT:
        raise ValueError(f"expression uses {len(atoms)} atoms; limit is {ATOM_LIMIT}")
    width = 1 << len(atoms)
    table = tuple(fn(s, v) for s in range(state_count) for v in range(width))
    return Dfa(
        atoms=tuple(atoms),
        state_count=state_count,
        initial=0,
        transitions=table,
        violating=frozenset(violating),
        pending=frozenset(pending),
        satisfied_absorbing=frozenset(satisfied),
    )


def _compile_forbidden(expr: Forbidden) -> Dfa:
    # 0 safe, 1 violating
    def fn(s: int, v: int) -> int:
        if s == 1:
            return 1
        return 1 if v & 1 else 0

    return _build([expr.atom], 2, fn, violating={1}, pending=())


def _compile_progression(trigger: Atom, obligations: Sequence[Atom]) -> Dfa:
    # 0 idle, 1..n awaiting obligation i, n+1 violating. A valuation may
    # discharge several consecutive obligations at once; the trigger step
    # itself may discharge leading obligations. While awaiting, a trigger
    # recurrence without the awaited obligation violates.
    atoms: list[Atom] = []
    for a in [trigger, *obligations]:
        if a not in atoms:
            atoms.append(a)
    trig_ix = atoms.index(trigger)
    ob_ix = [atoms.index(o) for o in obligations]
    n = len(obligations)
    viol = n + 1

    def cascade(pos: int, v: int) -> int:
        while pos <= n and (v >> ob_ix[pos - 1]) & 1:
            pos += 1
        return 0 if pos > n else pos

    def fn(s: int, v: int) -> int:
        if s == viol:
            return viol
        if s == 0:
            if (v >> trig_ix) & 1:
                return cascade(1, v)
            return 0
        if (v >> ob_ix[s - 1]) & 1:
            return cascade(s, v)
        if (v >> trig_ix) & 1:
            return viol
        return s

    return _build(atoms, n + 2, fn, violating={viol}, pending=set(range(1, n + 1)))


def _compile_until(expr: Until) -> Dfa:
    # 0 waiting, 1 satisfied (absorbing), 2 violating
    atoms: list[Atom] = [expr.holder]
    if expr.release not in atoms:
        atoms.append(expr.release)
    hold_ix = 0
    rel_ix = atoms.index(expr.release)

    def fn(s: int, v: int) -> int:
        if s in (1, 2):
            return s
        if (v >> rel_ix) & 1:
            return 1
        if (v >> hold_ix) & 1:
            return 0
        return 2

    return _build(atoms, 3, fn, violating={2}, pending={0}, satisfied={1})


def _compile_bounded(expr: Bounded) -> Dfa:
    # 0 idle; state i in 1..k means i-1 obligation-free steps have passed
    # since the trigger; the k-th such step violates. k+1 violating.
    atoms: list[Atom] = [expr.trigger]
    if expr.obligation not in atoms:
        atoms.append(expr.obligation)
    trig_ix = 0
    ob_ix = atoms.index(expr.obligation)
    k = expr.k
    viol = k + 1

    def fn(s: int, v: int) -> int:
        if s == viol:
            return viol
        ob = (v >> ob_ix) & 1
        if s == 0:
            if (v >> trig_ix) & 1 and not ob:
                return 1
            return 0
        if ob:
            return 0
        return s + 1  # state k steps to viol = k+1

    return _build(atoms, k + 2, fn, violating={viol}, pending=set(range(1, k + 1)))


def product(left: Dfa, right: Dfa, mode: str) -> Dfa:
    """Full product automaton over the union of both atom alphabets.

    AND violates when either side violates; OR only when both do. OR
    stops pending once one side is satisfied outright.
    """
    if mode not in ("AND", "OR"):
        raise ValueError(f"mode must be 'AND' or 'OR', not {mode!r}")
    atoms = list(left.atoms) + [a for a in right.atoms if a not in left.atoms]
    if len(atoms) > ATOM_LIMIT:
        raise ValueError(f"combined expression uses {len(atoms)} atoms; limit is {ATOM_LIMIT}")
    width = 1 << len(atoms)
    left_mask = (1 << len(left.atoms)) - 1
    right_src = [atoms.index(a) for a in right.atoms]

    def proj_right(v: int) -> int:
        out = 0
        for k, s in enumerate(right_src):
            out |= ((v >> s) & 1) << k
        return out

    nr = right.state_count
    count = left.state_count * nr
    table = []
    for sl in range(left.state_count):
        for sr in range(nr):
            for v in range(width):
                nl = left.transitions[sl * left.valuation_count + (v & left_mask)]
                nr2 = right.transitions[sr * right.valuation_count + proj_right(v)]
                table.append(nl * nr + nr2)

    violating: set[int] = set()
    pending: set[int] = set()
    satisfied: set[int] = set()
    for sl in range(left.state_count):
        for sr in range(nr):
            ix = sl * nr + sr
            lv, rv = sl in left.violating, sr in right.violating
            lp, rp = sl in left.pending, sr in right.pending
            ls, rs = sl in left.satisfied_absorbing, sr in right.satisfied_absorbing
            if mode == "AND":
                if lv or rv:
                    violating.add(ix)
                elif lp or rp:
                    pending.add(ix)
                if ls and rs:
                    satisfied.add(ix)
            else:
                if lv and rv:
                    violating.add(ix)
                elif (lp and rp) or (lp and rv) or (lv and rp):
                    pending.add(ix)
                if (ls or rs) and ix not in violating:
                    satisfied.add(ix)

    # Violating pairs would otherwise keep tracking the non-violated side;
    # freeze them so violation states are absorbing per state, not just as
    # a set. Once violated nothing downstream distinguishes the pairs.
    for ix in violating:
        for v in range(width):
            table[ix * width + v] = ix

    return Dfa(
        atoms=tuple(atoms),
        state_count=count,
        initial=left.initial * nr + right.initial,
        transitions=tuple(table),
        violating=frozenset(violating),
        pending=frozenset(pending),
        satisfied_absorbing=frozenset(satisfied),
    )


def compile_expr(expr: PolicyExpr) -> Dfa:
    """Compile one policy expression into its monitor DFA."""
    if len(atoms_of(expr)) > ATOM_LIMIT:
        raise ValueError(f"expression uses {len(atoms_of(expr))} atoms; limit is {ATOM_LIMIT}")
    if isinstance(expr, Forbidden):
        return _compile_forbidden(expr)
    if isinstance(expr, ImplFuture):
        return _compile_progression(expr.trigger, [expr.obligation])
    if isinstance(expr, Chain):
        return _compile_progression(expr.trigger, expr.obligations)
    if isinstance(expr, Until):
        return _compile_until(expr)
    if isinstance(expr, Bounded):
        return _compile_bounded(expr)
    if isinstance(expr, And):
        return product(compile_expr(expr.left), compile_expr(expr.right), "AND")
    if isinstance(expr, Or):
        return product(compile_expr(expr.left), compile_expr(expr.right), "OR")
    raise TypeError(f"not a policy expression: {expr!r}")


class VerdictStatus(enum.Enum):
    VIOLATED = "VIOLATED"
    PENDING = "PENDING"
    SATISFIED = "SATISFIED"


@dataclass(frozen=True)
class TraceVerdict:
    status: VerdictStatus
    index: Optional[int] = None


_SATISFIED = TraceVerdict(VerdictStatus.SATISFIED)
_PENDING = TraceVerdict(VerdictStatus.PENDING)


def _violated(i: int) -> TraceVerdict:
    return TraceVerdict(VerdictStatus.VIOLATED, i)


def run(dfa: Dfa, trace: Sequence[Collection[Atom]]) -> TraceVerdict:
    """Run a compiled DFA over a trace of atom sets."""
    state = dfa.initial
    for i, true_atoms in enumerate(trace):
        state = step(dfa, state, valuation_of_atoms(dfa.atoms, true_atoms))
        if state in dfa.violating:
            return _violated(i)
    if state in dfa.pending:
        return _PENDING
    return _SATISFIED


def _oracle_progression(
    trigger: Atom, obligations: Sequence[Atom], trace: Sequence[Collection[Atom]], i: int
) -> TraceVerdict:
    # Scan for a trigger while idle.
    while i < len(trace) and trigger not in trace[i]:
        i += 1
    if i == len(trace):
        return _SATISFIED
    pos = 0
    while pos < len(obligations) and obligations[pos] in trace[i]:
        pos += 1
    if pos == len(obligations):
        return _oracle_progression(trigger, obligations, trace, i + 1)
    return _oracle_await(trigger, obligations, pos, trace, i + 1)


def _oracle_await(
    trigger: Atom,
    obligations: Sequence[Atom],
    pos: int,
    trace: Sequence[Collection[Atom]],
    j: int,
) -> TraceVerdict:
    if j == len(trace):
        return _PENDING
    val = trace[j]
    if obligations[pos] in val:
        while pos < len(obligations) and obligations[pos] in val:
            pos += 1
        if pos == len(obligations):
            return _oracle_progression(trigger, obligations, trace, j + 1)
        return _oracle_await(trigger, obligations, pos, trace, j + 1)
    if trigger in val:
        return _violated(j)
    return _oracle_await(trigger, obligations, pos, trace, j + 1)


def trace_oracle(expr: PolicyExpr, trace: Sequence[Collection[Atom]]) -> TraceVerdict:
    """Direct finite-trace evaluation of an expression, without any DFA.

    Reference semantics for equivalence testing against compiled
    automata; not used on any production code path.
    """
    if isinstance(expr, Forbidden):
        for i, val in enumerate(trace):
            if expr.atom in val:
                return _violated(i)
        return _SATISFIED

    if isinstance(expr, ImplFuture):
        return _oracle_progression(expr.trigger, [expr.obligation], trace, 0)

    if isinstance(expr, Chain):
        return _oracle_progression(expr.trigger, list(expr.obligations), trace, 0)

    if isinstance(expr, Until):
        for i, val in enumerate(trace):
            if expr.release in val:
                return _SATISFIED
            if expr.holder not in val:
                return _violated(i)
        return _PENDING

    if isinstance(expr, Bounded):
        deadline: Optional[int] = None
        for i, val in enumerate(trace):
            if expr.obligation in val:
                deadline = None
                continue
            if deadline is not None and i >= deadline:
                return _violated(i)
            if expr.trigger in val and deadline is None:
                deadline = i + expr.k
        return _PENDING if deadline is not None else _SATISFIED

    if isinstance(expr, And):
        lv = trace_oracle(expr.left, trace)
        rv = trace_oracle(expr.right, trace)
        indices = [v.index for v in (lv, rv) if v.status is VerdictStatus.VIOLATED]
        if indices:
            return _violated(min(indices))  # type: ignore[type-var]
        if VerdictStatus.PENDING in (lv.status, rv.status):
            return _PENDING
        return _SATISFIED

    if isinstance(expr, Or):
        lv = trace_oracle(expr.left, trace)
        rv = trace_oracle(expr.right, trace)
        if lv.status is VerdictStatus.VIOLATED and rv.status is VerdictStatus.VIOLATED:
            return _violated(max(lv.index, rv.index))  # type: ignore[arg-type]
        statuses = {lv.status, rv.status}
        if statuses in ({VerdictStatus.PENDING}, {VerdictStatus.PENDING, VerdictStatus.VIOLATED}):
            return _PENDING
        return _SATISFIED

    raise TypeError(f"not a policy expression: {expr!r}")
