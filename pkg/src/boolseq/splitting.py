"""Forking execution: cyclic interleaving with thread splitting.

A sequence may contain ``split:p`` and ``reply:p`` instructions.  A split
forks the current branch into two, one per instantiation of the Boolean
parameter p; a reply returns p's instantiated value.  The intended
behaviour of such a sequence is the cyclic interleaving of the singleton
thread vector holding its extracted thread: at each stage the front thread
acts and rotates to the back, a split enqueues both instantiated branches,
and a deadlocked branch poisons the final result only after all other
branches have finished.

``run_splitting`` is an equivalent queue-of-program-counters executor over
a shared register file; the equivalence with the algebraic route is
asserted by the test suite, not assumed.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .instr import (
    AuxReg,
    InReg,
    InstructionSequence,
    Jump,
    NegTest,
    Plain,
    PosTest,
    RegisterOp,
    ReplyOp,
    SplitOp,
    Term,
    classify,
    render_focus,
)
from .services import (
    Deadlocked,
    Divergent,
    RegisterFile,
    RunOutcome,
    Terminated,
    _bool_step,
)
from .threads import DEAD, STOP, Dead, PostCond, Stop, Tau, Thread

ThreadVector = tuple[Thread, ...]


@dataclass
class BranchState:
    """One interleaved branch: its program counter and parameter valuation."""

    pc: int
    valuation: dict[int, bool] = field(default_factory=dict)


def instantiate(param: int, value: bool, t: Thread) -> Thread:
    """Instantiate Boolean parameter ``param`` to ``value`` in ``t``.

    A split on the same parameter becomes deadlock (re-splitting an
    instantiated parameter is an error state); a reply on it becomes an
    internal step into the selected branch; everything else is traversed
    homomorphically.
    """
    if isinstance(t, (Stop, Dead)):
        return t
    if isinstance(t, Tau):
        return Tau(instantiate(param, value, t.next))
    a = t.action
    if isinstance(a, SplitOp) and a.param == param:
        return DEAD
    if isinstance(a, ReplyOp) and a.param == param:
        chosen = t.on_true if value else t.on_false
        return Tau(instantiate(param, value, chosen))
    return PostCond(a, instantiate(param, value, t.on_true), instantiate(param, value, t.on_false))


def _deadlock_at_termination(t: Thread) -> Thread:
    """Turn every successful termination in ``t`` into deadlock."""
    if isinstance(t, Stop):
        return DEAD
    if isinstance(t, Dead):
        return t
    if isinstance(t, Tau):
        return Tau(_deadlock_at_termination(t.next))
    return PostCond(
        t.action,
        _deadlock_at_termination(t.on_true),
        _deadlock_at_termination(t.on_false),
    )


def csi(vector: ThreadVector) -> Thread:
    """Cyclic interleaving of a thread vector, with thread splitting.

    The front thread acts and its continuation goes to the back.  An empty
    vector terminates; a finished front thread is dropped; a deadlocked
    front thread (including a reply on an uninstantiated parameter) wraps
    the rest in deadlock-at-termination; a split enqueues the two
    instantiated branches, true instance first, behind an internal step.
    """
    if not vector:
        return STOP
    head, rest = vector[0], vector[1:]
    if isinstance(head, Stop):
        return csi(rest)
    if isinstance(head, Dead):
        return _deadlock_at_termination(csi(rest))
    if isinstance(head, Tau):
        return Tau(csi(rest + (head.next,)))
    a = head.action
    if isinstance(a, SplitOp):
        true_branch = instantiate(a.param, True, head.on_true)
        false_branch = instantiate(a.param, False, head.on_false)
        return Tau(csi(rest + (true_branch, false_branch)))
    if isinstance(a, ReplyOp):
        return _deadlock_at_termination(csi(rest))
    return PostCond(a, csi(rest + (head.on_true,)), csi(rest + (head.on_false,)))


def _split_count(x: InstructionSequence) -> int:
    return sum(
        1
        for u in x.items
        if isinstance(u, (Plain, PosTest, NegTest)) and isinstance(u.basic, SplitOp)
    )


def run_splitting(x: InstructionSequence, inputs: tuple[bool, ...] | list[bool]) -> RunOutcome:
    """Execute a fork/reply sequence by round-robin over branch states.

    Each turn the front branch silently resolves jumps, terminations, and
    branch deaths (invalid jump, running off the end, a split on an already
    instantiated parameter, a reply on an uninstantiated one), then performs
    at most one action - a register transaction, a split enqueueing the two
    instantiated children (true first), or an internal reply step - and
    rotates to the back.  A dying branch raises a global dead flag but the
    others continue.  The result is divergent if any action touched an input
    register beyond the given arity, else deadlocked if the flag is set,
    else the final registers.
    """
    outcome, _ = run_splitting_with_steps(x, inputs)
    return outcome


def run_splitting_with_steps(
    x: InstructionSequence, inputs: tuple[bool, ...] | list[bool]
) -> tuple[RunOutcome, int]:
    """Like ``run_splitting`` but also reports the number of action turns."""
    profile = classify(x)
    if not profile.is_sisbr:
        raise ValueError("run_splitting requires input reads, out.set:T, split, and reply only")
    inputs = tuple(inputs)
    k = len(x)
    n = len(inputs)
    in_regs = list(inputs)
    out_reg = False
    dead_flag = False

    queue: deque[BranchState] = deque([BranchState(1, {})])
    budget = (2 ** _split_count(x)) * k + k
    steps = 0

    while queue:
        branch = queue.popleft()
        # Silent resolution: no action happens, so no scheduling turn is spent.
        alive = True
        action_instr = None
        while True:
            if branch.pc > k:
                dead_flag = True
                alive = False
                break
            u = x.items[branch.pc - 1]
            if isinstance(u, Term):
                alive = False
                break
            if isinstance(u, Jump):
                if u.distance == 0 or branch.pc + u.distance > k:
                    dead_flag = True
                    alive = False
                    break
                branch.pc += u.distance
                continue
            basic = u.basic
            if isinstance(basic, SplitOp) and basic.param in branch.valuation:
                dead_flag = True
                alive = False
                break
            if isinstance(basic, ReplyOp) and basic.param not in branch.valuation:
                dead_flag = True
                alive = False
                break
            action_instr = u
            break
        if not alive:
            continue

        steps += 1
        if steps > budget:
            raise RuntimeError("splitting executor exceeded its step budget")

        u = action_instr
        basic = u.basic
        pc = branch.pc
        if isinstance(basic, RegisterOp):
            f = basic.focus
            if isinstance(f, InReg):
                if f.index > n:
                    return Divergent(f"unserved focus {render_focus(f)}"), steps
                value, reply = _bool_step(in_regs[f.index - 1], basic.method)
                in_regs[f.index - 1] = value
            elif isinstance(f, AuxReg):  # unreachable under the precondition
                raise ValueError("auxiliary register in splitting executor")
            else:
                value, reply = _bool_step(out_reg, basic.method)
                out_reg = value
            branch.pc = pc + _advance(u, reply)
            queue.append(branch)
        elif isinstance(basic, SplitOp):
            if isinstance(u, Plain):
                true_pc, false_pc = pc + 1, pc + 1
            elif isinstance(u, PosTest):
                true_pc, false_pc = pc + 1, pc + 2
            else:
                true_pc, false_pc = pc + 2, pc + 1
            true_val = dict(branch.valuation)
            true_val[basic.param] = True
            false_val = dict(branch.valuation)
            false_val[basic.param] = False
            queue.append(BranchState(true_pc, true_val))
            queue.append(BranchState(false_pc, false_val))
        else:  # ReplyOp with an instantiated parameter: internal step
            reply = branch.valuation[basic.param]
            branch.pc = pc + _advance(u, reply)
            queue.append(branch)

    if dead_flag:
        return Deadlocked(), steps
    return Terminated(RegisterFile(tuple(in_regs), {}, out_reg)), steps


def _advance(u, reply: bool) -> int:
    if isinstance(u, Plain):
        return 1
    if isinstance(u, PosTest):
        return 1 if reply else 2
    return 2 if reply else 1


def check_splitting_computes(x: InstructionSequence, table) -> bool:
    """Does ``x``, under forking execution, compute the tabulated function?"""
    if not classify(x).is_sisbr:
        raise ValueError("check_splitting_computes requires a split/reply vocabulary sequence")
    if any(v is None for v in table.values):
        raise ValueError("target table has undefined entries; not a total function")
    for idx, expected in enumerate(table.values):
        outcome = run_splitting(x, table.vector(idx))
        if not isinstance(outcome, Terminated) or outcome.registers.out != expected:
            return False
    return True
