"""Boolean register services and execution of register-only sequences.

A Boolean register holds T, F, or the absorbing error state B.  Its effect
and yield coincide: after processing a method the new contents is also the
reply.  Threads interact with a named service through two complementary
operators: ``use`` feeds the thread's actions on one focus to the service
and returns the residual thread, ``apply`` returns the residual service.

``run`` is a program-counter executor over a full register file.  It is
deliberately independent of the thread-algebra route (extract, use chain,
apply); the test suite checks the two against each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Union

from .instr import (
    GET,
    SET_FALSE,
    SET_TRUE,
    AuxReg,
    Focus,
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
from .threads import DEAD, Dead, PostCond, Stop, Tau, Thread


class RegState(Enum):
    TRUE = "T"
    FALSE = "F"
    BLOCKED = "B"

    @staticmethod
    def of(b: bool) -> "RegState":
        return RegState.TRUE if b else RegState.FALSE


def register_step(state: RegState, method: str) -> tuple[RegState, RegState]:
    """One register transaction: (new state, reply).

    ``set:T``/``set:F`` store and reply the stored value, ``get`` replies the
    contents.  The blocked state absorbs every method, and unknown methods
    block the register.
    """
    if state is RegState.BLOCKED or method not in (GET, SET_TRUE, SET_FALSE):
        return RegState.BLOCKED, RegState.BLOCKED
    if method == SET_TRUE:
        return RegState.TRUE, RegState.TRUE
    if method == SET_FALSE:
        return RegState.FALSE, RegState.FALSE
    return state, state


def _bool_step(value: bool, method: str) -> tuple[bool, bool]:
    """Register transaction on a known-live register, in plain booleans."""
    new, reply = register_step(RegState.of(value), method)
    return new is RegState.TRUE, reply is RegState.TRUE


# --- service values ----------------------------------------------------------


@dataclass(frozen=True)
class BoolRegister:
    """A Boolean register service with the given contents."""

    state: RegState


class DivergentService:
    """The service that rejects every request; all such services are identified."""

    _instance: "DivergentService | None" = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "DIVERGENT"


DIVERGENT = DivergentService()

ServiceValue = Union[BoolRegister, DivergentService]


def _matches(action, focus: Focus) -> bool:
    return isinstance(action, RegisterOp) and action.focus == focus


def use(t: Thread, focus: Focus, service: ServiceValue) -> Thread:
    """Residual thread after ``service`` (named ``focus``) processes t's actions.

    Actions on other foci are left in place; processed actions become
    internal steps along the branch the reply selects; a blocked reply or a
    divergent service deadlocks the thread.
    """
    if isinstance(t, (Stop, Dead)):
        return t
    if isinstance(t, Tau):
        return Tau(use(t.next, focus, service))
    if not _matches(t.action, focus):
        return PostCond(t.action, use(t.on_true, focus, service), use(t.on_false, focus, service))
    if service is DIVERGENT:
        return DEAD
    new_state, reply = register_step(service.state, t.action.method)
    if reply is RegState.BLOCKED:
        return DEAD
    branch = t.on_true if reply is RegState.TRUE else t.on_false
    return Tau(use(branch, focus, BoolRegister(new_state)))


def apply(t: Thread, focus: Focus, service: ServiceValue) -> ServiceValue:
    """Residual service after processing t's actions on ``focus``.

    Deadlock, a foreign-focus action, a blocked reply, or an already
    divergent service all yield the divergent service.
    """
    while True:
        if isinstance(t, Stop):
            return service
        if isinstance(t, Dead):
            return DIVERGENT
        if isinstance(t, Tau):
            t = t.next
            continue
        if not _matches(t.action, focus):
            return DIVERGENT
        if service is DIVERGENT:
            return DIVERGENT
        new_state, reply = register_step(service.state, t.action.method)
        if reply is RegState.BLOCKED:
            return DIVERGENT
        t = t.on_true if reply is RegState.TRUE else t.on_false
        service = BoolRegister(new_state)


# --- program-counter execution -----------------------------------------------


@dataclass(frozen=True)
class RegisterFile:
    """Register contents: input values, auxiliary registers, output."""

    inputs: tuple[bool, ...]
    aux: dict[int, bool] = field(default_factory=dict)
    out: bool = False


@dataclass(frozen=True)
class Terminated:
    registers: RegisterFile


@dataclass(frozen=True)
class Deadlocked:
    pass


@dataclass(frozen=True)
class Divergent:
    reason: str


RunOutcome = Union[Terminated, Deadlocked, Divergent]


def _reject_split_reply(x: InstructionSequence) -> None:
    for u in x.items:
        if isinstance(u, (Plain, PosTest, NegTest)) and isinstance(u.basic, (SplitOp, ReplyOp)):
            raise ValueError("sequence contains split/reply instructions; use run_splitting")


def _execute(x: InstructionSequence, inputs: tuple[bool, ...]) -> tuple[RunOutcome, int]:
    """Run ``x`` on the given inputs; returns (outcome, executed instruction count)."""
    k = len(x)
    n = len(inputs)
    in_regs = list(inputs)
    max_aux = classify(x).max_aux_index
    aux_regs = {j: False for j in range(1, max_aux + 1)}
    out_reg = False
    pc = 1
    steps = 0

    def snapshot() -> RegisterFile:
        return RegisterFile(tuple(in_regs), dict(aux_regs), out_reg)

    while True:
        if pc > k:
            return Deadlocked(), steps
        u = x.items[pc - 1]
        steps += 1
        if isinstance(u, Term):
            return Terminated(snapshot()), steps
        if isinstance(u, Jump):
            if u.distance == 0 or pc + u.distance > k:
                return Deadlocked(), steps
            pc += u.distance
            continue
        op = u.basic
        assert isinstance(op, RegisterOp)
        f = op.focus
        if isinstance(f, InReg):
            if f.index > n:
                return Divergent(f"unserved focus {render_focus(f)}"), steps
            value, reply = _bool_step(in_regs[f.index - 1], op.method)
            in_regs[f.index - 1] = value
        elif isinstance(f, AuxReg):
            value, reply = _bool_step(aux_regs.get(f.index, False), op.method)
            aux_regs[f.index] = value
        else:
            value, reply = _bool_step(out_reg, op.method)
            out_reg = value
        if isinstance(u, Plain):
            pc += 1
        elif isinstance(u, PosTest):
            pc += 1 if reply else 2
        else:
            pc += 2 if reply else 1


def run(x: InstructionSequence, inputs: tuple[bool, ...] | list[bool]) -> RunOutcome:
    """Execute a register-only sequence (no split/reply) on the given inputs.

    Input registers hold the inputs, auxiliary registers and the output
    start False.  Falling past the end, a zero jump, or a jump beyond the
    end deadlocks; reading an input register beyond the provided arity
    diverges; the termination instruction terminates with the final
    registers.
    """
    _reject_split_reply(x)
    outcome, _ = _execute(x, tuple(inputs))
    return outcome


def run_with_steps(x: InstructionSequence, inputs: tuple[bool, ...] | list[bool]) -> tuple[RunOutcome, int]:
    """Like ``run`` but also reports the executed instruction count."""
    _reject_split_reply(x)
    return _execute(x, tuple(inputs))


def check_computes(x: InstructionSequence, table) -> bool:
    """Does ``x`` compute exactly the Boolean function tabulated by ``table``?

    True iff for every input vector the run terminates with the output
    register equal to the table entry.  Auxiliary registers are provisioned
    for every index occurring in ``x``; unused registers cannot affect the
    result.
    """
    if not classify(x).is_isbr:
        raise ValueError("check_computes requires a register-only sequence over in/aux/out")
    if any(v is None for v in table.values):
        raise ValueError("target table has undefined entries; not a total function")
    for idx, expected in enumerate(table.values):
        vector = table.vector(idx)
        outcome = run(x, vector)
        if not isinstance(outcome, Terminated) or outcome.registers.out != expected:
            return False
    return True


def parse_input_bits(text: str) -> tuple[bool, ...]:
    """Parse an input vector written over {T,F} or {1,0}, most significant first."""
    bits = []
    for ch in text.strip():
        if ch in "T1":
            bits.append(True)
        elif ch in "F0":
            bits.append(False)
        else:
            raise ValueError(f"invalid input bit {ch!r} (expected T/F/1/0)")
    return tuple(bits)


def render_input_bits(bits: tuple[bool, ...] | list[bool]) -> str:
    return "".join("T" if b else "F" for b in bits)
