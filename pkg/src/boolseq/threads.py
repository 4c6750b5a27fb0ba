"""Behaviour trees of instruction sequences.

A thread is a finite tree describing what a sequence does: terminate
(``Stop``), deadlock (``Dead``), take an internal step (``Tau``), or perform
a basic action and continue along one of two branches depending on the
reply (``PostCond``).  ``extract`` maps a sequence to its thread.

Extraction can blow up exponentially on alternating test chains, so there
is also a compact representation with variables and explicit substitution
binders: ``extract_compact`` produces a term whose size is linear in the
sequence length, and ``eval_xthread`` normalises it back to a plain thread.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .instr import (
    BasicInstruction,
    InstructionSequence,
    Jump,
    Plain,
    PosTest,
    PrimitiveInstruction,
    Term,
    render_basic,
)


@dataclass(frozen=True, repr=False)
class Stop:
    """Successful termination."""


@dataclass(frozen=True, repr=False)
class Dead:
    """Deadlock: no further behaviour, no termination."""


@dataclass(frozen=True, repr=False)
class Tau:
    """One internal step, then ``next``."""

    next: "XThread"


@dataclass(frozen=True, repr=False)
class PostCond:
    """Perform ``action``; continue as ``on_true`` or ``on_false`` per the reply."""

    action: BasicInstruction
    on_true: "XThread"
    on_false: "XThread"


@dataclass(frozen=True, repr=False)
class Var:
    """A thread variable, resolved by an enclosing substitution binder."""

    index: int


@dataclass(frozen=True, repr=False)
class Subst:
    """Explicit substitution: ``body`` with ``Var(var_index)`` bound to ``bound``."""

    var_index: int
    bound: "XThread"
    body: "XThread"


Thread = Union[Stop, Dead, Tau, PostCond]
XThread = Union[Stop, Dead, Tau, PostCond, Var, Subst]

STOP = Stop()
DEAD = Dead()


def extract(x: InstructionSequence) -> Thread:
    """Thread of an instruction sequence.

    Computed back to front: the thread at a position depends only on the
    threads at later positions (jumps are forward), with everything past the
    end a deadlock.  Subtrees are shared, so the in-memory result stays
    linear even when the tree, counted as a tree, is exponential.
    """
    k = len(x)
    threads: list[XThread] = [DEAD] * (k + 3)  # 1-based; > k stays Dead
    for i in range(k, 0, -1):
        u = x.items[i - 1]
        threads[i] = _step_thread(u, threads[i + 1], threads[i + 2], threads, i, k)
    return threads[1]


def _step_thread(
    u: PrimitiveInstruction,
    nxt: XThread,
    skip: XThread,
    threads: list[XThread],
    i: int,
    k: int,
) -> XThread:
    if isinstance(u, Term):
        return STOP
    if isinstance(u, Jump):
        if u.distance == 0 or i + u.distance > k:
            return DEAD
        return threads[i + u.distance]
    if isinstance(u, Plain):
        return PostCond(u.basic, nxt, nxt)
    if isinstance(u, PosTest):
        return PostCond(u.basic, nxt, skip)
    return PostCond(u.basic, skip, nxt)


def _rho_prime(i: int, u: PrimitiveInstruction) -> XThread:
    """Compact per-instruction term over position variables."""
    if isinstance(u, Term):
        return STOP
    if isinstance(u, Jump):
        if u.distance == 0:
            return DEAD
        return Var(i + u.distance)
    if isinstance(u, Plain):
        return PostCond(u.basic, Var(i + 1), Var(i + 1))
    if isinstance(u, PosTest):
        return PostCond(u.basic, Var(i + 1), Var(i + 2))
    return PostCond(u.basic, Var(i + 2), Var(i + 1))


def extract_compact(x: InstructionSequence) -> XThread:
    """Linear-size thread term with explicit substitution binders.

    One binder per position: position i's term refers to positions i+1,
    i+2, ... through variables, and the binder for the last position holds
    that instruction's extraction outright.  Satisfies
    ``tsize(extract_compact(x)) <= 4 * psize(x) + 1``.
    """
    k = len(x)
    if k == 1:
        return extract(x)
    body: XThread = Var(1)
    for i in range(1, k):
        body = Subst(i, _rho_prime(i, x.items[i - 1]), body)
    last = extract(InstructionSequence((x.items[-1],)))
    return Subst(k, last, body)


def eval_xthread(t: XThread) -> Thread:
    """Resolve all substitution binders; free variables become deadlock.

    Binders are resolved innermost first (the order produced by
    ``extract_compact``); each bound term is evaluated once and shared by
    every occurrence of its variable, so evaluation is linear in the term
    size.
    """

    def ev(node: XThread, env: dict[int, Thread]) -> Thread:
        if isinstance(node, (Stop, Dead)):
            return node
        if isinstance(node, Var):
            return env.get(node.index, DEAD)
        if isinstance(node, Tau):
            return Tau(ev(node.next, env))
        if isinstance(node, PostCond):
            return PostCond(node.action, ev(node.on_true, env), ev(node.on_false, env))
        bound = ev(node.bound, env)
        inner = dict(env)
        inner[node.var_index] = bound
        return ev(node.body, inner)

    return ev(t, {})


def tsize(t: XThread) -> int:
    """Term size: leaves count 1, binary nodes 1 + both children.

    ``Tau`` counts as a postconditional with two equal children.  Shared
    subterms are counted once per occurrence (tree size, not DAG size).
    """
    memo: dict[int, int] = {}

    def sz(node: XThread) -> int:
        key = id(node)
        got = memo.get(key)
        if got is not None:
            return got
        if isinstance(node, (Stop, Dead, Var)):
            val = 1
        elif isinstance(node, Tau):
            val = 2 * sz(node.next) + 1
        elif isinstance(node, PostCond):
            val = sz(node.on_true) + sz(node.on_false) + 1
        else:
            val = sz(node.bound) + sz(node.body) + 1
        memo[key] = val
        return val

    return sz(t)


def node_count(t: XThread) -> int:
    """Number of nodes of the term read as a tree (shared subtrees recounted)."""
    memo: dict[int, int] = {}

    def cnt(node: XThread) -> int:
        key = id(node)
        got = memo.get(key)
        if got is not None:
            return got
        if isinstance(node, (Stop, Dead, Var)):
            val = 1
        elif isinstance(node, Tau):
            val = 1 + cnt(node.next)
        elif isinstance(node, PostCond):
            val = 1 + cnt(node.on_true) + cnt(node.on_false)
        else:
            val = 1 + cnt(node.bound) + cnt(node.body)
        memo[key] = val
        return val

    return cnt(t)


def render_thread(t: XThread) -> str:
    """Debug rendering, e.g. ``(in:1.get ? S : D)``; for inspection and goldens only."""
    if isinstance(t, Stop):
        return "S"
    if isinstance(t, Dead):
        return "D"
    if isinstance(t, Tau):
        return f"tau . {render_thread(t.next)}"
    if isinstance(t, PostCond):
        return f"({render_basic(t.action)} ? {render_thread(t.on_true)} : {render_thread(t.on_false)})"
    if isinstance(t, Var):
        return f"x{t.index}"
    return f"[{render_thread(t.bound)}/x{t.var_index}] {render_thread(t.body)}"
