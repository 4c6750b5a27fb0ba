"""Function-preserving rewrites of register-only instruction sequences.

* ``eliminate_output_false``: reroute the output register through a fresh
  auxiliary register so that ``out.set:F`` never occurs.
* ``normalize_set_tests``: remove the write forms whose test always skips,
  in favour of a non-skipping write plus an explicit jump.
* ``to_splitting``: rewrite auxiliary-register writes into forks and their
  reads into parameter replies, producing a fork/reply sequence that
  computes the same function under the splitting executor.
* ``collapse_jump_chains``: widen jumps that land on other jumps to their
  final targets (behaviour-tree-preserving).
* ``behavioural_normalize``: drop tests whose outcome is forced by write
  replies and skips over writes that are about to be redone.

Each rewrite has a ``*_report`` variant returning the rule trace.
"""

from __future__ import annotations

from dataclasses import dataclass

from .instr import (
    GET,
    SET_FALSE,
    SET_TRUE,
    AuxReg,
    InstructionSequence,
    Jump,
    NegTest,
    OUT,
    OutReg,
    Plain,
    PosTest,
    PrimitiveInstruction,
    RegisterOp,
    ReplyOp,
    SplitOp,
    TERM,
    Term,
    classify,
    psize,
)


@dataclass(frozen=True)
class RewriteReport:
    input: InstructionSequence
    output: InstructionSequence
    steps: int
    rule_trace: tuple[tuple[str, int], ...]


def _report(x: InstructionSequence, items: list, trace: list) -> RewriteReport:
    return RewriteReport(x, InstructionSequence(tuple(items)), len(trace), tuple(trace))


def _is_reg(u: PrimitiveInstruction, focus_type, method: str | None = None) -> bool:
    if not isinstance(u, (Plain, PosTest, NegTest)):
        return False
    b = u.basic
    if not isinstance(b, RegisterOp) or not isinstance(b.focus, focus_type):
        return False
    return method is None or b.method == method


def _widen_crossing_jumps(items: list, pos: int, extra: int, trace: list, rule: str) -> None:
    """Lengthen every jump that strictly crosses 1-based position ``pos``."""
    for i in range(1, len(items) + 1):
        u = items[i - 1]
        if isinstance(u, Jump) and u.distance >= 1 and i < pos < i + u.distance:
            items[i - 1] = Jump(u.distance + extra)
            trace.append((rule, i))


def _can_skip(u: PrimitiveInstruction) -> bool:
    """Can this instruction transfer control two positions ahead?

    Write tests have forced replies: a positive test of ``set:T`` and a
    negative test of ``set:F`` always fall through, their mirror images
    always skip, and read tests can go either way.
    """
    if isinstance(u, PosTest):
        return not (isinstance(u.basic, RegisterOp) and u.basic.method == SET_TRUE)
    if isinstance(u, NegTest):
        return not (isinstance(u.basic, RegisterOp) and u.basic.method == SET_FALSE)
    return False


# --- output-false elimination -------------------------------------------------


def eliminate_output_false_report(x: InstructionSequence) -> RewriteReport:
    """Rewrite ``x`` so no form of ``out.set:F`` occurs, preserving its function.

    The output focus is renamed to a fresh auxiliary register; then each
    termination point not already preceded by the inserted write-back is
    replaced by ``+aux:o.get ; out.set:T ; !``, lengthening jumps that cross
    the insertion.  If the sequence starts with ``!`` it terminates
    immediately on every input, so the renamed sequence is already correct.

    A test directly before a termination instruction can skip into the
    middle of the inserted block (a two-position skip cannot be
    lengthened), so such inputs are rejected rather than miscompiled.
    """
    if not classify(x).is_isbr:
        raise ValueError("eliminate_output_false requires a register-only sequence")
    fresh = classify(x).max_aux_index + 1
    trace: list[tuple[str, int]] = []
    items: list[PrimitiveInstruction] = []
    for pos, u in enumerate(x.items, start=1):
        if _is_reg(u, OutReg):
            renamed = RegisterOp(AuxReg(fresh), u.basic.method)
            items.append(type(u)(renamed))
            trace.append(("rename-out", pos))
        else:
            items.append(u)

    if isinstance(items[0], Term):
        return _report(x, items, trace)

    for j in range(2, len(items) + 1):
        if isinstance(items[j - 1], Term) and _can_skip(items[j - 2]):
            raise ValueError(
                f"eliminate_output_false precondition violated: the test at position "
                f"{j - 1} can bypass the termination instruction at position {j}"
            )

    write_back = Plain(RegisterOp(OUT, SET_TRUE))
    rounds = 0
    while True:
        j = None
        for pos in range(2, len(items) + 1):
            if isinstance(items[pos - 1], Term) and items[pos - 2] != write_back:
                j = pos
                break
        if j is None:
            break
        _widen_crossing_jumps(items, j, 2, trace, "widen-jump")
        items[j - 1 : j] = [PosTest(RegisterOp(AuxReg(fresh), GET)), write_back, TERM]
        trace.append(("insert-readback", j))
        rounds += 1
        assert rounds <= psize(x), "rewrite loop exceeded its bound"
    return _report(x, items, trace)


def eliminate_output_false(x: InstructionSequence) -> InstructionSequence:
    return eliminate_output_false_report(x).output


# --- skipping-write normalization ----------------------------------------------


def _is_skipping_aux_write(u) -> bool:
    return (isinstance(u, NegTest) and _is_reg(u, AuxReg, SET_TRUE)) or (
        isinstance(u, PosTest) and _is_reg(u, AuxReg, SET_FALSE)
    )


def normalize_set_tests_report(x: InstructionSequence) -> RewriteReport:
    """Remove ``-aux:j.set:T`` and ``+aux:j.set:F``, which always skip.

    Each is replaced by the non-skipping write of the same value followed by
    ``#2``, with jumps crossing the insertion lengthened by one.

    A read test directly before a replaced write would skip into the
    inserted jump instead of over the write, so such inputs are rejected
    (another skipping write there is fine: it is itself replaced first).
    """
    if not classify(x).is_isbr:
        raise ValueError("normalize_set_tests requires a register-only sequence")
    items = list(x.items)
    for i in range(2, len(items) + 1):
        pred = items[i - 2]
        if _is_skipping_aux_write(items[i - 1]) and _can_skip(pred) and not _is_skipping_aux_write(pred):
            raise ValueError(
                f"normalize_set_tests precondition violated: the test at position "
                f"{i - 1} can bypass the write at position {i}"
            )
    trace: list[tuple[str, int]] = []
    rounds = 0
    while True:
        target = None
        for pos in range(1, len(items) + 1):
            u = items[pos - 1]
            if (isinstance(u, NegTest) and _is_reg(u, AuxReg, SET_TRUE)) or (
                isinstance(u, PosTest) and _is_reg(u, AuxReg, SET_FALSE)
            ):
                target = pos
                break
        if target is None:
            break
        u = items[target - 1]
        _widen_crossing_jumps(items, target, 1, trace, "widen-jump")
        if isinstance(u, NegTest):
            items[target - 1 : target] = [PosTest(u.basic), Jump(2)]
            trace.append(("unskip-set-true", target))
        else:
            items[target - 1 : target] = [NegTest(u.basic), Jump(2)]
            trace.append(("unskip-set-false", target))
        rounds += 1
        assert rounds <= psize(x), "rewrite loop exceeded its bound"
    return _report(x, items, trace)


def normalize_set_tests(x: InstructionSequence) -> InstructionSequence:
    return normalize_set_tests_report(x).output


# --- splitting rewrite -----------------------------------------------------------


def _aux_write_positions(items: list) -> list[int]:
    return [
        pos
        for pos in range(1, len(items) + 1)
        if _is_reg(items[pos - 1], AuxReg, SET_TRUE) or _is_reg(items[pos - 1], AuxReg, SET_FALSE)
    ]


def check_write_linear(x: InstructionSequence) -> int | None:
    """Position of the first auxiliary write some control transfer can bypass.

    Returns None when every jump and every possible test skip passes over no
    auxiliary write, which is the domain on which the fork rewrite below is
    function-preserving.
    """
    items = list(x.items)
    writes = _aux_write_positions(items)
    if not writes:
        return None
    write_set = set(writes)
    for i in range(1, len(items) + 1):
        u = items[i - 1]
        if isinstance(u, Jump) and u.distance >= 1:
            for w in writes:
                if i < w < i + u.distance:
                    return w
        elif _can_skip(u) and (i + 1) in write_set:
            return i + 1
    return None


def to_splitting_report(x: InstructionSequence) -> RewriteReport:
    """Rewrite auxiliary-register traffic into forks and replies.

    Processing writes right to left: a write of value b to ``aux:j`` becomes
    a fork on a fresh parameter whose b-instance continues in sequence and
    whose other instance terminates at an inserted ``!``; reads of ``aux:j``
    after the write become replies on that parameter.  Reads with no earlier
    write always see False and become the equivalent jump.

    Requires that no jump or possible test skip crosses an auxiliary write
    (see ``check_write_linear``): on a bypassing path the fork would not
    have executed, so a later reply would not mean the register's prior
    value, and the rewrite would change the computed function.
    """
    profile = classify(x)
    if not profile.is_isbr:
        raise ValueError("to_splitting requires a register-only sequence")
    if profile.has_out_set_false:
        raise ValueError("to_splitting requires out.set:F to be eliminated first")
    for pos in range(1, len(x) + 1):
        u = x.items[pos - 1]
        if (isinstance(u, NegTest) and _is_reg(u, AuxReg, SET_TRUE)) or (
            isinstance(u, PosTest) and _is_reg(u, AuxReg, SET_FALSE)
        ):
            raise ValueError(
                f"to_splitting requires normalize_set_tests output; "
                f"skipping write form at position {pos}"
            )
    bypassed = check_write_linear(x)
    if bypassed is not None:
        raise ValueError(
            f"to_splitting precondition violated: a control transfer can bypass "
            f"the auxiliary write at position {bypassed}"
        )

    items = list(x.items)
    trace: list[tuple[str, int]] = []

    # Reads never preceded by a write of the same register always reply False.
    first_write: dict[int, int] = {}
    for pos in _aux_write_positions(items):
        j = items[pos - 1].basic.focus.index
        first_write.setdefault(j, pos)
    for pos in range(1, len(items) + 1):
        u = items[pos - 1]
        if _is_reg(u, AuxReg, GET):
            j = u.basic.focus.index
            if first_write.get(j, len(items) + 1) > pos:
                items[pos - 1] = Jump(2) if isinstance(u, PosTest) else Jump(1)
                trace.append(("constant-false-read", pos))

    rounds = 0
    while True:
        writes = _aux_write_positions(items)
        if not writes:
            break
        i = writes[-1]
        u = items[i - 1]
        j = u.basic.focus.index
        used_params = {
            b.param
            for v in items[i - 1 :]
            if isinstance(v, (Plain, PosTest, NegTest))
            for b in [v.basic]
            if isinstance(b, (SplitOp, ReplyOp))
        }
        fresh = 1
        while fresh in used_params:
            fresh += 1
        writes_true = u.basic.method == SET_TRUE
        _widen_crossing_jumps(items, i, 1, trace, "widen-jump")
        if writes_true:
            items[i - 1 : i] = [NegTest(SplitOp(fresh)), TERM]
            trace.append(("fork-set-true", i))
        else:
            items[i - 1 : i] = [PosTest(SplitOp(fresh)), TERM]
            trace.append(("fork-set-false", i))
        for pos in range(i + 2, len(items) + 1):
            v = items[pos - 1]
            if _is_reg(v, AuxReg, GET) and v.basic.focus.index == j:
                items[pos - 1] = type(v)(ReplyOp(fresh))
                trace.append(("rebind-read", pos))
        rounds += 1
        assert rounds <= psize(x), "rewrite loop exceeded its bound"
    return _report(x, items, trace)


def to_splitting(x: InstructionSequence) -> InstructionSequence:
    return to_splitting_report(x).output


# --- jump-chain collapse ----------------------------------------------------------


def collapse_jump_chains_report(x: InstructionSequence) -> RewriteReport:
    """Widen every jump landing on another jump to the chain's final target.

    Processed back to front, so each jump needs at most a short burst of
    rewrites; a chain reaching ``#0`` collapses to ``#0``.  The extracted
    behaviour tree is unchanged.
    """
    items = list(x.items)
    k = len(items)
    trace: list[tuple[str, int]] = []
    for i in range(k, 0, -1):
        while True:
            u = items[i - 1]
            if not (isinstance(u, Jump) and u.distance >= 1 and i + u.distance <= k):
                break
            target = items[i + u.distance - 1]
            if not isinstance(target, Jump):
                break
            if target.distance == 0:
                items[i - 1] = Jump(0)
                trace.append(("redirect-to-dead", i))
            else:
                items[i - 1] = Jump(u.distance + target.distance)
                trace.append(("collapse-chain", i))
        assert len(trace) <= psize(x) * psize(x), "rewrite loop exceeded its bound"
    return _report(x, items, trace)


def collapse_jump_chains(x: InstructionSequence) -> InstructionSequence:
    return collapse_jump_chains_report(x).output


# --- behavioural normalization ------------------------------------------------------


def _same_plain_write(u: PrimitiveInstruction, v: PrimitiveInstruction) -> bool:
    return isinstance(v, Plain) and v.basic == u.basic


def behavioural_normalize_report(x: InstructionSequence) -> RewriteReport:
    """Leftmost-first normalization under reply-aware identities.

    A positive test of ``set:T`` (or negative of ``set:F``) never skips and
    becomes the plain write.  A write whose skipped-over successor rewrites
    the register identically may skip nothing: the leading write becomes
    ``#1``, both directly and through the symmetric two-jump window ending
    in the same plain write.  Positions are preserved, so no jump needs
    adjusting.
    """
    if not classify(x).is_isbr:
        raise ValueError("behavioural_normalize requires a register-only sequence")
    items = list(x.items)
    k = len(items)
    trace: list[tuple[str, int]] = []

    def writable_focus(u) -> bool:
        return isinstance(u.basic, RegisterOp) and isinstance(u.basic.focus, (AuxReg, OutReg))

    while True:
        applied = False
        for i in range(1, k + 1):
            u = items[i - 1]
            if isinstance(u, PosTest) and writable_focus(u) and u.basic.method == SET_TRUE:
                items[i - 1] = Plain(u.basic)
                trace.append(("drop-forced-test", i))
                applied = True
                break
            if isinstance(u, NegTest) and writable_focus(u) and u.basic.method == SET_FALSE:
                items[i - 1] = Plain(u.basic)
                trace.append(("drop-forced-test", i))
                applied = True
                break
            skipping_write = (
                isinstance(u, NegTest) and writable_focus(u) and u.basic.method == SET_TRUE
            ) or (isinstance(u, PosTest) and writable_focus(u) and u.basic.method == SET_FALSE)
            if not skipping_write:
                continue
            if i + 1 <= k and _same_plain_write(u, items[i]):
                items[i - 1] = Jump(1)
                trace.append(("skip-redone-write", i))
                applied = True
                break
            if i + 2 <= k:
                u1, u2 = items[i], items[i + 1]
                if (
                    isinstance(u1, Jump)
                    and isinstance(u2, Jump)
                    and u1.distance == u2.distance
                    and u1.distance >= 2
                    and i + u1.distance + 1 <= k
                    and _same_plain_write(u, items[i + u1.distance])
                ):
                    items[i - 1] = Jump(1)
                    trace.append(("skip-redone-write-window", i))
                    applied = True
                    break
        if not applied:
            break
        assert len(trace) <= psize(x) * psize(x), "rewrite loop exceeded its bound"
    return _report(x, items, trace)


def behavioural_normalize(x: InstructionSequence) -> InstructionSequence:
    return behavioural_normalize_report(x).output
