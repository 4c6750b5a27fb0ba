"""Brute-force oracles and micro-scale exploration.

Truth tables of instruction sequences under either executor, and an
exhaustive shortest-sequence search under syntactic restrictions.  The
search enumerates sequences in length-lexicographic order but collapses
behaviourally identical suffixes, which keeps desk-scale bounds feasible
while returning exactly the sequence plain enumeration would return first.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Optional

from .instr import (
    GET,
    SET_FALSE,
    SET_TRUE,
    AuxReg,
    BasicInstruction,
    InReg,
    InstructionSequence,
    Jump,
    NegTest,
    OUT,
    Plain,
    PosTest,
    PrimitiveInstruction,
    RegisterOp,
    ReplyOp,
    SplitOp,
    TERM,
    Term,
)
from .services import Terminated, run
from .splitting import run_splitting

_SEARCH_STATE_CAP = 3_000_000
_NAIVE_CAP = 5_000_000


@dataclass(frozen=True)
class TruthTable:
    """2^arity Boolean values indexed by input vector, first input most significant.

    ``None`` marks an input where execution did not terminate, i.e. the
    sequence computes no total function.
    """

    arity: int
    values: tuple[Optional[bool], ...]

    def __post_init__(self):
        if len(self.values) != 2**self.arity:
            raise ValueError(f"expected {2**self.arity} entries, got {len(self.values)}")

    def vector(self, idx: int) -> tuple[bool, ...]:
        n = self.arity
        return tuple((idx >> (n - 1 - i)) & 1 == 1 for i in range(n))

    def lookup(self, bits) -> Optional[bool]:
        idx = 0
        for b in bits:
            idx = (idx << 1) | (1 if b else 0)
        return self.values[idx]

    @property
    def is_total(self) -> bool:
        return all(v is not None for v in self.values)

    def render(self) -> str:
        return "".join("?" if v is None else "T" if v else "F" for v in self.values)

    @staticmethod
    def tabulate(arity: int, fn: Callable[[tuple[bool, ...]], bool]) -> "TruthTable":
        values = []
        for idx in range(2**arity):
            vector = tuple((idx >> (arity - 1 - i)) & 1 == 1 for i in range(arity))
            values.append(fn(vector))
        return TruthTable(arity, tuple(values))


def tables_equal(a: TruthTable, b: TruthTable) -> bool:
    return a.arity == b.arity and a.values == b.values


def truth_table(x: InstructionSequence, n: int, splitting: bool = False) -> TruthTable:
    """Tabulate the sequence over all 2^n input vectors.

    Non-terminating entries (deadlock or divergence) are recorded as None.
    """
    runner = run_splitting if splitting else run
    values = []
    for idx in range(2**n):
        vector = tuple((idx >> (n - 1 - i)) & 1 == 1 for i in range(n))
        outcome = runner(x, vector)
        values.append(outcome.registers.out if isinstance(outcome, Terminated) else None)
    return TruthTable(n, tuple(values))


# --- shortest-sequence search ------------------------------------------------------


@dataclass(frozen=True)
class SearchSpec:
    """Search-space description: the target table plus syntactic restrictions."""

    target: TruthTable
    max_length: int
    allow_jumps: bool = False
    max_jump: int = 3
    allow_aux: bool = False
    allow_out_set_false: bool = False
    allow_multiple_term: bool = True
    splitting_mode: bool = False

    def __post_init__(self):
        if self.max_length < 1:
            raise ValueError("max_length must be >= 1")


def _search_alphabet(spec: SearchSpec) -> list[PrimitiveInstruction]:
    """The pruned instruction alphabet, in enumeration order.

    Order: termination, jumps by distance, then plain / positive-test /
    negative-test forms over the basics (input reads, auxiliary registers
    when allowed, output writes, fork/reply in splitting mode).
    """
    basics: list[BasicInstruction] = []
    for j in range(1, spec.target.arity + 1):
        basics.append(RegisterOp(InReg(j), GET))
    if spec.allow_aux and not spec.splitting_mode:
        for j in (1, 2):
            for method in (GET, SET_TRUE, SET_FALSE):
                basics.append(RegisterOp(AuxReg(j), method))
    basics.append(RegisterOp(OUT, SET_TRUE))
    if spec.allow_out_set_false and not spec.splitting_mode:
        basics.append(RegisterOp(OUT, SET_FALSE))
    if spec.splitting_mode:
        for j in (1, 2):
            basics.append(SplitOp(j))
        for j in (1, 2):
            basics.append(ReplyOp(j))

    alphabet: list[PrimitiveInstruction] = [TERM]
    if spec.allow_jumps:
        alphabet.extend(Jump(l) for l in range(0, spec.max_jump + 1))
    alphabet.extend(Plain(b) for b in basics)
    alphabet.extend(PosTest(b) for b in basics)
    alphabet.extend(NegTest(b) for b in basics)
    return alphabet


def shortest_sequence_search(spec: SearchSpec) -> Optional[InstructionSequence]:
    """First sequence, in length-lexicographic order, matching the target table.

    Returns None when no sequence within ``max_length`` matches under the
    restrictions.  The result is deterministic: minimal length, and
    lexicographically least over the alphabet order within that length.
    """
    if not spec.target.is_total:
        raise ValueError("search target must be a total function")
    if spec.target.arity > 3:
        raise ValueError("search supports arity <= 3")
    if spec.max_length > 14:
        raise ValueError("search supports max_length <= 14")
    if spec.splitting_mode:
        return _naive_search(spec)
    return _behaviour_search(spec)


def _naive_search(spec: SearchSpec) -> Optional[InstructionSequence]:
    """Plain enumeration; used for splitting mode and as a cross-check oracle."""
    alphabet = _search_alphabet(spec)
    total = 0
    for length in range(1, spec.max_length + 1):
        total += len(alphabet) ** length
        if total > _NAIVE_CAP:
            raise ValueError("resource bound exceeded for plain enumeration")
    for length in range(1, spec.max_length + 1):
        for combo in product(alphabet, repeat=length):
            if not spec.allow_multiple_term and sum(1 for u in combo if isinstance(u, Term)) > 1:
                continue
            x = InstructionSequence(combo)
            table = truth_table(x, spec.target.arity, splitting=spec.splitting_mode)
            if tables_equal(table, spec.target):
                return x
    return None


def _behaviour_search(spec: SearchSpec) -> Optional[InstructionSequence]:
    """Length-lex enumeration with behaviourally identical suffixes merged.

    A suffix is summarised by its outcome (halt with a final output value,
    or never halt) from every register state and input vector; extending a
    sequence on the left only needs the summaries of the suffix and its
    tails up to the maximum jump distance.  Sequences are enumerated
    first-instruction-major, so the first match is the length-lex least.
    """
    n = spec.target.arity
    aux_count = 2 if spec.allow_aux else 0
    reg_bits = 1 + aux_count
    shift = 2**n
    size = (2**reg_bits) * shift
    lookahead = max(2, spec.max_jump if spec.allow_jumps else 2)
    alphabet = _search_alphabet(spec)
    track_terms = not spec.allow_multiple_term

    target_codes = bytes(2 if v else 1 for v in spec.target.values)

    def matches(behaviour: bytes) -> bool:
        return behaviour[:shift] == target_codes

    def extend(u: PrimitiveInstruction, window: tuple[bytes, ...]) -> bytes:
        out = bytearray(size)
        if isinstance(u, Term):
            for s in range(2**reg_bits):
                code = 2 if s & 1 else 1
                base = s * shift
                for a in range(shift):
                    out[base + a] = code
            return bytes(out)
        if isinstance(u, Jump):
            if u.distance == 0:
                return bytes(out)
            return window[u.distance - 1]
        basic = u.basic
        assert isinstance(basic, RegisterOp)
        focus, method = basic.focus, basic.method
        b0, b1 = window[0], window[1]
        for s in range(2**reg_bits):
            base = s * shift
            for a in range(shift):
                if isinstance(focus, InReg):
                    value = (a >> (n - focus.index)) & 1
                    bit = None
                elif isinstance(focus, AuxReg):
                    bit = 1 << focus.index
                    value = 1 if s & bit else 0
                else:
                    bit = 1
                    value = s & 1
                if method == GET:
                    reply, s2 = value, s
                elif method == SET_TRUE:
                    reply, s2 = 1, (s | bit if bit else s)
                else:
                    reply, s2 = 0, (s & ~bit if bit else s)
                if isinstance(u, Plain):
                    nxt = b0
                elif isinstance(u, PosTest):
                    nxt = b0 if reply else b1
                else:
                    nxt = b1 if reply else b0
                out[base + a] = nxt[s2 * shift + a]
        return bytes(out)

    interned: dict[bytes, bytes] = {}

    def intern(b: bytes) -> bytes:
        return interned.setdefault(b, b)

    empty = bytes(size)
    frontier: list[tuple[tuple[bytes, ...], int, tuple]] = [((empty,) * lookahead, 0, ())]
    seen: set = set()
    for _length in range(1, spec.max_length + 1):
        new_frontier = []
        for u in alphabet:
            is_term = isinstance(u, Term)
            for window, terms, witness in frontier:
                new_terms = terms + 1 if is_term else terms
                if track_terms and new_terms > 1:
                    continue
                behaviour = intern(extend(u, window))
                new_window = (behaviour,) + window[: lookahead - 1]
                key = (new_window, new_terms if track_terms else 0)
                if key in seen:
                    continue
                seen.add(key)
                if len(seen) > _SEARCH_STATE_CAP:
                    raise ValueError("resource bound exceeded in behaviour search")
                new_witness = (u,) + witness
                if matches(behaviour):
                    return InstructionSequence(new_witness)
                new_frontier.append((new_window, new_terms, new_witness))
        frontier = new_frontier
        if not frontier:
            break
    return None
