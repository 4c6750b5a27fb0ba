"""Primitive instructions and finite single-pass instruction sequences.

An instruction sequence is a nonempty finite sequence of primitive
instructions: plain basic instructions, positive/negative test
instructions, forward jumps ``#l``, and the termination instruction ``!``.
Basic instructions address named Boolean registers (``in:i``, ``aux:i``,
``out``) with ``get``/``set:T``/``set:F`` methods, or fork/reply on a
Boolean parameter (``split:p``, ``reply:p``).

Everything here is immutable and purely syntactic: parsing, canonical
rendering, length, and classification of a sequence into the register-only
vocabularies used elsewhere in the package.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

GET = "get"
SET_TRUE = "set:T"
SET_FALSE = "set:F"

METHODS = (GET, SET_TRUE, SET_FALSE)


class InstructionSyntaxError(ValueError):
    """Malformed instruction-sequence text; ``position`` is a 0-based char offset."""

    def __init__(self, message: str, position: int = 0):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


# --- register foci ---------------------------------------------------------


@dataclass(frozen=True)
class InReg:
    """The i-th input register."""

    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"input register index must be >= 1, got {self.index}")


@dataclass(frozen=True)
class AuxReg:
    """The i-th auxiliary register."""

    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"auxiliary register index must be >= 1, got {self.index}")


@dataclass(frozen=True)
class OutReg:
    """The single output register."""


OUT = OutReg()

Focus = Union[InReg, AuxReg, OutReg]


# --- basic instructions ----------------------------------------------------


@dataclass(frozen=True)
class RegisterOp:
    """A register method call ``focus.method``."""

    focus: Focus
    method: str

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown register method {self.method!r}")


@dataclass(frozen=True)
class SplitOp:
    """Fork execution on Boolean parameter ``param``."""

    param: int

    def __post_init__(self):
        if self.param < 1:
            raise ValueError(f"split parameter must be >= 1, got {self.param}")


@dataclass(frozen=True)
class ReplyOp:
    """Reply with the instantiated value of Boolean parameter ``param``."""

    param: int

    def __post_init__(self):
        if self.param < 1:
            raise ValueError(f"reply parameter must be >= 1, got {self.param}")


BasicInstruction = Union[RegisterOp, SplitOp, ReplyOp]


# --- primitive instructions ------------------------------------------------


@dataclass(frozen=True)
class Plain:
    basic: BasicInstruction


@dataclass(frozen=True)
class PosTest:
    basic: BasicInstruction


@dataclass(frozen=True)
class NegTest:
    basic: BasicInstruction


@dataclass(frozen=True)
class Jump:
    """Forward jump over ``distance`` instructions; 0 deadlocks by definition."""

    distance: int

    def __post_init__(self):
        if self.distance < 0:
            raise ValueError("jump distance must be a natural number")


@dataclass(frozen=True)
class Term:
    """The termination instruction ``!``."""


TERM = Term()

PrimitiveInstruction = Union[Plain, PosTest, NegTest, Jump, Term]


@dataclass(frozen=True)
class InstructionSequence:
    """A nonempty, immutable sequence of primitive instructions."""

    items: tuple[PrimitiveInstruction, ...]

    def __post_init__(self):
        if not self.items:
            raise ValueError("instruction sequence must be nonempty")

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[PrimitiveInstruction]:
        return iter(self.items)

    def __getitem__(self, idx):
        return self.items[idx]

    def __add__(self, other: "InstructionSequence") -> "InstructionSequence":
        return InstructionSequence(self.items + other.items)

    def __str__(self) -> str:
        return render(self)


def seq(*items: PrimitiveInstruction) -> InstructionSequence:
    """Convenience constructor."""
    return InstructionSequence(tuple(items))


def psize(x: InstructionSequence) -> int:
    """Length of an instruction sequence."""
    return len(x.items)


# --- classification --------------------------------------------------------


@dataclass(frozen=True)
class ClassProfile:
    """Syntactic classification of a sequence.

    ``is_isbr``: all basics are register ops reading in/aux and writing
    aux/out.  ``is_isbrna``: additionally no auxiliary registers (reads of
    inputs and writes of out only).  ``is_sisbr``: input reads, ``out.set:T``,
    and split/reply only.  The ``max_*`` fields are maxima over occurring
    indices, 0 when absent.
    """

    is_isbr: bool
    is_isbrna: bool
    is_sisbr: bool
    max_jump: int
    max_aux_index: int
    max_input_index: int
    max_param_index: int
    term_count: int
    has_out_set_false: bool


def _basics(x: InstructionSequence) -> Iterator[BasicInstruction]:
    for u in x.items:
        if isinstance(u, (Plain, PosTest, NegTest)):
            yield u.basic


def classify(x: InstructionSequence) -> ClassProfile:
    """Compute the syntactic class profile of ``x``."""
    is_isbr = True
    is_isbrna = True
    is_sisbr = True
    max_jump = 0
    max_aux = 0
    max_in = 0
    max_param = 0
    term_count = 0
    has_out_set_false = False

    for u in x.items:
        if isinstance(u, Term):
            term_count += 1
        elif isinstance(u, Jump):
            max_jump = max(max_jump, u.distance)

    for b in _basics(x):
        if isinstance(b, RegisterOp):
            f, m = b.focus, b.method
            if isinstance(f, InReg):
                max_in = max(max_in, f.index)
                if m != GET:
                    is_isbr = is_isbrna = is_sisbr = False
            elif isinstance(f, AuxReg):
                max_aux = max(max_aux, f.index)
                is_isbrna = False
                is_sisbr = False
            else:  # OutReg
                if m == GET:
                    is_isbr = is_isbrna = is_sisbr = False
                elif m == SET_FALSE:
                    has_out_set_false = True
                    is_sisbr = False
        elif isinstance(b, SplitOp):
            max_param = max(max_param, b.param)
            is_isbr = is_isbrna = False
        else:  # ReplyOp
            max_param = max(max_param, b.param)
            is_isbr = is_isbrna = False

    return ClassProfile(
        is_isbr=is_isbr,
        is_isbrna=is_isbrna and is_isbr,
        is_sisbr=is_sisbr,
        max_jump=max_jump,
        max_aux_index=max_aux,
        max_input_index=max_in,
        max_param_index=max_param,
        term_count=term_count,
        has_out_set_false=has_out_set_false,
    )


# --- rendering --------------------------------------------------------------


def render_focus(f: Focus) -> str:
    if isinstance(f, InReg):
        return f"in:{f.index}"
    if isinstance(f, AuxReg):
        return f"aux:{f.index}"
    return "out"


def render_basic(b: BasicInstruction) -> str:
    if isinstance(b, RegisterOp):
        return f"{render_focus(b.focus)}.{b.method}"
    if isinstance(b, SplitOp):
        return f"split:{b.param}"
    return f"reply:{b.param}"


def render_instruction(u: PrimitiveInstruction) -> str:
    if isinstance(u, Term):
        return "!"
    if isinstance(u, Jump):
        return f"#{u.distance}"
    if isinstance(u, Plain):
        return render_basic(u.basic)
    if isinstance(u, PosTest):
        return "+" + render_basic(u.basic)
    return "-" + render_basic(u.basic)


def render(x: InstructionSequence) -> str:
    """Canonical text: instructions joined by ``" ; "``."""
    return " ; ".join(render_instruction(u) for u in x.items)


# --- parsing ----------------------------------------------------------------

_INSTR_RE = re.compile(
    r"""^(?:
        (?P<term>!)
      | \#(?P<jump>\d+)
      | (?P<sign>[+-])?(?P<body>
            (?:in:(?P<in>\d+)|aux:(?P<aux>\d+)|out)\.(?P<method>get|set:T|set:F)
          | split:(?P<split>\d+)
          | reply:(?P<reply>\d+)
        )
    )$""",
    re.VERBOSE,
)


def _parse_one(token: str, position: int) -> PrimitiveInstruction:
    m = _INSTR_RE.match(token)
    if m is None:
        raise InstructionSyntaxError(f"malformed instruction {token!r}", position)
    if m.group("term"):
        return TERM
    if m.group("jump") is not None:
        return Jump(int(m.group("jump")))

    if m.group("split") is not None:
        param = int(m.group("split"))
        if param < 1:
            raise InstructionSyntaxError("split parameter must be >= 1", position)
        basic: BasicInstruction = SplitOp(param)
    elif m.group("reply") is not None:
        param = int(m.group("reply"))
        if param < 1:
            raise InstructionSyntaxError("reply parameter must be >= 1", position)
        basic = ReplyOp(param)
    else:
        if m.group("in") is not None:
            idx = int(m.group("in"))
            if idx < 1:
                raise InstructionSyntaxError("input register index must be >= 1", position)
            focus: Focus = InReg(idx)
        elif m.group("aux") is not None:
            idx = int(m.group("aux"))
            if idx < 1:
                raise InstructionSyntaxError("auxiliary register index must be >= 1", position)
            focus = AuxReg(idx)
        else:
            focus = OUT
        basic = RegisterOp(focus, m.group("method"))

    sign = m.group("sign")
    if sign == "+":
        return PosTest(basic)
    if sign == "-":
        return NegTest(basic)
    return Plain(basic)


def parse(text: str) -> InstructionSequence:
    """Parse instruction-sequence text (whitespace-insensitive, ';' separated)."""
    if not text.strip():
        raise InstructionSyntaxError("empty instruction sequence", 0)
    items = []
    offset = 0
    for chunk in text.split(";"):
        token = re.sub(r"\s+", "", chunk)
        start = offset + len(chunk) - len(chunk.lstrip())
        if not token:
            raise InstructionSyntaxError("empty instruction between separators", start)
        items.append(_parse_one(token, start))
        offset += len(chunk) + 1
    return InstructionSequence(tuple(items))
