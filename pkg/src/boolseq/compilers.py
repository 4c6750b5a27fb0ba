"""Boolean sources (CNF, formulas, circuits) and their sequence compilers.

Each source kind induces an n-ary Boolean function; ``eval_formula`` is the
truth-functional oracle for all three.  The compilers emit register-only
instruction sequences that compute the same function:

* ``compile_cnf``: clause-by-clause chains using only ``#2`` jumps;
* ``compile_cnf_jumpfree``: the same shape with every jump replaced by an
  always-skipping write, so no jump instructions occur at all;
* ``compile_formula``: structural compilation of not/or/and with
  short-circuit jumps, never writing ``out.set:F``;
* ``compile_circuit``: one auxiliary register per gate, gates emitted in
  topological order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Sequence, Union

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
    PosTest,
    PrimitiveInstruction,
    RegisterOp,
    TERM,
)

# --- source ASTs -------------------------------------------------------------


@dataclass(frozen=True)
class Literal:
    """A propositional variable or its negation."""

    var: int
    negated: bool = False

    def __post_init__(self):
        if self.var < 1:
            raise ValueError(f"literal variable must be >= 1, got {self.var}")


@dataclass(frozen=True)
class Cnf:
    """Conjunction of disjunctions of literals; zero clauses means constant True."""

    num_vars: int
    clauses: tuple[tuple[Literal, ...], ...]

    def __post_init__(self):
        for clause in self.clauses:
            if not clause:
                raise ValueError("CNF clause must be nonempty")
            for lit in clause:
                if lit.var > self.num_vars:
                    raise ValueError(f"literal v{lit.var} exceeds num_vars={self.num_vars}")


@dataclass(frozen=True)
class FVar:
    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("formula variable index must be >= 1")


@dataclass(frozen=True)
class Not:
    operand: "BoolFormula"


@dataclass(frozen=True)
class Or:
    left: "BoolFormula"
    right: "BoolFormula"


@dataclass(frozen=True)
class And:
    left: "BoolFormula"
    right: "BoolFormula"


BoolFormula = Union[FVar, Not, Or, And]


@dataclass(frozen=True)
class InputRef:
    index: int


@dataclass(frozen=True)
class GateRef:
    index: int


Node = Union[InputRef, GateRef]


@dataclass(frozen=True)
class NotGate:
    pred: Node


@dataclass(frozen=True)
class OrGate:
    left: Node
    right: Node


@dataclass(frozen=True)
class AndGate:
    left: Node
    right: Node


Gate = Union[NotGate, OrGate, AndGate]


@dataclass(frozen=True)
class Circuit:
    """Gates numbered from 1; predecessors are inputs or other gates."""

    num_inputs: int
    gates: tuple[Gate, ...]
    output_gate: int

    def __post_init__(self):
        if not self.gates:
            raise ValueError("circuit must have at least one gate")
        if not 1 <= self.output_gate <= len(self.gates):
            raise ValueError(f"output gate g{self.output_gate} does not exist")


# --- evaluation oracles -------------------------------------------------------


def eval_cnf(phi: Cnf, assignment: Sequence[bool]) -> bool:
    for clause in phi.clauses:
        if not any(_eval_literal(lit, assignment) for lit in clause):
            return False
    return True


def _eval_literal(lit: Literal, assignment: Sequence[bool]) -> bool:
    if lit.var > len(assignment):
        raise ValueError(f"unbound variable v{lit.var}")
    value = assignment[lit.var - 1]
    return not value if lit.negated else value


def _eval_bform(phi: BoolFormula, assignment: Sequence[bool]) -> bool:
    if isinstance(phi, FVar):
        if phi.index > len(assignment):
            raise ValueError(f"unbound variable v{phi.index}")
        return assignment[phi.index - 1]
    if isinstance(phi, Not):
        return not _eval_bform(phi.operand, assignment)
    if isinstance(phi, Or):
        return _eval_bform(phi.left, assignment) or _eval_bform(phi.right, assignment)
    return _eval_bform(phi.left, assignment) and _eval_bform(phi.right, assignment)


def eval_circuit(circuit: Circuit, assignment: Sequence[bool]) -> bool:
    if circuit.num_inputs > len(assignment):
        raise ValueError("assignment shorter than the circuit's input count")
    cache: dict[int, bool] = {}

    def node_value(node: Node, stack: frozenset[int]) -> bool:
        if isinstance(node, InputRef):
            if node.index > len(assignment):
                raise ValueError(f"unbound input in{node.index}")
            return assignment[node.index - 1]
        return gate_value(node.index, stack)

    def gate_value(k: int, stack: frozenset[int]) -> bool:
        if k in cache:
            return cache[k]
        if not 1 <= k <= len(circuit.gates):
            raise ValueError(f"dangling gate reference g{k}")
        if k in stack:
            raise ValueError("cyclic circuit")
        stack = stack | {k}
        gate = circuit.gates[k - 1]
        if isinstance(gate, NotGate):
            value = not node_value(gate.pred, stack)
        elif isinstance(gate, OrGate):
            value = node_value(gate.left, stack) or node_value(gate.right, stack)
        else:
            value = node_value(gate.left, stack) and node_value(gate.right, stack)
        cache[k] = value
        return value

    return gate_value(circuit.output_gate, frozenset())


def eval_formula(phi: Union[BoolFormula, Cnf, Circuit], assignment: Sequence[bool]) -> bool:
    """Truth-functional evaluation of any source kind; the compiler oracle."""
    if isinstance(phi, Cnf):
        return eval_cnf(phi, assignment)
    if isinstance(phi, Circuit):
        return eval_circuit(phi, assignment)
    return _eval_bform(phi, assignment)


def formula_vars(phi: BoolFormula) -> int:
    """Largest variable index occurring in the formula (0 if impossible)."""
    if isinstance(phi, FVar):
        return phi.index
    if isinstance(phi, Not):
        return formula_vars(phi.operand)
    return max(formula_vars(phi.left), formula_vars(phi.right))


def formula_satisfiable(phi: BoolFormula, num_vars: int | None = None) -> bool:
    """Exhaustive satisfiability over the first ``num_vars`` variables."""
    n = formula_vars(phi) if num_vars is None else num_vars
    if n > 25:
        raise ValueError(f"resource bound exceeded: {n} variables for exhaustive search")
    for bits in range(2**n):
        assignment = [(bits >> (n - 1 - i)) & 1 == 1 for i in range(n)]
        if _eval_bform(phi, assignment):
            return True
    return False


# --- CNF compilers ------------------------------------------------------------


def _literal_test(lit: Literal) -> PrimitiveInstruction:
    op = RegisterOp(InReg(lit.var), GET)
    return NegTest(op) if lit.negated else PosTest(op)


def compile_cnf(phi: Cnf) -> InstructionSequence:
    """Sequence computing a CNF, using no jump other than ``#2``.

    Per clause: each literal's test followed by ``#2``, then the block
    ``+out.set:F ; #2 ; !``.  A satisfied literal enters a chain of ``#2``
    hops that lands on the start of the next clause; an unsatisfied clause
    falls through, writes False, and terminates.  A trailing
    ``+out.set:T ; !`` accepts.
    """
    items: list[PrimitiveInstruction] = []
    for clause in phi.clauses:
        for lit in clause:
            items.append(_literal_test(lit))
            items.append(Jump(2))
        items.append(PosTest(RegisterOp(OUT, SET_FALSE)))
        items.append(Jump(2))
        items.append(TERM)
    items.append(PosTest(RegisterOp(OUT, SET_TRUE)))
    items.append(TERM)
    return InstructionSequence(tuple(items))


def compile_cnf_jumpfree(phi: Cnf) -> InstructionSequence:
    """CNF compilation with zero jump instructions.

    Every ``#2`` of ``compile_cnf`` is replaced by ``+out.set:F`` (which
    always skips, and whose spurious write is overwritten by the accepting
    tail) and each clause-final reject block shrinks to a bare ``!`` (the
    output register is still False when it is reached by falling through).
    """
    items: list[PrimitiveInstruction] = []
    for clause in phi.clauses:
        for lit in clause:
            items.append(_literal_test(lit))
            items.append(PosTest(RegisterOp(OUT, SET_FALSE)))
        items.append(TERM)
    items.append(PosTest(RegisterOp(OUT, SET_TRUE)))
    items.append(TERM)
    return InstructionSequence(tuple(items))


def cnf_compiled_size(phi: Cnf) -> int:
    """Exact length of ``compile_cnf(phi)``."""
    return sum(2 * len(clause) + 3 for clause in phi.clauses) + 2


# --- formula compiler -----------------------------------------------------------


def _compile_formula_block(
    phi: BoolFormula, leaf: Callable[[int], BasicInstruction]
) -> list[PrimitiveInstruction]:
    """Test block: control leaves one past the end when the formula holds,
    two past the end when it does not."""
    if isinstance(phi, FVar):
        return [PosTest(leaf(phi.index))]
    if isinstance(phi, Not):
        block = _compile_formula_block(phi.operand, leaf)
        block.append(Jump(2))
        return block
    if isinstance(phi, Or):
        left = _compile_formula_block(phi.left, leaf)
        right = _compile_formula_block(phi.right, leaf)
        return left + [Jump(len(right) + 1)] + right
    left = _compile_formula_block(phi.left, leaf)
    right = _compile_formula_block(phi.right, leaf)
    return left + [Jump(2), Jump(len(right) + 2)] + right


def compile_formula(
    phi: BoolFormula, leaf: Callable[[int], BasicInstruction] | None = None
) -> InstructionSequence:
    """Sequence computing a not/or/and formula, never writing ``out.set:F``.

    ``leaf`` maps a variable index to the basic instruction that tests it
    (default: read the input register of the same index); the true path
    falls into ``+out.set:T ; !`` and the false path skips straight to the
    final ``!``.
    """
    if leaf is None:
        leaf = lambda k: RegisterOp(InReg(k), GET)
    items = _compile_formula_block(phi, leaf)
    items.append(PosTest(RegisterOp(OUT, SET_TRUE)))
    items.append(TERM)
    return InstructionSequence(tuple(items))


def formula_block_size(phi: BoolFormula) -> int:
    """Exact length of the test block: var 1, not +1, or +1, and +2."""
    if isinstance(phi, FVar):
        return 1
    if isinstance(phi, Not):
        return formula_block_size(phi.operand) + 1
    if isinstance(phi, Or):
        return formula_block_size(phi.left) + formula_block_size(phi.right) + 1
    return formula_block_size(phi.left) + formula_block_size(phi.right) + 2


def formula_size(phi: BoolFormula) -> int:
    """Number of variable occurrences and connectives."""
    if isinstance(phi, FVar):
        return 1
    if isinstance(phi, Not):
        return formula_size(phi.operand) + 1
    return formula_size(phi.left) + formula_size(phi.right) + 1


# --- circuit compiler -----------------------------------------------------------


def _gate_preds(gate: Gate) -> tuple[Node, ...]:
    if isinstance(gate, NotGate):
        return (gate.pred,)
    return (gate.left, gate.right)


def topological_gate_order(circuit: Circuit) -> list[int]:
    """Stable topological order of gate indices (lowest ready index first)."""
    m = len(circuit.gates)
    for k, gate in enumerate(circuit.gates, start=1):
        for node in _gate_preds(gate):
            if isinstance(node, GateRef) and not 1 <= node.index <= m:
                raise ValueError(f"dangling gate reference g{node.index} in g{k}")
            if isinstance(node, InputRef) and node.index > circuit.num_inputs:
                raise ValueError(f"dangling input reference in{node.index} in g{k}")
    placed: set[int] = set()
    order: list[int] = []
    while len(order) < m:
        progressed = False
        for k in range(1, m + 1):
            if k in placed:
                continue
            preds = _gate_preds(circuit.gates[k - 1])
            if all(not isinstance(p, GateRef) or p.index in placed for p in preds):
                placed.add(k)
                order.append(k)
                progressed = True
                break
        if not progressed:
            raise ValueError("cyclic circuit")
    return order


def _node_test(node: Node) -> PrimitiveInstruction:
    if isinstance(node, InputRef):
        return PosTest(RegisterOp(InReg(node.index), GET))
    return PosTest(RegisterOp(AuxReg(node.index), GET))


def compile_circuit(circuit: Circuit) -> InstructionSequence:
    """Sequence computing a circuit, one auxiliary register per gate.

    Gate k's block evaluates its predecessors and conditionally executes
    ``+aux:k.set:T`` (3 instructions for not, 4 for or, 5 for and); the
    tail reads the output gate's register into ``out``.  Gates are emitted
    in topological order but keep their own register numbers, so shared
    fan-out is compiled once.
    """
    items: list[PrimitiveInstruction] = []
    for k in topological_gate_order(circuit):
        gate = circuit.gates[k - 1]
        set_gate = PosTest(RegisterOp(AuxReg(k), SET_TRUE))
        if isinstance(gate, NotGate):
            items.extend([_node_test(gate.pred), Jump(2), set_gate])
        elif isinstance(gate, OrGate):
            items.extend([_node_test(gate.left), Jump(2), _node_test(gate.right), set_gate])
        else:
            items.extend(
                [_node_test(gate.left), Jump(2), Jump(3), _node_test(gate.right), set_gate]
            )
    items.append(PosTest(RegisterOp(AuxReg(circuit.output_gate), GET)))
    items.append(PosTest(RegisterOp(OUT, SET_TRUE)))
    items.append(TERM)
    return InstructionSequence(tuple(items))


def circuit_compiled_size(circuit: Circuit) -> int:
    """Exact length of ``compile_circuit``: 3/4/5 per not/or/and gate, plus 3."""
    total = 3
    for gate in circuit.gates:
        total += 3 if isinstance(gate, NotGate) else 4 if isinstance(gate, OrGate) else 5
    return total


# --- text formats ----------------------------------------------------------------


def parse_dimacs(text: str) -> Cnf:
    """DIMACS-style CNF: ``p cnf <vars> <clauses>`` then 0-terminated clauses."""
    num_vars = None
    expected_clauses = None
    clauses: list[tuple[Literal, ...]] = []
    current: list[Literal] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            fields = line.split()
            if len(fields) != 4 or fields[0] != "p" or fields[1] != "cnf":
                raise ValueError(f"malformed DIMACS header: {line!r}")
            num_vars = int(fields[2])
            expected_clauses = int(fields[3])
            continue
        if num_vars is None:
            raise ValueError("DIMACS clause before header")
        for token in line.split():
            value = int(token)
            if value == 0:
                if not current:
                    raise ValueError("empty DIMACS clause")
                clauses.append(tuple(current))
                current = []
            else:
                current.append(Literal(abs(value), negated=value < 0))
    if current:
        raise ValueError("unterminated DIMACS clause")
    if num_vars is None:
        raise ValueError("missing DIMACS header")
    if expected_clauses != len(clauses):
        raise ValueError(f"header declares {expected_clauses} clauses, found {len(clauses)}")
    return Cnf(num_vars, tuple(clauses))


def render_dimacs(phi: Cnf) -> str:
    lines = [f"p cnf {phi.num_vars} {len(phi.clauses)}"]
    for clause in phi.clauses:
        lines.append(" ".join(str(-lit.var if lit.negated else lit.var) for lit in clause) + " 0")
    return "\n".join(lines)


_TOKEN_RE = re.compile(r"\(|\)|[^\s()]+")


def parse_formula(text: str) -> BoolFormula:
    """S-expression formulas: ``(and (or v1 (not v2)) v2)``.

    ``and``/``or`` accept two or more operands and fold to the right.
    """
    tokens = _TOKEN_RE.findall(text)
    if not tokens:
        raise ValueError("empty formula")
    pos = 0

    def parse_expr() -> BoolFormula:
        nonlocal pos
        if pos >= len(tokens):
            raise ValueError("unexpected end of formula")
        token = tokens[pos]
        pos += 1
        if token == "(":
            if pos >= len(tokens):
                raise ValueError("unexpected end of formula")
            head = tokens[pos]
            pos += 1
            args: list[BoolFormula] = []
            while pos < len(tokens) and tokens[pos] != ")":
                args.append(parse_expr())
            if pos >= len(tokens):
                raise ValueError("missing )")
            pos += 1
            if head == "not":
                if len(args) != 1:
                    raise ValueError("not takes exactly one operand")
                return Not(args[0])
            if head in ("and", "or"):
                if len(args) < 2:
                    raise ValueError(f"{head} takes at least two operands")
                ctor = And if head == "and" else Or
                node = args[-1]
                for arg in reversed(args[:-1]):
                    node = ctor(arg, node)
                return node
            raise ValueError(f"unknown operator {head!r}")
        if token == ")":
            raise ValueError("unexpected )")
        m = re.fullmatch(r"v(\d+)", token)
        if not m:
            raise ValueError(f"bad atom {token!r} (expected v<k>)")
        return FVar(int(m.group(1)))

    result = parse_expr()
    if pos != len(tokens):
        raise ValueError("trailing tokens after formula")
    return result


def render_formula(phi: BoolFormula) -> str:
    if isinstance(phi, FVar):
        return f"v{phi.index}"
    if isinstance(phi, Not):
        return f"(not {render_formula(phi.operand)})"
    op = "or" if isinstance(phi, Or) else "and"
    return f"({op} {render_formula(phi.left)} {render_formula(phi.right)})"


_NETLIST_GATE_RE = re.compile(
    r"^g(\d+)\s*=\s*(NOT|OR|AND)\s+(in\d+|g\d+)(?:\s+(in\d+|g\d+))?$"
)


def parse_netlist(text: str) -> Circuit:
    """Gate netlists: lines ``g<k> = NOT|OR|AND <node> [<node>]``, then ``output g<m>``."""

    def node_of(token: str) -> Node:
        if token.startswith("in"):
            return InputRef(int(token[2:]))
        return GateRef(int(token[1:]))

    gates: dict[int, Gate] = {}
    output: int | None = None
    max_input = 0
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = re.fullmatch(r"output\s+g(\d+)", line)
        if m:
            output = int(m.group(1))
            continue
        m = _NETLIST_GATE_RE.fullmatch(line)
        if not m:
            raise ValueError(f"malformed netlist line: {line!r}")
        index = int(m.group(1))
        kind = m.group(2)
        first = node_of(m.group(3))
        second = node_of(m.group(4)) if m.group(4) else None
        if kind == "NOT":
            if second is not None:
                raise ValueError(f"NOT gate g{index} takes one predecessor")
            gates[index] = NotGate(first)
        else:
            if second is None:
                raise ValueError(f"{kind} gate g{index} takes two predecessors")
            gates[index] = OrGate(first, second) if kind == "OR" else AndGate(first, second)
        for node in _gate_preds(gates[index]):
            if isinstance(node, InputRef):
                max_input = max(max_input, node.index)
    if output is None:
        raise ValueError("netlist is missing the output line")
    if not gates:
        raise ValueError("netlist has no gates")
    if sorted(gates) != list(range(1, len(gates) + 1)):
        raise ValueError("gate numbers must be 1..m without gaps")
    return Circuit(max_input, tuple(gates[k] for k in sorted(gates)), output)


def render_netlist(circuit: Circuit) -> str:
    def node_str(node: Node) -> str:
        return f"in{node.index}" if isinstance(node, InputRef) else f"g{node.index}"

    lines = []
    for k, gate in enumerate(circuit.gates, start=1):
        if isinstance(gate, NotGate):
            lines.append(f"g{k} = NOT {node_str(gate.pred)}")
        elif isinstance(gate, OrGate):
            lines.append(f"g{k} = OR {node_str(gate.left)} {node_str(gate.right)}")
        else:
            lines.append(f"g{k} = AND {node_str(gate.left)} {node_str(gate.right)}")
    lines.append(f"output g{circuit.output_gate}")
    return "\n".join(lines)
