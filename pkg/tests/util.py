"""Shared test helpers: random generators and the algebraic evaluation oracle.

The oracle composes the published semantics literally (behaviour tree, use
chain over the registers, apply on the output register) and is kept
independent of the program-counter executors it checks.
"""

from __future__ import annotations

import random

from boolseq.instr import (
    GET,
    SET_FALSE,
    SET_TRUE,
    AuxReg,
    InReg,
    InstructionSequence,
    Jump,
    NegTest,
    OUT,
    Plain,
    PosTest,
    RegisterOp,
    ReplyOp,
    SplitOp,
    TERM,
    classify,
)
from boolseq.services import (
    DIVERGENT,
    BoolRegister,
    RegState,
    Terminated,
    apply,
    use,
)
from boolseq.splitting import csi
from boolseq.threads import extract


def algebraic_outcome(x: InstructionSequence, inputs):
    """Literal chain: behaviour tree, use aux registers (False), use inputs, apply out."""
    t = extract(x)
    for j in range(1, classify(x).max_aux_index + 1):
        t = use(t, AuxReg(j), BoolRegister(RegState.FALSE))
    for i, b in enumerate(inputs, start=1):
        t = use(t, InReg(i), BoolRegister(RegState.of(b)))
    return apply(t, OUT, BoolRegister(RegState.FALSE))


def algebraic_splitting_outcome(x: InstructionSequence, inputs):
    """Literal chain with cyclic interleaving of the singleton thread vector."""
    t = csi((extract(x),))
    for i, b in enumerate(inputs, start=1):
        t = use(t, InReg(i), BoolRegister(RegState.of(b)))
    return apply(t, OUT, BoolRegister(RegState.FALSE))


def outcome_matches_service(run_outcome, service_result) -> bool:
    """Terminated(out=o) corresponds to a register holding o; anything else to divergence."""
    if isinstance(run_outcome, Terminated):
        return (
            isinstance(service_result, BoolRegister)
            and (service_result.state is RegState.TRUE) == run_outcome.registers.out
        )
    return service_result is DIVERGENT


# --- random sequence generators -------------------------------------------------


def _random_form(rng: random.Random, basic):
    return rng.choice((Plain, PosTest, NegTest))(basic)


def gen_isbr(
    rng: random.Random,
    max_len: int,
    n_inputs: int,
    max_aux: int = 2,
    allow_out_set_false: bool = True,
) -> InstructionSequence:
    """A random register-only sequence (jumps and terminations included)."""
    length = rng.randint(1, max_len)
    basics = [RegisterOp(InReg(j), GET) for j in range(1, n_inputs + 1)]
    for j in range(1, max_aux + 1):
        basics += [
            RegisterOp(AuxReg(j), GET),
            RegisterOp(AuxReg(j), SET_TRUE),
            RegisterOp(AuxReg(j), SET_FALSE),
        ]
    basics.append(RegisterOp(OUT, SET_TRUE))
    if allow_out_set_false:
        basics.append(RegisterOp(OUT, SET_FALSE))
    items = []
    for _ in range(length):
        roll = rng.random()
        if roll < 0.12:
            items.append(TERM)
        elif roll < 0.24:
            items.append(Jump(rng.randint(0, max_len + 1)))
        else:
            items.append(_random_form(rng, rng.choice(basics)))
    return InstructionSequence(tuple(items))


def gen_sisbr(
    rng: random.Random,
    max_len: int,
    n_inputs: int,
    max_splits: int = 3,
    max_params: int = 3,
) -> InstructionSequence:
    """A random fork/reply sequence with a bounded number of splits."""
    length = rng.randint(1, max_len)
    basics = [RegisterOp(InReg(j), GET) for j in range(1, n_inputs + 1)]
    basics.append(RegisterOp(OUT, SET_TRUE))
    items = []
    splits = 0
    for _ in range(length):
        roll = rng.random()
        if roll < 0.12:
            items.append(TERM)
        elif roll < 0.22:
            items.append(Jump(rng.randint(0, max_len + 1)))
        elif roll < 0.34 and splits < max_splits:
            splits += 1
            items.append(_random_form(rng, SplitOp(rng.randint(1, max_params))))
        elif roll < 0.46:
            items.append(_random_form(rng, ReplyOp(rng.randint(1, max_params))))
        else:
            items.append(_random_form(rng, rng.choice(basics)))
    return InstructionSequence(tuple(items))


def gen_sisbr_single_read(
    rng: random.Random,
    max_len: int,
    n_inputs: int,
    max_splits: int = 2,
) -> InstructionSequence:
    """Fork/reply sequence in the class where the reachability reduction is sound.

    Exactly one out.set:T; splits in plain form with distinct parameters
    (both children continue at the same position, so both parameter values
    reach every later position); each parameter read at most once, after its
    split.  A test-form split filters downstream positions by the parameter
    value and the reduction's both-successor edges then overapproximate.
    """
    while True:
        length = rng.randint(3, max_len)
        slots: list = [None] * length
        positions = list(range(length))
        rng.shuffle(positions)
        accept_pos = positions.pop()
        slots[accept_pos] = _random_form(rng, RegisterOp(OUT, SET_TRUE))
        n_splits = rng.randint(0, max_splits)
        split_positions = sorted(positions[:n_splits])
        param = 0
        for pos in split_positions:
            param += 1
            slots[pos] = Plain(SplitOp(param))
        remaining = positions[n_splits:]
        reads_placed = set()
        for pos in remaining:
            roll = rng.random()
            candidates = [
                p
                for p, split_pos in enumerate(split_positions, start=1)
                if split_pos < pos and p not in reads_placed
            ]
            if roll < 0.3 and candidates:
                p = rng.choice(candidates)
                reads_placed.add(p)
                slots[pos] = _random_form(rng, ReplyOp(p))
            elif roll < 0.5:
                slots[pos] = TERM
            elif roll < 0.65:
                slots[pos] = Jump(rng.randint(0, max_len + 1))
            elif n_inputs > 0 and roll < 0.9:
                slots[pos] = _random_form(rng, RegisterOp(InReg(rng.randint(1, n_inputs)), GET))
            else:
                slots[pos] = TERM
        x = InstructionSequence(tuple(slots))
        if classify(x).is_sisbr:
            return x


def gen_cnf(rng: random.Random, max_vars: int, max_clauses: int, max_clause_len: int = 4):
    from boolseq.compilers import Cnf, Literal

    num_vars = rng.randint(1, max_vars)
    clauses = []
    for _ in range(rng.randint(1, max_clauses)):
        clause = tuple(
            Literal(rng.randint(1, num_vars), negated=rng.random() < 0.5)
            for _ in range(rng.randint(1, max_clause_len))
        )
        clauses.append(clause)
    return Cnf(num_vars, tuple(clauses))


def gen_formula(rng: random.Random, max_vars: int, size: int):
    """Random not/or/and formula with roughly ``size`` connectives."""
    from boolseq.compilers import And, FVar, Not, Or

    if size <= 1:
        return FVar(rng.randint(1, max_vars))
    roll = rng.random()
    if roll < 0.25:
        return Not(gen_formula(rng, max_vars, size - 1))
    left_size = rng.randint(1, max(1, size - 2))
    ctor = Or if roll < 0.625 else And
    return ctor(
        gen_formula(rng, max_vars, left_size),
        gen_formula(rng, max_vars, size - 1 - left_size),
    )


def gen_circuit(rng: random.Random, max_inputs: int, max_gates: int):
    from boolseq.compilers import AndGate, Circuit, GateRef, InputRef, NotGate, OrGate

    num_inputs = rng.randint(1, max_inputs)
    num_gates = rng.randint(1, max_gates)
    gates = []
    for k in range(1, num_gates + 1):
        def node():
            if k == 1 or rng.random() < 0.4:
                return InputRef(rng.randint(1, num_inputs))
            return GateRef(rng.randint(1, k - 1))

        roll = rng.random()
        if roll < 0.3:
            gates.append(NotGate(node()))
        elif roll < 0.65:
            gates.append(OrGate(node(), node()))
        else:
            gates.append(AndGate(node(), node()))
    return Circuit(num_inputs, tuple(gates), num_gates)
