"""Bit-vector encoded 3-CNF satisfiability and its sequence constructions.

A bit vector of length n selects disjunctions of at most three literals
through a fixed bijection ``alpha`` between positive integers and literal
sets; the selected disjunctions form a 3-CNF whose satisfiability is the
value of the family member at that vector.  Only the first ``ndisj(k)``
bits matter, for the largest k whose literal sets all fit.

This module holds the bijection and its inverse, the evaluator, the
decode/encode pair between bit vectors and 3-CNFs, a fork/reply sequence
builder that computes the family member at a given arity, the
reachability-formula reduction from fork/reply sequences back to formula
satisfiability, and a bounded-length reducibility checker.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb

from .compilers import (
    And,
    BoolFormula,
    Cnf,
    FVar,
    Literal,
    Not,
    Or,
    compile_formula,
    eval_cnf,
    formula_satisfiable,
)
from .instr import (
    GET,
    SET_TRUE,
    BasicInstruction,
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
    Term,
    classify,
    psize,
)
from .services import Terminated, run

MAX_GUESSED_VARS = 20


def ndisj(k: int) -> int:
    """Number of nonempty sets of at most three literals over k variables."""
    if k < 0:
        raise ValueError("ndisj is defined on natural numbers")
    return comb(2 * k, 1) + comb(2 * k, 2) + comb(2 * k, 3)


@dataclass(frozen=True)
class LiteralSet:
    """A set of one to three distinct literals."""

    literals: frozenset[Literal]

    def __post_init__(self):
        if not 1 <= len(self.literals) <= 3:
            raise ValueError("literal set must have between 1 and 3 members")

    def max_var(self) -> int:
        return max(lit.var for lit in self.literals)

    def sorted_literals(self) -> tuple[Literal, ...]:
        return tuple(sorted(self.literals, key=_literal_code))


def _literal_code(lit: Literal) -> int:
    # v_j -> 2j-1, not v_j -> 2j: a total order on literals.
    return 2 * lit.var if lit.negated else 2 * lit.var - 1


def _literal_of_code(code: int) -> Literal:
    var, rem = divmod(code + 1, 2)
    return Literal(var, negated=rem == 1)


@lru_cache(maxsize=64)
def _block(m: int) -> list[LiteralSet]:
    """All literal sets whose maximum variable is m, in canonical order.

    Order within the block: cardinality first, then lexicographic on the
    sorted literal codes.  Blocks are what make the enumeration
    prefix-compatible: sets over the first k variables occupy exactly the
    first ndisj(k) positions regardless of k.
    """
    codes = range(1, 2 * m + 1)
    own = {2 * m - 1, 2 * m}
    sets = []
    for size in (1, 2, 3):
        for combo in combinations(codes, size):
            if own.intersection(combo):
                sets.append(LiteralSet(frozenset(_literal_of_code(c) for c in combo)))
    return sets


def alpha(i: int) -> LiteralSet:
    """The i-th literal set in the canonical enumeration (i >= 1)."""
    if i < 1:
        raise ValueError("alpha is defined on positive integers")
    m = 1
    while ndisj(m) < i:
        m += 1
        if m > 2 * MAX_GUESSED_VARS:
            raise ValueError("resource bound exceeded in alpha")
    return _block(m)[i - ndisj(m - 1) - 1]


def alpha_rank(literal_set: LiteralSet) -> int:
    """Position of a literal set in the canonical enumeration; inverse of alpha."""
    m = literal_set.max_var()
    return ndisj(m - 1) + _block(m).index(literal_set) + 1


@dataclass(frozen=True)
class SatcInstance:
    """A bit vector; bits beyond ndisj(k) for the derived k are inert."""

    bits: tuple[bool, ...]

    @property
    def k(self) -> int:
        """Largest k with ndisj(k) <= len(bits)."""
        k = 0
        while ndisj(k + 1) <= len(self.bits):
            k += 1
        return k


def satc_eval(inst: SatcInstance) -> bool:
    """Is the selected conjunction of disjunctions satisfiable?

    Builds the selected literal sets directly and decides satisfiability by
    exhaustive search over the k variables; the empty conjunction (no bit
    set, or too few bits to select anything) is satisfiable.  Kept
    independent of ``decode_to_cnf`` so the two can be checked against each
    other.
    """
    k = inst.k
    if k > MAX_GUESSED_VARS:
        raise ValueError(f"resource bound exceeded: {k} variables")
    selected = [alpha(i) for i in range(1, ndisj(k) + 1) if inst.bits[i - 1]]
    for assignment_bits in range(2**k):
        assignment = [(assignment_bits >> (k - 1 - i)) & 1 == 1 for i in range(k)]
        if all(
            any(
                assignment[lit.var - 1] != lit.negated
                for lit in literal_set.literals
            )
            for literal_set in selected
        ):
            return True
    return False


def cnf_satisfiable(phi: Cnf) -> bool:
    """Exhaustive satisfiability of a CNF over its declared variables."""
    n = phi.num_vars
    if n > MAX_GUESSED_VARS:
        raise ValueError(f"resource bound exceeded: {n} variables")
    for bits in range(2**n):
        assignment = [(bits >> (n - 1 - i)) & 1 == 1 for i in range(n)]
        if eval_cnf(phi, assignment):
            return True
    return False


def decode_to_cnf(bits: tuple[bool, ...] | list[bool]) -> Cnf:
    """The 3-CNF a bit vector encodes: one clause per selected literal set."""
    bits = tuple(bits)
    inst = SatcInstance(bits)
    k = inst.k
    clauses = []
    for i in range(1, ndisj(k) + 1):
        if bits[i - 1]:
            clauses.append(alpha(i).sorted_literals())
    return Cnf(k, tuple(clauses))


def encode_cnf(phi: Cnf) -> tuple[bool, ...]:
    """Shortest bit vector whose decoding is the given 3-CNF (as a clause set).

    Each clause must have one to three distinct literals, and no two clauses
    may coincide as sets.  The vector has length ndisj(m) for the largest
    variable m actually used: any shorter vector would derive a smaller k
    and lose the clauses mentioning m.
    """
    ranks = set()
    seen = set()
    max_var = 0
    for clause in phi.clauses:
        literal_set = frozenset(clause)
        if len(literal_set) != len(clause):
            raise ValueError("duplicate literal within a clause")
        if not 1 <= len(literal_set) <= 3:
            raise ValueError("clause must have 1 to 3 distinct literals")
        if literal_set in seen:
            raise ValueError("duplicate clause set; encoding would collapse them")
        seen.add(literal_set)
        rank = alpha_rank(LiteralSet(literal_set))
        ranks.add(rank)
        max_var = max(max_var, max(lit.var for lit in clause))
    length = ndisj(max_var)
    return tuple(i in ranks for i in range(1, length + 1))


# --- the fork/reply sequence for one family member ---------------------------------


def build_satc_splitter(n: int) -> InstructionSequence:
    """A fork/reply sequence computing the arity-n family member.

    Forks once per guessed variable, then runs the compiled formula
    "every selected disjunction holds", where clause i's selector is read
    from input register i and guessed variable j from parameter j.  Some
    branch accepts exactly when some assignment satisfies the selected
    clauses.
    """
    if n < 0:
        raise ValueError("arity must be a natural number")
    inst = SatcInstance((False,) * n)
    k = inst.k
    if k > MAX_GUESSED_VARS:
        raise ValueError(f"resource bound exceeded: {k} guessed variables")
    accept = InstructionSequence((PosTest(RegisterOp(OUT, SET_TRUE)), TERM))
    if k == 0:
        # Arity below ndisj(1): no disjunction is selectable, constant True.
        return accept

    # Formula variables 1..k are the guesses; k+i is clause i's selector.
    def leaf(index: int) -> BasicInstruction:
        if index <= k:
            return ReplyOp(index)
        return RegisterOp(InReg(index - k), GET)

    conjuncts: list[BoolFormula] = []
    for i in range(1, ndisj(k) + 1):
        disjunction: BoolFormula = Not(FVar(k + i))
        for lit in alpha(i).sorted_literals():
            term: BoolFormula = Not(FVar(lit.var)) if lit.negated else FVar(lit.var)
            disjunction = Or(disjunction, term)
        conjuncts.append(disjunction)
    psi = conjuncts[-1]
    for phi in reversed(conjuncts[:-1]):
        psi = And(phi, psi)

    body = compile_formula(psi, leaf)
    prefix = tuple(Plain(SplitOp(j)) for j in range(1, k + 1))
    return InstructionSequence(prefix + body.items)


# --- reachability reduction ----------------------------------------------------------


def _successors(u, pos: int, k: int, inputs: tuple[bool, ...]) -> list[int]:
    """Positions execution may reach right after executing ``u`` at ``pos``.

    Input reads are resolved by the given bits, writes of True reply True,
    fork and reply instructions contribute the successors of both replies.
    Successors past the end are dropped (those paths deadlock).
    """
    if isinstance(u, Term):
        return []
    if isinstance(u, Jump):
        if u.distance == 0 or pos + u.distance > k:
            return []
        return [pos + u.distance]

    def by_reply(reply: bool) -> int:
        if isinstance(u, Plain):
            return pos + 1
        if isinstance(u, PosTest):
            return pos + 1 if reply else pos + 2
        return pos + 2 if reply else pos + 1

    basic = u.basic
    if isinstance(basic, RegisterOp):
        if isinstance(basic.focus, InReg):
            if basic.focus.index > len(inputs):
                raise ValueError(f"input register in:{basic.focus.index} beyond the given arity")
            replies = [inputs[basic.focus.index - 1]]
        else:  # out.set:T always replies True
            replies = [True]
    else:  # SplitOp / ReplyOp: both replies possible
        replies = [True, False]
    return sorted({s for r in replies for s in (by_reply(r),) if s <= k})


def reachability_formula(x: InstructionSequence, inputs: tuple[bool, ...] | list[bool]) -> BoolFormula:
    """Formula satisfiable when some branch of ``x`` reaches its accepting write.

    Variable i stands for "position i is executed on some branch".  The
    formula asserts the entry position, the position of the unique
    ``out.set:T``, and, for every other position, that it is executed
    exactly when one of its control-graph predecessors is.  The
    equivalences are expanded into not/or/and; a position with no
    predecessors contributes its negation.
    """
    profile = classify(x)
    if not profile.is_sisbr:
        raise ValueError("reachability_formula requires a split/reply vocabulary sequence")
    inputs = tuple(inputs)
    k = psize(x)
    accepts = [
        pos
        for pos in range(1, k + 1)
        if _is_out_set_true(x.items[pos - 1])
    ]
    if len(accepts) != 1:
        raise ValueError(
            f"reachability_formula requires exactly one out.set:T occurrence, found {len(accepts)}"
        )
    accept_pos = accepts[0]

    predecessors: dict[int, list[int]] = {i: [] for i in range(2, k + 1)}
    for pos in range(1, k + 1):
        for succ in _successors(x.items[pos - 1], pos, k, inputs):
            predecessors[succ].append(pos)

    conjuncts: list[BoolFormula] = [FVar(1), FVar(accept_pos)]
    for i in range(2, k + 1):
        preds = predecessors[i]
        if not preds:
            conjuncts.append(Not(FVar(i)))
            continue
        disj: BoolFormula = FVar(preds[0])
        for p in preds[1:]:
            disj = Or(disj, FVar(p))
        # v_i <-> disj, expanded into basic connectives.
        conjuncts.append(And(Or(FVar(i), Not(disj)), Or(Not(FVar(i)), disj)))
    phi = conjuncts[-1]
    for c in reversed(conjuncts[:-1]):
        phi = And(c, phi)
    return phi


def _is_out_set_true(u) -> bool:
    return (
        isinstance(u, (Plain, PosTest, NegTest))
        and isinstance(u.basic, RegisterOp)
        and u.basic.focus == OUT
        and u.basic.method == SET_TRUE
    )


def reachability_satisfiable(x: InstructionSequence, inputs: tuple[bool, ...] | list[bool]) -> bool:
    """Brute-force satisfiability of the reachability formula."""
    return formula_satisfiable(reachability_formula(x, inputs), psize(x))


# --- bounded-length reducibility -------------------------------------------------------


def check_length_reduction(f_table, g_table, helpers: list[InstructionSequence], l: int) -> bool:
    """Is f length-l reducible to g through the given helper sequences?

    True iff there is one helper per argument of g, every helper is at most
    l instructions long and computes a total function at f's arity, and
    composing g with the helper outputs reproduces f on every input vector.
    """
    if len(helpers) != g_table.arity:
        raise ValueError(
            f"need {g_table.arity} helper sequences (one per argument of g), got {len(helpers)}"
        )
    if any(psize(h) > l for h in helpers):
        return False
    n = f_table.arity
    helper_values: list[list[bool]] = []
    for h in helpers:
        values = []
        for idx in range(2**n):
            outcome = run(h, f_table.vector(idx))
            if not isinstance(outcome, Terminated):
                return False
            values.append(outcome.registers.out)
        helper_values.append(values)
    for idx in range(2**n):
        image = tuple(helper_values[m][idx] for m in range(len(helpers)))
        if f_table.values[idx] != g_table.lookup(image):
            return False
    return True
