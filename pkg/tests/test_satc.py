"""Literal-set enumeration, bit-vector encoded satisfiability, and reductions."""

import random

import pytest

from boolseq.compilers import Cnf, Literal, render_formula
from boolseq.instr import Plain, SplitOp, parse, psize, render
from boolseq.lab import TruthTable, truth_table
from boolseq.satc import (
    LiteralSet,
    SatcInstance,
    alpha,
    alpha_rank,
    build_satc_splitter,
    check_length_reduction,
    cnf_satisfiable,
    decode_to_cnf,
    encode_cnf,
    ndisj,
    reachability_formula,
    reachability_satisfiable,
    satc_eval,
)
from boolseq.services import parse_input_bits
from boolseq.splitting import Terminated, check_splitting_computes, run_splitting

from util import gen_sisbr_single_read


def lits(*pairs) -> LiteralSet:
    return LiteralSet(frozenset(Literal(v, negated=neg) for v, neg in pairs))


def test_ndisj_small_values():
    assert ndisj(0) == 0
    assert ndisj(1) == 3
    assert ndisj(2) == 14
    assert ndisj(4) == 92


def test_ndisj_closed_form():
    for k in range(0, 1001):
        assert 3 * ndisj(k) == 4 * k**3 + 5 * k


def test_alpha_first_block():
    assert alpha(1) == lits((1, False))
    assert alpha(2) == lits((1, True))
    assert alpha(3) == lits((1, False), (1, True))


def test_alpha_rank_is_inverse_exhaustively():
    for i in range(1, ndisj(4) + 1):
        assert alpha_rank(alpha(i)) == i


def test_alpha_prefix_compatibility():
    # The first ndisj(i) positions enumerate exactly the literal sets over v1..vi.
    for i in range(1, 5):
        block = {alpha(j) for j in range(1, ndisj(i) + 1)}
        assert len(block) == ndisj(i)
        assert all(ls.max_var() <= i for ls in block)


def test_literal_set_validation():
    with pytest.raises(ValueError):
        LiteralSet(frozenset())
    with pytest.raises(ValueError):
        LiteralSet(frozenset(Literal(v) for v in (1, 2, 3, 4)))


def test_satc_eval_goldens():
    assert satc_eval(SatcInstance(())) is True
    assert satc_eval(SatcInstance(parse_input_bits("FFF"))) is True
    assert satc_eval(SatcInstance(parse_input_bits("TTF"))) is False
    assert satc_eval(SatcInstance(parse_input_bits("TFT"))) is True


def test_satc_instance_k():
    assert SatcInstance(()).k == 0
    assert SatcInstance((False,) * 2).k == 0
    assert SatcInstance((False,) * 3).k == 1
    assert SatcInstance((False,) * 13).k == 1
    assert SatcInstance((False,) * 14).k == 2


def _inert_region_false(w: tuple[bool, ...]) -> bool:
    boundary = ndisj(SatcInstance(w).k)
    return not any(w[boundary:])


def test_satc_eval_convergence_on_canonical_vectors():
    # Appending False preserves the value whenever the currently inert bits
    # are all False; bits in the inert gap otherwise become active the
    # moment the vector length crosses the next block boundary.
    checked = 0
    for n in range(0, 11):
        for bits in range(2**n):
            w = tuple((bits >> (n - 1 - i)) & 1 == 1 for i in range(n))
            if not _inert_region_false(w):
                continue
            checked += 1
            assert satc_eval(SatcInstance(w)) == satc_eval(SatcInstance(w + (False,)))
    # 1 canonical vector per length below ndisj(1), 2^3 per length 3..10.
    assert checked == 3 + 8 * 8


def test_satc_eval_convergence_gap_counterexample():
    # Universal convergence fails: TT selects nothing (k=0) but TTF selects
    # the contradictory pair {v1}, {not v1}.
    assert satc_eval(SatcInstance((True, True))) is True
    assert satc_eval(SatcInstance((True, True, False))) is False


def test_decode_goldens():
    assert decode_to_cnf(parse_input_bits("TTF")) == Cnf(
        1, ((Literal(1),), (Literal(1, negated=True),))
    )
    assert decode_to_cnf(parse_input_bits("FF")) == Cnf(0, ())
    assert decode_to_cnf(parse_input_bits("TFT")) == Cnf(
        1, ((Literal(1),), (Literal(1), Literal(1, negated=True)))
    )


def test_encode_goldens():
    phi = Cnf(1, ((Literal(1),), (Literal(1, negated=True),)))
    assert encode_cnf(phi) == (True, True, False)
    assert encode_cnf(Cnf(0, ())) == ()


def test_encode_errors():
    with pytest.raises(ValueError):
        encode_cnf(Cnf(4, ((Literal(1), Literal(2), Literal(3), Literal(4)),)))
    with pytest.raises(ValueError):
        encode_cnf(Cnf(1, ((Literal(1), Literal(1)),)))
    with pytest.raises(ValueError):
        encode_cnf(Cnf(2, ((Literal(1), Literal(2)), (Literal(2), Literal(1))),))


def test_encode_minimality_brute_force():
    # No shorter vector decodes to the same clause set.
    phi = Cnf(1, ((Literal(1),), (Literal(1, negated=True),)))
    w = encode_cnf(phi)
    target = {frozenset(c) for c in phi.clauses}
    for shorter_len in range(len(w)):
        for bits in range(2**shorter_len):
            candidate = tuple((bits >> (shorter_len - 1 - i)) & 1 == 1 for i in range(shorter_len))
            decoded = {frozenset(c) for c in decode_to_cnf(candidate).clauses}
            assert decoded != target


def _random_three_cnf(rng: random.Random, max_vars: int) -> Cnf:
    num_vars = rng.randint(1, max_vars)
    universe = [
        frozenset(ls.literals)
        for ls in (alpha(i) for i in range(1, ndisj(num_vars) + 1))
        if ls.max_var() <= num_vars
    ]
    count = rng.randint(0, min(6, len(universe)))
    chosen = rng.sample(universe, count)
    return Cnf(num_vars, tuple(tuple(sorted(c, key=lambda l: (l.var, l.negated))) for c in chosen))


def test_decode_encode_round_trip_random():
    rng = random.Random(127)
    for _ in range(200):
        phi = _random_three_cnf(rng, 3)
        decoded = decode_to_cnf(encode_cnf(phi))
        assert {frozenset(c) for c in decoded.clauses} == {frozenset(c) for c in phi.clauses}


def test_decode_satisfiability_matches_eval_exhaustive_small():
    for n in range(0, 9):
        for bits in range(2**n):
            w = tuple((bits >> (n - 1 - i)) & 1 == 1 for i in range(n))
            assert cnf_satisfiable(decode_to_cnf(w)) == satc_eval(SatcInstance(w))


def test_build_satc_splitter_degenerate():
    assert render(build_satc_splitter(0)) == "+out.set:T ; !"
    assert render(build_satc_splitter(2)) == "+out.set:T ; !"


def test_build_satc_splitter_structure():
    z = build_satc_splitter(3)
    assert z.items[0] == Plain(SplitOp(1))
    assert not any(isinstance(u, Plain) and isinstance(u.basic, SplitOp) for u in z.items[1:])


def test_build_satc_splitter_golden_run():
    z = build_satc_splitter(3)
    outcome = run_splitting(z, parse_input_bits("TTF"))
    assert isinstance(outcome, Terminated) and outcome.registers.out is False


def test_build_satc_splitter_computes_family_member():
    for n in range(0, 5):
        table = TruthTable.tabulate(n, lambda v: satc_eval(SatcInstance(v)))
        assert check_splitting_computes(build_satc_splitter(n), table), n


def test_reachability_formula_golden_fork():
    phi = reachability_formula(parse("+split:1 ; ! ; out.set:T ; !"), ())
    assert render_formula(phi) == (
        "(and v1 (and v3 (and (and (or v2 (not v1)) (or (not v2) v1)) "
        "(and (and (or v3 (not v1)) (or (not v3) v1)) "
        "(and (or v4 (not v3)) (or (not v4) v3))))))"
    )
    assert reachability_satisfiable(parse("+split:1 ; ! ; out.set:T ; !"), ())


def test_reachability_formula_straight_line():
    assert reachability_satisfiable(parse("out.set:T ; !"), ())


def test_reachability_formula_unreachable_accept():
    assert not reachability_satisfiable(parse("! ; out.set:T ; !"), ())


def test_reachability_formula_requires_unique_accept():
    with pytest.raises(ValueError, match="exactly one"):
        reachability_formula(parse("out.set:T ; out.set:T ; !"), ())
    with pytest.raises(ValueError, match="exactly one"):
        reachability_formula(parse("!"), ())


def test_reachability_matches_executor_on_restricted_class():
    # The reduction presumes sequences that compute total functions: a
    # deadlocking branch has no output bit for the formula to match.
    rng = random.Random(131)
    checked = 0
    while checked < 60:
        n = rng.randint(0, 2)
        x = gen_sisbr_single_read(rng, 10, n, max_splits=2)
        if not truth_table(x, n, splitting=True).is_total:
            continue
        checked += 1
        for idx in range(2**n):
            inputs = tuple((idx >> (n - 1 - i)) & 1 == 1 for i in range(n))
            outcome = run_splitting(x, inputs)
            accepted = isinstance(outcome, Terminated) and outcome.registers.out
            assert reachability_satisfiable(x, inputs) == accepted, f"{x} on {inputs}"


def test_reachability_overapproximates_branch_filtered_reads():
    # A test-form split filters which parameter value reaches the read at
    # position 3 (only the False branch gets there), but the reduction's
    # both-successor edges admit the phantom True outcome.  The formula is
    # sound only for plain-form splits; this pins the known limitation.
    x = parse("+split:1 ; ! ; -reply:1 ; ! ; +split:2 ; out.set:T ; -in:1.get")
    assert truth_table(x, 2, splitting=True).values == (False,) * 4
    assert reachability_satisfiable(x, (False, False)) is True


def test_check_length_reduction_identity():
    table = truth_table(parse("+in:1.get ; out.set:T ; !"), 1)
    helper = parse("+in:1.get ; out.set:T ; !")
    assert check_length_reduction(table, table, [helper], 3)
    assert not check_length_reduction(table, table, [helper], 2)


def test_check_length_reduction_negation():
    from boolseq.compilers import FVar, Not, compile_formula

    g = truth_table(parse("+in:1.get ; out.set:T ; !"), 1)  # identity
    f = TruthTable(1, (True, False))  # negation
    helper = compile_formula(Not(FVar(1)))
    assert psize(helper) == 4
    assert check_length_reduction(f, g, [helper], 4)


def test_check_length_reduction_arity_mismatch():
    table = TruthTable(1, (False, True))
    with pytest.raises(ValueError):
        check_length_reduction(table, table, [], 3)
