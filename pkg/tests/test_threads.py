"""Behaviour-tree extraction and the linear-size substitution representation."""

import random
from itertools import product

from boolseq.instr import (
    GET,
    InReg,
    InstructionSequence,
    Jump,
    OUT,
    Plain,
    PosTest,
    RegisterOp,
    SET_TRUE,
    TERM,
    parse,
    psize,
)
from boolseq.threads import (
    DEAD,
    STOP,
    PostCond,
    Subst,
    Tau,
    Var,
    eval_xthread,
    extract,
    extract_compact,
    node_count,
    render_thread,
    tsize,
)

from util import gen_isbr, gen_sisbr

IN1_GET = RegisterOp(InReg(1), GET)


def test_extract_terminates():
    assert extract(parse("!")) == STOP


def test_extract_zero_jump_deadlocks():
    assert extract(parse("#0 ; !")) == DEAD


def test_extract_positive_test():
    assert extract(parse("+in:1.get ; !")) == PostCond(IN1_GET, STOP, DEAD)


def test_extract_negative_test():
    assert extract(parse("-in:1.get ; !")) == PostCond(IN1_GET, DEAD, STOP)


def test_extract_plain_prefixes_both_branches():
    assert extract(parse("in:1.get ; !")) == PostCond(IN1_GET, STOP, STOP)


def test_extract_lone_basic_deadlocks():
    assert extract(parse("in:1.get")) == PostCond(IN1_GET, DEAD, DEAD)


def test_extract_jump_unwinding():
    assert extract(parse("#1 ; !")) == STOP
    assert extract(parse("#2 ; in:1.get ; !")) == STOP
    assert extract(parse("#2 ; !")) == DEAD  # jump one past the end
    assert extract(parse("#5 ; ! ; !")) == DEAD
    assert extract(parse("#9")) == DEAD


def test_extract_termination_ignores_rest():
    assert extract(parse("! ; #0 ; in:1.get")) == STOP


def test_extract_jump_one_prefix_is_identity():
    rng = random.Random(23)
    for _ in range(100):
        x = gen_isbr(rng, 8, 2) if rng.random() < 0.5 else gen_sisbr(rng, 8, 2)
        prefixed = InstructionSequence((Jump(1),) + x.items)
        assert extract(prefixed) == extract(x)


def _contains_binder(t) -> bool:
    if isinstance(t, (Var, Subst)):
        return True
    if isinstance(t, Tau):
        return _contains_binder(t.next)
    if isinstance(t, PostCond):
        return _contains_binder(t.on_true) or _contains_binder(t.on_false)
    return False


def test_extract_never_produces_binders():
    rng = random.Random(29)
    for _ in range(100):
        assert not _contains_binder(extract(gen_isbr(rng, 10, 3)))


def test_extract_compact_golden():
    compact = extract_compact(parse("+in:1.get ; !"))
    assert compact == Subst(2, STOP, Subst(1, PostCond(IN1_GET, Var(2), Var(3)), Var(1)))
    assert tsize(compact) == 7


def test_extract_compact_singleton_base_case():
    assert extract_compact(parse("!")) == STOP


def test_eval_xthread_basic_binders():
    assert eval_xthread(Subst(1, STOP, Var(1))) == STOP
    assert eval_xthread(Var(5)) == DEAD
    assert eval_xthread(extract_compact(parse("+in:1.get ; !"))) == PostCond(IN1_GET, STOP, DEAD)


def test_tsize_leaves_and_nodes():
    assert tsize(STOP) == 1
    assert tsize(DEAD) == 1
    assert tsize(Var(3)) == 1
    assert tsize(PostCond(IN1_GET, STOP, DEAD)) == 3
    assert tsize(Tau(STOP)) == 3


ALPHABET = (
    PosTest(RegisterOp(InReg(1), GET)),
    PosTest(RegisterOp(InReg(2), GET)),
    Plain(RegisterOp(OUT, SET_TRUE)),
    Jump(0),
    Jump(2),
    TERM,
)


def test_compact_equivalence_exhaustive_small():
    for length in range(1, 5):
        for combo in product(ALPHABET, repeat=length):
            x = InstructionSequence(combo)
            assert eval_xthread(extract_compact(x)) == extract(x)
            assert tsize(extract_compact(x)) <= 4 * psize(x) + 1


def test_compact_equivalence_random():
    rng = random.Random(31)
    for _ in range(200):
        x = gen_isbr(rng, 12, 3) if rng.random() < 0.5 else gen_sisbr(rng, 12, 2)
        assert eval_xthread(extract_compact(x)) == extract(x)
        assert tsize(extract_compact(x)) <= 4 * psize(x) + 1


def test_alternating_test_chain_explodes_only_naively():
    items = []
    for i in range(20):
        items.append(PosTest(RegisterOp(InReg(1 + i % 2), GET)))
    items.append(TERM)
    x = InstructionSequence(tuple(items))
    assert psize(x) == 21
    assert node_count(extract(x)) > 2**10
    assert tsize(extract_compact(x)) <= 4 * 21 + 1
    assert eval_xthread(extract_compact(x)) == extract(x)


def test_render_thread_goldens():
    assert render_thread(extract(parse("+in:1.get ; !"))) == "(in:1.get ? S : D)"
    assert render_thread(Tau(STOP)) == "tau . S"
    assert (
        render_thread(extract_compact(parse("+in:1.get ; !")))
        == "[S/x2] [(in:1.get ? x2 : x3)/x1] x1"
    )
