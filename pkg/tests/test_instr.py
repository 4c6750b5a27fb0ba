"""Parsing, rendering, sizes, and syntactic classification."""

import random

import pytest

from boolseq.instr import (
    GET,
    SET_FALSE,
    SET_TRUE,
    AuxReg,
    InReg,
    InstructionSyntaxError,
    Jump,
    NegTest,
    OUT,
    Plain,
    PosTest,
    RegisterOp,
    TERM,
    classify,
    parse,
    psize,
    render,
    seq,
)

from util import gen_isbr, gen_sisbr


def test_parse_plain_and_term():
    x = parse("out.set:T ; !")
    assert x.items == (Plain(RegisterOp(OUT, SET_TRUE)), TERM)


def test_parse_test_jump_term():
    x = parse("+in:1.get ; #2 ; !")
    assert x.items == (PosTest(RegisterOp(InReg(1), GET)), Jump(2), TERM)


def test_parse_empty_is_error():
    with pytest.raises(InstructionSyntaxError):
        parse("")
    with pytest.raises(InstructionSyntaxError):
        parse("   ")


def test_parse_reports_position():
    with pytest.raises(InstructionSyntaxError) as err:
        parse("! ; bogus ; !")
    assert err.value.position == 4


def test_parse_whitespace_insensitive():
    assert parse(" + in:1 . get ;#2;  !  ") == parse("+in:1.get ; #2 ; !")


def test_parse_split_reply_forms():
    x = parse("+split:1 ; -reply:2 ; split:3")
    rendered = render(x)
    assert rendered == "+split:1 ; -reply:2 ; split:3"


def test_zero_indexed_registers_rejected():
    with pytest.raises(InstructionSyntaxError):
        parse("in:0.get ; !")
    with pytest.raises(InstructionSyntaxError):
        parse("split:0 ; !")


def test_render_goldens():
    assert render(seq(TERM)) == "!"
    assert render(seq(NegTest(RegisterOp(AuxReg(2), SET_FALSE)), TERM)) == "-aux:2.set:F ; !"
    assert render(seq(Jump(0))) == "#0"


def test_round_trip_random():
    rng = random.Random(7)
    for _ in range(300):
        x = gen_isbr(rng, 12, 3) if rng.random() < 0.5 else gen_sisbr(rng, 12, 2)
        assert parse(render(x)) == x


def test_psize():
    assert psize(parse("!")) == 1
    assert psize(parse("out.set:T ; !")) == 2


def test_psize_concat_additive():
    rng = random.Random(11)
    for _ in range(50):
        x = gen_isbr(rng, 6, 2)
        y = gen_isbr(rng, 6, 2)
        assert psize(x + y) == psize(x) + psize(y)
        assert (x + y).items == x.items + y.items


def test_concat_associative():
    rng = random.Random(13)
    for _ in range(20):
        x, y, z = (gen_isbr(rng, 4, 2) for _ in range(3))
        assert (x + y) + z == x + (y + z)


def test_classify_isbrna_example():
    profile = classify(parse("+in:1.get ; out.set:T ; !"))
    assert profile.is_isbr and profile.is_isbrna and profile.is_sisbr
    assert profile.max_jump == 0
    assert profile.max_input_index == 1
    assert profile.term_count == 1


def test_classify_aux_excluded_from_isbrna():
    profile = classify(parse("aux:1.set:T ; !"))
    assert profile.is_isbr
    assert not profile.is_isbrna
    assert not profile.is_sisbr
    assert profile.max_aux_index == 1


def test_classify_out_set_false_excluded_from_sisbr():
    profile = classify(parse("+split:1 ; ! ; out.set:F ; !"))
    assert not profile.is_sisbr
    assert profile.has_out_set_false
    assert profile.max_param_index == 1


def test_classify_input_writes_flagged():
    profile = classify(parse("in:1.set:T ; !"))
    assert not profile.is_isbr
    assert not profile.is_isbrna


def test_classify_subset_chain():
    rng = random.Random(17)
    for _ in range(200):
        x = gen_isbr(rng, 10, 3) if rng.random() < 0.5 else gen_sisbr(rng, 10, 2)
        profile = classify(x)
        if profile.is_isbrna:
            assert profile.is_isbr
        if profile.is_sisbr:
            assert profile.max_aux_index == 0
            assert not profile.has_out_set_false
