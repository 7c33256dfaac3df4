"""Tests for chosen-prefix padding, cost and birthday search."""

import math

import pytest

from collision_kit.engine.birthday import (
    bits_for,
    birthday_cost,
    birthday_search,
    padding_bits,
    verify_birthday_pair,
)
from collision_kit.engine.models import PrefixContext
from collision_kit.exceptions import BundleParameterError
from collision_kit.md5 import IHV0


@pytest.mark.parametrize("bits,k,expected", [(448, 0, 0), (0, 0, 448), (100, 8, 340)])
def test_padding_bits_examples(bits, k, expected):
    assert padding_bits(bits, k) == expected


def test_padding_bits_alignment_property():
    for prefix_bits in range(0, 2048, 37):
        for k in (0, 1, 4, 17, 31):
            length = padding_bits(prefix_bits, k)
            assert 0 <= length < 512
            assert (prefix_bits + length + 64 + k) % 512 == 0


def test_padding_bits_rejects_k():
    with pytest.raises(BundleParameterError, match="k must satisfy"):
        padding_bits(0, 32)


def test_birthday_cost():
    base = birthday_cost(0)
    assert base == pytest.approx(7.61e9, rel=1e-3)
    assert birthday_cost(2) == pytest.approx(2 * base)
    assert birthday_cost(31) == pytest.approx(math.sqrt(math.pi) * 2**47.5)


def test_identical_contexts_give_zero_bits():
    ctx = PrefixContext(IHV0)
    found = birthday_search(ctx, ctx, k=4, budget=1, seed=0)
    assert found is not None
    bits_a, bits_b = found
    assert bits_a == bits_b == bits_for(0, 4)
    assert bits_a.length == 68


def test_zero_budget_is_absent():
    a = PrefixContext.from_prefix(bytes(64))
    b = PrefixContext.from_prefix(b"\x01" * 64)
    assert birthday_search(a, b, k=4, budget=0, seed=0) is None


def test_reduced_strength_search_finds_pair():
    a = PrefixContext.from_prefix(b"clean prefix".ljust(64, b"\x00"))
    b = PrefixContext.from_prefix(b"poisoned prefix".ljust(64, b"\x00"))
    found = birthday_search(a, b, k=4, budget=1 << 20, seed=1, match_bits=10)
    assert found is not None
    bits_a, bits_b = found
    assert bits_a.length == bits_b.length == 68
    assert verify_birthday_pair(a, b, bits_a, bits_b, match_bits=10)


@pytest.mark.slow
def test_sixteen_bit_search_within_budget():
    a = PrefixContext.from_prefix(b"A" * 64)
    b = PrefixContext.from_prefix(b"B" * 64)
    found = birthday_search(a, b, k=4, budget=1 << 20, seed=2, match_bits=16)
    assert found is not None
    assert verify_birthday_pair(a, b, *found, match_bits=16)


def test_search_is_deterministic():
    a = PrefixContext.from_prefix(bytes(64))
    b = PrefixContext.from_prefix(b"\xff" * 64)
    first = birthday_search(a, b, k=4, budget=1 << 18, seed=5, match_bits=8)
    again = birthday_search(a, b, k=4, budget=1 << 18, seed=5, match_bits=8)
    assert first == again
