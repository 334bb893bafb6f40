"""Digit arithmetic, valuations of linear forms, and digit-file round trips."""

from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padiclab import (
    digits_to_int,
    from_digits,
    from_rational,
    ilog,
    int_to_digits,
    is_prime,
    linear_form_valuation,
    load_digit_file,
    make_pair,
    pval,
    residue,
    save_digit_file,
    truncation_integer,
)

PRIMES = (2, 3, 5, 7)


# ---------------------------------------------------------------------------
# integer helpers
# ---------------------------------------------------------------------------


def test_is_prime_small_values():
    primes_below_50 = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47}
    for n in range(-2, 50):
        assert is_prime(n) == (n in primes_below_50)


def test_is_prime_large_values():
    assert is_prime(2**61 - 1)
    assert not is_prime(2**67 - 1)
    assert not is_prime(3**100)


def test_pval_examples():
    assert pval(12, 2) == 2
    assert pval(12, 3) == 1
    assert pval(-8, 2) == 3
    assert pval(1, 5) == 0
    assert pval(3**200, 3) == 200
    assert pval(3**200 + 1, 3) == 0


def test_pval_of_zero_rejected():
    with pytest.raises(ValueError):
        pval(0, 2)


def test_ilog_examples():
    assert ilog(1, 2) == 0
    assert ilog(7, 2) == 2
    assert ilog(8, 2) == 3
    assert ilog(9, 3) == 2
    assert ilog(10**18, 10) == 18


def test_ilog_rejects_bad_arguments():
    with pytest.raises(ValueError):
        ilog(0, 2)
    with pytest.raises(ValueError):
        ilog(5, 1)


@given(
    n=st.integers(min_value=0, max_value=10**120),
    p=st.sampled_from(PRIMES),
    count=st.integers(min_value=0, max_value=400),
)
def test_digit_conversion_round_trip(n, p, count):
    digits = int_to_digits(n, p, count)
    assert len(digits) == count
    assert all(0 <= d < p for d in digits)
    assert digits_to_int(digits, p) == n % p**count


def test_digits_to_int_long_vector():
    digits = [1] * 300
    assert digits_to_int(digits, 2) == 2**300 - 1


# ---------------------------------------------------------------------------
# number construction
# ---------------------------------------------------------------------------


def test_from_digits_basic():
    xi = from_digits(2, [1, 1, 0, 1])
    assert xi.p == 2
    assert xi.precision == 4
    assert xi.value == 11
    assert xi.modulus == 16


def test_from_digits_validation():
    with pytest.raises(ValueError):
        from_digits(4, [1])
    with pytest.raises(ValueError):
        from_digits(2, [])
    with pytest.raises(ValueError):
        from_digits(2, [0, 2])


def test_from_rational_third_in_base_two():
    xi = from_rational(2, 1, 3, 6)
    # 3 * 43 = 129 = 1 (mod 64)
    assert xi.value == 43
    assert xi.digits == (1, 1, 0, 1, 0, 1)


def test_from_rational_negative_numerator():
    xi = from_rational(5, -1, 2, 3)
    assert (2 * xi.value) % 125 == 125 - 1
    assert xi.digits == (2, 2, 2)


def test_from_rational_validation():
    with pytest.raises(ValueError):
        from_rational(2, 1, 6, 4)  # denominator divisible by p
    with pytest.raises(ValueError):
        from_rational(2, 1, 0, 4)
    with pytest.raises(ValueError):
        from_rational(2, 1, 3, 0)


def test_residue_and_truncation():
    xi = from_digits(2, [1, 1, 0, 1])
    assert residue(xi, 0) == 0
    assert residue(xi, 2) == 3
    assert residue(xi, 3) == 3
    assert residue(xi, 4) == 11
    assert truncation_integer(xi, 2) == 3
    with pytest.raises(ValueError):
        residue(xi, 5)
    with pytest.raises(ValueError):
        truncation_integer(xi, 4)


@given(
    p=st.sampled_from(PRIMES),
    seed=st.integers(min_value=0, max_value=10**6),
    cutoff=st.integers(min_value=0, max_value=19),
)
def test_truncation_valuation_invariant(p, seed, cutoff):
    import random

    rng = random.Random(seed)
    digits = [rng.randrange(p) for _ in range(20)]
    digits[0] = max(digits[0], 1)
    xi = from_digits(p, digits)
    t = truncation_integer(xi, cutoff)
    assert (xi.value - t) % p ** (cutoff + 1) == 0


# ---------------------------------------------------------------------------
# linear form valuations
# ---------------------------------------------------------------------------


def test_linear_form_exact_value():
    xi = from_rational(2, 1, 3, 10)
    val = linear_form_valuation(xi, 1, 1)
    # 683 - 1 = 682 = 2 * 341
    assert val.is_exact and val.value == 1
    val = linear_form_valuation(xi, -1, 1)
    assert val.is_exact and val.value == 2


def test_linear_form_censoring():
    xi = from_rational(2, 1, 3, 10)
    val = linear_form_valuation(xi, 1, 3)
    assert not val.is_exact
    assert val.value == 10
    # A p-divisible y raises the usable ceiling by its valuation.
    val = linear_form_valuation(xi, 2, 6)
    assert not val.is_exact
    assert val.value == 11


def test_linear_form_with_zero_y():
    xi = from_digits(3, [1, 2, 0, 1])
    val = linear_form_valuation(xi, 9, 0)
    assert val.is_exact and val.value == 2
    with pytest.raises(ValueError):
        linear_form_valuation(xi, 0, 0)


@given(
    p=st.sampled_from((2, 3, 5)),
    seed=st.integers(min_value=0, max_value=10**6),
    x=st.integers(min_value=-50, max_value=50),
    y=st.integers(min_value=-50, max_value=50).filter(lambda v: v != 0),
    m=st.integers(min_value=1, max_value=4),
)
@settings(max_examples=150)
def test_linear_form_scaling_law(p, seed, x, y, m):
    """Scaling (x, y) by p**m deepens the valuation by exactly m."""
    import random

    rng = random.Random(seed)
    digits = [rng.randrange(p) for _ in range(24)]
    digits[0] = max(digits[0], 1)
    xi = from_digits(p, digits)
    if x == 0:
        x = 1
    base = linear_form_valuation(xi, x, y)
    scaled = linear_form_valuation(xi, x * p**m, y * p**m)
    assert scaled.is_exact == base.is_exact
    assert scaled.value == base.value + m


@given(
    p=st.sampled_from((2, 3, 5)),
    seed=st.integers(min_value=0, max_value=10**6),
    x=st.integers(min_value=-80, max_value=80).filter(lambda v: v != 0),
    y=st.integers(min_value=1, max_value=80),
    extra=st.integers(min_value=1, max_value=6),
)
@settings(max_examples=150)
def test_exact_valuations_survive_precision_growth(p, seed, x, y, extra):
    """An Exact valuation never changes when more digits become known."""
    import random

    rng = random.Random(seed)
    digits = [rng.randrange(p) for _ in range(20 + extra)]
    digits[0] = max(digits[0], 1)
    wide = from_digits(p, digits)
    narrow = from_digits(p, digits[:20])
    val = linear_form_valuation(narrow, x, y)
    if val.is_exact:
        wide_val = linear_form_valuation(wide, x, y)
        assert wide_val.is_exact and wide_val.value == val.value


# ---------------------------------------------------------------------------
# pairs and digit files
# ---------------------------------------------------------------------------


def test_make_pair_normalizes_sign():
    xi = from_digits(2, [1, 0, 1, 1])
    pair = make_pair(xi, 3, -2)
    assert (pair.x, pair.y) == (-3, 2)
    assert pair.height_sup == 3
    assert pair.height_mult_sq == 6


def test_make_pair_rejects_zero_coordinates():
    xi = from_digits(2, [1])
    with pytest.raises(ValueError):
        make_pair(xi, 0, 1)
    with pytest.raises(ValueError):
        make_pair(xi, 1, 0)


def test_digit_file_round_trip(tmp_path):
    xi = from_rational(3, 7, 5, 40)
    path = tmp_path / "xi.json"
    save_digit_file(xi, path)
    back = load_digit_file(path)
    assert back == xi


def test_digit_file_rejects_malformed(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ValueError):
        load_digit_file(path)
    path.write_text(json.dumps({"format": "something-else"}))
    with pytest.raises(ValueError):
        load_digit_file(path)
    path.write_text(json.dumps({"format": "padic-digits-v1", "p": 2}))
    with pytest.raises(ValueError):
        load_digit_file(path)
    path.write_text(
        json.dumps(
            {"format": "padic-digits-v1", "p": 2, "precision": 5, "digits": [1, 0]}
        )
    )
    with pytest.raises(ValueError):
        load_digit_file(path)
