"""Shared fixtures: deterministic numbers and precomputed chains."""

from __future__ import annotations

import random

import pytest

from padiclab import (
    LacunarySpec,
    NORM_MULT,
    NORM_SUP,
    build_factorial,
    build_lacunary,
    chain,
    from_digits,
    lacunary_pow_exponents,
)


def seeded_xi(p: int, precision: int, seed: int):
    """A reproducible pseudo-random p-adic integer with a nonzero digit."""
    rng = random.Random(seed)
    digits = [rng.randrange(p) for _ in range(precision)]
    if all(d == 0 for d in digits):
        digits[0] = 1
    return from_digits(p, digits)


@pytest.fixture(scope="session")
def lacunary_xi():
    return build_lacunary(LacunarySpec(2, lacunary_pow_exponents(3, 9)))


@pytest.fixture(scope="session")
def lacunary_chain_sup(lacunary_xi):
    return chain(lacunary_xi, NORM_SUP)


@pytest.fixture(scope="session")
def lacunary_chain_mult(lacunary_xi):
    return chain(lacunary_xi, NORM_MULT)


@pytest.fixture(scope="session")
def factorial_xi():
    return build_factorial(2, 7)


@pytest.fixture(scope="session")
def factorial_chain_mult(factorial_xi):
    return chain(factorial_xi, NORM_MULT)
