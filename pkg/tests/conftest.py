import random

import pytest


@pytest.fixture
def rng():
    return random.Random(20240817)


def trial_division_is_prime(n: int) -> bool:
    """Independent primality check used as an oracle (no sieve involved)."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    if n % 3 == 0:
        return n == 3
    f = 5
    while f * f <= n:
        if n % f == 0 or n % (f + 2) == 0:
            return False
        f += 6
    return True
