"""Exact arithmetic helpers for the residue ring Z_n (n odd)."""

from __future__ import annotations

import math
from dataclasses import dataclass

MAX_MODULUS = 2**40


@dataclass(frozen=True)
class Modulus:
    """An odd modulus n >= 3 together with its prime factorization.

    ``factors`` is a tuple of ``(p, alpha)`` pairs sorted by ``p``; ``tau`` is
    the number of divisors of n and ``gamma`` its smallest prime divisor.
    Build instances with :func:`factorize`.
    """

    n: int
    factors: tuple[tuple[int, int], ...]
    tau: int
    gamma: int

    def __post_init__(self) -> None:
        if self.n < 3 or self.n % 2 == 0:
            raise ValueError(f"modulus must be odd and >= 3, got {self.n}")
        primes = [p for p, _ in self.factors]
        if primes != sorted(set(primes)):
            raise ValueError("prime factors must be strictly increasing")
        if math.prod(p**a for p, a in self.factors) != self.n:
            raise ValueError("factorization does not multiply to n")
        if self.tau != math.prod(a + 1 for _, a in self.factors):
            raise ValueError("tau inconsistent with factorization")
        if self.gamma != self.factors[0][0]:
            raise ValueError("gamma must be the smallest prime factor")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(a for _, a in self.factors)

    @property
    def phi(self) -> int:
        """Euler's totient, from the factorization."""
        return math.prod((p - 1) * p ** (a - 1) for p, a in self.factors)

    def is_prime_power(self) -> bool:
        return len(self.factors) == 1

    def __int__(self) -> int:
        return self.n


def factorize(n: int) -> Modulus:
    """Factor an odd ``n`` in [3, 2**40] by trial division."""
    if isinstance(n, bool) or not isinstance(n, int):
        n = int(n)
    if n < 3:
        raise ValueError(f"modulus must be >= 3, got {n}")
    if n % 2 == 0:
        raise ValueError(f"modulus must be odd, got {n}")
    if n > MAX_MODULUS:
        raise ValueError(f"modulus {n} exceeds supported range 2**40")
    factors = []
    rest = n
    p = 3
    while p * p <= rest:
        if rest % p == 0:
            alpha = 0
            while rest % p == 0:
                rest //= p
                alpha += 1
            factors.append((p, alpha))
        p += 2
    if rest > 1:
        factors.append((rest, 1))
    tau = math.prod(a + 1 for _, a in factors)
    return Modulus(n=n, factors=tuple(factors), tau=tau, gamma=factors[0][0])


def as_modulus(m: Modulus | int) -> Modulus:
    return m if isinstance(m, Modulus) else factorize(m)


def val_vec(s: int, m: Modulus | int) -> tuple[int, ...]:
    """p-adic valuations of ``s`` at each prime of n, capped at the exponent.

    ``s = 0`` maps to the exponent vector itself, i.e. maximally divisible.
    """
    m = as_modulus(m)
    s %= m.n
    out = []
    for p, alpha in m.factors:
        beta = 0
        if s == 0:
            beta = alpha
        else:
            t = s
            while beta < alpha and t % p == 0:
                t //= p
                beta += 1
        out.append(beta)
    return tuple(out)


def kernel_size(m: Modulus | int, mult: int, d: int) -> int:
    """Number of y in Z_n^d with ``mult * y == 0`` coordinatewise."""
    m = as_modulus(m)
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return math.gcd(mult % m.n, m.n) ** d


def is_unit(s: int, m: Modulus | int) -> bool:
    m = as_modulus(m)
    return math.gcd(s % m.n, m.n) == 1


def units(m: Modulus | int) -> list[int]:
    m = as_modulus(m)
    return [s for s in range(m.n) if math.gcd(s, m.n) == 1]
