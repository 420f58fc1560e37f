"""Integer kernels: von Mangoldt sieve, Moebius, Euler phi, Dirichlet characters, Gauss sums.

A character mod q is stored as integer exponents: ``chi(n) = e(k(n)/L)``
where ``L`` is the exponent of ``(Z/qZ)*`` and ``k(n) = -1`` marks
``gcd(n, q) > 1`` (``chi(n) = 0``). Products, conjugates and the
multiplicativity checks stay in exact integer arithmetic; floats appear
only when a value is finally evaluated through :func:`e_of`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import product

import numpy as np

from .errors import CapacityError, DomainError, PrimitivityError
from .special import e_of

SIEVE_CEILING = 10**8
CHARACTER_CEILING = 10**4


# ---------------------------------------------------------------------------
# rational phases


@dataclass(frozen=True)
class RationalPhase:
    """``xi = m/q`` in lowest terms with ``0 < m < q``."""

    m: int
    q: int

    def __post_init__(self):
        if not (0 < self.m < self.q):
            raise DomainError(f"need 0 < m < q, got m={self.m}, q={self.q}")
        if math.gcd(self.m, self.q) != 1:
            raise DomainError(f"{self.m}/{self.q} is not in lowest terms")

    @classmethod
    def parse(cls, text: str) -> RationalPhase:
        m, _, q = text.partition("/")
        try:
            m, q = int(m), int(q)
        except ValueError:
            raise DomainError(f"not a fraction m/q: {text!r}") from None
        return cls(m, q)

    @property
    def value(self) -> float:
        return self.m / self.q

    def __str__(self) -> str:
        return f"{self.m}/{self.q}"

    def twist(self, n: np.ndarray) -> np.ndarray:
        """``e(-n m / q)`` with the residue ``n m mod q`` taken in integers."""
        n = np.asarray(n, dtype=np.int64)
        q = self.q
        table = e_of(-np.arange(q) / q)
        # mirror so that the phase for q - r is bit-for-bit the conjugate of r
        r = np.arange(1, (q + 1) // 2)
        table[q - r] = np.conj(table[r])
        return table[(n % q) * self.m % q]


# ---------------------------------------------------------------------------
# factorisation and multiplicative functions


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation by trial division."""
    if n < 1:
        raise DomainError("factorize needs n >= 1")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    d = 5
    while d * d <= n:
        for p in (d, d + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        d += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def mobius(q: int) -> int:
    f = factorize(q)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def euler_phi(q: int) -> int:
    r = q
    for p in factorize(q):
        r = r // p * (p - 1)
    return r


def divisors(n: int) -> list[int]:
    ds = [1]
    for p, e in factorize(n).items():
        ds = [d * p**k for d in ds for k in range(e + 1)]
    return sorted(ds)


# ---------------------------------------------------------------------------
# von Mangoldt


@dataclass(frozen=True, eq=False)
class VonMangoldtTable:
    """``values[n] = Lambda(n)`` for ``0 <= n <= limit`` (``values[0] = values[1] = 0``)."""

    limit: int
    values: np.ndarray

    def __getitem__(self, n):
        return self.values[n]

    @cached_property
    def support(self) -> np.ndarray:
        """Indices ``n`` with ``Lambda(n) != 0``, ascending."""
        return np.flatnonzero(self.values)

    @cached_property
    def psi_table(self) -> np.ndarray:
        """Cumulative ``psi(n)`` for integer ``n``."""
        return np.cumsum(self.values)

    def psi(self, x: float) -> float:
        n = int(math.floor(x))
        self.require(n)
        return math.fsum(self.values[: n + 1])

    def require(self, n: float) -> None:
        if n > self.limit:
            raise CapacityError(f"von Mangoldt table has limit {self.limit}, need {math.floor(n)}")


def sieve_von_mangoldt(N: int) -> VonMangoldtTable:
    """Exact ``Lambda(n)`` for ``n <= N``; ``log p`` is computed once per prime."""
    N = int(N)
    if N < 2:
        raise DomainError("sieve needs N >= 2")
    if N > SIEVE_CEILING:
        raise CapacityError(f"sieve limit {N} above ceiling {SIEVE_CEILING}")
    is_prime = np.ones(N + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(N) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    primes = np.nonzero(is_prime)[0]
    lam = np.zeros(N + 1)
    logs = np.log(primes.astype(float))
    lam[primes] = logs
    for p, lp in zip(primes[primes <= math.isqrt(N)], logs):
        pk = int(p) * int(p)
        while pk <= N:
            lam[pk] = lp
            pk *= int(p)
    lam.setflags(write=False)
    return VonMangoldtTable(N, lam)


# ---------------------------------------------------------------------------
# Dirichlet characters


def _primitive_root(p: int) -> int:
    phi = p - 1
    qs = list(factorize(phi)) if phi > 1 else []
    for g in range(2, p + 1):
        if all(pow(g, phi // r, p) != 1 for r in qs):
            return g
    return 1  # p = 2


@dataclass(frozen=True)
class _Cyclic:
    modulus: int  # the prime power p^e this factor lives on
    generator: int
    order: int


def _unit_group(q: int) -> list[_Cyclic]:
    gens: list[_Cyclic] = []
    for p, e in sorted(factorize(q).items()) if q > 1 else []:
        pe = p**e
        if p == 2:
            if e >= 2:
                gens.append(_Cyclic(pe, pe - 1, 2))
            if e >= 3:
                gens.append(_Cyclic(pe, 5, 2 ** (e - 2)))
        else:
            g = _primitive_root(p)
            if e > 1 and pow(g, p - 1, p * p) == 1:
                g += p
            gens.append(_Cyclic(pe, g, pe // p * (p - 1)))
    return gens


def _discrete_logs(q: int, gens: list[_Cyclic]) -> tuple[np.ndarray, np.ndarray]:
    """``logs[n, j]`` = exponent of generator j in n, plus the mask of units mod q."""
    n = np.arange(q)
    unit = np.array([math.gcd(int(k), q) == 1 for k in n])
    logs = np.zeros((q, len(gens)), dtype=np.int64)
    by_pe: dict[int, list[int]] = {}
    for j, g in enumerate(gens):
        by_pe.setdefault(g.modulus, []).append(j)
    for pe, js in by_pe.items():
        # enumerate the subgroup the generators on this prime power produce
        tab = np.zeros((pe, len(js)), dtype=np.int64)
        for exps in product(*(range(gens[j].order) for j in js)):
            r = 1
            for j, k in zip(js, exps):
                r = r * pow(gens[j].generator, k, pe) % pe
            tab[r] = exps
        logs[:, js] = tab[n % pe]
    return logs, unit


@dataclass(frozen=True, eq=False)
class Character:
    """A Dirichlet character ``chi(n) = e(k(n)/L)`` mod ``modulus``."""

    modulus: int
    index: tuple[int, ...]
    denominator: int
    exponents: np.ndarray  # k(n) in [0, L) or -1, length modulus

    def __call__(self, n):
        k = self.exponents[np.asarray(n, dtype=np.int64) % self.modulus]
        v = np.where(k >= 0, e_of(np.maximum(k, 0) / self.denominator), 0.0)
        return v[()] if np.ndim(n) == 0 else v

    def values(self) -> np.ndarray:
        return self(np.arange(self.modulus))

    def conj(self) -> Character:
        L = self.denominator
        k = np.where(self.exponents >= 0, (-self.exponents) % L, -1)
        return Character(self.modulus, tuple(-i for i in self.index), L, k)

    @property
    def is_principal(self) -> bool:
        return bool(np.all(self.exponents[self.exponents >= 0] == 0))

    @property
    def parity(self) -> int:
        """``chi(-1)``, either 1 or -1."""
        return 1 if self.exponents[(self.modulus - 1) % self.modulus] == 0 else -1

    @cached_property
    def is_primitive(self) -> bool:
        return is_primitive(self)

    def __repr__(self) -> str:
        return f"Character(mod {self.modulus}, index={self.index})"


@dataclass(frozen=True, eq=False)
class CharacterTable:
    modulus: int
    characters: tuple[Character, ...]

    def __len__(self) -> int:
        return len(self.characters)

    def __iter__(self):
        return iter(self.characters)

    def __getitem__(self, i) -> Character:
        return self.characters[i]

    @property
    def principal(self) -> Character:
        return self.characters[0]

    def primitive(self) -> list[Character]:
        return [c for c in self.characters if c.is_primitive]


def character_group(q: int) -> CharacterTable:
    """All ``phi(q)`` characters mod ``q``; index 0 is the principal character."""
    if q < 1:
        raise DomainError("modulus must be >= 1")
    if q > CHARACTER_CEILING:
        raise CapacityError(f"modulus {q} above ceiling {CHARACTER_CEILING}")
    gens = _unit_group(q)
    logs, unit = _discrete_logs(q, gens)
    L = math.lcm(*(g.order for g in gens)) if gens else 1
    weights = np.array([L // g.order for g in gens], dtype=np.int64)
    chars = []
    for idx in product(*(range(g.order) for g in gens)):
        k = (logs @ (np.array(idx, dtype=np.int64) * weights)) % L
        k = np.where(unit, k, -1)
        k.setflags(write=False)
        chars.append(Character(q, tuple(idx), L, k))
    return CharacterTable(q, tuple(chars))


def _induced_from(chi: Character, d: int) -> bool:
    # chi is trivial on {n : n = 1 mod d, gcd(n, q) = 1}
    q = chi.modulus
    n = np.arange(1, q, d) if d < q else np.array([1])
    k = chi.exponents[n]
    return bool(np.all(k[k >= 0] == 0))


def is_primitive(chi: Character) -> bool:
    """True iff no proper divisor of the modulus induces ``chi``.

    Being induced from ``d`` implies being induced from every multiple of
    ``d``, so the maximal proper divisors ``q/p`` are enough.
    """
    q = chi.modulus
    return not any(_induced_from(chi, q // p) for p in factorize(q)) if q > 1 else True


def gauss_sum(chi: Character) -> complex:
    """``tau(chi) = sum_{n mod q} chi(n) e(n/q)``, each term one exact rational phase."""
    q, L = chi.modulus, chi.denominator
    n = np.arange(q, dtype=np.int64)
    k = chi.exponents
    unit = k >= 0
    num = (k[unit] * q + n[unit] * L) % (L * q)
    terms = e_of(num / (L * q))
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def character_sum_conj(chi: Character) -> complex:
    """``sum_{0 < m < q, (m, q) = 1} conj(chi(m))``; zero exactly when ``chi`` is non-principal."""
    k = chi.exponents[1:] if chi.modulus > 1 else chi.exponents
    k = k[k >= 0]
    v = e_of(-k / chi.denominator)
    return complex(math.fsum(v.real), math.fsum(v.imag))


def gauss_identity_rhs(chi: Character, n: int, tau: complex | None = None) -> complex:
    """``(tau(chi) / q) sum_{m reduced} conj(chi(m)) e(-n m / q)``, equal to ``chi(n)`` for primitive chi.

    Written with ``e(-nm/q)`` the expansion carries no ``chi(-1)`` factor:
    ``sum conj(chi(m)) e(-nm/q) = chi(-1) chi(n) tau(conj chi)`` and
    ``tau(chi) tau(conj chi) = chi(-1) q``. Keeping a ``chi(-1)`` factor as
    well flips the sign for every odd character.
    """
    q, L = chi.modulus, chi.denominator
    tau = gauss_sum(chi) if tau is None else tau
    m = np.arange(q, dtype=np.int64)
    k = chi.exponents
    unit = k >= 0
    num = (-k[unit] * q - (n % q) * m[unit] % q * L) % (L * q)
    v = e_of(num / (L * q))
    s = complex(math.fsum(v.real), math.fsum(v.imag))
    return tau / q * s


def gauss_identity_residual(chi: Character, n: int, tau: complex | None = None) -> float:
    """``|chi(n) - rhs|`` for the expansion of a primitive character in additive characters."""
    if not chi.is_primitive:
        raise PrimitivityError(f"{chi!r} is not primitive")
    return abs(complex(chi(n)) - gauss_identity_rhs(chi, n, tau))
