"""Dirichlet character groups for small moduli.

The unit group (Z/qZ)^x is decomposed into cyclic factors via CRT over the
prime-power parts of q (the 2-power part uses the {-1, 5} generating pair).
Characters are indexed by exponent vectors on those generators, with their
values precomputed into a dense length-q table since evaluation sits in the
inner loop of the lemma checks.

Conductors are found by induction testing: the conductor is the smallest
divisor d of q such that the character is trivial on every unit n = 1 mod d.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .arith import euler_phi, factorize

MAX_MODULUS = 10**4  # dense tables are phi(q) x q complex; keep q modest

_UNIT_TOL = 1e-9


@dataclass(frozen=True)
class Character:
    """One Dirichlet character mod q as a dense value table."""
    modulus: int
    exponent_vector: tuple[int, ...]
    values: np.ndarray  # length q, complex; 0 off the units
    conductor: int
    is_primitive: bool
    is_principal: bool


@dataclass(frozen=True)
class CharacterTable:
    """The full group of Dirichlet characters mod q."""
    modulus: int
    generators: list[tuple[int, int]] = field(default_factory=list)  # (residue, order)
    characters: list[Character] = field(default_factory=list)

    @property
    def order(self) -> int:
        return len(self.characters)


def _primitive_root(p: int, e: int) -> int:
    """Smallest primitive root mod p^e for an odd prime p."""
    phi_p = p - 1
    factors = [f for f, _ in factorize(phi_p)]
    g = 2
    while True:
        if all(pow(g, phi_p // f, p) != 1 for f in factors):
            break
        g += 1
    if e > 1 and pow(g, p - 1, p * p) == 1:
        g += p  # g+p generates mod p^2 and hence mod every p^e
    return g


def _crt_lift(residue: int, pe: int, q: int) -> int:
    """x mod q with x = residue mod pe and x = 1 mod q/pe."""
    rest = q // pe
    if rest == 1:
        return residue % q
    inv_rest = pow(rest, -1, pe)
    inv_pe = pow(pe, -1, rest)
    return (residue * rest * inv_rest + pe * inv_pe) % q


def unit_group_generators(q: int) -> list[tuple[int, int]]:
    """Generators (residue, order) of (Z/qZ)^x, product of orders = phi(q)."""
    gens: list[tuple[int, int]] = []
    for p, e in factorize(q) if q > 1 else []:
        pe = p**e
        if p == 2:
            if e == 1:
                continue
            if e == 2:
                local = [(3, 2)]
            else:
                local = [(pe - 1, 2), (5, 2 ** (e - 2))]
        else:
            local = [(_primitive_root(p, e), pe // p * (p - 1))]
        for g, order in local:
            gens.append((_crt_lift(g, pe, q), order))
    return gens


def _divisors(q: int) -> list[int]:
    divs = [1]
    for p, e in factorize(q):
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def build_character_group(q: int, max_modulus: int = MAX_MODULUS) -> CharacterTable:
    """Construct all phi(q) characters mod q with conductor data.

    q = 1 yields the trivial group with the single principal character.
    """
    if q < 1:
        raise ValueError("modulus must be >= 1")
    if q > max_modulus:
        raise ValueError(f"modulus {q} exceeds cap {max_modulus}")
    gens = unit_group_generators(q)
    orders = [d for _, d in gens]
    phi_q = euler_phi(q)
    n_chars = math.prod(orders) if orders else 1
    if n_chars != phi_q:
        raise AssertionError(f"generator orders {orders} do not multiply to phi({q})")

    # Enumerate units together with their discrete-log vectors.
    gen_powers = [[pow(g, a, q) for a in range(d)] for g, d in gens]
    units = np.empty(phi_q, dtype=np.int64)
    expvec = np.zeros((phi_q, len(gens)), dtype=np.int64)
    for i, tup in enumerate(itertools.product(*[range(d) for d in orders])):
        x = 1 % q
        for j, a in enumerate(tup):
            x = x * gen_powers[j][a] % q
        units[i] = x
        expvec[i] = tup

    # values[i, x]: character i at unit x; characters share the enumeration
    # order of exponent tuples, so index 0 is the principal character.
    if gens:
        weights = expvec / np.asarray(orders, dtype=np.float64)
        phases = expvec @ weights.T  # (chars x units), phase in turns
        unit_values = np.exp(2j * np.pi * phases)
    else:
        unit_values = np.ones((1, 1), dtype=np.complex128)
    values = np.zeros((phi_q, q if q > 1 else 1), dtype=np.complex128)
    values[:, units] = unit_values

    conductor = np.zeros(phi_q, dtype=np.int64)
    unset = np.ones(phi_q, dtype=bool)
    for d in _divisors(q):
        if not unset.any():
            break
        cols = units[units % d == 1 % d]
        ok = np.all(np.abs(values[:, cols] - 1.0) < _UNIT_TOL, axis=1)
        newly = unset & ok
        conductor[newly] = d
        unset &= ~ok

    chars = []
    for i in range(phi_q):
        cond = int(conductor[i])
        chars.append(Character(
            modulus=q,
            exponent_vector=tuple(int(a) for a in expvec[i]),
            values=values[i],
            conductor=cond,
            is_primitive=(cond == q),
            is_principal=not any(expvec[i]),
        ))
    return CharacterTable(modulus=q, generators=gens, characters=chars)


def evaluate(chi: Character, n: int) -> complex:
    """chi(n), periodic in n with period q."""
    if chi.modulus == 1:
        return complex(chi.values[0])
    return complex(chi.values[n % chi.modulus])


def primitive_characters(table: CharacterTable) -> list[Character]:
    return [chi for chi in table.characters if chi.is_primitive]
