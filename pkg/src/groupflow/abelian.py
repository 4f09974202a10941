"""Finite Abelian groups in invariant-factor form.

Elements are tuples of residues, one per invariant factor.  Every element also
has an integer *code* in ``range(order)`` (mixed radix, last factor least
significant), so code order coincides with lexicographic order of residue
tuples.  The compiled search kernels work exclusively on codes.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Sequence

Element = tuple  # tuple[int, ...]

_ATOM = re.compile(r"^Z(\d+)(?:\^(\d+))?$")


class GroupSpecError(ValueError):
    pass


def _prime_factorization(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _canonical_factors(cyclic_orders: Iterable[int]) -> tuple[int, ...]:
    """Invariant factors (ascending, each dividing the next) of a product of cyclic groups."""
    by_prime: dict[int, list[int]] = {}
    for n in cyclic_orders:
        for p, e in _prime_factorization(n).items():
            by_prime.setdefault(p, []).append(e)
    if not by_prime:
        return ()
    length = max(len(v) for v in by_prime.values())
    factors = [1] * length
    for p, exps in by_prime.items():
        exps = sorted(exps, reverse=True)
        for i, e in enumerate(exps):
            factors[length - 1 - i] *= p**e
    return tuple(factors)


@dataclass(frozen=True)
class FiniteAbelianGroup:
    invariant_factors: tuple[int, ...]
    _strides: tuple[int, ...] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        factors = tuple(int(n) for n in self.invariant_factors)
        for a, b in zip(factors, factors[1:]):
            if b % a:
                raise GroupSpecError(f"invariant factors must form a divisibility chain: {factors}")
        if any(n < 2 for n in factors):
            raise GroupSpecError(f"invariant factors must be >= 2: {factors}")
        object.__setattr__(self, "invariant_factors", factors)
        strides = [1] * len(factors)
        for i in range(len(factors) - 2, -1, -1):
            strides[i] = strides[i + 1] * factors[i + 1]
        object.__setattr__(self, "_strides", tuple(strides))

    @classmethod
    def from_cyclic(cls, orders: Iterable[int]) -> "FiniteAbelianGroup":
        orders = list(orders)
        if any(n < 1 for n in orders):
            raise GroupSpecError(f"cyclic orders must be positive: {orders}")
        return cls(_canonical_factors(orders))

    @classmethod
    def cyclic(cls, n: int) -> "FiniteAbelianGroup":
        return cls.from_cyclic([n])

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    def __len__(self) -> int:
        return self.order

    @property
    def zero(self) -> Element:
        return (0,) * len(self.invariant_factors)

    @property
    def spec(self) -> str:
        if not self.invariant_factors:
            return "Z1"
        parts = []
        for n, grp in itertools.groupby(self.invariant_factors):
            c = len(list(grp))
            parts.append(f"Z{n}" if c == 1 else f"Z{n}^{c}")
        return "x".join(parts)

    def __str__(self) -> str:
        return self.spec

    # -- elements ---------------------------------------------------------

    def element(self, value) -> Element:
        """Coerce an int (cyclic groups only) or a residue sequence into an element."""
        if isinstance(value, int) and not isinstance(value, bool):
            if len(self.invariant_factors) != 1:
                raise ValueError(f"integer shorthand only valid for cyclic groups, not {self.spec}")
            return (value % self.invariant_factors[0],)
        t = tuple(int(x) for x in value)
        if len(t) != len(self.invariant_factors):
            raise ValueError(f"element {list(t)} has wrong length for {self.spec}")
        return tuple(x % n for x, n in zip(t, self.invariant_factors))

    def contains(self, x) -> bool:
        try:
            x = tuple(x)
        except TypeError:
            return False
        return len(x) == len(self.invariant_factors) and all(
            isinstance(r, int) and 0 <= r < n for r, n in zip(x, self.invariant_factors)
        )

    def check(self, x) -> Element:
        if not self.contains(x):
            raise ValueError(f"{x!r} is not an element of {self.spec}")
        return tuple(x)

    def add(self, a: Element, b: Element) -> Element:
        return tuple((x + y) % n for x, y, n in zip(a, b, self.invariant_factors))

    def sub(self, a: Element, b: Element) -> Element:
        return tuple((x - y) % n for x, y, n in zip(a, b, self.invariant_factors))

    def neg(self, a: Element) -> Element:
        return tuple((-x) % n for x, n in zip(a, self.invariant_factors))

    def scale(self, c: int, a: Element) -> Element:
        return tuple((c * x) % n for x, n in zip(a, self.invariant_factors))

    def sum(self, items: Iterable[Element]) -> Element:
        acc = self.zero
        for x in items:
            acc = self.add(acc, x)
        return acc

    def element_order(self, a: Element) -> int:
        out = 1
        for x, n in zip(a, self.invariant_factors):
            out = math.lcm(out, n // math.gcd(x, n))
        return out

    def elements(self) -> Iterator[Element]:
        return itertools.product(*(range(n) for n in self.invariant_factors))

    # -- integer codes ----------------------------------------------------

    def encode(self, a: Element) -> int:
        return sum(x * s for x, s in zip(a, self._strides))

    def decode(self, code: int) -> Element:
        return tuple((code // s) % n for s, n in zip(self._strides, self.invariant_factors))

    @cached_property
    def neg_codes(self) -> list[int]:
        return [self.encode(self.neg(self.decode(c))) for c in range(self.order)]

    def subgroup_generated(self, gens: Iterable[Element]) -> frozenset:
        """Closure of ``gens`` under addition (finite, so also under negation)."""
        group = {self.zero}
        frontier = [self.zero]
        gens = [tuple(g) for g in gens]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.add(x, g)
                    if y not in group:
                        group.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(group)


def parse_group_spec(spec: str) -> FiniteAbelianGroup:
    """Parse ``Z5``, ``Z4xZ2``, ``Z2^3`` ... into canonical invariant-factor form.

    ``Z1`` on its own denotes the trivial group.
    """
    text = spec.strip().replace(" ", "")
    if text == "Z1":
        return FiniteAbelianGroup(())
    if not text:
        raise GroupSpecError("empty group spec")
    orders: list[int] = []
    for atom in text.split("x"):
        m = _ATOM.match(atom)
        if not m:
            raise GroupSpecError(f"malformed group spec atom {atom!r} in {spec!r}")
        n = int(m.group(1))
        reps = int(m.group(2)) if m.group(2) is not None else 1
        if n < 2:
            raise GroupSpecError(f"cyclic factor must be >= 2, got Z{n} in {spec!r}")
        if reps < 1:
            raise GroupSpecError(f"exponent must be >= 1 in {spec!r}")
        orders.extend([n] * reps)
    return FiniteAbelianGroup.from_cyclic(orders)


@lru_cache(maxsize=None)
def _partitions(n: int, largest: int | None = None) -> tuple[tuple[int, ...], ...]:
    if largest is None:
        largest = n
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def enumerate_groups_of_order(n: int) -> list[FiniteAbelianGroup]:
    """One representative per isomorphism class of Abelian groups of order ``n``."""
    if n <= 0:
        raise ValueError(f"group order must be positive, got {n}")
    primes = sorted(_prime_factorization(n).items())
    groups = set()
    for choice in itertools.product(*(_partitions(e) for _, e in primes)):
        cyclic = [p**part for (p, _), parts in zip(primes, choice) for part in parts]
        groups.add(FiniteAbelianGroup.from_cyclic(cyclic))
    return sorted(groups, key=lambda g: (len(g.invariant_factors), g.invariant_factors))


def sumset(S: Iterable[Element], T: Iterable[Element], G: FiniteAbelianGroup) -> frozenset:
    S = [G.check(s) for s in S]
    T = [G.check(t) for t in T]
    return frozenset(G.add(s, t) for s in S for t in T)


def simple_sum_closure(pi: Iterable[Element], G: FiniteAbelianGroup) -> frozenset:
    """All sums ``sum(alpha_i * a_i)`` with ``alpha_i`` in {0, 1, -1}."""
    acc = {G.zero}
    for a in (G.check(x) for x in pi):
        na = G.neg(a)
        acc = acc | {G.add(x, a) for x in acc} | {G.add(x, na) for x in acc}
    return frozenset(acc)


@dataclass(frozen=True)
class SimpleSumBasis:
    pi: tuple  # sorted elements of Pi
    pi_prime: frozenset
    parameter_k: int
    method: str  # "exhaustive" | "construction"

    @property
    def pi_prime_size(self) -> int:
        return len(self.pi_prime)

    @property
    def within_square_bound(self) -> bool:
        return len(self.pi_prime) <= self.parameter_k**2


def _inverse_orbits(elements: Iterable[Element], G: FiniteAbelianGroup):
    """Split an inverse-closed element collection into singletons and {a, -a} pairs."""
    singles, pairs, seen = [], [], set()
    for a in sorted(elements):
        if a in seen:
            continue
        na = G.neg(a)
        seen.update((a, na))
        if na == a:
            singles.append(a)
        else:
            pairs.append((a, na))
    return singles, pairs


def _inverse_closed_subset(elements: Iterable[Element], G: FiniteAbelianGroup, k: int) -> tuple:
    """Greedy inverse-closed k-subset of an inverse-closed set: pairs first, zero last."""
    singles, pairs = _inverse_orbits(elements, G)
    singles.sort(key=lambda a: (a == G.zero, a))
    npairs = min(len(pairs), k // 2)
    nsingle = k - 2 * npairs
    if nsingle > len(singles):
        raise ValueError(f"no inverse-closed {k}-subset available")
    chosen = [x for p in pairs[:npairs] for x in p] + singles[:nsingle]
    return tuple(sorted(chosen))


def count_inverse_closed_subsets(G: FiniteAbelianGroup, k: int, allow_zero: bool = True) -> int:
    singles, pairs = _inverse_orbits(G.elements(), G)
    s = len(singles) - (0 if allow_zero else 1)
    p = len(pairs)
    return sum(math.comb(p, j) * math.comb(s, k - 2 * j) for j in range(k // 2 + 1))


def _constructive_basis(G: FiniteAbelianGroup, k: int) -> tuple:
    if k == 1:
        return (G.zero,)
    elements = sorted(G.elements())
    high = [a for a in elements if G.element_order(a) >= k]
    if high:
        a = max(high, key=lambda x: (G.element_order(x), [-r for r in x]))
        if k % 2 == 0:
            mults = [G.scale(j, a) for j in range(1, k // 2 + 1)]
            chosen = set(mults) | {G.neg(x) for x in mults}
            if len(chosen) < k:
                # order(a) == k: (k/2)a is its own inverse, so pad with 0
                chosen.add(G.zero)
        else:
            mults = [G.scale(j, a) for j in range(0, (k - 1) // 2 + 1)]
            chosen = set(mults) | {G.neg(x) for x in mults}
        return tuple(sorted(chosen))
    # all element orders < k: extend the largest subgroup of order < k by one element
    base = _largest_small_subgroup(G, k)
    a = next(x for x in elements if x not in base)
    sub = G.subgroup_generated(list(_generators_of(base, G)) + [a])
    return _inverse_closed_subset(sub, G, k)


def _generators_of(sub: frozenset, G: FiniteAbelianGroup) -> list:
    gens: list = []
    span = frozenset({G.zero})
    for x in sorted(sub):
        if x not in span:
            gens.append(x)
            span = G.subgroup_generated(gens)
    return gens


def _largest_small_subgroup(G: FiniteAbelianGroup, k: int) -> frozenset:
    """Largest subgroup of order < k; ties go to the lexicographically smallest generators."""
    best_key, best = None, frozenset({G.zero})
    seen = {best}
    frontier = [((), best)]
    elements = sorted(G.elements())
    while frontier:
        nxt = []
        for gens, sub in frontier:
            key = (-len(sub), gens)
            if best_key is None or key < best_key:
                best_key, best = key, sub
            for x in elements:
                if x in sub:
                    continue
                ext = G.subgroup_generated(list(gens) + [x])
                if len(ext) < k and ext not in seen:
                    seen.add(ext)
                    nxt.append((gens + (x,), ext))
        frontier = nxt
    return best


def _exhaustive_min_basis(G: FiniteAbelianGroup, k: int, prefer_nonzero: bool):
    """Branch and bound over inverse-closed k-subsets minimising the simple sum size."""
    singles, pairs = _inverse_orbits(G.elements(), G)
    orbits = [(s,) for s in singles] + pairs
    orbits.sort()
    zero = G.zero
    best: list = [None, None, None]  # key, pi, closure

    def key_of(size, chosen):
        has_zero = zero in chosen
        return (size, has_zero if prefer_nonzero else False)

    def rec(start, remaining, chosen, closure):
        if best[0] is not None and len(closure) > best[0][0]:
            return
        if remaining == 0:
            key = key_of(len(closure), chosen)
            if best[0] is None or key < best[0]:
                best[0], best[1], best[2] = key, tuple(sorted(chosen)), closure
            return
        for i in range(start, len(orbits)):
            orb = orbits[i]
            if len(orb) > remaining:
                continue
            new = closure
            for a in orb:
                na = G.neg(a)
                new = new | {G.add(x, a) for x in new} | {G.add(x, na) for x in new}
            rec(i + 1, remaining - len(orb), chosen + list(orb), frozenset(new))

    rec(0, k, [], frozenset({zero}))
    return best[1], best[2]


def choose_simple_sum_basis(
    G: FiniteAbelianGroup,
    k: int,
    *,
    exhaustive_max_order: int = 256,
    exhaustive_max_k: int = 6,
    exhaustive_max_candidates: int = 100_000,
    prefer_nonzero: bool = True,
) -> SimpleSumBasis:
    """Inverse-closed ``Pi`` of size ``k`` with a small simple sum.

    Small instances are searched exhaustively for the true minimum of
    ``|Pi'|``; larger ones use the multiples-of-a-high-order-element /
    subgroup-extension recipe.  ``prefer_nonzero`` breaks ties towards sets
    not containing 0.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if G.order <= k:
        raise ValueError(f"need |G| > k, got |G|={G.order}, k={k}")
    if (
        G.order <= exhaustive_max_order
        and k <= exhaustive_max_k
        and count_inverse_closed_subsets(G, k) <= exhaustive_max_candidates
    ):
        pi, closure = _exhaustive_min_basis(G, k, prefer_nonzero)
        return SimpleSumBasis(pi, closure, k, "exhaustive")
    pi = _constructive_basis(G, k)
    return SimpleSumBasis(pi, simple_sum_closure(pi, G), k, "construction")


def is_inverse_closed(S: Iterable[Element], G: FiniteAbelianGroup) -> bool:
    S = set(S)
    return all(G.neg(a) in S for a in S)


def element_to_json(a: Element) -> list[int]:
    return [int(x) for x in a]


def element_from_json(value, G: FiniteAbelianGroup) -> Element:
    if isinstance(value, int) and not isinstance(value, bool):
        return G.element(value)
    if not isinstance(value, Sequence):
        raise ValueError(f"group element must be a JSON array of integers, got {value!r}")
    return G.check(tuple(value))
