"""Seeded random instances: abstract set families and small knowledge bases.

Everything here must reproduce bit-for-bit across platforms, so the RNG is
pinned to splitmix64 (Steele, Lea & Flood's SplittableRandom finalizer;
also the seeding stage of the xoshiro family):

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    return z ^ (z >> 31)

all in 64-bit wrapping arithmetic.  Bounded draws are ``next() % k``
(modulo bias is irrelevant at these sizes); distinct elements are drawn by
partial Fisher-Yates over 1..n consuming one draw per element.  Any
implementation following this note reproduces the exact output stream.

Generated sets are interpreted directly as abstract MUSes by the
distribution-index pipeline; no logical KB is materialized for them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ResourceLimitError
from .formulas import And, Formula, Implies, KnowledgeBase, Not, Or, Var
from .packing import SetFamily

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """The splitmix64 stream for a given 64-bit seed."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, k: int) -> int:
        """Uniform-ish draw in 0..k-1 (one stream element)."""
        if k <= 0:
            raise ValueError("below() needs k >= 1")
        return self.next_u64() % k

    def sample(self, n: int, k: int) -> list[int]:
        """k distinct values from 1..n by partial Fisher-Yates (k draws)."""
        pool = list(range(1, n + 1))
        for j in range(k):
            i = j + self.below(n - j)
            pool[j], pool[i] = pool[i], pool[j]
        return pool[:k]


@dataclass(frozen=True)
class GenParams:
    """Parameters for a random family of m distinct sets over 1..n."""

    m: int
    n: int
    min_size: int = 2
    max_size: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if not 1 <= self.min_size <= self.max_size <= self.n:
            raise ValueError("need 1 <= min_size <= max_size <= n")


def _binomial(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out


def generate_set_family(params: GenParams) -> SetFamily:
    """m distinct random sets; sizes uniform in [min_size, max_size].

    Per set: one size draw, then ``size`` element draws; duplicate sets are
    rejected and redrawn.  Raises ResourceLimitError when the parameters
    cannot yield m distinct sets (checked combinatorially up front, with a
    retry cap as a backstop).
    """
    distinct = sum(_binomial(params.n, k) for k in range(params.min_size, params.max_size + 1))
    if distinct < params.m:
        raise ResourceLimitError(
            f"cannot draw {params.m} distinct sets of size "
            f"{params.min_size}..{params.max_size} from 1..{params.n} (only {distinct} exist)"
        )
    rng = SplitMix64(params.seed)
    span = params.max_size - params.min_size + 1
    seen: dict[tuple[int, ...], None] = {}
    attempts = 0
    while len(seen) < params.m:
        attempts += 1
        if attempts > 1000 * params.m:
            raise ResourceLimitError(f"gave up after {attempts} draws without {params.m} distinct sets")
        size = params.min_size + rng.below(span)
        candidate = tuple(sorted(rng.sample(params.n, size)))
        if candidate not in seen:
            seen[candidate] = None
    return SetFamily(universe_size=params.n, sets=tuple(seen))


def mfsp_name(params: GenParams) -> str:
    return f"mfsp_{params.m}_{params.n}"


_VAR_POOL = "abcdefgh"


def generate_random_kb(num_vars: int, num_formulas: int, seed: int) -> KnowledgeBase:
    """A small random KB for property suites.

    Formula trees have depth at most 3 over variables a, b, c, ...; each
    node draws: stop-early test (below(3) == 0 at depth < 3), then a
    connective from {Not, And, Or, Implies} via below(4).  Structural
    duplicates are redrawn, up to a retry cap, so the KB usually has
    exactly ``num_formulas`` members.  Sizes are capped to keep power-set
    test oracles feasible.
    """
    if not 1 <= num_vars <= 8:
        raise ValueError("num_vars must be in 1..8")
    if not 1 <= num_formulas <= 12:
        raise ValueError("num_formulas must be in 1..12")
    rng = SplitMix64(seed)
    names = _VAR_POOL[:num_vars]

    def draw(depth: int) -> Formula:
        if depth >= 3 or rng.below(3) == 0:
            return Var(names[rng.below(num_vars)])
        kind = rng.below(4)
        if kind == 0:
            return Not(draw(depth + 1))
        if kind == 1:
            return And(draw(depth + 1), draw(depth + 1))
        if kind == 2:
            return Or(draw(depth + 1), draw(depth + 1))
        return Implies(draw(depth + 1), draw(depth + 1))

    formulas: dict[Formula, None] = {}
    attempts = 0
    while len(formulas) < num_formulas and attempts < 50 * num_formulas:
        attempts += 1
        f = draw(0)
        if f not in formulas:
            formulas[f] = None
    return KnowledgeBase(formulas)
