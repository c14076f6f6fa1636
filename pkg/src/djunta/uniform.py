"""One-sided junta tester for the uniform distribution.

This is the workhorse the distribution-free testers call with k=1 to vet a
block, and it is useful standalone.  The scheme: partition the coordinates
into random blocks once, then repeatedly draw a uniform x and a uniform y
agreeing with x on every block already known relevant; a disagreement
f(x) != f(y) lets block binary search pin one new relevant block.  Finding
k+1 disjoint relevant blocks, each holding a distinguishing pair, is proof
that f is no k-junta, so rejection is always certified and a true k-junta
is accepted on every seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil

import numpy as np

from .boolfn import (
    BitFeed,
    BitString,
    DistinguishingPair,
    FunctionOracle,
    Verdict,
    block_of,
    ceil_log2,
    full_truth_table,
)
from .errors import BudgetError, ContractError, SizeError
from .search import block_binary_search


@dataclass(frozen=True)
class UniformTesterConfig:
    """Parameters of the uniform-distribution tester.

    Omitted values are filled in at construction: num_blocks = 10k² and
    rounds = ceil(16(k+1)/epsilon).  The block count must stay at least 2k²
    so that a random partition separates the relevant variables of a nearby
    junta with decent probability.
    """

    k: int
    epsilon: float
    num_blocks: int | None = None
    rounds: int | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ContractError(f"need k >= 1, got {self.k}")
        if not 0 < self.epsilon <= 1:
            raise ContractError(f"need 0 < epsilon <= 1, got {self.epsilon}")
        if self.num_blocks is None:
            object.__setattr__(self, "num_blocks", 10 * self.k * self.k)
        if self.rounds is None:
            r = ceil(16 * (self.k + 1) / Fraction(self.epsilon))
            object.__setattr__(self, "rounds", r)
        if self.num_blocks < 2 * self.k * self.k:
            raise ContractError(
                f"num_blocks must be >= 2k^2 = {2 * self.k * self.k}, got {self.num_blocks}"
            )
        if self.rounds < 1:
            raise ContractError(f"need rounds >= 1, got {self.rounds}")

    def query_ceiling(self) -> int:
        """Hard per-run cap: two queries a round plus k+1 block searches."""
        return 2 * self.rounds + (self.k + 1) * ceil_log2(self.num_blocks)


def uniform_junta(f: FunctionOracle, cfg: UniformTesterConfig, rng=None) -> Verdict:
    """Test whether f is a k-junta under the uniform distribution.

    Accepts every k-junta outright; rejects an epsilon-far f with
    probability at least 2/3, and any rejection carries k+1 pairwise
    disjoint blocks with a distinguishing pair each.  Query count is
    capped by cfg.query_ceiling(), independent of n.
    """
    n = f.n
    feed = BitFeed.of(rng if rng is not None else np.random.default_rng(cfg.seed))
    raw = feed.rng
    q0, s0 = f.counter.snapshot()

    # One random partition for the whole run: coordinate -> block id.
    assignment = raw.integers(0, cfg.num_blocks, size=n)
    by_id: dict[int, int] = {}
    for c, bid in enumerate(assignment, start=1):
        by_id[int(bid)] = by_id.get(int(bid), 0) | (1 << (c - 1))
    open_masks = list(by_id.values())
    open_union = 0
    for m in open_masks:
        open_union |= m

    found: list[DistinguishingPair] = []
    relevant_union = 0
    value = f.backend.value
    counter = f.counter

    def finish(outcome: str) -> Verdict:
        q1, s1 = f.counter.snapshot()
        spent = (q1 - q0) + (s1 - s0)
        if spent > cfg.query_ceiling():
            raise BudgetError(
                f"uniform tester spent {spent} queries, ceiling {cfg.query_ceiling()}"
            )
        witness = tuple(found) if outcome == "reject" else ()
        return Verdict(outcome, witness, q1 - q0, s1 - s0)

    for _ in range(cfg.rounds):
        if open_union == 0:
            # Everything sits in relevant blocks already; y would equal x
            # in every later round, so no further evidence can turn up.
            break
        xb = feed.take(n)
        rmask = feed.take(n) & open_union
        assert rmask & relevant_union == 0
        if rmask == 0:
            continue
        yb = xb ^ rmask
        fx = value(xb)
        fy = value(yb)
        counter.queries += 2
        if fx == fy:
            continue
        probe_blocks = []
        probe_at = []
        for t, m in enumerate(open_masks):
            mm = m & rmask
            if mm:
                probe_blocks.append(block_of(mm))
                probe_at.append(t)
        res = block_binary_search(
            f, BitString(n, xb), BitString(n, yb), probe_blocks, fx=fx
        )
        t = probe_at[res.index]
        full = open_masks.pop(t)
        open_union ^= full
        relevant_union |= full
        found.append(DistinguishingPair(res.pair.x, res.pair.y, block_of(full)))
        if len(found) >= cfg.k + 1:
            return finish("reject")
    return finish("accept")


@dataclass(frozen=True)
class OneJuntaFit:
    """Exhaustive uniform-distance fit of a small function to one variable.

    `literal` is (coordinate, polarity) with polarity 1 for the plain
    variable and 0 for its negation; `junta` adds the two constants to the
    candidate set and is ("const", b) or ("literal", i, polarity).
    """

    literal_distance: Fraction
    literal: tuple[int, int]
    junta_distance: Fraction
    junta: tuple


def literal_distance_uniform(f: FunctionOracle) -> OneJuntaFit:
    """Exact uniform distance from f to the nearest literal and 1-junta.

    Enumerates the whole domain (capped at 2**20 points), so it never
    touches f's query counter; meant for verification, not testing.
    """
    if f.n > 20:
        raise SizeError(f"exhaustive 1-junta fit capped at n = 20, got {f.n}")
    size = 1 << f.n
    raw = full_truth_table(f).to_bytes((size + 7) // 8, "little")
    vals = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:size]
    points = np.arange(size, dtype=np.uint32)

    ones = int(np.count_nonzero(vals))
    best_lit = None
    for i in range(1, f.n + 1):
        xi = (points >> np.uint32(i - 1)) & np.uint32(1)
        mism = int(np.count_nonzero(vals != xi))
        for pol, cnt in ((1, mism), (0, size - mism)):
            d = Fraction(cnt, size)
            cand = (d, (i, pol))
            if best_lit is None or cand < best_lit:
                best_lit = cand
    lit_d, lit = best_lit

    best_j = min(
        (Fraction(ones, size), ("const", 0)),
        (Fraction(size - ones, size), ("const", 1)),
        (lit_d, ("literal",) + lit),
    )
    return OneJuntaFit(lit_d, lit, best_j[0], best_j[1])
