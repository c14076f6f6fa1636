"""Statistical acceptance suite: nine go/no-go criteria with pinned tolerances.

Every criterion is seeded end to end, records a one-line verdict through
conftest.record_criterion (printed after the run), and asserts its own
wall-clock budget.  Criterion 8 is expected red: the required scatter rate
sits above what the construction's collision probability allows, and the
companion test pins the measured rate to that analytic value instead.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from djunta import (
    BitString,
    DFTesterConfig,
    FiniteDistribution,
    FunctionOracle,
    UniformTesterConfig,
    binary_search,
    block_binary_search,
    ceil_log2,
    exact_distance_to_kjuntas,
    gen_no,
    gen_yes,
    influence_lemma_estimate,
    is_kjunta,
    is_scattered,
    main_djunta,
    query_scaling_profile,
    rand_bits,
    run_trials,
    simple_djunta,
    uniform_junta,
    verify_witness,
    where_is_the_literal,
)
from conftest import record_criterion

MASTER = 20260822

_shared: dict = {}


def _parity_table(k):
    return sum((z.bit_count() & 1) << z for z in range(1 << k))


def _random_support(rng, n, size):
    pts = set()
    while len(pts) < size:
        pts.add(rand_bits(rng, n))
    return FiniteDistribution.support(n, tuple(pts))


@pytest.fixture(scope="module")
def far_pool():
    """Twenty instances at n <= 14, each exactly verified >= 1/3-far.

    Three families: coin-labeled hard instances over random supports,
    parities of k+1 variables on uniform cubes (exactly 1/2-far), and
    random labelings of small supports measured against single variables.
    """
    pool = []
    seed = 1
    while len(pool) < 12:
        if seed > 60:
            raise RuntimeError("far hard instances are rarer than they should be")
        inst = gen_no(14, 2, np.random.default_rng(seed))
        f = inst.oracle()
        rep = exact_distance_to_kjuntas(f, inst.D, 2)
        if rep.distance >= Fraction(1, 3):
            pool.append({"name": f"hard{seed}", "f": f, "D": inst.D, "k": 2, "eps": rep.distance})
        seed += 1
    for name, n, vars, k in (
        ("par2a", 10, (2, 7), 1),
        ("par2b", 10, (3, 9), 1),
        ("par3", 11, (1, 6, 11), 2),
        ("par4", 12, (2, 5, 8, 12), 3),
    ):
        f = FunctionOracle.from_junta(n, vars, _parity_table(len(vars)))
        D = FiniteDistribution.uniform_cube(n)
        rep = exact_distance_to_kjuntas(f, D, k)
        assert rep.distance == Fraction(1, 2)
        pool.append({"name": name, "f": f, "D": D, "k": k, "eps": rep.distance})
    seed = 1000
    while len(pool) < 20:
        if seed > 1060:
            raise RuntimeError("far random-label instances are rarer than they should be")
        rng = np.random.default_rng(seed)
        f = FunctionOracle.from_truth_table(14, rand_bits(rng, 1 << 14))
        D = _random_support(rng, 14, 80)
        rep = exact_distance_to_kjuntas(f, D, 1)
        if rep.distance >= Fraction(1, 3):
            pool.append({"name": f"supp{seed}", "f": f, "D": D, "k": 1, "eps": rep.distance})
        seed += 1
    return pool


def test_criterion1_one_sidedness():
    # 500 random junta instances, every tester, zero rejections allowed
    t0 = time.monotonic()
    rng = np.random.default_rng(MASTER)
    cfgs = {k: DFTesterConfig(k=k, epsilon=0.5) for k in range(1, 7)}
    ucfgs = {k: UniformTesterConfig(k=k, epsilon=0.5) for k in range(1, 7)}
    rejections = 0
    runs = 0
    for i in range(500):
        k = 1 + i % 6
        n = int(rng.integers(16, 65))
        vars = sorted(int(v) + 1 for v in rng.choice(n, size=k, replace=False))
        f0 = FunctionOracle.from_junta(n, vars, rand_bits(rng, 1 << k))
        D = _random_support(rng, n, 100) if i % 2 else FiniteDistribution.uniform_cube(n)
        runners = (
            lambda f, r: simple_djunta(f, D, cfgs[k], r),
            lambda f, r: main_djunta(f, D, cfgs[k], r),
            lambda f, r: uniform_junta(f, ucfgs[k], r),
        )
        for run in runners:
            v = run(f0.fork(), np.random.default_rng(int(rng.integers(2**32))))
            runs += 1
            if v.is_reject:
                rejections += 1
    elapsed = time.monotonic() - t0
    ok = rejections == 0 and elapsed < 60
    record_criterion(
        "criterion 1 (one-sidedness)",
        ok,
        f"{rejections} rejections in {runs} junta runs, {elapsed:.1f}s",
    )
    assert rejections == 0
    assert elapsed < 60


def test_criterion2_soundness(far_pool):
    # every far instance: both distribution-free testers, 200 trials,
    # Wilson 95% lower bound above 2/3 - 0.08
    t0 = time.monotonic()
    floor = 2 / 3 - 0.08
    worst = 1.0
    failures = []
    for idx, e in enumerate(far_pool):
        cfg = DFTesterConfig(k=e["k"], epsilon=1 / 3)
        for tester in ("main", "simple"):
            rep = run_trials((e["f"], e["D"]), tester, cfg, 200, seed=MASTER + idx)
            lo = rep.wilson_ci[0]
            worst = min(worst, lo)
            if lo <= floor:
                failures.append((e["name"], tester, lo))
    elapsed = time.monotonic() - t0
    ok = not failures and elapsed < 300
    record_criterion(
        "criterion 2 (soundness at eps=1/3)",
        ok,
        f"20 instances x 2 testers x 200 trials, worst Wilson lower bound "
        f"{worst:.3f} (floor {floor:.3f}), {elapsed:.1f}s",
    )
    assert not failures, failures
    assert elapsed < 300


def test_criterion3_query_scaling():
    t0 = time.monotonic()
    rows = query_scaling_profile(4, 0.25, (64, 256, 1024), trials=50, seed=1)
    main_max = [r.max_queries for r in rows if r.tester == "main"]
    simple_mean = [r.mean_queries for r in rows if r.tester == "simple"]
    spread = (max(main_max) - min(main_max)) / min(main_max)
    ceiling = DFTesterConfig(k=4, epsilon=0.25).main_query_ceiling()
    growing = all(a < b for a, b in zip(simple_mean, simple_mean[1:]))
    elapsed = time.monotonic() - t0
    ok = spread <= 0.20 and max(main_max) < ceiling and growing and elapsed < 300
    record_criterion(
        "criterion 3 (query scaling in n)",
        ok,
        f"main max {main_max} (spread {spread:.1%}, ceiling {ceiling}), "
        f"simple means {[round(m, 1) for m in simple_mean]}, {elapsed:.1f}s",
    )
    assert spread <= 0.20
    assert max(main_max) < ceiling
    assert growing
    assert elapsed < 300


def test_criterion4_search_contracts():
    t0 = time.monotonic()
    rng = np.random.default_rng(MASTER + 4)
    bad = 0
    done = 0
    while done < 10**4:
        n = int(rng.integers(3, 11))
        f = FunctionOracle.from_truth_table(n, rand_bits(rng, 1 << n))
        for _ in range(12):
            xb, yb = rand_bits(rng, n), rand_bits(rng, n)
            if xb != yb and f.peek_bits(xb) != f.peek_bits(yb):
                break
        else:
            continue
        fx0 = f.peek_bits(xb)
        res = binary_search(f, BitString(n, xb), BitString(n, yb))
        done += 1
        (i,) = res.pair.block
        good = (
            res.pair.x.bits ^ res.pair.y.bits == 1 << (i - 1)
            and f.peek(res.pair.x) != f.peek(res.pair.y)
            and f.peek(res.pair.x) == fx0
            and res.queries <= ceil_log2((xb ^ yb).bit_count())
        )
        bad += not good

    done2 = 0
    while done2 < 10**4:
        n = int(rng.integers(3, 11))
        f = FunctionOracle.from_truth_table(n, rand_bits(rng, 1 << n))
        for _ in range(12):
            xb, yb = rand_bits(rng, n), rand_bits(rng, n)
            if xb != yb and f.peek_bits(xb) != f.peek_bits(yb):
                break
        else:
            continue
        r = int(rng.integers(1, n + 1))
        groups = {}
        for c in range(1, n + 1):
            groups.setdefault(int(rng.integers(0, r)), set()).add(c)
        blocks = [frozenset(s) for s in groups.values()]
        res = block_binary_search(f, BitString(n, xb), BitString(n, yb), blocks)
        done2 += 1
        d = res.pair.x.bits ^ res.pair.y.bits
        inside = sum(1 << (c - 1) for c in blocks[res.index])
        good = (
            blocks[res.index] == res.pair.block
            and d != 0
            and d & ~inside == 0
            and f.peek(res.pair.x) != f.peek(res.pair.y)
            and res.queries <= ceil_log2(len(blocks))
        )
        bad += not good
    elapsed = time.monotonic() - t0
    ok = bad == 0 and elapsed < 30
    record_criterion(
        "criterion 4 (search contracts)",
        ok,
        f"{bad} violations in {done + done2} randomized searches, {elapsed:.1f}s",
    )
    assert bad == 0
    assert elapsed < 30


def test_criterion5_influence_floor(far_pool):
    # re-randomizing everything outside a small set flips a far function
    # with probability at least half its distance
    t0 = time.monotonic()
    instances = far_pool[0:4] + far_pool[12:15] + far_pool[16:19]
    assert len(instances) == 10
    rng = np.random.default_rng(MASTER + 5)
    bad = 0
    margin = 1.0
    for e in instances:
        eps = float(e["eps"])
        threshold = eps / 2 - 4 * math.sqrt(eps / 10**4)
        n = e["f"].n
        for _ in range(5):
            size = int(rng.integers(0, e["k"] + 1))
            I = frozenset(int(c) + 1 for c in rng.choice(n, size=size, replace=False))
            est = influence_lemma_estimate(
                e["f"], e["D"], I, 10**4, np.random.default_rng(int(rng.integers(2**32)))
            )
            margin = min(margin, est - threshold)
            bad += est < threshold
    elapsed = time.monotonic() - t0
    ok = bad == 0 and elapsed < 120
    record_criterion(
        "criterion 5 (influence floor)",
        ok,
        f"{bad} of 50 estimates under threshold, worst margin {margin:+.3f}, {elapsed:.1f}s",
    )
    assert bad == 0
    assert elapsed < 120


def test_criterion6_side_location():
    # corrupt a literal on a gamma/2 fraction of points; the 4-query side
    # probe must still name the literal's half with frequency 1-4*gamma
    # minus three binomial standard deviations
    t0 = time.monotonic()
    n = 10
    gamma = 1 / 16
    flips = int(gamma / 2 * (1 << n))
    left = frozenset(range(1, 6))
    right = frozenset(range(6, 11))
    rng = np.random.default_rng(MASTER + 6)
    correct = 0
    total = 0
    overbudget = 0
    for coord, want in ((3, "left"), (8, "right")):
        table = sum(((z >> (coord - 1)) & 1) << z for z in range(1 << n))
        for p in rng.choice(1 << n, size=flips, replace=False):
            table ^= 1 << int(p)
        f = FunctionOracle.from_truth_table(n, table)
        for _ in range(5000):
            g = f.fork()
            res = where_is_the_literal(g, left, right, rng)
            total += 1
            correct += res.outcome == want
            overbudget += g.counter.queries > 4
    freq = correct / total
    p0 = 1 - 4 * gamma
    sigma = math.sqrt(p0 * (1 - p0) / total)
    threshold = p0 - 3 * sigma
    elapsed = time.monotonic() - t0
    ok = freq >= threshold and overbudget == 0 and elapsed < 30
    record_criterion(
        "criterion 6 (side location under corruption)",
        ok,
        f"correct-side frequency {freq:.4f} vs threshold {threshold:.4f}, "
        f"{overbudget} over-budget calls, {elapsed:.1f}s",
    )
    assert freq >= threshold
    assert overbudget == 0
    assert elapsed < 30


def test_criterion7_instance_families():
    t0 = time.monotonic()
    not_junta = 0
    for s in range(50):
        inst = gen_yes(14, 2, np.random.default_rng(7000 + s))
        not_junta += not is_kjunta(inst.oracle(), 2)
    for s in range(10):
        inst = gen_yes(16, 3, np.random.default_rng(7500 + s))
        not_junta += not is_kjunta(inst.oracle(), 3)
    far = 0
    for s in range(50):
        inst = gen_no(14, 2, np.random.default_rng(9000 + s))
        rep = exact_distance_to_kjuntas(inst.oracle(), inst.D, 2)
        far += rep.distance >= Fraction(1, 3)
    elapsed = time.monotonic() - t0
    ok = not_junta == 0 and far >= 48 and elapsed < 180
    record_criterion(
        "criterion 7 (instance families)",
        ok,
        f"60/60 planted juntas verified, {far}/50 hard instances exactly >= 1/3-far, "
        f"{elapsed:.1f}s",
    )
    assert not_junta == 0
    assert far >= 48  # 95% of 50
    assert elapsed < 180


def test_criterion8_scatteredness():
    # required: 4 draws from a hard instance at n=1200, k=6 project onto
    # distinct sections in >= 99% of trials
    t0 = time.monotonic()
    hits = 0
    trials = 0
    for b in range(50):
        inst = gen_no(1200, 6, np.random.default_rng(5000 + b))
        rng = np.random.default_rng(6000 + b)
        for _ in range(20):
            Y = [inst.D.sample(rng) for _ in range(4)]
            trials += 1
            hits += is_scattered(Y, inst.J)
    rate = hits / trials
    elapsed = time.monotonic() - t0
    _shared["scatter_rate"] = rate
    birthday = (1 - 1 / 64) * (1 - 2 / 64) * (1 - 3 / 64)
    record_criterion(
        "criterion 8 (scatteredness)",
        rate >= 0.99 and elapsed < 60,
        f"rate {rate:.4f} over {trials} trials, {elapsed:.1f}s; 4 uniform section "
        f"projections over 2^6 sections collide with probability "
        f"{1 - birthday:.4f}, capping the true rate at {birthday:.4f} < 0.99",
    )
    assert elapsed < 60
    assert rate >= 0.99


def test_criterion8_companion_rate_matches_collision_bound():
    # the red criterion above is a property of the target, not the code:
    # the measured rate must sit on the birthday bound for 4 draws from
    # 64 equally likely sections
    rate = _shared.get("scatter_rate")
    if rate is None:
        pytest.skip("criterion 8 sweep did not run")
    birthday = (1 - 1 / 64) * (1 - 2 / 64) * (1 - 3 / 64)
    assert abs(rate - birthday) <= 0.03


def test_criterion9_witness_integrity(far_pool):
    t0 = time.monotonic()
    checked = 0
    bad = 0
    for idx, e in enumerate(far_pool):
        cfg = DFTesterConfig(k=e["k"], epsilon=1 / 3)
        for s in range(5):
            for run in (main_djunta, simple_djunta):
                f = e["f"].fork()
                v = run(f, e["D"], cfg, np.random.default_rng([MASTER, idx, s]))
                if v.is_reject:
                    checked += 1
                    if not (verify_witness(f, v.witness) and len(v.witness) >= e["k"] + 1):
                        bad += 1
    for idx, e in enumerate(far_pool):
        if e["D"].kind != "uniform_cube":
            continue
        ucfg = UniformTesterConfig(k=e["k"], epsilon=1 / 3)
        for s in range(10):
            f = e["f"].fork()
            v = uniform_junta(f, ucfg, np.random.default_rng([MASTER, 99, idx, s]))
            if v.is_reject:
                checked += 1
                if not (verify_witness(f, v.witness) and len(v.witness) >= e["k"] + 1):
                    bad += 1
    elapsed = time.monotonic() - t0
    ok = bad == 0 and checked >= 100
    record_criterion(
        "criterion 9 (witness integrity)",
        ok,
        f"{checked} rejections re-verified, {bad} failures, {elapsed:.1f}s "
        "(the soundness and scaling suites re-verify every rejection in-loop as well)",
    )
    assert bad == 0
    assert checked >= 100
