"""The ten acceptance criteria, each at its stated tolerance and time limit.

Every test reports one PASS/FAIL line, repeated in the terminal summary.
"""
import time
from fractions import Fraction


from conftest import report
from pickseq.adversary import gen_mms_agent, gen_price_all, gen_price_rb
from pickseq.execution import ew, execute
from pickseq.mms import (
    constants,
    guarantee_alpha,
    is_irregular,
    is_worst,
    mms_brute_force,
    mms_exact,
    mms_ratio_profile,
    regular_alpha,
    two_agent_class,
)
from pickseq.search import rng_for, sample_instance
from pickseq.sequences import enumerate_all, format_sequence, make_last_first, parse_sequence, rounds
from pickseq.verify import census, check, grid, random_spec


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def _verdict(number, problems, elapsed, limit, what):
    ok = not problems and (limit is None or elapsed < limit)
    report(number, ok, f"{what} ({elapsed:.1f}s)" + (f" problems: {problems[:3]}" if problems else ""))
    assert not problems, problems
    if limit is not None:
        assert elapsed < limit, f"took {elapsed:.1f}s, limit {limit}s"


def test_criterion_01_census_3_7():
    best_listed = {"1,2,3|3,1,2|3", "1,2,3|1,3,2|3", "1,2,3|3,2,1|3", "1,2,3|2,3,1|3"}
    worst_listed = {
        "1,2,3|1,2,3|1", "1,2,3|2,1,3|1", "1,2,3|1,2,3|2",
        "1,2,3|2,1,3|2", "1,2,3|1,2,3|3", "1,2,3|2,1,3|3",
    }
    with Timer() as t:
        c = census(3, 7)
        k = constants(3, 7)
    problems = []
    if c.total != 18:
        problems.append(f"|R|={c.total}")
    if {format_sequence(s) for s in c.best} != best_listed:
        problems.append("best set")
    if {format_sequence(s) for s in c.worst} != worst_listed:
        problems.append("worst set")
    if len(c.intermediate) != 8:
        problems.append("intermediate count")
    if (k.alpha_max, k.alpha_min) != (Fraction(1, 2), Fraction(1, 3)):
        problems.append("alpha constants")
    _verdict(1, problems, t.elapsed, 10, "n=3 m=7 census: 18 = 4 best + 6 worst + 8 other")


def test_criterion_02_irregular_example(irregular_instance):
    seq = parse_sequence("1,2,3|3,1")
    with Timer() as t:
        share = mms_exact(irregular_instance, 2).value
        got = execute(irregular_instance, seq).bundle(2)
        got_value = sum(irregular_instance.utilities[1][g - 1] for g in got)
        r = mms_ratio_profile(irregular_instance, seq)[1]
        facts = (share, got_value, r, is_irregular(seq), guarantee_alpha(seq), regular_alpha(seq))
    want = (2, 1, Fraction(1, 2), True, Fraction(1, 2), Fraction(2, 3))
    problems = [] if facts == want else [f"got {facts}"]
    _verdict(2, problems, t.elapsed, 1, "irregular (1,2,3|3,1): MMS 2, utility 1, ratio 1/2, formula 2/3")


def test_criterion_03_two_agent_welfare(four_goods):
    with Timer() as t:
        rr = ew(four_goods, parse_sequence("1,2,1,2"))
        alt = ew(four_goods, parse_sequence("1,2,2,1"))
    problems = [] if (rr, alt) == (9, 8) else [f"EW {rr}, {alt}"]
    _verdict(3, problems, t.elapsed, None, "round-robin EW 9, (1,2,2,1) EW 8")


def test_criterion_04_price_constructions():
    problems = []
    with Timer() as t:
        for n in (2, 3, 4):
            for m in range(n + 1, 2 * n + 4):
                all_bound = Fraction(min(m - n + 1, n))
                rb_bound = Fraction(min(-(-m // n), n.bit_length()))
                for seq in enumerate_all(n, m, restrict_balanced=True):
                    g = gen_price_all(n, m, seq)
                    r = ew(g.instance, g.witness) / ew(g.instance, seq)
                    if r != all_bound:
                        problems.append(("all", n, m, str(seq), r))
                    g = gen_price_rb(n, m, seq)
                    r = ew(g.instance, g.witness) / ew(g.instance, seq)
                    ok = r == 2 if m <= 2 * n - 1 else r >= rb_bound
                    if not ok:
                        problems.append(("balanced", n, m, str(seq), r))
    _verdict(4, problems, t.elapsed, 60, "price constructions exact for n in 2..4, n+1 <= m <= 2n+3")


SMALL_SPACE = [(2, m) for m in range(3, 7)] + [(3, m) for m in range(4, 7)]


def test_criterion_05_guarantee_sound_and_tight():
    problems = []
    with Timer() as t:
        for n, m in SMALL_SPACE:
            for tid in ("thm_regular", "thm_irregular"):
                res = check(tid, n, m, grid(0, 1, 2))
                if not res.passed or res.partial:
                    problems.append((tid, n, m, res.counterexample, res.details.get("cap")))
            for seq in enumerate_all(n, m, restrict_balanced=True):
                agent = n - 1 if is_irregular(seq) else n
                if gen_mms_agent(n, m, seq, agent).measure() != guarantee_alpha(seq):
                    problems.append(("tightness", str(seq)))
    _verdict(5, problems, t.elapsed, 600, "guarantee sound over grid {0,1,2} and tight, (2,3..6) (3,4..6)")


def test_criterion_06_ef1_iff_balanced():
    problems = []
    with Timer() as t:
        for n, m in SMALL_SPACE:
            res = check("prop_2_1", n, m, grid(0, 1, 2))
            if not res.passed or res.partial:
                problems.append((n, m, res.counterexample))
            elif res.covered["non_balanced_sequences"] < 100:
                problems.append((n, m, "too few non-balanced sequences"))
    _verdict(6, problems, t.elapsed, None, "EF1 iff recursively balanced over the same space")


def test_criterion_07_mms_oracle():
    rng = rng_for(2024, 7)
    problems = []
    with Timer() as t:
        for k in range(1000):
            n = int(rng.integers(2, 4))
            m = int(rng.integers(n, 8))
            inst = sample_instance(rng, n, m)
            for agent in range(1, n + 1):
                if mms_exact(inst, agent).value != mms_brute_force(inst, agent).value:
                    problems.append((k, agent, inst.to_json()))
    _verdict(7, problems, t.elapsed, None, "pruned MMS equals brute force on 1000 instances")


def test_criterion_08_two_agents():
    problems = []
    with Timer() as t:
        for m in range(3, 9):
            c = census(2, m)
            lf = make_last_first(2, m)
            if c.best != [lf] or any(block[0] != 2 for block in rounds(lf)[1:]):
                problems.append((m, "best set"))
            if two_agent_class(lf) != 1 / (2 - Fraction(1, m // 2)) or guarantee_alpha(lf) != two_agent_class(lf):
                problems.append((m, "best guarantee"))
            for seq in enumerate_all(2, m, restrict_balanced=True):
                if seq != lf and not (is_worst(seq) and guarantee_alpha(seq) == Fraction(1, 2)):
                    problems.append((m, str(seq)))
    _verdict(8, problems, t.elapsed, None, "two agents: one best sequence, the rest worst, m = 3..8")


SWEEP = [(n, m) for n in range(2, 5) for m in range(n, 11)]
SWEEP_IDS = ("thm_3_3", "thm_3_4", "thm_regular", "thm_irregular")


def test_criterion_09_random_sweeps():
    problems = []
    with Timer() as t:
        for n, m in SWEEP:
            for tid in SWEEP_IDS:
                res = check(tid, n, m, random_spec(10**4, seed=0))
                if not res.passed or res.partial:
                    problems.append((tid, n, m, res.counterexample))
    _verdict(9, problems, t.elapsed, 900, f"{len(SWEEP)} sizes x {len(SWEEP_IDS)} claims x 10^4 instances")


def test_criterion_10_availability_replay():
    problems = []
    with Timer() as t:
        for n, m in [(4, 12), (4, 16), (8, 32)]:
            res = check("lem_3_6", n, m)
            if not res.passed or not res.covered.get("rounds_checked"):
                problems.append((n, m, res.counterexample))
    _verdict(10, problems, t.elapsed, None, "availability counts replayed for n = 4 and n = 8")
