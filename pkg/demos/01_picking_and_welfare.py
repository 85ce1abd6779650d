"""
Picking goods one at a time
===========================

Two agents, four goods.  Both like the goods in the same order but not by
the same amounts, so the order of turns decides who ends up worst off.
"""
from fractions import Fraction
from pathlib import Path

from pickseq import Instance, egalitarian_welfare, execute, is_ef1, parse_sequence
from pickseq.search import max_egalitarian

here = Path(__file__).parent
inst = Instance.from_json((here / "data" / "two_agents_four_goods.json").read_text())
print([[str(u) for u in row] for row in inst.utilities])

# Round-robin hands out goods 1 and 3 to agent 1, 2 and 4 to agent 2.
for text in ["1,2|1,2", "1,2|2,1"]:
    seq = parse_sequence(text)
    alloc = execute(inst, seq)
    report = egalitarian_welfare(inst, alloc)
    print(f"{text:>8}: bundles {[sorted(b) for b in alloc.bundles]}, "
          f"utilities {[str(u) for u in report.per_agent_utility]}, EW {report.egalitarian}")

# Both are balanced, so both allocations are envy-free up to one good.
print("EF1:", bool(is_ef1(inst, execute(inst, parse_sequence("1,2|2,1")))))

# Dropping balance can break EF1: agent 1 picking three times in a row.
greedy = parse_sequence("1,2,1,1")
res = is_ef1(inst, execute(inst, greedy))
print(f"{greedy}: EF1 {res.holds}, witness (envier, envied) {res.witness}")

# The best egalitarian welfare over every balanced sequence.
value, picks, scale = max_egalitarian(inst, balanced=True)
print("best balanced sequence", picks, "EW", Fraction(value, scale))
