"""
Which balanced sequences protect maximin shares best?
=====================================================

Every recursively balanced sequence promises each agent some fraction of her
maximin share.  For three agents and seven goods that fraction is either
1/2 (the best possible), 1/3 (the worst) or something in between.
"""
from pathlib import Path

from pickseq import Instance, classify, constants, execute, mms_exact, parse_sequence
from pickseq.verify import census

k = constants(3, 7)
print(f"alpha_max = {k.alpha_max}, alpha_min = {k.alpha_min}")

c = census(3, 7)
print(f"{c.total} sequences")
for name in ("best", "worst", "intermediate"):
    group = getattr(c, name)
    print(f"  {name} ({len(group)}): " + "  ".join(str(s) for s in group))

# An irregular sequence: the short second round skips agent 2, so the formula
# that reads off agent 3's turns overstates the guarantee.
seq = parse_sequence("1,2,3|3,1")
rep = classify(seq)
print(rep.verdict(), "| formula from agent 3 alone:", rep.regular_formula_alpha)

inst = Instance.from_json((Path(__file__).parent / "data" / "irregular_three_agents.json").read_text())
share = mms_exact(inst, 2)
got = execute(inst, seq).bundle(2)
print("agent 2: MMS", share.value, "via", [sorted(b) for b in share.witness_partition],
      "| receives", sorted(got), "worth", sum(inst.utilities[1][g - 1] for g in got))
