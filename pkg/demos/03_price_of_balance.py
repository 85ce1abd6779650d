"""
How much egalitarian welfare can a fixed sequence lose?
=======================================================

For a fixed balanced sequence we build the instance from the lower-bound
construction, then let a branch and bound look for the best competing
sequence.  The ratio never passes the proven bound; on the construction it
meets it.
"""
from pickseq import ew, make_round_robin
from pickseq.adversary import gen_price_all, gen_price_rb
from pickseq.verify import price_bound, price_search, random_spec

for n, m in [(2, 3), (3, 5), (3, 7), (4, 9)]:
    seq = make_round_robin(n, m)
    g = gen_price_all(n, m, seq)
    h = gen_price_rb(n, m, seq)
    print(f"n={n} m={m} {seq}")
    print(f"   any sequence: witness {g.witness} ratio {ew(g.instance, g.witness) / ew(g.instance, seq)}"
          f" (bound {price_bound(n, m, False)})")
    print(f"   balanced only: witness {h.witness} ratio {ew(h.instance, h.witness) / ew(h.instance, seq)}"
          f" (bound {price_bound(n, m, True)})")

# The same search over seeded random instances, with and without the construction.
res = price_search(3, 5, make_round_robin(3, 5), "balanced", random_spec(300, seed=1))
print("search over 300 random instances + construction:", res.max_ratio, "bound", res.bound)
res = price_search(3, 5, make_round_robin(3, 5), "balanced", random_spec(300, seed=1),
                   include_adversarial=False)
print("random instances alone:", res.max_ratio)
