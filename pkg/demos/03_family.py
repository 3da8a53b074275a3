# The Cauchy-kernel family M_n and its structural checks
#
# Ground order: e_1, e_1 - e_2, e_2, e_2 - e_3, ..., e_(2n+1), then the
# alternating vector e_1 - e_2 + ... + e_(2n+1).

from fractions import Fraction

from blform import (
    build_family,
    decompose_spanned,
    family_report,
    find_dependent_triple,
    indices_of,
    mask_of,
    sample_p_delta,
    verify_all_base_dets,
    verify_p_delta_inclusion,
)
from blform.family import p_delta_vertices

for n in (1, 2, 3):
    inst = build_family(n)
    count, unit = verify_all_base_dets(inst)
    print(f"n={n}: m={inst.m}, k={inst.k}, {count} bases, all |det| = 1: {unit}")

inst = build_family(2)
# {e_3, e_3 - e_4, e_4} is the dependent triple starting at j = 3
print("triple at j =", find_dependent_triple(inst, mask_of([4, 5, 6])))
s0, pieces = decompose_spanned(inst, mask_of([0, 1, 2, 8]))
print("rest", indices_of(s0), "intervals", [p.to_json() for p in pieces])

# Sampled points of P_delta, then every extreme point of P_delta
tenth = Fraction(1, 10)
pts = sample_p_delta(inst, tenth, 500, seed=0)
print("samples:", verify_p_delta_inclusion(inst, tenth, pts).to_json()["violations"], "violations")
print("vertices:", verify_p_delta_inclusion(inst, tenth, p_delta_vertices(inst, tenth)).failed, "violations")

# How far does inclusion go past 1/10 for n = 2?  Only the extreme points
# matter, so the check is exhaustive.  Nothing is claimed here beyond 1/10.
for d in ["1/10", "1/8", "1/6", "1/5", "1/4"]:
    rep = verify_p_delta_inclusion(inst, d, p_delta_vertices(inst, d))
    print(f"  delta = {d}: {rep.failed} of {rep.samples} extreme points outside")

# One call runs every check and returns a JSON-ready report
rep = family_report(1, samples=200)
print({k: rep[k] for k in ("n", "bases", "interior_margin", "seg_est_min_slack", "ok")})
