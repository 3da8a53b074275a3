# Membership in the basis polytope, with certificates
#
# A tuple theta is inside iff it is in the unit cube, sums to k, and every
# flat S has sum_S theta <= rank(S).  A failure names the first broken
# constraint.

from fractions import Fraction

from blform import VectorMatroid, bl_constant, build_family, margin, membership, vertices

half = Fraction(1, 2)
M = build_family(1).matroid  # six vectors in Q^3

print(membership(M, [half] * 6).to_json())           # interior, margin 1/2
print(membership(M, [1, 1, 1, 0, 0, 0]).to_json())   # a dependent triple
print(membership(M, ["3/2", 0, 0, 1, 1, "1/2"]).to_json())  # leaves the box
print(membership(M, [half] * 5 + [0]).to_json())     # off the hyperplane

# Vertices are the basis indicators and sit on the boundary
vs = vertices(M)
print(len(vs), "vertices; margin of the first:", margin(M, vs[0].theta))

# Walk from the centre to a vertex: the margin shrinks linearly to zero,
# and past the vertex we leave the polytope
v = vs[0].theta
for s in [Fraction(i, 4) for i in range(6)]:
    th = [half + s * (x - half) for x in v]
    verdict = membership(M, th)
    print(f"s = {s}: member={verdict.member}", verdict.margin if verdict.member else verdict.violation.to_json())

# The basis bound constant is max |det B|^(-ell)
print("constant, ell=1:", bl_constant(VectorMatroid([[2, 0], [0, 1], [1, 1]]), 1))
