# Exact linear algebra and vector matroids
#
# Everything here runs over the rationals; nothing is rounded.

from fractions import Fraction

from blform import ExactMatrix, VectorMatroid, determinant, indices_of, mask_of, rank, rref

# Fraction-free determinant and a reduced row echelon form
A = ExactMatrix.from_rows([[1, 0, 0], [1, -1, 0], [1, -1, 1]])
print("det =", determinant(A))
R, r, pivots = rref(ExactMatrix.from_rows([[1, 2], ["1/2", 1], [0, 3]]))
print("rank", r, "pivots", pivots)
print(R)

# Rational entries are fine as strings, ints or Fractions (floats are refused)
B = ExactMatrix.from_rows([["1/2", "1/3"], [Fraction(1, 4), "0.2"]])
print("det of a rational matrix:", determinant(B))

# A matroid on five vectors of Q^3: two parallel pairs and a sum
M = VectorMatroid([[1, 0, 0], [2, 0, 0], [0, 1, 0], [1, 1, 0], [0, 0, 1]])
print(M)
print("rank of {0,1}:", M.rank_of(mask_of([0, 1])))
print("closure of {0,2}:", indices_of(M.closure_of(mask_of([0, 2]))))

bases = M.enumerate_bases()
print(len(bases), "bases, e.g.", [indices_of(b) for b in bases[:4]])

# Flats come out sorted by rank; the lattice is built from covers, not from
# all 2^m subsets
for flat, r in M.flats_with_rank():
    print(f"  rank {r}: {indices_of(flat)}")
