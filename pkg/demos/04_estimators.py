# Monte Carlo estimates of multilinear forms
#
# Estimates are seeded and chunked: the same seed gives the same number for
# any thread count.

import math

from blform import (
    FormInstance,
    disk,
    eval_general_form,
    eval_lambda_n,
    gaussian,
    gaussian_form_closed_form,
    lp_norm,
    tensor_quadrature_form,
    verify_main_estimate,
)

# Three unit Gaussians on the lines e1, e2, e1+e2 of R^2: the exact value is 3^(-1/2)
F = FormInstance([[1, 0], [0, 1], [1, 1]], tuple(gaussian(1, dim=1) for _ in range(3)), ell=1)
print("closed form ", gaussian_form_closed_form(F).value)
print("quadrature  ", tensor_quadrature_form(F).value)
est = eval_general_form(F, 1_000_000, seed=0)
print(f"monte carlo  {est.value:.5f} +- {est.stderr:.5f}")

# A disk in the middle: no closed form any more, only the estimate
G = FormInstance([[1, 0], [0, 1], [1, 1]], (gaussian(1, dim=1), disk(0.8, dim=1), gaussian(1, dim=1)), ell=1)
est = eval_general_form(G, 1_000_000, seed=1)
print(f"with a disk: {est.value:.5f} +- {est.stderr:.5f}")

# Norms in closed form; the Cauchy kernel only has a weak L^2 norm
print("||disk||_2 =", lp_norm(disk(1), "1/2"), " sqrt(pi) =", math.sqrt(math.pi))

# Lambda_0 is a plain inner product, pi for two unit disks
est = eval_lambda_n(0, disk(1), [disk(1)], 1_000_000, seed=0)
print(f"Lambda_0 = {est.value:.4f} +- {est.stderr:.4f}")

# Lambda_1 with centred Gaussians cancels to zero by rotation symmetry;
# moving the centres gives a genuinely nonzero value
t = gaussian(1, center=(0.5, 0))
q = [gaussian(1, center=(0.3, 0.2)), gaussian(1, center=(-0.4, 0.1)), gaussian(1, center=(0.2, -0.5))]
est = eval_lambda_n(1, t, q, 1_000_000, seed=0)
print(f"Lambda_1 = {est.complex_value:.4f}  (stderr {est.stderr:.4f})")

rep = verify_main_estimate(1, t, q, "1/2", 1_000_000, seed=0)
print(f"ratio to the norm product: {rep.ratio:.4f} +- {rep.ratio_stderr:.4f}")
