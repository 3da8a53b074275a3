"""Monte Carlo evaluation of Brascamp-Lieb type forms.

Two integrals are supported:

* the general form ``Lambda(a_1..a_m) = int_{R^(k*ell)} prod_j a_j(f_j . x) dx``
  for bounded, integrable test functions (Gaussians and disk indicators);
* the singular form ``Lambda_n(t, q_0..q_2n)`` on ``C^(2n+1)`` with the
  alternating Cauchy kernels ``1/(x_0 - x_1)`` and ``1/conj(x_(j-1) - x_j)``.

Sampling is split into fixed-size chunks; chunk ``c`` draws from a generator
seeded with ``(seed, c)`` and chunk statistics are merged in chunk order, so
results do not depend on the number of worker threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionError, DomainError
from .exact_linalg import format_rational, to_rational
from .family import family_vectors

__all__ = [
    "TestFunction",
    "gaussian",
    "disk",
    "cauchy_kernel",
    "conj_cauchy_kernel",
    "FormInstance",
    "EstimateResult",
    "MainEstimateReport",
    "lp_norm",
    "form_integrand",
    "eval_general_form",
    "gaussian_form_closed_form",
    "tensor_quadrature_form",
    "eval_lambda_n",
    "lambda_n_form",
    "verify_main_estimate",
    "default_threads",
]

KERNELS = ("cauchy", "conj_cauchy")
KINDS = ("gaussian", "disk") + KERNELS
DEFAULT_CHUNK = 1 << 16
# proposal covariance = INFLATE x the covariance matched to the integrand
INFLATE = 2.0
# a unit-width Gaussian is below exp(-9 pi) beyond this many widths
GAUSS_SUPPORT = 3.0
DISK_WIDTH = 1.5


def default_threads() -> int:
    env = os.environ.get("BLFORM_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("BLFORM_THREADS must be a positive integer")
        return n
    return os.cpu_count() or 1


def _num(x) -> float:
    if isinstance(x, str):
        return float(to_rational(x))
    return float(x)


@dataclass(frozen=True)
class TestFunction:
    """One of the closed class of test functions on ``R^dim`` (``dim`` 2 is ``C``).

    ``gaussian``: ``amplitude * exp(-pi |x - center|^2 / width^2)``;
    ``disk``: ``amplitude`` times the indicator of ``|x - center| <= radius``;
    ``cauchy`` / ``conj_cauchy``: ``1/x`` and ``1/conj(x)`` on ``C``.
    """

    __test__ = False  # not a pytest class

    kind: str
    dim: int = 2
    width: float | None = None
    radius: float | None = None
    center: tuple[float, ...] | None = None
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown test function kind {self.kind!r}")
        if self.dim not in (1, 2):
            raise DimensionError("test functions live on R^1 or R^2")
        if self.kind in KERNELS:
            if self.dim != 2:
                raise DimensionError("Cauchy kernels are only defined on C (dim 2)")
            if self.center is not None:
                raise ValueError("Cauchy kernels are not translated")
            return
        if self.kind == "gaussian" and not (self.width and self.width > 0):
            raise ValueError("a Gaussian needs width > 0")
        if self.kind == "disk" and not (self.radius and self.radius > 0):
            raise ValueError("a disk needs radius > 0")
        center = tuple(float(c) for c in (self.center or (0.0,) * self.dim))
        if len(center) != self.dim:
            raise DimensionError("center has the wrong dimension")
        object.__setattr__(self, "center", center)

    @property
    def is_kernel(self) -> bool:
        return self.kind in KERNELS

    @property
    def _c(self):
        if self.dim == 2:
            return complex(self.center[0], self.center[1])
        return self.center[0]

    @property
    def effective_width(self) -> float:
        """Width of the Gaussian used to shape proposals for this function."""
        return self.width if self.kind == "gaussian" else DISK_WIDTH * self.radius

    @property
    def scale(self) -> float:
        if self.is_kernel:
            raise DomainError("kernels have no length scale")
        return abs(self._c) + (self.width if self.kind == "gaussian" else self.radius)

    @property
    def support_radius(self) -> float:
        if self.is_kernel:
            return math.inf
        spread = GAUSS_SUPPORT * self.width if self.kind == "gaussian" else self.radius
        return abs(self._c) + spread

    def __call__(self, y):
        y = np.asarray(y)
        if self.dim == 2:
            z = y if np.iscomplexobj(y) else y[..., 0] + 1j * y[..., 1]
            if self.kind == "cauchy":
                return 1.0 / z
            if self.kind == "conj_cauchy":
                return 1.0 / np.conj(z)
            d2 = np.abs(z - self._c) ** 2
        else:
            if y.ndim and y.shape[-1] == 1:
                y = y[..., 0]
            d2 = (y - self._c) ** 2
        if self.kind == "gaussian":
            return self.amplitude * np.exp(-math.pi * d2 / self.width**2)
        return self.amplitude * (d2 <= self.radius**2).astype(float)

    def scaled(self, factor: float) -> "TestFunction":
        if self.is_kernel:
            raise DomainError("kernels cannot be rescaled")
        return TestFunction(self.kind, self.dim, self.width, self.radius, self.center, self.amplitude * factor)

    def reflected(self) -> "TestFunction":
        """``x -> f(conj x)``: mirror the center across the real axis."""
        if self.is_kernel or self.dim != 2:
            raise DomainError("reflection is defined for Gaussians and disks on C")
        c = (self.center[0], -self.center[1])
        return TestFunction(self.kind, self.dim, self.width, self.radius, c, self.amplitude)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "dim": self.dim}
        if self.kind == "gaussian":
            out["width"] = self.width
        if self.kind == "disk":
            out["radius"] = self.radius
        if not self.is_kernel:
            out["center"] = list(self.center)
            out["amplitude"] = self.amplitude
        return out

    @classmethod
    def from_json(cls, data: dict) -> "TestFunction":
        kind = data["kind"]
        get = lambda key: _num(data[key]) if key in data else None
        center = data.get("center")
        return cls(
            kind=kind,
            dim=int(data.get("dim", 2)),
            width=get("width"),
            radius=get("radius"),
            center=None if center is None else tuple(_num(c) for c in center),
            amplitude=_num(data.get("amplitude", 1)),
        )


def gaussian(width=1.0, dim: int = 2, center=None, amplitude=1.0) -> TestFunction:
    return TestFunction("gaussian", dim, width=_num(width), center=center, amplitude=_num(amplitude))


def disk(radius=1.0, dim: int = 2, center=None, amplitude=1.0) -> TestFunction:
    return TestFunction("disk", dim, radius=_num(radius), center=center, amplitude=_num(amplitude))


def cauchy_kernel() -> TestFunction:
    return TestFunction("cauchy")


def conj_cauchy_kernel() -> TestFunction:
    return TestFunction("conj_cauchy")


def lp_norm(f: TestFunction, p_recip, q=None) -> float:
    """``||f||`` in ``L^p`` with ``p = 1/p_recip`` (``p_recip = 0`` is the sup norm).

    Kernels only have the weak-``L^2`` quasi-norm: ``p_recip = 1/2`` with
    ``q = inf`` gives ``sqrt(pi)`` (``|{|1/x| > s}| = pi / s^2``); anything
    else is infinite and raises.
    """
    theta = to_rational(p_recip) if not isinstance(p_recip, float) else Fraction(p_recip)
    if not 0 <= theta <= 1:
        raise DomainError("p_recip must lie in [0, 1]")
    if f.is_kernel:
        if theta != Fraction(1, 2) or q is None or _num(q) != math.inf:
            raise DomainError("the Cauchy kernel only has a finite L^(2,inf) quasi-norm")
        return math.sqrt(math.pi)
    if q is not None:
        raise ValueError("a Lorentz index is only meaningful for the Cauchy kernels here")
    amp = abs(f.amplitude)
    if theta == 0:
        return amp
    th = float(theta)
    if f.kind == "gaussian":
        mass = f.width**f.dim * th ** (f.dim / 2)
    else:
        mass = math.pi * f.radius**2 if f.dim == 2 else 2.0 * f.radius
    return amp * mass**th


@dataclass(frozen=True)
class FormInstance:
    """Vectors ``f_j`` in ``Q^k`` and one test function on ``R^ell`` per vector."""

    vectors: tuple
    functions: tuple
    ell: int = 1

    def __post_init__(self):
        vecs = tuple(tuple(to_rational(x) for x in v) for v in self.vectors)
        funcs = tuple(self.functions)
        if not vecs:
            raise DimensionError("a form needs at least one vector")
        if len(funcs) != len(vecs):
            raise DimensionError("need exactly one test function per vector")
        k = len(vecs[0])
        if any(len(v) != k for v in vecs):
            raise DimensionError("vectors have different lengths")
        if any(f.dim != self.ell for f in funcs):
            raise DimensionError(f"every test function must live on R^{self.ell}")
        object.__setattr__(self, "vectors", vecs)
        object.__setattr__(self, "functions", funcs)

    @property
    def k(self) -> int:
        return len(self.vectors[0])

    @property
    def m(self) -> int:
        return len(self.vectors)

    def matrix(self) -> np.ndarray:
        return np.array([[float(x) for x in v] for v in self.vectors])

    def scaled(self, factors: Sequence[float]) -> "FormInstance":
        return FormInstance(self.vectors, tuple(f.scaled(c) for f, c in zip(self.functions, factors)), self.ell)

    def to_json(self) -> dict:
        return {
            "ell": self.ell,
            "vectors": [[format_rational(x) for x in v] for v in self.vectors],
            "functions": [f.to_json() for f in self.functions],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FormInstance":
        return cls(
            data["vectors"],
            tuple(TestFunction.from_json(f) for f in data["functions"]),
            int(data.get("ell", 1)),
        )


@dataclass(frozen=True)
class EstimateResult:
    value: float
    stderr: float
    samples: int
    seed: int
    method: str
    complex_value: complex | None = None
    warnings: tuple[str, ...] = ()

    def to_json(self) -> dict:
        out = {
            "value": self.value,
            "stderr": self.stderr,
            "samples": self.samples,
            "seed": self.seed,
            "method": self.method,
            "warnings": list(self.warnings),
        }
        if self.complex_value is not None:
            out["real"] = self.complex_value.real
            out["imag"] = self.complex_value.imag
        return out


def _chunked_mean(
    draw: Callable[[np.random.Generator, int], np.ndarray],
    samples: int,
    seed: int,
    chunk_size: int = DEFAULT_CHUNK,
    threads: int | None = None,
) -> tuple[complex, float]:
    """Mean and standard error of ``draw`` over ``samples`` draws."""
    if samples < 2:
        raise ValueError("need at least two samples")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    nchunks = -(-samples // chunk_size)

    def run(c: int):
        size = min(chunk_size, samples - c * chunk_size)
        w = draw(np.random.default_rng([seed, c]), size)
        mu = w.mean()
        return size, mu, float(np.sum(np.abs(w - mu) ** 2))

    threads = threads or default_threads()
    if threads == 1 or nchunks == 1:
        parts = [run(c) for c in range(nchunks)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, range(nchunks)))

    count, mean, m2 = parts[0]
    for size, mu, q in parts[1:]:
        total = count + size
        d = mu - mean
        mean = mean + d * size / total
        m2 = m2 + q + abs(d) ** 2 * count * size / total
        count = total
    return mean, math.sqrt(m2 / (count - 1) / count)


def form_integrand(F: FormInstance, x: np.ndarray) -> np.ndarray:
    """``prod_j a_j(f_j . x)`` at points ``x`` of shape ``(N, k, ell)``."""
    y = np.einsum("ji,nil->njl", F.matrix(), np.asarray(x, dtype=float))
    out = np.ones(y.shape[0], dtype=complex if any(f.is_kernel for f in F.functions) else float)
    for j, f in enumerate(F.functions):
        out = out * f(y[:, j, :])
    return out


def _gaussian_fit(F: FormInstance) -> tuple[np.ndarray, np.ndarray]:
    """Precision matrix ``A`` and mean of the Gaussian matched to the integrand."""
    Fm = F.matrix()
    inv_w2 = np.array([1.0 / f.effective_width**2 for f in F.functions])
    A = (Fm * inv_w2[:, None]).T @ Fm
    try:
        np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        raise DomainError("the vectors do not span R^k, so the form diverges") from None
    centers = np.array([f.center for f in F.functions])
    mean = np.linalg.solve(A, (Fm * inv_w2[:, None]).T @ centers)
    return A, mean


def _reject_kernels(F: FormInstance) -> None:
    if any(f.is_kernel for f in F.functions):
        raise DomainError("Cauchy kernels make the form singular; use eval_lambda_n")


def eval_general_form(
    F: FormInstance,
    samples: int,
    seed: int,
    threads: int | None = None,
    chunk_size: int = DEFAULT_CHUNK,
) -> EstimateResult:
    """Importance-sampled estimate of the general form.

    The proposal is a Gaussian on ``R^(k*ell)`` whose precision matches the
    product of the test functions (disks stand in as Gaussians of width
    ``1.5 * radius``), widened by a factor ``INFLATE`` in variance so the
    weights stay bounded.
    """
    _reject_kernels(F)
    A, mean = _gaussian_fit(F)
    k, ell = F.k, F.ell
    cov = np.linalg.inv(A) * INFLATE / (2 * math.pi)
    L = np.linalg.cholesky(cov)
    log_norm = -0.5 * ell * k * math.log(2 * math.pi) - ell * float(np.sum(np.log(np.diag(L))))

    def draw(rng, size):
        z = rng.standard_normal((size, k, ell))
        x = mean[None, :, :] + np.einsum("ij,njl->nil", L, z)
        log_q = log_norm - 0.5 * np.sum(z**2, axis=(1, 2))
        return form_integrand(F, x) * np.exp(-log_q)

    mu, se = _chunked_mean(draw, samples, seed, chunk_size, threads)
    return EstimateResult(float(mu), se, samples, seed, "monte-carlo")


def gaussian_form_closed_form(F: FormInstance) -> EstimateResult:
    """Exact value when every function is a centred Gaussian: ``prod amp * det(A)^(-ell/2)``."""
    if any(f.kind != "gaussian" or any(f.center) for f in F.functions):
        raise DomainError("closed form needs centred Gaussians only")
    A, _ = _gaussian_fit(F)
    amp = math.prod(f.amplitude for f in F.functions)
    return EstimateResult(amp * np.linalg.det(A) ** (-F.ell / 2), 0.0, 0, 0, "closed-form")


def tensor_quadrature_form(F: FormInstance, order: int = 40) -> EstimateResult:
    """Gauss-Hermite tensor rule in the coordinates of the matched Gaussian.

    Only for ``ell = 1`` and ``k <= 3``.  Exact up to rounding for Gaussian
    integrands; disks make it a rough cross-check at best.
    """
    _reject_kernels(F)
    if F.ell != 1 or F.k > 3:
        raise DomainError("tensor quadrature is limited to ell = 1 and k <= 3")
    A, mean = _gaussian_fit(F)
    k = F.k
    L = np.linalg.cholesky(np.linalg.inv(A) / (2 * math.pi))
    t, w = np.polynomial.hermite.hermgauss(order)
    grids = np.meshgrid(*([t] * k), indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=1)
    weights = np.prod(np.stack(np.meshgrid(*([w] * k), indexing="ij"), axis=0).reshape(k, -1), axis=0)
    x = mean[None, :, 0] + math.sqrt(2.0) * nodes @ L.T
    vals = form_integrand(F, x[:, :, None]) * np.exp(np.sum(nodes**2, axis=1))
    jac = float(np.prod(np.diag(L))) * 2 ** (k / 2)
    return EstimateResult(float(jac * np.sum(weights * vals)), 0.0, len(weights), 0, "tensor-quadrature")


def _check_lambda_inputs(n: int, t: TestFunction, q_list: Sequence[TestFunction]) -> None:
    if n < 0:
        raise DomainError("n must be non-negative")
    if len(q_list) != 2 * n + 1:
        raise DimensionError(f"Lambda_{n} takes {2 * n + 1} functions q_0..q_{2 * n}, got {len(q_list)}")
    for f in (t, *q_list):
        if f.is_kernel or f.dim != 2:
            raise DomainError("t and q_j must be Gaussians or disks on C")


def eval_lambda_n(
    n: int,
    t: TestFunction,
    q_list: Sequence[TestFunction],
    samples: int,
    seed: int,
    radius: float | None = None,
    threads: int | None = None,
    chunk_size: int = DEFAULT_CHUNK,
) -> EstimateResult:
    """Estimate ``Lambda_n(t, q_0, ..., q_2n)``.

    Works in the difference variables ``y_0 = x_0``, ``y_j = x_(j-1) - x_j``
    (Jacobian 1).  ``y_0`` is drawn from a Gaussian shaped by ``q_0``; each
    kernel variable ``y_j`` is drawn with density ``1/(2 pi R |y|)`` on the
    disk ``|y| <= R`` (uniform radius, uniform angle), which cancels the
    modulus of its kernel factor and leaves only a phase in the weight.
    ``R`` defaults to six times the largest length scale of the inputs.
    """
    _check_lambda_inputs(n, t, q_list)
    funcs = (t, *q_list)
    R = float(radius) if radius is not None else 6.0 * max(f.scale for f in funcs)
    if R <= 0:
        raise ValueError("kernel radius must be positive")
    warnings = []
    need = 2.0 * max(f.support_radius for f in funcs)
    if n > 0 and R < need:
        warnings.append(
            f"kernel truncation radius {R:g} is below {need:g}, twice the largest support radius"
        )

    q0 = q_list[0]
    c0 = q0._c
    sigma = q0.effective_width * math.sqrt(INFLATE / (2 * math.pi))
    log_norm0 = -math.log(2 * math.pi * sigma**2)
    kernel_mass = 2 * math.pi * R

    def draw(rng, size):
        z = rng.standard_normal((size, 2))
        x = c0 + sigma * (z[:, 0] + 1j * z[:, 1])
        w = q0(x) * np.exp(0.5 * np.sum(z**2, axis=1) - log_norm0)
        w = w.astype(complex)
        alt = x.copy()
        for j in range(1, 2 * n + 1):
            r = R * (1.0 - rng.random(size))
            y = r * np.exp(2j * math.pi * rng.random(size))
            x = x - y
            phase = np.conj(y) / r if j == 1 else y / r
            w = w * q_list[j](x) * kernel_mass * phase
            alt = alt + (-1) ** j * x
        return w * t(alt)

    mu, se = _chunked_mean(draw, samples, seed, chunk_size, threads)
    return EstimateResult(abs(mu), se, samples, seed, "monte-carlo", complex(mu), tuple(warnings))


def lambda_n_form(n: int, t: TestFunction, q_list: Sequence[TestFunction]) -> FormInstance:
    """``Lambda_n`` written as a general form over the family vectors (``ell = 2``).

    ``q_j`` sits on ``e_(j+1)``, the kernels on ``e_j - e_(j+1)`` (the first
    unconjugated, the rest conjugated) and ``t`` on the alternating vector.
    """
    if n < 1:
        raise DomainError("the family form needs n >= 1")
    _check_lambda_inputs(n, t, q_list)
    funcs: list[TestFunction] = [None] * (4 * n + 2)
    for j in range(2 * n + 1):
        funcs[2 * j] = q_list[j]
    for j in range(1, 2 * n + 1):
        funcs[2 * j - 1] = cauchy_kernel() if j == 1 else conj_cauchy_kernel()
    funcs[4 * n + 1] = t
    return FormInstance(family_vectors(n), tuple(funcs), ell=2)


@dataclass(frozen=True)
class MainEstimateReport:
    n: int
    p_recip: Fraction
    estimate: EstimateResult
    norm_product: float
    ratio: float
    ratio_stderr: float
    per_step: float | None = None

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "p_recip": format_rational(self.p_recip),
            "estimate": self.estimate.to_json(),
            "norm_product": self.norm_product,
            "ratio": self.ratio,
            "ratio_stderr": self.ratio_stderr,
            "per_step": self.per_step,
        }


def verify_main_estimate(
    n: int,
    t: TestFunction,
    q_list: Sequence[TestFunction],
    p_recip,
    samples: int,
    seed: int,
    **kwargs,
) -> MainEstimateReport:
    """Ratio of ``|Lambda_n|`` to ``||t||_p ||q_0||_p' prod_(j>=1) ||q_j||_2``.

    Requires ``|p_recip - 1/2| < 1/10``.  ``per_step`` is ``ratio^(1/n)``,
    an empirical stand-in for the constant in the ``c^n`` bound.
    """
    p = to_rational(p_recip)
    if not abs(p - Fraction(1, 2)) < Fraction(1, 10):
        raise DomainError("need |p_recip - 1/2| < 1/10")
    est = eval_lambda_n(n, t, q_list, samples, seed, **kwargs)
    half = Fraction(1, 2)
    denom = lp_norm(t, p) * lp_norm(q_list[0], 1 - p)
    for q in q_list[1:]:
        denom *= lp_norm(q, half)
    if denom == 0:
        raise DomainError("a test function vanishes identically; the ratio is undefined")
    ratio = est.value / denom
    per_step = ratio ** (1.0 / n) if n > 0 and ratio > 0 else None
    return MainEstimateReport(n, p, est, denom, ratio, est.stderr / denom, per_step)
