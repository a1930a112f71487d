"""Soft-margin kernel SVM trained by sequential pairwise (SMO-style) updates."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

KERNEL_KINDS = ("linear", "polynomial", "radial")


@dataclass(frozen=True)
class KernelSpec:
    kind: str
    r: float = 0.0  # polynomial bias term
    d: int = 3  # polynomial degree
    gamma: float = 1.0  # radial width

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"kernel kind must be one of {KERNEL_KINDS}")
        if self.kind == "polynomial" and self.d < 1:
            raise ValueError("polynomial degree must be a positive integer")
        if self.kind == "radial" and self.gamma <= 0:
            raise ValueError("radial gamma must be > 0")


def kernel_eval(a, b, spec: KernelSpec) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"width mismatch: {a.shape} vs {b.shape}")
    if spec.kind == "linear":
        return float(a @ b)
    if spec.kind == "polynomial":
        return float((a @ b + spec.r) ** spec.d)
    diff = a - b
    return float(np.exp(-spec.gamma * (diff @ diff)))


def kernel_matrix(A, B, spec: KernelSpec) -> np.ndarray:
    """Pairwise kernel values between the rows of A and the rows of B."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"width mismatch: {A.shape[1]} vs {B.shape[1]} columns")
    if spec.kind == "linear":
        return A @ B.T
    if spec.kind == "polynomial":
        return (A @ B.T + spec.r) ** spec.d
    sq_a = np.sum(A * A, axis=1)[:, None]
    sq_b = np.sum(B * B, axis=1)[None, :]
    d2 = np.maximum(sq_a + sq_b - 2.0 * (A @ B.T), 0.0)
    return np.exp(-spec.gamma * d2)


@dataclass(frozen=True, eq=False)
class SvmModel:
    """Dual solution kept as support vectors with alpha_i * y_i coefficients."""

    support_vectors: np.ndarray
    dual_coefficients: np.ndarray
    bias: float
    kernel: KernelSpec
    C: float
    converged: bool = True
    n_passes: int = 0
    # logistic link (slope, offset) calibrated on training margins
    calibration: Optional[tuple] = None


def decision(model: SvmModel, x) -> float:
    """Signed margin for a single row."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.support_vectors.shape[1],):
        raise ValueError(
            f"model expects {model.support_vectors.shape[1]} features, got {x.shape}"
        )
    k = kernel_matrix(model.support_vectors, x[None, :], model.kernel)[:, 0]
    return float(model.dual_coefficients @ k + model.bias)


def decision_function(model: SvmModel, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.support_vectors.shape[1]:
        raise ValueError(
            f"model expects {model.support_vectors.shape[1]} features, got {X.shape[1]}"
        )
    # zero-coefficient rows are dropped so they cannot perturb the sums
    live = model.dual_coefficients != 0.0
    K = kernel_matrix(X, model.support_vectors[live], model.kernel)
    return K @ model.dual_coefficients[live] + model.bias


def predict(model: SvmModel, X) -> np.ndarray:
    """Class labels in {0, 1} from the sign of the margin."""
    return (decision_function(model, X) >= 0).astype(int)


def predict_proba(model: SvmModel, X) -> np.ndarray:
    """Margins pushed through the fitted logistic link (a calibration step)."""
    if model.calibration is None:
        raise ValueError("model has no margin calibration; fit with calibrate=True")
    slope, offset = model.calibration
    z = slope * decision_function(model, X) + offset
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


_CACHE_LIMIT = 4_000  # full kernel matrix above this row count would thrash memory


class _KernelCache:
    def __init__(self, X, spec):
        self.X = X
        self.spec = spec
        self.n = X.shape[0]
        if self.n <= _CACHE_LIMIT:
            self.full = kernel_matrix(X, X, spec)
            self.rows = None
        else:
            self.full = None
            self.rows = {}

    def row(self, i):
        if self.full is not None:
            return self.full[i]
        if i not in self.rows:
            self.rows[i] = kernel_matrix(self.X[i][None, :], self.X, self.spec)[0]
        return self.rows[i]


def fit_svm(
    ds,
    spec: KernelSpec,
    C: float = 1.0,
    class_weights=None,
    tol: float = 1e-3,
    max_passes: int = 200,
    calibrate: bool = True,
) -> SvmModel:
    """Solve the soft-margin dual with per-class box constraints C_i.

    Pair selection: the maximal KKT violator is paired with the point of
    largest |E_i - E_j|, falling back to a full scan when that pair makes no
    progress. Stops when the largest KKT violation drops below tol; hitting
    max_passes returns converged=False instead of raising.
    """
    X = ds.features
    labels = ds.labels
    n = X.shape[0]
    if len(np.unique(labels)) < 2:
        raise ValueError("both classes must be present")
    if C <= 0:
        raise ValueError("C must be > 0")
    y = np.where(labels == 1, 1.0, -1.0)
    if class_weights is None:
        c_box = np.full(n, C)
    else:
        c_box = np.where(y > 0, C * class_weights.positive, C * class_weights.negative)

    cache = _KernelCache(X, spec)
    kdiag = np.array([cache.row(i)[i] for i in range(n)])
    alpha = np.zeros(n)
    bias = 0.0
    # f_i = sum_j alpha_j y_j K(j, i) + bias; E_i = f_i - y_i
    f = np.full(n, bias)

    def violations():
        e = f - y
        r = e * y
        lower = (r > tol) & (alpha > 0)
        upper = (r < -tol) & (alpha < c_box)
        v = np.zeros(n)
        v[lower] = r[lower]
        v[upper] = -r[upper]
        return v

    def try_pair(i, j):
        nonlocal bias
        if i == j:
            return False
        ai_old, aj_old = alpha[i], alpha[j]
        e = f - y
        if y[i] != y[j]:
            low = max(0.0, aj_old - ai_old)
            high = min(c_box[j], c_box[i] + aj_old - ai_old)
        else:
            low = max(0.0, ai_old + aj_old - c_box[i])
            high = min(c_box[j], ai_old + aj_old)
        if low >= high:
            return False
        ki = cache.row(i)
        kj = cache.row(j)
        eta = ki[i] + kj[j] - 2.0 * ki[j]
        if eta <= 1e-12:
            return False
        aj_new = aj_old + y[j] * (e[i] - e[j]) / eta
        aj_new = min(max(aj_new, low), high)
        if abs(aj_new - aj_old) < 1e-12 * (aj_new + aj_old + 1e-12):
            return False
        ai_new = ai_old + y[i] * y[j] * (aj_old - aj_new)
        alpha[i], alpha[j] = ai_new, aj_new

        b1 = bias - e[i] - y[i] * (ai_new - ai_old) * ki[i] - y[j] * (aj_new - aj_old) * ki[j]
        b2 = bias - e[j] - y[i] * (ai_new - ai_old) * ki[j] - y[j] * (aj_new - aj_old) * kj[j]
        if 0 < ai_new < c_box[i]:
            new_bias = b1
        elif 0 < aj_new < c_box[j]:
            new_bias = b2
        else:
            new_bias = 0.5 * (b1 + b2)
        f[:] += (
            y[i] * (ai_new - ai_old) * ki
            + y[j] * (aj_new - aj_old) * kj
            + (new_bias - bias)
        )
        bias = new_bias
        return True

    def current_violation(i):
        r = (f[i] - y[i]) * y[i]
        if r > tol and alpha[i] > 0:
            return r
        if r < -tol and alpha[i] < c_box[i]:
            return -r
        return 0.0

    def optimize_one(i):
        e_abs = np.abs((f - y) - (f[i] - y[i]))
        for j in np.argsort(-e_abs, kind="mergesort"):  # widest |E_i - E_j| first
            if try_pair(i, int(j)):
                return True
        return False

    converged = False
    passes = 0
    for passes in range(1, max_passes + 1):
        v = violations()
        if float(np.max(v)) < tol:
            converged = True
            break
        num_changed = 0
        for i in np.argsort(-v, kind="mergesort"):
            i = int(i)
            if current_violation(i) == 0.0:
                continue
            if optimize_one(i):
                num_changed += 1
        if num_changed == 0:
            break  # numerically stuck; convergence re-checked below

    if not converged:
        converged = bool(np.max(violations()) < tol)

    keep = alpha > 1e-12
    model = SvmModel(
        support_vectors=X[keep].copy(),
        dual_coefficients=(alpha * y)[keep],
        bias=float(bias),
        kernel=spec,
        C=float(C),
        converged=converged,
        n_passes=passes,
    )
    if calibrate:
        model = _calibrate(model, ds)
    return model


def dual_objective(model: SvmModel) -> float:
    """Soft-margin dual value sum(alpha) - 0.5 * sum alpha_i alpha_j y_i y_j K_ij.

    Dropped zero-alpha rows contribute nothing, so support vectors suffice.
    """
    coef = model.dual_coefficients
    alpha_sum = float(np.sum(np.abs(coef)))
    K = kernel_matrix(model.support_vectors, model.support_vectors, model.kernel)
    return alpha_sum - 0.5 * float(coef @ K @ coef)


def _calibrate(model: SvmModel, ds) -> SvmModel:
    """Fit a 1-D logistic link from training margins to labels."""
    from .dataio import Dataset
    from .linear import fit_linear

    margins = decision_function(model, ds.features)
    if len(np.unique(ds.labels)) < 2:
        link = (1.0, 0.0)
    else:
        cal_ds = Dataset(
            column_names=("margin",),
            features=margins[:, None],
            labels=ds.labels,
            weights=ds.weights,
        )
        cal = fit_linear(cal_ds, penalty="ridge", lambda1=1e-6, max_iter=2_000, tol=1e-8)
        link = (float(cal.coefficients[0]), float(cal.intercept))
    return SvmModel(
        support_vectors=model.support_vectors,
        dual_coefficients=model.dual_coefficients,
        bias=model.bias,
        kernel=model.kernel,
        C=model.C,
        converged=model.converged,
        n_passes=model.n_passes,
        calibration=link,
    )
