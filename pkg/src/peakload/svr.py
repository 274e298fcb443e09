"""Epsilon-insensitive support vector regression solved in the dual by SMO."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

logger = logging.getLogger(__name__)

KERNELS = ("linear", "rbf", "poly", "sigmoid")
_TAU = 1e-12


@dataclass(frozen=True)
class Kernel:
    """Kernel function. ``gamma`` is the RBF width or the sigmoid/poly input scale."""

    name: str = "rbf"
    gamma: float = 1.0
    degree: int = 3
    coef0: float = 0.0

    def __post_init__(self):
        if self.name not in KERNELS:
            raise ValueError(f"unknown kernel {self.name!r}; expected one of {KERNELS}")
        if self.name == "rbf" and not self.gamma > 0:
            raise ValueError("rbf gamma must be positive")
        if self.name == "poly" and self.degree < 1:
            raise ValueError("polynomial degree must be >= 1")

    @classmethod
    def parse(cls, text: str) -> "Kernel":
        """``linear``, ``rbf:GAMMA``, ``poly:DEGREE[:COEF0[:GAMMA]]``, ``sigmoid:SCALE[:COEF0]``."""
        name, *args = str(text).strip().split(":")
        if name == "linear":
            return cls("linear")
        if name == "rbf":
            return cls("rbf", gamma=float(args[0]) if args else 1.0)
        if name == "poly":
            degree = int(args[0]) if args else 3
            coef0 = float(args[1]) if len(args) > 1 else 1.0
            gamma = float(args[2]) if len(args) > 2 else 1.0
            return cls("poly", gamma=gamma, degree=degree, coef0=coef0)
        if name == "sigmoid":
            return cls("sigmoid", gamma=float(args[0]) if args else 0.01,
                       coef0=float(args[1]) if len(args) > 1 else 0.0)
        raise ValueError(f"unknown kernel spec {text!r}")

    def __str__(self) -> str:
        if self.name == "linear":
            return "linear"
        if self.name == "rbf":
            return f"rbf:{self.gamma:g}"
        if self.name == "poly":
            return f"poly:{self.degree}:{self.coef0:g}:{self.gamma:g}"
        return f"sigmoid:{self.gamma:g}:{self.coef0:g}"

    def matrix(self, A, B) -> np.ndarray:
        A = np.atleast_2d(np.asarray(A, dtype=float))
        B = np.atleast_2d(np.asarray(B, dtype=float))
        if A.shape[1] != B.shape[1]:
            raise ValueError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
        if self.name == "rbf":
            sq = (np.sum(A * A, axis=1)[:, None] + np.sum(B * B, axis=1)[None, :]
                  - 2.0 * (A @ B.T))
            return np.exp(-self.gamma * np.maximum(sq, 0.0))
        dot = A @ B.T
        if self.name == "linear":
            return dot
        if self.name == "poly":
            return (self.gamma * dot + self.coef0) ** self.degree
        return np.tanh(self.gamma * dot + self.coef0)


def kernel_eval(kernel: Kernel, x, z) -> float:
    x = np.asarray(x, dtype=float).ravel()
    z = np.asarray(z, dtype=float).ravel()
    if x.size != z.size:
        raise ValueError(f"dimension mismatch: {x.size} vs {z.size}")
    if kernel.name == "rbf":
        diff = x - z
        return float(np.exp(-kernel.gamma * (diff @ diff)))
    dot = float(x @ z)
    if kernel.name == "linear":
        return dot
    if kernel.name == "poly":
        return float((kernel.gamma * dot + kernel.coef0) ** kernel.degree)
    return float(np.tanh(kernel.gamma * dot + kernel.coef0))


@dataclass(frozen=True)
class SvrConfig:
    C: float = 1.0
    epsilon: float = 0.1
    kernel: Kernel = field(default_factory=Kernel)
    tol: float = 1e-3
    max_passes: int = 200

    def __post_init__(self):
        if isinstance(self.kernel, str):
            object.__setattr__(self, "kernel", Kernel.parse(self.kernel))
        if not self.C > 0:
            raise ValueError("C must be positive")
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")


@dataclass(frozen=True)
class KktReport:
    violations: int
    max_violation: float
    converged: bool = True
    iterations: int = 0


@dataclass(frozen=True)
class SvrModel:
    support: np.ndarray
    coef: np.ndarray
    b: float
    kernel: Kernel
    dual_objective: float = float("nan")
    report: KktReport | None = None

    def decision(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.support.shape[0] == 0:
            return np.full(X.shape[0], self.b)
        if X.shape[1] != self.support.shape[1]:
            raise ValueError(f"input has {X.shape[1]} features, model expects "
                             f"{self.support.shape[1]}")
        return self.kernel.matrix(X, self.support) @ self.coef + self.b

    def to_dict(self) -> dict:
        return {"kernel": str(self.kernel), "b": self.b, "coef": self.coef.tolist(),
                "support": self.support.tolist(), "n_features": int(self.support.shape[1])}

    @classmethod
    def from_dict(cls, d) -> "SvrModel":
        support = np.asarray(d["support"], dtype=float).reshape(-1, d["n_features"])
        return cls(support, np.asarray(d["coef"], dtype=float), float(d["b"]),
                   Kernel.parse(d["kernel"]))


def predict(model: SvrModel, x):
    """Support-vector expansion sum_i coef_i K(x_i, x) + b; scalar for a single vector."""
    x = np.asarray(x, dtype=float)
    out = model.decision(x)
    return float(out[0]) if x.ndim == 1 else out


def dual_objective(coef: np.ndarray, K: np.ndarray, y: np.ndarray, epsilon: float) -> float:
    """-1/2 beta'K beta - eps sum|beta| + y'beta for beta = alpha - alpha*."""
    return float(-0.5 * coef @ K @ coef - epsilon * np.abs(coef).sum() + y @ coef)


def _smo(K: np.ndarray, y: np.ndarray, C: float, eps: float, tol: float, max_iter: int):
    """LIBSVM-style SMO on the 2n-variable form.

    Variables a = [alpha, alpha*] with labels s = [+1, -1]; minimises
    1/2 a'Qa + p'a with Q_ij = s_i s_j K, p = [eps - y, eps + y],
    subject to s'a = 0 and 0 <= a <= C.
    """
    n = y.size
    s = np.concatenate([np.ones(n), -np.ones(n)])
    idx = np.concatenate([np.arange(n), np.arange(n)])
    a = np.zeros(2 * n)
    G = np.concatenate([eps - y, eps + y])
    diagK = np.diag(K)
    it = 0
    converged = False
    while it < max_iter:
        up = ((s > 0) & (a < C)) | ((s < 0) & (a > 0))
        low = ((s < 0) & (a < C)) | ((s > 0) & (a > 0))
        score = -s * G
        if not up.any() or not low.any():
            converged = True
            break
        i = int(np.flatnonzero(up)[np.argmax(score[up])])
        j = int(np.flatnonzero(low)[np.argmin(score[low])])
        if score[i] - score[j] < tol:
            converged = True
            break
        it += 1
        Ki = K[idx[i]][idx]
        Kj = K[idx[j]][idx]
        Qi = s[i] * s * Ki
        Qj = s[j] * s * Kj
        ai_old, aj_old = a[i], a[j]
        if s[i] != s[j]:
            quad = diagK[idx[i]] + diagK[idx[j]] + 2.0 * Qi[j]
            quad = quad if quad > 0 else _TAU
            delta = (-G[i] - G[j]) / quad
            diff = ai_old - aj_old
            ai, aj = ai_old + delta, aj_old + delta
            if diff > 0:
                if aj < 0:
                    aj, ai = 0.0, diff
            elif ai < 0:
                ai, aj = 0.0, -diff
            if diff > 0:
                if ai > C:
                    ai, aj = C, C - diff
            elif aj > C:
                aj, ai = C, C + diff
        else:
            quad = diagK[idx[i]] + diagK[idx[j]] - 2.0 * Qi[j]
            quad = quad if quad > 0 else _TAU
            delta = (G[i] - G[j]) / quad
            total = ai_old + aj_old
            ai, aj = ai_old - delta, aj_old + delta
            if total > C:
                if ai > C:
                    ai, aj = C, total - C
            elif aj < 0:
                aj, ai = 0.0, total
            if total > C:
                if aj > C:
                    aj, ai = C, total - C
            elif ai < 0:
                ai, aj = 0.0, total
        a[i], a[j] = ai, aj
        G += Qi * (ai - ai_old) + Qj * (aj - aj_old)
    coef = a[:n] - a[n:]
    b = -_rho(a, s, G, C)
    return coef, b, converged, it


def _rho(a, s, G, C) -> float:
    """Offset from free variables, or the midpoint of the feasible interval if none are free."""
    yG = s * G
    at_upper = a >= C
    at_lower = a <= 0
    free = ~(at_upper | at_lower)
    if free.any():
        return float(yG[free].mean())
    ub, lb = np.inf, -np.inf
    upper_side = (at_upper & (s < 0)) | (at_lower & (s > 0))
    lower_side = (at_upper & (s > 0)) | (at_lower & (s < 0))
    if upper_side.any():
        ub = yG[upper_side].min()
    if lower_side.any():
        lb = yG[lower_side].max()
    if not np.isfinite(ub):
        return float(lb)
    if not np.isfinite(lb):
        return float(ub)
    return float((ub + lb) / 2.0)


def fit_svr(config: SvrConfig, inputs, targets) -> SvrModel:
    """Solve the epsilon-SVR dual with SMO and return the support-vector model.

    The working pair is the maximal KKT-violating pair; iteration stops when
    the violation gap drops below ``config.tol`` or after
    ``config.max_passes * n`` pair updates.
    """
    X = np.atleast_2d(np.asarray(inputs, dtype=float))
    y = np.asarray(targets, dtype=float).ravel()
    if X.shape[0] != y.size:
        raise ValueError(f"{X.shape[0]} inputs but {y.size} targets")
    if y.size < 2:
        raise ValueError("SVR needs at least two training points")
    K = config.kernel.matrix(X, X)
    coef, b, converged, iters = _smo(K, y, config.C, config.epsilon, config.tol,
                                     config.max_passes * y.size)
    coef = np.clip(coef, -config.C, config.C)
    obj = dual_objective(coef, K, y, config.epsilon)
    keep = coef != 0.0
    model = SvrModel(X[keep], coef[keep], float(b), config.kernel, obj)
    report = kkt_verify(model, config, X, y, coef_full=coef)
    report = KktReport(report.violations, report.max_violation, converged, iters)
    if not converged:
        logger.warning("SVR: SMO stopped after %d updates without meeting tol=%g",
                       iters, config.tol)
    return SvrModel(model.support, model.coef, model.b, model.kernel, obj, report)


def kkt_verify(model: SvrModel, config: SvrConfig, inputs, targets,
               coef_full: np.ndarray | None = None, tol: float | None = None) -> KktReport:
    """Check the epsilon-tube optimality conditions at every training point.

    ``coef_full`` gives the dual coefficient of each training point; when
    omitted it is recovered by matching training rows against the model's
    support vectors.
    """
    X = np.atleast_2d(np.asarray(inputs, dtype=float))
    y = np.asarray(targets, dtype=float).ravel()
    tol = config.tol if tol is None else tol
    C, eps = config.C, config.epsilon
    if coef_full is None:
        coef_full = _match_coefficients(model, X)
    resid = y - model.decision(X)
    excess = np.zeros(y.size)
    bound_tol = 1e-9 * max(C, 1.0)
    for t in range(y.size):
        c, r = coef_full[t], resid[t]
        if abs(c) <= bound_tol:
            excess[t] = max(0.0, abs(r) - eps)
        elif abs(c) >= C - bound_tol:
            excess[t] = max(0.0, eps - np.sign(c) * r)
        else:
            excess[t] = abs(np.sign(c) * r - eps)
    bad = excess > tol
    return KktReport(int(bad.sum()), float(excess.max(initial=0.0)))


def _match_coefficients(model: SvrModel, X: np.ndarray) -> np.ndarray:
    coef = np.zeros(X.shape[0])
    used = np.zeros(model.support.shape[0], dtype=bool)
    for t in range(X.shape[0]):
        hits = np.flatnonzero(~used & np.all(model.support == X[t], axis=1))
        if hits.size:
            coef[t] = model.coef[hits[0]]
            used[hits[0]] = True
    return coef
