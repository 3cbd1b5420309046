"""Linear regression with ARMA errors and the augmented Dickey-Fuller test.

The regression model is y = X b + u with u following a stationary,
invertible ARMA(p, q).  Estimation is exact Gaussian maximum likelihood via
the Harvey state-space form: the Kalman filter turns each series into
innovations, the regression coefficients are concentrated out by weighted
least squares on the filtered series (exact GLS given the ARMA
parameters), the innovation variance is concentrated analytically, and a
quasi-Newton search runs over unconstrained transforms of the ARMA
parameters only.  Stationarity/invertibility are enforced by mapping
unconstrained reals through tanh to partial autocorrelations and
Durbin-Levinson to coefficients.

Standard errors come in two flavors: sandwich (outer product of
per-observation scores, "semirobust") and inverse observed information,
both by finite differences at the optimum.

The unit-root test is the standard ADF t-regression with MacKinnon (2010)
response-surface critical values, plus an optional GLS-detrending variant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
import numpy as np
from scipy import linalg, optimize, signal

from .errors import (
    DegenerateVariance,
    NonStationaryParams,
    SeriesTooShort,
    SingularDesign,
)

_STATIONARITY_MARGIN = 1e-7


# --------------------------------------------------------------------------
# stationarity-preserving parameter transform
# --------------------------------------------------------------------------

def pacf_to_coeffs(pacf: np.ndarray) -> np.ndarray:
    """Durbin-Levinson: partial autocorrelations -> stationary AR coefficients."""
    coeffs = np.zeros(0)
    for r in pacf:
        coeffs = np.append(coeffs - r * coeffs[::-1], r)
    return coeffs


def coeffs_to_pacf(coeffs: np.ndarray) -> np.ndarray:
    """Inverse Durbin-Levinson; raises NonStationaryParams off the region."""
    work = np.asarray(coeffs, dtype=np.float64).copy()
    pacf = np.zeros(len(work))
    for k in range(len(work), 0, -1):
        r = work[k - 1]
        if abs(r) >= 1.0:
            raise NonStationaryParams("coefficients outside the stationary region")
        pacf[k - 1] = r
        if k > 1:
            head = work[: k - 1]
            work = (head + r * head[::-1]) / (1.0 - r * r)
    return pacf


def unconstrained_to_coeffs(z: np.ndarray) -> np.ndarray:
    return pacf_to_coeffs(np.tanh(np.asarray(z, dtype=np.float64)))


def coeffs_to_unconstrained(coeffs: np.ndarray) -> np.ndarray:
    return np.arctanh(np.clip(coeffs_to_pacf(coeffs), -1 + 1e-12, 1 - 1e-12))


def is_stationary(phi: np.ndarray) -> bool:
    """AR polynomial 1 - phi_1 z - ... has all roots outside the unit circle."""
    phi = np.asarray(phi, dtype=np.float64)
    if len(phi) == 0:
        return True
    roots = np.roots(np.r_[1.0, -phi])
    return bool(np.all(np.abs(roots) < 1.0 - _STATIONARITY_MARGIN)) if len(roots) else True


def is_invertible(theta: np.ndarray) -> bool:
    """MA polynomial 1 + theta_1 z + ... has all roots outside the unit circle."""
    theta = np.asarray(theta, dtype=np.float64)
    if len(theta) == 0:
        return True
    roots = np.roots(np.r_[1.0, theta])
    return bool(np.all(np.abs(roots) < 1.0 - _STATIONARITY_MARGIN)) if len(roots) else True


# --------------------------------------------------------------------------
# state space and exact likelihood
# --------------------------------------------------------------------------

def _state_matrices(phi: np.ndarray, theta: np.ndarray):
    p, q = len(phi), len(theta)
    r = max(p, q + 1)
    T = np.zeros((r, r))
    T[:p, 0] = phi
    for i in range(r - 1):
        T[i, i + 1] = 1.0
    R = np.zeros(r)
    R[0] = 1.0
    R[1 : q + 1] = theta
    return T, R


def _stationary_cov(T: np.ndarray, R: np.ndarray) -> np.ndarray:
    return linalg.solve_discrete_lyapunov(T, np.outer(R, R))


def _css_innovations(U: np.ndarray, phi: np.ndarray, theta: np.ndarray):
    """Conditional (zero-initialized) innovations of each column of U.

    The recursion e_t = u_t - sum phi_i u_{t-i} - sum theta_j e_{t-j} with
    zero pre-sample values; unit variance profile.
    """
    n, m = U.shape
    p, q = len(phi), len(theta)
    V = np.zeros((n, m))
    for t in range(n):
        acc = U[t].copy()
        for i in range(min(p, t)):
            acc -= phi[i] * U[t - 1 - i]
        for j in range(min(q, t)):
            acc -= theta[j] * V[t - 1 - j]
        V[t] = acc
    return V, np.ones(n)


def _filter_columns(U: np.ndarray, phi: np.ndarray, theta: np.ndarray, method: str = "exact"):
    """Innovations of each column of U under unit-variance ARMA errors.

    `method='exact'` runs the Kalman filter from the stationary
    distribution; `method='css'` uses the conditional zero-start recursion.
    Returns (V, F): innovation columns and their common variance profile.
    """
    if not is_stationary(phi):
        raise NonStationaryParams("AR parameters are not stationary")
    if not is_invertible(theta):
        raise NonStationaryParams("MA parameters are not invertible")
    U = np.atleast_2d(np.asarray(U, dtype=np.float64))
    if U.shape[0] < U.shape[1] and U.ndim == 2 and U.shape[0] == 1:
        U = U.T
    if method == "css":
        return _css_innovations(U, phi, theta)
    n, m = U.shape
    T, R = _state_matrices(phi, theta)
    RRt = np.outer(R, R)
    P = _stationary_cov(T, R)
    a = np.zeros((T.shape[0], m))
    V = np.empty((n, m))
    F = np.empty(n)
    for t in range(n):
        v = U[t] - a[0]
        f = P[0, 0]
        if not f > 0:
            raise NonStationaryParams("non-positive innovation variance")
        K = T @ P[:, 0] / f
        a = T @ a + np.outer(K, v)
        P = T @ P @ T.T + RRt - np.outer(K, K) * f
        P = 0.5 * (P + P.T)
        V[t] = v
        F[t] = f
    return V, F


@dataclass
class RegressionSpec:
    """Response, regressor matrix (include the intercept column), ARMA orders."""

    y: np.ndarray
    X: np.ndarray
    p: int = 0
    q: int = 0

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=np.float64).ravel()
        self.X = np.atleast_2d(np.asarray(self.X, dtype=np.float64))
        if self.X.shape[0] != self.y.shape[0]:
            raise ValueError("y and X must have equal length")
        if not (np.all(np.isfinite(self.y)) and np.all(np.isfinite(self.X))):
            raise ValueError("missing or non-finite values in y or X")
        if self.p < 0 or self.q < 0:
            raise ValueError("orders must be non-negative")
        if self.p + self.q + self.X.shape[1] >= self.y.shape[0]:
            raise SeriesTooShort(
                f"{self.y.shape[0]} observations cannot identify "
                f"{self.X.shape[1]} coefficients plus ARMA({self.p},{self.q})"
            )


def kalman_loglik(
    beta: np.ndarray,
    phi: np.ndarray,
    theta: np.ndarray,
    sigma2: float,
    spec: RegressionSpec,
) -> float:
    """Exact Gaussian log-likelihood of y - X beta under ARMA(p, q) errors."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    u = spec.y - spec.X @ np.asarray(beta, dtype=np.float64)
    V, F = _filter_columns(u[:, None], phi, theta)
    v = V[:, 0]
    return float(-0.5 * np.sum(np.log(2.0 * math.pi * sigma2 * F) + v * v / (sigma2 * F)))


def _gls_profile(spec: RegressionSpec, phi: np.ndarray, theta: np.ndarray, method: str = "exact"):
    """Concentrate beta (exact GLS) and sigma2 out of the likelihood.

    Returns (loglik, beta, sigma2, V_resid, F).
    """
    n = spec.y.shape[0]
    U = np.column_stack([spec.y, spec.X])
    V, F = _filter_columns(U, phi, theta, method)
    vy = V[:, 0]
    VX = V[:, 1:]
    w = 1.0 / np.sqrt(F)
    A = VX * w[:, None]
    b = vy * w
    if np.linalg.matrix_rank(A, tol=1e-10 * max(1.0, float(np.abs(A).max()))) < A.shape[1]:
        raise SingularDesign("regressor matrix is rank deficient after filtering")
    beta, *_ = np.linalg.lstsq(A, b, rcond=None)
    resid = vy - VX @ beta
    sigma2 = float(np.sum(resid * resid / F) / n)
    if sigma2 <= 0.0:
        loglik = math.inf
    else:
        loglik = -0.5 * n * (math.log(2.0 * math.pi) + 1.0 + math.log(sigma2)) - 0.5 * float(
            np.sum(np.log(F))
        )
    return loglik, beta, sigma2, resid, F


@dataclass
class RegressionFit:
    """Maximum-likelihood estimates for a regression with ARMA errors."""

    beta: np.ndarray
    phi: np.ndarray
    theta: np.ndarray
    sigma2: float
    se: np.ndarray                 # semirobust (sandwich/OPG) SEs of beta
    se_hessian: np.ndarray         # inverse-information SEs of beta
    se_arma: np.ndarray            # sandwich SEs of (phi, theta)
    loglik: float
    converged: bool
    n_obs: int
    p: int
    q: int
    warnings: list[str] = field(default_factory=list)

    @property
    def tvalues(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.se > 0, self.beta / self.se, np.nan)


def _hannan_rissanen(resid: np.ndarray, p: int, q: int):
    """Long-AR innovations regression for ARMA starting values."""
    n = len(resid)
    if p + q == 0:
        return np.zeros(0), np.zeros(0)
    long_order = min(max(p + q, 4, int(round(math.sqrt(n)))), max(n // 3, 1))
    phi0 = np.zeros(p)
    theta0 = np.zeros(q)
    try:
        lagged = np.column_stack([resid[long_order - j - 1 : n - j - 1] for j in range(long_order)])
        target = resid[long_order:]
        coef, *_ = np.linalg.lstsq(lagged, target, rcond=None)
        innov = np.r_[np.zeros(long_order), target - lagged @ coef]
        start = max(p, q)
        cols = [resid[start - j - 1 : n - j - 1] for j in range(p)]
        cols += [innov[start - j - 1 : n - j - 1] for j in range(q)]
        if cols:
            M = np.column_stack(cols)
            ab, *_ = np.linalg.lstsq(M, resid[start:], rcond=None)
            phi0 = ab[:p]
            theta0 = ab[p:]
    except np.linalg.LinAlgError:
        pass
    # shrink toward zero until admissible
    for _ in range(40):
        if is_stationary(phi0) and is_invertible(theta0):
            break
        phi0 *= 0.9
        theta0 *= 0.9
    else:
        phi0 = np.zeros(p)
        theta0 = np.zeros(q)
    return phi0, theta0


def _pack(spec: RegressionSpec, beta, phi, theta, log_sigma2) -> np.ndarray:
    return np.concatenate([beta, phi, theta, [log_sigma2]])


def _obs_loglik(params: np.ndarray, spec: RegressionSpec, method: str = "exact") -> np.ndarray:
    """Per-observation log-likelihood contributions at explicit parameters."""
    k = spec.X.shape[1]
    beta = params[:k]
    phi = params[k : k + spec.p]
    theta = params[k + spec.p : k + spec.p + spec.q]
    sigma2 = math.exp(params[-1])
    u = spec.y - spec.X @ beta
    V, F = _filter_columns(u[:, None], phi, theta, method)
    v = V[:, 0]
    return -0.5 * (np.log(2.0 * math.pi * sigma2 * F) + v * v / (sigma2 * F))


def _fd_step(params: np.ndarray, i: int, base: float, spec: RegressionSpec) -> float:
    """Step size for coordinate i, shrunk while the perturbation is inadmissible."""
    h = base * max(1.0, abs(params[i]))
    for _ in range(30):
        ok = True
        for sign in (1.0, -1.0):
            trial = params.copy()
            trial[i] += sign * h
            k = spec.X.shape[1]
            phi = trial[k : k + spec.p]
            theta = trial[k + spec.p : k + spec.p + spec.q]
            if not (is_stationary(phi) and is_invertible(theta)):
                ok = False
                break
        if ok:
            return h
        h *= 0.5
    return h


def _fd_scores(params: np.ndarray, spec: RegressionSpec, base: float = 1e-5, method: str = "exact") -> np.ndarray:
    """Central-difference per-observation score matrix (n, d)."""
    d = len(params)
    n = spec.y.shape[0]
    g = np.zeros((n, d))
    for i in range(d):
        h = _fd_step(params, i, base, spec)
        up = params.copy()
        up[i] += h
        dn = params.copy()
        dn[i] -= h
        g[:, i] = (_obs_loglik(up, spec, method) - _obs_loglik(dn, spec, method)) / (2.0 * h)
    return g


def _fd_hessian(params: np.ndarray, spec: RegressionSpec, base: float = 1e-4, method: str = "exact") -> np.ndarray:
    """Central-difference Hessian of the total log-likelihood."""
    d = len(params)
    steps = [_fd_step(params, i, base, spec) for i in range(d)]

    def f(ps):
        return float(np.sum(_obs_loglik(ps, spec, method)))

    f0 = f(params)
    H = np.zeros((d, d))
    for i in range(d):
        hi = steps[i]
        up = params.copy()
        up[i] += hi
        dn = params.copy()
        dn[i] -= hi
        H[i, i] = (f(up) - 2.0 * f0 + f(dn)) / (hi * hi)
        for j in range(i + 1, d):
            hj = steps[j]
            pp = params.copy()
            pp[[i, j]] += [hi, hj]
            pm = params.copy()
            pm[[i, j]] += [hi, -hj]
            mp = params.copy()
            mp[[i, j]] += [-hi, hj]
            mm = params.copy()
            mm[[i, j]] += [-hi, -hj]
            H[i, j] = H[j, i] = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * hi * hj)
    return H


def fit_arma_regression(spec: RegressionSpec, maxiter: int = 200, method: str = "exact") -> RegressionFit:
    """Fit of y = X b + ARMA(p, q) errors by maximum likelihood.

    `method='exact'` maximizes the exact likelihood (Kalman, stationary
    start); `method='css'` the conditional sum of squares.  Optimization
    runs over unconstrained transforms of (phi, theta) with beta and sigma2
    concentrated out; starting values are OLS residuals fed through a
    Hannan-Rissanen innovations regression.  Returns the fit with
    `converged=False` (never raises) when the search hits its iteration
    limit.
    """
    if method not in ("exact", "css"):
        raise ValueError("method must be 'exact' or 'css'")
    n = spec.y.shape[0]
    k = spec.X.shape[1]
    warnings: list[str] = []
    if np.linalg.matrix_rank(spec.X) < k:
        raise SingularDesign("regressor matrix is rank deficient")
    if n - (k + spec.p + spec.q) < 10:
        warnings.append("small_sample: fewer than 10 residual degrees of freedom")

    converged = True
    if spec.p + spec.q == 0:
        loglik, beta, sigma2, _, _ = _gls_profile(spec, np.zeros(0), np.zeros(0), method)
        phi = np.zeros(0)
        theta = np.zeros(0)
    else:
        beta0, *_ = np.linalg.lstsq(spec.X, spec.y, rcond=None)
        phi0, theta0 = _hannan_rissanen(spec.y - spec.X @ beta0, spec.p, spec.q)
        z0 = np.concatenate(
            [
                coeffs_to_unconstrained(phi0) if spec.p else np.zeros(0),
                coeffs_to_unconstrained(-theta0) if spec.q else np.zeros(0),
            ]
        )

        def unpack(z):
            phi = unconstrained_to_coeffs(z[: spec.p]) if spec.p else np.zeros(0)
            theta = -unconstrained_to_coeffs(z[spec.p :]) if spec.q else np.zeros(0)
            return phi, theta

        def objective(z):
            phi, theta = unpack(z)
            try:
                loglik = _gls_profile(spec, phi, theta, method)[0]
            except (NonStationaryParams, SingularDesign):
                return 1e12
            if not math.isfinite(loglik):
                return 1e12
            return -loglik

        start_obj = objective(z0)
        if start_obj >= 1e12:
            z0 = np.zeros_like(z0)
        result = optimize.minimize(
            objective, z0, method="BFGS", options={"maxiter": maxiter, "gtol": 1e-8}
        )
        # BFGS can stop on precision loss at a perfectly usable optimum;
        # only flag non-convergence when the iteration budget ran out.
        converged = bool(result.success or result.status == 2)
        phi, theta = unpack(result.x)
        loglik, beta, sigma2, _, _ = _gls_profile(spec, phi, theta, method)

    se = np.full(k, np.nan)
    se_hessian = np.full(k, np.nan)
    se_arma = np.full(spec.p + spec.q, np.nan)
    if sigma2 <= 1e-15 * max(1.0, float(np.mean(spec.y**2))):
        warnings.append("DegenerateVariance: residual variance is numerically zero")
        sigma2 = max(sigma2, 0.0)
        loglik = math.inf
        se = np.zeros(k)
        se_hessian = np.zeros(k)
        se_arma = np.zeros(spec.p + spec.q)
    else:
        params = _pack(spec, beta, phi, theta, math.log(sigma2))
        try:
            scores = _fd_scores(params, spec, method=method)
            opg = scores.T @ scores
            hess = _fd_hessian(params, spec, method=method)
            info = -hess
            info_inv = np.linalg.pinv(info)
            cov_sandwich = info_inv @ opg @ info_inv
            cov_hessian = info_inv
            d_beta = np.arange(k)
            d_arma = np.arange(k, k + spec.p + spec.q)
            se = np.sqrt(np.maximum(np.diag(cov_sandwich)[d_beta], 0.0))
            se_hessian = np.sqrt(np.maximum(np.diag(cov_hessian)[d_beta], 0.0))
            se_arma = np.sqrt(np.maximum(np.diag(cov_sandwich)[d_arma], 0.0))
        except (np.linalg.LinAlgError, NonStationaryParams) as exc:
            warnings.append(f"se_failed: {exc}")

    return RegressionFit(
        beta=np.asarray(beta),
        phi=phi,
        theta=theta,
        sigma2=sigma2,
        se=se,
        se_hessian=se_hessian,
        se_arma=se_arma,
        loglik=loglik,
        converged=converged,
        n_obs=n,
        p=spec.p,
        q=spec.q,
        warnings=warnings,
    )


def simulate_arma(
    beta: np.ndarray,
    phi: np.ndarray,
    theta: np.ndarray,
    sigma2: float,
    X: np.ndarray,
    n: int,
    seed: int = 0,
) -> np.ndarray:
    """Simulate y = X b + ARMA(p, q) errors; burn-in of 10 (p+q+1) discarded."""
    phi = np.asarray(phi, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    if not is_stationary(phi):
        raise NonStationaryParams("AR parameters are not stationary")
    if not is_invertible(theta):
        raise NonStationaryParams("MA parameters are not invertible")
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[0] != n:
        raise ValueError("X must have n rows")
    burn = 10 * (len(phi) + len(theta) + 1)
    rng = np.random.default_rng(seed)
    eps = rng.normal(0.0, math.sqrt(sigma2), size=n + burn) if sigma2 > 0 else np.zeros(n + burn)
    u = signal.lfilter(np.r_[1.0, theta], np.r_[1.0, -phi], eps)
    return X @ np.asarray(beta, dtype=np.float64) + u[burn:]


# --------------------------------------------------------------------------
# augmented Dickey-Fuller
# --------------------------------------------------------------------------

# MacKinnon (2010) response-surface coefficients, one-variable case:
# cv = b0 + b1/T + b2/T^2 + b3/T^3 at levels 1%, 5%, 10%.
_MACKINNON_TAU = {
    "none": (
        (-2.56574, -2.2358, -3.627, 0.0),
        (-1.94100, -0.2686, -3.365, 31.223),
        (-1.61682, 0.2656, -2.714, 25.364),
    ),
    "constant": (
        (-3.43035, -6.5393, -16.786, -79.433),
        (-2.86154, -2.8903, -4.234, -40.040),
        (-2.56677, -1.5384, -2.809, 0.0),
    ),
    "trend": (
        (-3.95877, -9.0531, -28.428, -134.155),
        (-3.41049, -4.3904, -9.036, -45.374),
        (-3.12705, -2.5856, -3.925, -22.380),
    ),
}
# Elliott-Rothenberg-Stock (1996) asymptotic values for the GLS-detrended
# trend case; the demeaned case follows the no-deterministics tau law.
_ERS_TREND = (-3.48, -2.89, -2.57)
_LEVELS = (0.01, 0.05, 0.10)


@dataclass
class AdfResult:
    statistic: float
    lags: int
    trend: str
    nobs: int
    critical_values: dict[float, float]
    reject: dict[float, bool]
    gls: bool = False


def _ols(X: np.ndarray, y: np.ndarray):
    coef, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < X.shape[1]:
        raise SingularDesign("collinear ADF regression")
    resid = y - X @ coef
    dof = len(y) - X.shape[1]
    if dof <= 0:
        raise SeriesTooShort("no residual degrees of freedom")
    s2 = resid @ resid / dof
    cov = s2 * np.linalg.inv(X.T @ X)
    return coef, np.sqrt(np.diag(cov))


def adf_test(series: np.ndarray, lags: int = 0, trend: str = "constant", gls: bool = False) -> AdfResult:
    """ADF regression Dy_t = deterministics + rho y_{t-1} + sum g_i Dy_{t-i} + e.

    The statistic is the t-ratio of rho, compared against MacKinnon
    response-surface critical values at 1/5/10%.  `gls=True` applies
    Elliott-Rothenberg-Stock quasi-difference detrending first and runs the
    regression without deterministic terms.
    """
    if trend not in ("none", "constant", "trend"):
        raise ValueError("trend must be 'none', 'constant', or 'trend'")
    y = np.asarray(series, dtype=np.float64).ravel()
    n = len(y)
    if lags < 0:
        raise ValueError("lags must be non-negative")
    if n <= lags + 3:
        raise SeriesTooShort(f"{n} observations with {lags} lags")
    if np.ptp(y) == 0.0:
        raise DegenerateVariance("series is constant")

    table_key = trend
    if gls:
        cbar = -7.0 if trend != "trend" else -13.5
        a = 1.0 + cbar / n
        if trend == "trend":
            Z = np.column_stack([np.ones(n), np.arange(1.0, n + 1)])
        else:
            Z = np.ones((n, 1))
        yq = np.r_[y[0], y[1:] - a * y[:-1]]
        Zq = np.r_[Z[:1], Z[1:] - a * Z[:-1]]
        delta, *_ = np.linalg.lstsq(Zq, yq, rcond=None)
        y = y - Z @ delta
        table_key = "none"

    dy = np.diff(y)
    rows = n - 1 - lags
    cols = [y[lags:-1]]
    for i in range(1, lags + 1):
        cols.append(dy[lags - i : len(dy) - i])
    if not gls:
        if trend in ("constant", "trend"):
            cols.append(np.ones(rows))
        if trend == "trend":
            cols.append(np.arange(1.0, rows + 1))
    X = np.column_stack(cols)
    target = dy[lags:]
    coef, se = _ols(X, target)
    stat = float(coef[0] / se[0])

    eff = rows
    if gls and trend == "trend":
        cvs = {lvl: val for lvl, val in zip(_LEVELS, _ERS_TREND)}
    else:
        cvs = {}
        for lvl, (b0, b1, b2, b3) in zip(_LEVELS, _MACKINNON_TAU[table_key]):
            cvs[lvl] = b0 + b1 / eff + b2 / eff**2 + b3 / eff**3
    return AdfResult(
        statistic=stat,
        lags=lags,
        trend=trend,
        nobs=eff,
        critical_values=cvs,
        reject={lvl: stat < cv for lvl, cv in cvs.items()},
        gls=gls,
    )
