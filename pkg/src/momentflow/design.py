"""Sign-change design system.

Given prescribed times 0 < t_1 < ... < t_N, find modulation weights and
vectors so that the small-dilation limit of the velocity correlation,

    E_app(t) = sum_j mu_j (1 - exp(-2 gamma j t)),       j = 1..N+1,

vanishes with a sign change at every t_i.  Writing T_i = exp(-2 gamma t_i),
the conditions E_app(t_i) = 0 plus a normalization of the derivative at t_1
form an (N+1) x (N+1) linear system whose matrix has a closed-form
determinant, so the design always has exactly one solution.

Note on the derivative normalization: since d/dt E_app(t_1)
= 2 gamma * sum_j j mu_j T_1^j, prescribing d/dt E_app(t_1) = c / (2 gamma)
means the last equation reads sum_j j T_1^j mu_j = c / (4 gamma^2).
"""

from dataclasses import dataclass

import numpy as np

from .datum import make_spec
from .errors import ConditioningError, InvalidDesignError

DEFAULT_GAMMA = 4.0
# realized modulation angles stay strictly inside the admissible cones
ANGLE_2D_POS = np.pi / 8.0
ANGLE_3D_POS = 3.0 * np.pi / 8.0
ANGLE_3D_NEG = np.pi / 8.0


@dataclass(frozen=True)
class DesignProblem:
    times: tuple
    epsilon: float
    gamma: float = DEFAULT_GAMMA
    c: float = 1.0
    dimension: int = 2

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.size == 0:
            raise InvalidDesignError("need at least one target time")
        if np.any(t <= 0.0) or np.any(np.diff(t) <= 0.0):
            raise InvalidDesignError("times must be positive and strictly increasing")
        if self.epsilon <= 0.0 or self.gamma <= 0.0:
            raise InvalidDesignError("epsilon and gamma must be positive")
        if self.c == 0.0:
            raise InvalidDesignError("c must be nonzero")
        if self.dimension not in (2, 3):
            raise InvalidDesignError("dimension must be 2 or 3")

    @property
    def T(self):
        return tuple(np.exp(-2.0 * self.gamma * np.asarray(self.times)))

    def to_dict(self):
        return {
            "times": [float(t) for t in self.times],
            "epsilon": self.epsilon,
            "gamma": self.gamma,
            "c": self.c,
            "dimension": self.dimension,
        }

    @staticmethod
    def from_dict(data):
        return DesignProblem(
            times=tuple(float(t) for t in data["times"]),
            epsilon=float(data["epsilon"]),
            gamma=float(data.get("gamma", DEFAULT_GAMMA)),
            c=float(data.get("c", 1.0)),
            dimension=int(data.get("dimension", 2)),
        )


@dataclass(frozen=True)
class DesignSolution:
    problem: DesignProblem
    T: tuple
    mu: tuple
    lambdas: tuple
    alphas: tuple
    matrix_det: float

    def to_dict(self):
        return {
            "problem": self.problem.to_dict(),
            "T": [float(x) for x in self.T],
            "mu": [float(x) for x in self.mu],
            "lambdas": [float(x) for x in self.lambdas],
            "alphas": [[float(x) for x in a] for a in self.alphas],
            "matrix_det": self.matrix_det,
        }

    @staticmethod
    def from_dict(data):
        return DesignSolution(
            problem=DesignProblem.from_dict(data["problem"]),
            T=tuple(float(x) for x in data["T"]),
            mu=tuple(float(x) for x in data["mu"]),
            lambdas=tuple(float(x) for x in data["lambdas"]),
            alphas=tuple(tuple(float(x) for x in a) for a in data["alphas"]),
            matrix_det=float(data["matrix_det"]),
        )

    def datum_spec(self, delta: float, eta: float = 1.0, profile_name: str = "smooth-bump"):
        return make_spec(
            self.problem.dimension, delta, eta, self.lambdas, self.alphas, profile_name
        )


def _check_T(T):
    T = np.asarray(T, dtype=float)
    if np.any((T <= 0.0) | (T >= 1.0)):
        raise InvalidDesignError("every T_i must lie strictly inside (0, 1)")
    if len(np.unique(T)) != T.size:
        raise InvalidDesignError("T values must be pairwise distinct")
    return T


def build_matrix(T) -> np.ndarray:
    """Rows 1..N: (1 - T_i^j); last row: (j * T_1^j), j = 1..N+1."""
    T = _check_T(T)
    N = T.size
    j = np.arange(1, N + 2)
    M = np.empty((N + 1, N + 1))
    M[:N] = 1.0 - T[:, None] ** j[None, :]
    M[N] = j * T[0] ** j
    return M


def det_closed(T) -> float:
    """Product formula for det(build_matrix(T))."""
    T = _check_T(T)
    N = T.size
    val = -T[0] * (1.0 - T[0]) * np.prod(1.0 - T)
    for i in range(1, N):
        val *= T[0] - T[i]
    for i in range(N):
        for ip in range(i + 1, N):
            val *= T[ip] - T[i]
    return float(val)


def _rhs(problem: DesignProblem) -> np.ndarray:
    rhs = np.zeros(len(problem.times) + 1)
    rhs[-1] = problem.c / (4.0 * problem.gamma**2)
    return rhs


def solve_mu(problem: DesignProblem):
    """Unique weight vector; raises on numerically singular systems."""
    T = np.asarray(problem.T)
    M = build_matrix(T)
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > 1e13:
        raise ConditioningError(
            f"design system nearly singular (condition number {cond:.3g}); "
            "times are too close at this gamma",
            condition_number=float(cond),
        )
    mu = np.linalg.solve(M, _rhs(problem))
    return mu


def solve_mu_normalized(problem: DesignProblem):
    """Solve with c chosen so that max_j |mu_j| = 1.

    Returns (mu, problem) where the returned problem carries the effective c.
    """
    base = solve_mu(problem)
    peak = float(np.max(np.abs(base)))
    scale = 1.0 / peak
    problem2 = DesignProblem(
        times=problem.times,
        epsilon=problem.epsilon,
        gamma=problem.gamma,
        c=problem.c * scale,
        dimension=problem.dimension,
    )
    return base * scale, problem2


def eval_Eapp(mu, gamma: float, t) -> float:
    mu = np.asarray(mu, dtype=float)
    j = np.arange(1, mu.size + 1)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    vals = np.sum(mu[None, :] * (1.0 - np.exp(-2.0 * gamma * j[None, :] * t_arr[:, None])), axis=1)
    return vals if np.ndim(t) else float(vals[0])


def eval_dEapp(mu, gamma: float, t) -> float:
    mu = np.asarray(mu, dtype=float)
    j = np.arange(1, mu.size + 1)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    vals = np.sum(
        mu[None, :] * 2.0 * gamma * j[None, :] * np.exp(-2.0 * gamma * j[None, :] * t_arr[:, None]),
        axis=1,
    )
    return vals if np.ndim(t) else float(vals[0])


def geometric_factor(alpha, dimension: int) -> float:
    """The weight multiplying lambda_j^2 in the mu relation."""
    a = np.asarray(alpha, dtype=float)
    if dimension == 2:
        return float(a[0] * a[1] / np.dot(a, a))
    return float((a[0] - a[2]) * (a[1] - a[2]) / np.dot(a, a))


def mu_from_phase(lam: float, alpha, dimension: int) -> float:
    return lam**2 * geometric_factor(alpha, dimension)


def realize_phases(problem: DesignProblem, mu) -> DesignSolution:
    """Deterministic modulation vectors with |alpha_j|^2 = gamma * j.

    2D: alpha_j on the circle at angle +-pi/8 (sign matching mu_j).
    3D: alpha_j = sqrt(gamma j) (0, cos th, sin th), th = 3pi/8 or pi/8.
    mu_j = 0 realizes as lambda_j = 0 with an arbitrary admissible vector.
    """
    mu = np.asarray(mu, dtype=float)
    gamma, d = problem.gamma, problem.dimension
    alphas, lambdas = [], []
    for j, mu_j in enumerate(mu, start=1):
        radius = np.sqrt(gamma * j)
        if d == 2:
            theta = ANGLE_2D_POS if mu_j >= 0.0 else -ANGLE_2D_POS
            alpha = radius * np.array([np.cos(theta), np.sin(theta)])
        else:
            theta = ANGLE_3D_POS if mu_j >= 0.0 else ANGLE_3D_NEG
            alpha = radius * np.array([0.0, np.cos(theta), np.sin(theta)])
        factor = geometric_factor(alpha, d)
        lam = 0.0 if mu_j == 0.0 else float(np.sqrt(mu_j / factor))
        alphas.append(tuple(alpha))
        lambdas.append(lam)
    return DesignSolution(
        problem=problem,
        T=problem.T,
        mu=tuple(float(x) for x in mu),
        lambdas=tuple(lambdas),
        alphas=tuple(alphas),
        matrix_det=det_closed(problem.T),
    )


def solve_design(problem: DesignProblem, normalize: bool = True) -> DesignSolution:
    if normalize:
        mu, problem = solve_mu_normalized(problem)
    else:
        mu = solve_mu(problem)
    return realize_phases(problem, mu)


def verify_design(solution: DesignSolution, problem: DesignProblem | None = None) -> dict:
    """Numerical report on the solved design; never raises on check failure."""
    problem = problem or solution.problem
    mu = np.asarray(solution.mu)
    gamma, c = problem.gamma, problem.c
    times = np.asarray(problem.times)
    report = {"checks": {}, "ok": True}

    resid = build_matrix(solution.T) @ mu - _rhs(problem)
    scale = max(abs(c), abs(c) / (4.0 * gamma**2))
    report["system_residual"] = float(np.max(np.abs(resid)))
    report["checks"]["linear_system"] = report["system_residual"] <= 1e-10 * scale

    e_vals = np.asarray([eval_Eapp(mu, gamma, t) for t in times])
    report["E_at_times"] = e_vals.tolist()
    report["checks"]["zeros"] = bool(np.all(np.abs(e_vals) <= 1e-10 * abs(c)))

    d_vals = np.asarray([eval_dEapp(mu, gamma, t) for t in times])
    report["dE_at_times"] = d_vals.tolist()
    report["checks"]["derivatives_nonzero"] = bool(np.all(np.abs(d_vals) > 0.0))
    target = c / (2.0 * gamma)
    report["dE_at_t1"] = float(d_vals[0])
    report["checks"]["derivative_t1"] = abs(d_vals[0] - target) <= 1e-10 * abs(target)

    padded = np.concatenate([[0.0], times, [np.inf]])
    sign_ok = []
    for i, t_i in enumerate(times):
        gap = min(padded[i + 1] - padded[i], padded[i + 2] - padded[i + 1])
        h = 0.5 * min(problem.epsilon, gap / 4.0)
        left = eval_Eapp(mu, gamma, t_i - h)
        right = eval_Eapp(mu, gamma, t_i + h)
        sign_ok.append(left * right < 0.0)
    report["checks"]["sign_changes"] = bool(np.all(sign_ok))

    mu_back = np.array(
        [mu_from_phase(l, a, problem.dimension) for l, a in zip(solution.lambdas, solution.alphas)]
    )
    report["mu_roundtrip_error"] = float(
        np.max(np.abs(mu_back - mu) / np.maximum(np.abs(mu), 1e-300))
    )
    report["checks"]["mu_roundtrip"] = report["mu_roundtrip_error"] <= 1e-12

    norm_ok = [
        abs(np.dot(a, a) - gamma * (j + 1)) <= 1e-12 * gamma * (j + 1)
        for j, a in enumerate(solution.alphas)
    ]
    report["checks"]["alpha_norms"] = bool(np.all(norm_ok))

    report["ok"] = bool(all(report["checks"].values()))
    return report
