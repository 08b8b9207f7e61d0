"""微分形式 - 回调求值 + 声明的上确界/Lipschitz 界

形式目录按名字寻址：perimeter2d、turning2d、poly:<seed>。
"""

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from ..errors import ConfigError, DimensionMismatchError
from ..seeding import make_generator
from .multivector import basis, compound_matrix

Box = Tuple[np.ndarray, np.ndarray]

_STREAM_FORMS = 21


class Polynomial:
    """2n 个变量的多项式，terms: {指数元组: 系数}"""

    def __init__(self, nvars: int, terms: Dict[Tuple[int, ...], float]):
        self.nvars = nvars
        self.terms = {tuple(int(e) for e in k): float(v) for k, v in terms.items() if v != 0}
        for k in self.terms:
            if len(k) != nvars:
                raise DimensionMismatchError(f"指数 {k} 与变量数 {nvars} 不一致")

    def __repr__(self) -> str:
        return f"Polynomial(nvars={self.nvars}, terms={len(self.terms)})"

    @property
    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    @classmethod
    def constant(cls, nvars: int, value: float) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def monomial(cls, nvars: int, exponents: Tuple[int, ...], coeff: float = 1.0) -> "Polynomial":
        return cls(nvars, {tuple(exponents): coeff})

    @classmethod
    def random(cls, nvars: int, degree: int, rng: np.random.Generator, density: float = 0.5) -> "Polynomial":
        """系数在 [-1, 1] 内均匀、按 density 随机稀疏的多项式"""
        terms = {}
        for exps in product(range(degree + 1), repeat=nvars):
            if sum(exps) <= degree and rng.random() < density:
                terms[exps] = rng.uniform(-1.0, 1.0)
        return cls(nvars, terms)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        out = np.zeros(len(points))
        for exps, c in self.terms.items():
            out += c * np.prod(points ** np.array(exps), axis=1)
        return out

    def derivative(self, var: int) -> "Polynomial":
        terms: Dict[Tuple[int, ...], float] = {}
        for exps, c in self.terms.items():
            if exps[var] == 0:
                continue
            lowered = list(exps)
            lowered[var] -= 1
            key = tuple(lowered)
            terms[key] = terms.get(key, 0.0) + c * exps[var]
        return Polynomial(self.nvars, terms)

    def gradient(self, points: np.ndarray) -> np.ndarray:
        return np.column_stack([self.derivative(v)(points) for v in range(self.nvars)])

    def sup_bound(self, box: Box) -> float:
        """盒上 |P| 的上界 Σ|c|·Π max(|lo_j|, |hi_j|)^{α_j}"""
        reach = np.maximum(np.abs(box[0]), np.abs(box[1]))
        return float(sum(abs(c) * np.prod(reach ** np.array(e)) for e, c in self.terms.items()))


@dataclass(frozen=True, eq=False)
class DifferentialForm:
    """
    R^{2n} 上的 (n-1)-形式

    evaluator 把 (q, 2n) 点映为 (q, C(2n, n-1)) 余向量系数。
    sup_bound 与 lip_bound 是在盒 box 上声明的界。
    """

    n: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    sup_bound: float
    lip_bound: float
    box: Box
    name: str = "form"
    polynomials: Optional[Tuple[Polynomial, ...]] = field(default=None, repr=False)

    @property
    def degree(self) -> int:
        return self.n - 1

    @property
    def size(self) -> int:
        return len(basis(2 * self.n, self.n - 1))

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        values = np.asarray(self.evaluator(points), dtype=float)
        if values.shape != (len(points), self.size):
            raise DimensionMismatchError(f"形式 {self.name} 的求值形状 {values.shape} 不正确")
        return values

    def __add__(self, other: "DifferentialForm") -> "DifferentialForm":
        if self.n != other.n:
            raise DimensionMismatchError("只能相加同次数的形式")
        return DifferentialForm(
            self.n,
            lambda z: self(z) + other(z),
            self.sup_bound + other.sup_bound,
            self.lip_bound + other.lip_bound,
            _box_union(self.box, other.box),
            f"({self.name} + {other.name})",
        )

    def __mul__(self, alpha: float) -> "DifferentialForm":
        return DifferentialForm(
            self.n,
            lambda z: alpha * self(z),
            abs(alpha) * self.sup_bound,
            abs(alpha) * self.lip_bound,
            self.box,
            f"{alpha:g}·{self.name}",
        )

    __rmul__ = __mul__


def _box_union(a: Box, b: Box) -> Box:
    return np.minimum(a[0], b[0]), np.maximum(a[1], b[1])


def default_box(n: int, half_width: float = 3.0) -> Box:
    """x ∈ [-w, w]^n，u ∈ [-1, 1]^n"""
    lo = np.concatenate([-half_width * np.ones(n), -np.ones(n)])
    hi = np.concatenate([half_width * np.ones(n), np.ones(n)])
    return lo, hi


def perimeter_form(box: Optional[Box] = None) -> DifferentialForm:
    """u_2 dx_1 - u_1 dx_2：在 ∂K 上积出周长"""
    def evaluate(z):
        return np.column_stack([z[:, 3], -z[:, 2], np.zeros(len(z)), np.zeros(len(z))])
    return DifferentialForm(2, evaluate, 1.0, 1.0, box or default_box(2), "perimeter2d")


def turning_form(box: Optional[Box] = None) -> DifferentialForm:
    """u_2 du_1 - u_1 du_2：积出总转角"""
    def evaluate(z):
        return np.column_stack([np.zeros(len(z)), np.zeros(len(z)), z[:, 3], -z[:, 2]])
    return DifferentialForm(2, evaluate, 1.0, 1.0, box or default_box(2), "turning2d")


def zero_form(n: int) -> DifferentialForm:
    size = len(basis(2 * n, n - 1))
    return DifferentialForm(n, lambda z: np.zeros((len(z), size)), 0.0, 0.0, default_box(n), "zero")


def polynomial_form(polys: Tuple[Polynomial, ...], n: int, box: Box, name: str) -> DifferentialForm:
    """系数为多项式的形式，界由单项式逐项估计"""
    size = len(basis(2 * n, n - 1))
    if len(polys) != size:
        raise DimensionMismatchError(f"需要 {size} 个系数多项式，收到 {len(polys)}")
    sup = float(np.sqrt(sum(p.sup_bound(box) ** 2 for p in polys)))
    lip = float(np.sqrt(sum(p.derivative(v).sup_bound(box) ** 2 for p in polys for v in range(2 * n))))

    def evaluate(z):
        return np.column_stack([p(z) for p in polys])

    return DifferentialForm(n, evaluate, sup, lip, box, name, polynomials=tuple(polys))


def random_polynomial_form(seed: int, n: int = 2, degree: int = 2, box: Optional[Box] = None) -> DifferentialForm:
    rng = make_generator(seed, _STREAM_FORMS)
    size = len(basis(2 * n, n - 1))
    polys = tuple(Polynomial.random(2 * n, degree, rng) for _ in range(size))
    return polynomial_form(polys, n, box or default_box(n), f"poly:{seed}")


def exact_form(f: Polynomial, box: Optional[Box] = None) -> DifferentialForm:
    """df（n = 2 时是 1-形式，系数即梯度）"""
    if f.nvars != 4:
        raise DimensionMismatchError("恰当形式 df 仅在 n = 2 时是 (n-1)-形式")
    box = box or default_box(2)
    grads = tuple(f.derivative(v) for v in range(4))
    return polynomial_form(grads, 2, box, "exact")


def _pullback_box(box: Box, R: np.ndarray, t: np.ndarray) -> Box:
    """
    拉回形式的声明盒

    x 部分取以 R^T(c - t) 为中心、像落在原 x 盒内的最大立方盒；
    u 部分不变：形式只在单位向量上求值，R 保持单位球面，而 [-1, 1]^n 包含单位球面。
    """
    n = len(t)
    lo, hi = np.asarray(box[0], dtype=float), np.asarray(box[1], dtype=float)
    center, half = (lo[:n] + hi[:n]) / 2, (hi[:n] - lo[:n]) / 2
    radius = float(np.min(half / np.abs(R).sum(axis=1)))
    moved = R.T @ (center - t)
    return np.concatenate([moved - radius, lo[n:]]), np.concatenate([moved + radius, hi[n:]])


def pullback(phi: DifferentialForm, rotation: np.ndarray, translation: Optional[np.ndarray] = None) -> DifferentialForm:
    """
    刚体运动 g(x, u) = (Rx + t, Ru) 的拉回 g*φ

    (g*φ)(z) = C(Q)^T φ(g z)，Q = diag(R, R)，C 为 (n-1) 阶复合矩阵。
    """
    n = phi.n
    R = np.asarray(rotation, dtype=float)
    t = np.zeros(n) if translation is None else np.asarray(translation, dtype=float)
    Q = np.zeros((2 * n, 2 * n))
    Q[:n, :n] = R
    Q[n:, n:] = R
    C = compound_matrix(Q, n - 1)

    def evaluate(z):
        moved = np.hstack([z[:, :n] @ R.T + t, z[:, n:] @ R.T])
        return phi(moved) @ C

    box = _pullback_box(phi.box, R, t)
    return DifferentialForm(n, evaluate, phi.sup_bound, phi.lip_bound, box, f"pullback({phi.name})")


def form_by_name(name: str, n: int = 2, box: Optional[Box] = None) -> DifferentialForm:
    """
    按名字取目录中的形式

    Raises:
        ConfigError: 未知名字，或 2 维专用形式用于 3 维
    """
    if name == "perimeter2d" or name == "turning2d":
        if n != 2:
            raise ConfigError(f"{name} 仅适用于 n = 2")
        return perimeter_form(box) if name == "perimeter2d" else turning_form(box)
    if name.startswith("poly:"):
        try:
            seed = int(name.split(":", 1)[1])
        except ValueError as e:
            raise ConfigError(f"形式名 {name!r} 中的种子不是整数") from e
        return random_polynomial_form(seed, n=n, box=box)
    raise ConfigError(f"未知形式: {name!r}")
