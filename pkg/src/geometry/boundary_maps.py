"""Boundary maps - ε-光滑凸体之间的边界映射与经验 Lipschitz 探针

ε-光滑凸体总是 Parallel(M, ε)。对 L = M ⊕ εB，∂L 上离 x 最近的点为
p(M, x) + ε·u(M, x)（只要 x ∉ M），这同时覆盖了 x ∉ L 与 x ∈ L∖M 两种情形。
"""

from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np
from scipy.optimize import brentq

from ..errors import (
    DegenerateBodyError,
    GeometryError,
    NotOnBoundaryError,
    PreconditionError,
)
from ..seeding import make_generator
from .bodies import ArrayLike, ConvexBody, Parallel, as_points, core_polytope
from .hausdorff import hausdorff_distance
from .projection import distances_and_directions

# 探针采样用途编号，避免与测度采样共用子流
_STREAM_BOUNDARY = 11
_STREAM_PAIRS = 12


@dataclass(frozen=True)
class BodyPairContext:
    """一对 ε-光滑凸体及其 Hausdorff 距离上界 δ"""

    K: Parallel
    L: Parallel
    epsilon: float
    delta: float

    def __post_init__(self):
        for name, body in (("K", self.K), ("L", self.L)):
            if not isinstance(body, Parallel) or abs(body.rho - self.epsilon) > 1e-12 * max(1.0, self.epsilon):
                raise GeometryError(f"{name} 必须是 Parallel(·, ε={self.epsilon:g})")
        if self.K.dim != self.L.dim:
            raise GeometryError("K 与 L 维度不一致")
        if self.delta < 0:
            raise GeometryError(f"δ 必须非负，收到 {self.delta}")

    @property
    def dim(self) -> int:
        return self.K.dim

    @classmethod
    def measure(cls, K: Parallel, L: Parallel, tol: float = 1e-6) -> "BodyPairContext":
        """δ 取实测 Hausdorff 距离加其误差界"""
        result = hausdorff_distance(K, L, tol=tol)
        return cls(K=K, L=L, epsilon=K.rho, delta=result.value + result.error_bound)

    def require_projection_regime(self) -> None:
        if not self.delta < self.epsilon / 2:
            raise PreconditionError(f"需要 δ < ε/2，当前 δ={self.delta:g}, ε={self.epsilon:g}")

    def require_orientation_regime(self) -> None:
        n = self.dim
        if not self.delta < self.epsilon / (4 * n):
            raise PreconditionError(
                f"需要 δ < ε/(4n) = {self.epsilon / (4 * n):g}，当前 δ={self.delta:g}"
            )


def _require_smooth(body: ConvexBody) -> Parallel:
    if not isinstance(body, Parallel):
        raise GeometryError(f"需要 ε-光滑凸体 Parallel(M, ε)，收到 {body!r}")
    return body


def _check_on_boundary(body: ConvexBody, points: np.ndarray, tol: float) -> None:
    gap = np.abs(body._signed_or_distance(points))
    bad = gap > body.boundary_tol(tol)
    if bad.any():
        k = int(np.argmax(gap))
        raise NotOnBoundaryError(f"点 {points[k].tolist()} 不在边界上（|d*| = {gap[k]:.3g}）")


def _outer_shell_point(body: Parallel, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """p(∂(M ⊕ εB), x) 与对应法向，要求 x ∉ M"""
    p, d, u = distances_and_directions(body.inner, points)
    if np.any(d <= 0):
        raise PreconditionError("点落在内核 M 中，超出适用范围 d(∂L, x) < ε")
    return p + body.rho * u, u


def nearest_boundary_point(body: ConvexBody, x: ArrayLike):
    """p(∂K, x)，K = M ⊕ εB 且 d(∂K, x) < ε"""
    smooth = _require_smooth(body)
    pts, single = as_points(x, body.dim)
    z, _ = _outer_shell_point(smooth, pts)
    return z[0] if single else z


def spherical_image(body: ConvexBody, x: ArrayLike, tol: float = 1e-9):
    """
    球面像 u_K(x)：ε-光滑凸体边界点的唯一外法向

    Raises:
        NotOnBoundaryError: x 不在 ∂K 上
    """
    smooth = _require_smooth(body)
    pts, single = as_points(x, body.dim)
    _check_on_boundary(smooth, pts, tol)
    _, _, u = distances_and_directions(smooth.inner, pts)
    return u[0] if single else u


def boundary_projection_map(ctx: BodyPairContext, x: ArrayLike, tol: float = 1e-9):
    """
    p: ∂K → ∂L，x ↦ p(∂L, x)

    Raises:
        NotOnBoundaryError: x 不在 ∂K 上
        PreconditionError: δ >= ε/2，或 x 落入 L 的内核
    """
    ctx.require_projection_regime()
    pts, single = as_points(x, ctx.dim)
    _check_on_boundary(ctx.K, pts, tol)
    z, _ = _outer_shell_point(ctx.L, pts)
    return z[0] if single else z


def map_G(ctx: BodyPairContext, x: ArrayLike, u: ArrayLike, tol: float = 1e-9) -> Tuple[np.ndarray, np.ndarray]:
    """
    G: Nor K → Nor L，(x, u) ↦ (p(x), u_L(p(x)))

    Raises:
        PreconditionError: δ >= ε/(4n)
    """
    ctx.require_orientation_regime()
    pts, single = as_points(x, ctx.dim)
    dirs, _ = as_points(u, ctx.dim)
    residual = np.abs(np.asarray(ctx.K.support(dirs)) - np.einsum("ij,ij->i", pts, dirs))
    if np.any(residual > ctx.K.boundary_tol(max(tol, 1e-8))):
        raise NotOnBoundaryError("支撑元不在 Nor K 上")
    _check_on_boundary(ctx.K, pts, tol)
    z, v = _outer_shell_point(ctx.L, pts)
    if single:
        return z[0], v[0]
    return z, v


def inverse_boundary_map(ctx: BodyPairContext, z: ArrayLike, tol: float = 1e-9):
    """
    p 的逆 q: ∂L → ∂K

    沿射线 z - εu_L(z) + t·u_L(z) 求 K 的带符号距离零点（brentq）。
    """
    ctx.require_projection_regime()
    pts, single = as_points(z, ctx.dim)
    _check_on_boundary(ctx.L, pts, tol)
    _, _, u = distances_and_directions(ctx.L.inner, pts)
    base = pts - ctx.epsilon * u
    out = np.empty_like(pts)
    scale = 1.0 + ctx.K.circumradius()

    for k in range(len(pts)):
        def along(t, k=k):
            return float(ctx.K._signed_or_distance((base[k] + t * u[k])[None])[0])

        hi = ctx.epsilon + 2 * ctx.delta + 1e-6 * scale
        while along(hi) <= 0:
            hi *= 2
        t = brentq(along, 0.0, hi, xtol=1e-14 * scale, rtol=4 * np.finfo(float).eps)
        out[k] = base[k] + t * u[k]
    return out[0] if single else out


def normal_bundle_chart(body: ConvexBody, z: ArrayLike, tol: float = 1e-9):
    """
    F: ∂K_1 → Nor K，z ↦ (p(K, z), z - p(K, z))

    Returns:
        (x, u)
    """
    pts, single = as_points(z, body.dim)
    p, d, u = distances_and_directions(body, pts)
    if np.any(np.abs(d - 1.0) > tol * (1.0 + body.circumradius())):
        raise NotOnBoundaryError("z 必须位于 ∂K_1 上")
    if single:
        return p[0], u[0]
    return p, u


def sample_boundary(body: ConvexBody, count: int, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    在 ε-光滑凸体边界上按面积均匀采样

    层：平面部分（核心多胞形的面）、棱上的柱面片（3 维）、顶点处的球面片。
    顶点层整体是半径为 r 的整球面，方向均匀采样后按 argmax u·v 归属到顶点。

    Args:
        body: Parallel(多胞形或球, ε)
        count: 样本数
        seed: 随机种子

    Returns:
        (x, u)：边界点与其外法向
    """
    smooth = _require_smooth(body)
    rng = make_generator(seed, _STREAM_BOUNDARY)
    poly, points, radius = core_polytope(smooth)
    n = smooth.dim

    if poly is None:
        u = _uniform_directions(rng, count, n)
        return points[0] + radius * u, u
    if not poly.is_full_dimensional:
        raise DegenerateBodyError("边界采样要求核心多胞形满维")

    hull = poly.hull
    strata = _boundary_strata(hull, radius)
    weights = np.array([w for w, _ in strata])
    choice = rng.choice(len(strata), size=count, p=weights / weights.sum())
    xs = np.empty((count, n))
    us = np.empty((count, n))
    for k, (_, sampler) in enumerate(strata):
        idx = np.flatnonzero(choice == k)
        if len(idx):
            xs[idx], us[idx] = sampler(rng, len(idx))
    return xs, us


def _uniform_directions(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    g = rng.standard_normal((count, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _boundary_strata(hull, radius: float):
    """返回 [(面积, sampler)]，sampler(rng, m) -> (x, u)"""
    n = hull.dim
    verts = hull.vertices
    strata = []

    def vertex_sampler(rng, m):
        u = _uniform_directions(rng, m, n)
        nearest = verts[np.argmax(u @ verts.T, axis=1)]
        return nearest + radius * u, u

    strata.append((radius ** (n - 1) * (2 * np.pi if n == 2 else 4 * np.pi), vertex_sampler))

    if n == 2:
        for k, (a, b, _, _) in enumerate(hull.edges):
            length = float(np.linalg.norm(verts[b] - verts[a]))
            strata.append((length, _segment_sampler(verts[a], verts[b], hull.normals[k], radius)))
        return strata

    for k, facet in enumerate(hull.facets):
        pts = verts[facet]
        tri_areas = 0.5 * np.linalg.norm(np.cross(pts[1:-1] - pts[0], pts[2:] - pts[0]), axis=1)
        strata.append((float(tri_areas.sum()), _facet_sampler(pts, tri_areas, hull.normals[k], radius)))
    if radius > 0:
        for a, b, f1, f2 in hull.edges:
            n1, n2 = hull.normals[f1], hull.normals[f2]
            angle = float(np.arccos(np.clip(n1 @ n2, -1.0, 1.0)))
            length = float(np.linalg.norm(verts[b] - verts[a]))
            strata.append((length * radius * angle, _cylinder_sampler(verts[a], verts[b], n1, n2, angle, radius)))
    return strata


def _segment_sampler(a, b, normal, radius):
    def sampler(rng, m):
        t = rng.random(m)[:, None]
        x = a + t * (b - a) + radius * normal
        return x, np.broadcast_to(normal, x.shape).copy()
    return sampler


def _facet_sampler(pts, tri_areas, normal, radius):
    def sampler(rng, m):
        tri = rng.choice(len(tri_areas), size=m, p=tri_areas / tri_areas.sum())
        r1, r2 = rng.random(m), rng.random(m)
        s = np.sqrt(r1)
        a, b, c = pts[0], pts[1 + tri], pts[2 + tri]
        x = (1 - s)[:, None] * a + (s * (1 - r2))[:, None] * b + (s * r2)[:, None] * c
        return x + radius * normal, np.broadcast_to(normal, x.shape).copy()
    return sampler


def _cylinder_sampler(a, b, n1, n2, angle, radius):
    def sampler(rng, m):
        t = rng.random(m)[:, None]
        theta = rng.random(m) * angle
        u = slerp(n1, n2, theta / angle if angle > 0 else np.zeros(m))
        return a + t * (b - a) + radius * u, u
    return sampler


def slerp(a: np.ndarray, b: np.ndarray, s: np.ndarray) -> np.ndarray:
    """单位向量 a 到 b 的测地插值，s ∈ [0, 1]"""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    omega = float(np.arccos(np.clip(a @ b, -1.0, 1.0)))
    if omega < 1e-12:
        return np.broadcast_to(a, (len(s), len(a))).copy()
    w1 = np.sin((1 - s) * omega) / np.sin(omega)
    w2 = np.sin(s * omega) / np.sin(omega)
    return w1[:, None] * a + w2[:, None] * b


# ---- 经验 Lipschitz 探针 ----

@dataclass(frozen=True)
class ProbeResult:
    """探针结果：observed 与理论界 bound 比较，violations 为超出 slack 的样本数"""

    name: str
    observed: float
    bound: float
    violations: int
    samples: int
    slack: float = 1e-6

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "observed": self.observed,
            "bound": self.bound,
            "violations": self.violations,
            "samples": self.samples,
            "passed": self.passed,
        }


def empirical_lipschitz(f: Callable[[np.ndarray], np.ndarray], a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """逐对比值 |f(a) - f(b)| / |a - b|"""
    num = np.linalg.norm(f(a) - f(b), axis=1)
    den = np.linalg.norm(a - b, axis=1)
    return num / den


def boundary_pairs(body: Parallel, count: int, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    ∂K 上的近邻点对：先采样 x，再沿随机方向扰动并投回边界

    扰动尺度在 [1e-4ε, 1e-1ε] 上对数均匀。
    """
    x, _ = sample_boundary(body, count, seed)
    rng = make_generator(seed, _STREAM_PAIRS)
    scale = body.rho * 10 ** rng.uniform(-4, -1, size=count)
    step = _uniform_directions(rng, count, body.dim) * scale[:, None]
    y = nearest_boundary_point(body, x + step)
    keep = np.linalg.norm(x - y, axis=1) > 0
    return x[keep], y[keep]


def _probe(name: str, values: np.ndarray, bound: float, slack: float, upper: bool = True) -> ProbeResult:
    if upper:
        observed = float(values.max())
        violations = int(np.sum(values > bound + slack))
    else:
        observed = float(values.min())
        violations = int(np.sum(values < bound - slack))
    return ProbeResult(name, observed, bound, violations, len(values), slack)


def lipschitz_probe_p(ctx: BodyPairContext, samples: int, seed: int, slack: float = 1e-6) -> ProbeResult:
    """Lip(p) <= ε/(ε-δ)"""
    a, b = boundary_pairs(ctx.K, samples, seed)
    ratios = empirical_lipschitz(lambda x: boundary_projection_map(ctx, x), a, b)
    return _probe("lip_p", ratios, ctx.epsilon / (ctx.epsilon - ctx.delta), slack)


def lipschitz_probe_spherical_image(body: Parallel, samples: int, seed: int, slack: float = 1e-6) -> ProbeResult:
    """Lip(u_K) <= 1/ε"""
    a, b = boundary_pairs(body, samples, seed)
    ratios = empirical_lipschitz(lambda x: spherical_image(body, x), a, b)
    return _probe("lip_spherical_image", ratios, 1.0 / body.rho, slack)


def _G_on_boundary(ctx: BodyPairContext, x: np.ndarray) -> np.ndarray:
    u = spherical_image(ctx.K, x)
    z, v = map_G(ctx, x, u)
    return np.hstack([z, v])


def lipschitz_probe_G(ctx: BodyPairContext, samples: int, seed: int, slack: float = 1e-6) -> ProbeResult:
    """Lip(G) <= 2/(ε-δ)，距离取 R^{2n} 中 (x, u) 的欧氏距离"""
    a, b = boundary_pairs(ctx.K, samples, seed)
    sa = np.hstack([a, spherical_image(ctx.K, a)])
    sb = np.hstack([b, spherical_image(ctx.K, b)])
    num = np.linalg.norm(_G_on_boundary(ctx, a) - _G_on_boundary(ctx, b), axis=1)
    ratios = num / np.linalg.norm(sa - sb, axis=1)
    return _probe("lip_G", ratios, 2.0 / (ctx.epsilon - ctx.delta), slack)


def displacement_probe_G(ctx: BodyPairContext, samples: int, seed: int, slack: float = 1e-9) -> ProbeResult:
    """|G(x, u) - (x, u)| <= δ + 2√(δ/ε)"""
    x, u = sample_boundary(ctx.K, samples, seed)
    moved = _G_on_boundary(ctx, x)
    disp = np.linalg.norm(moved - np.hstack([x, u]), axis=1)
    return _probe("displacement_G", disp, ctx.delta + 2 * np.sqrt(ctx.delta / ctx.epsilon), slack)


def angle_probe(ctx: BodyPairContext, samples: int, seed: int, slack: float = 1e-9) -> ProbeResult:
    """u_L(p(x))·u_K(x) >= 1 - 2δ/ε"""
    x, u = sample_boundary(ctx.K, samples, seed)
    z = boundary_projection_map(ctx, x)
    v = spherical_image(ctx.L, z)
    cosines = np.einsum("ij,ij->i", u, v)
    return _probe("angle", cosines, 1 - 2 * ctx.delta / ctx.epsilon, slack, upper=False)


def chart_lipschitz_probe(body: ConvexBody, samples: int, seed: int, bound: float = 3.0) -> ProbeResult:
    """F: ∂K_1 → Nor K 的经验 Lipschitz 常数（仅报告）"""
    shell = Parallel(body, 1.0)
    a, b = boundary_pairs(shell, samples, seed)

    def chart(z):
        p, u = normal_bundle_chart(body, z, tol=1e-7)
        return np.hstack([p, u])

    ratios = empirical_lipschitz(chart, a, b)
    return _probe("lip_chart", ratios, bound, 0.0)


def run_lipschitz_probes(ctx: BodyPairContext, samples: int, seed: int) -> List[ProbeResult]:
    """依次运行全部 Lipschitz 与位移探针"""
    ctx.require_orientation_regime()
    return [
        lipschitz_probe_p(ctx, samples, seed),
        lipschitz_probe_spherical_image(ctx.K, samples, seed),
        lipschitz_probe_G(ctx, samples, seed),
        displacement_probe_G(ctx, samples, seed),
        angle_probe(ctx, samples, seed),
    ]
