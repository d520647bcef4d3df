"""
PDE Residuals
=============

Strong residual of

    ∂_t Y + (u·∇) Y - (Y·∇) u - g

at grid nodes away from S and the walls, and the weak residual

    ∫∫_Q Y·∂_t φ + (Y ⊗ u) : ∇φ + (Y·∇u)·φ + g·φ

against compactly supported bump test functions φ = b(t, x) e. The weak
integral uses nested Gauss–Legendre rules over the support of the bump, a
4-ball in scaled coordinates; the innermost x1 line is cut at its crossing
with S so each piece sees one branch of the solution.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from numpy.typing import NDArray

from inflowlab.config import JsonDict
from inflowlab.constants import (
    DEFAULT_ODE_STEP,
    MAX_BISECTION_ITERATIONS,
    MIN_QUADRATURE_NODES,
    STRONG_RESIDUAL_BAND,
    WEAK_GAUSS_NODES,
    WEAK_GAUSS_PANELS,
    Region
)
from inflowlab.core.exceptions import DataCoverageError, TestFunctionError
from inflowlab.geometry.domain import ChannelDomain, FloatArray
from inflowlab.geometry.fields import FieldProvider
from inflowlab.geometry.operators import jacobian
from inflowlab.transport.problem import ProblemData
from inflowlab.transport.solution import LagrangianSolver
from inflowlab.transport.solve import LagrangianField
from inflowlab.utils.logger import get_logger

log = get_logger(__name__)


# ---------------------------------------------------------
# STRONG RESIDUAL
# ---------------------------------------------------------
@dataclass(frozen=True)
class StrongResidual:
    """Per-region sup and L² norms of the nodal PDE residual at one snapshot."""
    t: float
    sup_minus: float
    sup_plus: float
    l2_minus: float
    l2_plus: float
    nodes_minus: int
    nodes_plus: int

    def to_dict(self) -> JsonDict:
        return asdict(self)


def _time_stencil(n: int, i: int) -> list[int]:
    """Snapshot indices read by second-order np.gradient at index i."""
    if i == 0:
        return [0, 1, 2]
    if i == n - 1:
        return [n - 3, n - 2, n - 1]
    return [i - 1, i, i + 1]


def _stable_regions(field: LagrangianField, stencil: list[int]) -> NDArray[np.bool_]:
    """Nodes whose region label agrees across the time stencil and two x1 neighbours."""
    base = field.regions[stencil[1]]
    ok = np.ones(base.shape, dtype=bool)
    for j in stencil:
        reg = field.regions[j]
        ok &= reg == base
        padded = np.pad(reg, ((2, 2), (0, 0), (0, 0)), mode="edge")
        for shift in (-2, -1, 1, 2):
            ok &= padded[2 + shift:2 + shift + reg.shape[0]] == base
    return ok


def strong_residual(field: LagrangianField, data: ProblemData, t: float,
                    band: float = STRONG_RESIDUAL_BAND) -> StrongResidual:
    """
    Nodal residual at snapshot time t with ∂_t by second-order differences
    over the snapshots. Nodes within `band` ODE steps of S (measured by φ)
    or of either wall, and nodes whose region changes inside the stencil,
    are excluded.

    Raises:
        DataCoverageError: Fewer than three snapshots.
        ConfigError: t is not a snapshot time.
    """
    n = len(field)
    if n < MIN_QUADRATURE_NODES:
        raise DataCoverageError(f"The strong residual needs at least {MIN_QUADRATURE_NODES} "
                                f"snapshots, got {n}", key="snapshot_times")
    dom = field.domain
    i = field.index(t)
    t = field.times[i]
    h = float(field.metadata.get("ode_step", DEFAULT_ODE_STEP))

    stack = np.stack([s.values for s in field.snapshots])
    dY = np.gradient(stack, np.asarray(field.times), axis=0, edge_order=2)[i]
    Y = stack[i]
    nodes = dom.nodes()
    u = np.moveaxis(data.u.eval(t, nodes), -1, 0)
    grad_u = data.u.grad(t, nodes)
    g = np.moveaxis(data.g.eval(t, nodes), -1, 0)

    residual = (dY
                + np.einsum("ik...,k...->i...", jacobian(Y, dom), u)
                - np.einsum("...ik,k...->i...", grad_u, Y)
                - g)
    magnitude = np.linalg.norm(residual, axis=0)

    width = band * h
    stencil = _time_stencil(n, i)
    keep = _stable_regions(field, stencil)
    for j in stencil:
        keep &= np.abs(field.phis[j]) > width
    x1 = dom.x1[:, None, None]
    keep &= (x1 > max(width, dom.hx)) & (x1 < dom.Lx - max(width, dom.hx))

    cell = dom.hx * dom.hy * dom.hz
    parts: dict[Region, tuple[float, float, int]] = {}
    for region in (Region.MINUS, Region.PLUS):
        sel = keep & (field.regions[i] == region)
        vals = magnitude[sel]
        parts[region] = (float(np.max(vals, initial=0.0)),
                         float(np.sqrt(np.sum(vals ** 2) * cell)),
                         int(vals.size))
    result = StrongResidual(t, parts[Region.MINUS][0], parts[Region.PLUS][0],
                            parts[Region.MINUS][1], parts[Region.PLUS][1],
                            parts[Region.MINUS][2], parts[Region.PLUS][2])
    log.debug("Strong residual at t=%.6g: sup %.3e (U-) / %.3e (U+)", t,
              result.sup_minus, result.sup_plus)
    return result


# ---------------------------------------------------------
# TEST FUNCTIONS
# ---------------------------------------------------------
@dataclass(frozen=True)
class BumpTestFunction:
    """
    φ(t, x) = (1 - r²)⁴ e for r < 1, with
    r² = Σ ((q_k - c_k) / a_k)² over q = (t, x1, y, z) and minimum-image
    offsets in y and z.
    """
    center: tuple[float, float, float, float]
    radii: tuple[float, float, float, float]
    direction: tuple[float, float, float] = (1.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        if len(self.center) != 4 or len(self.radii) != 4 or len(self.direction) != 3:
            raise TestFunctionError("A bump needs a 4D centre, 4 radii and a 3D direction")
        if min(self.radii) <= 0.0:
            raise TestFunctionError(f"Bump radii must be positive, got {self.radii}")
        if float(np.linalg.norm(self.direction)) == 0.0:
            raise TestFunctionError("Bump direction must be non-zero")

    @property
    def unit_direction(self) -> FloatArray:
        e = np.asarray(self.direction, dtype=np.float64)
        return e / np.linalg.norm(e)

    def check_support(self, horizon: float, domain: ChannelDomain) -> None:
        """
        Raises:
            TestFunctionError: The support meets t = 0, t = T or a wall, or
                wraps onto itself in a periodic direction.
        """
        (t0, c1, _, _), (at, a1, a2, a3) = self.center, self.radii
        if t0 - at <= 0.0 or t0 + at >= horizon:
            raise TestFunctionError(f"Bump support [{t0 - at:.4g}, {t0 + at:.4g}] is not "
                                    f"inside (0, {horizon:.4g})", key="time")
        if c1 - a1 <= 0.0 or c1 + a1 >= domain.Lx:
            raise TestFunctionError(f"Bump support [{c1 - a1:.4g}, {c1 + a1:.4g}] touches "
                                    f"a wall", key="x1")
        if 2.0 * a2 >= domain.Ly or 2.0 * a3 >= domain.Lz:
            raise TestFunctionError("Bump support wraps around a periodic direction",
                                    key="radii")

    def _scaled(self, t: FloatArray, x: FloatArray,
                domain: ChannelDomain | None) -> FloatArray:
        q = np.concatenate([np.asarray(t, dtype=np.float64)[..., None],
                            np.asarray(x, dtype=np.float64)], axis=-1)
        d = q - np.asarray(self.center)
        if domain is not None:
            d[..., 1:] = domain.periodic_delta(d[..., 1:])
        return d / np.asarray(self.radii)

    def profile(self, t: FloatArray, x: FloatArray,
                domain: ChannelDomain | None = None) -> FloatArray:
        """The scalar bump b(t, x)."""
        w = self._scaled(t, x, domain)
        return np.maximum(1.0 - np.sum(w * w, axis=-1), 0.0) ** 4

    def profile_gradient(self, t: FloatArray, x: FloatArray,
                         domain: ChannelDomain | None = None) -> FloatArray:
        """(∂_t b, ∂_1 b, ∂_2 b, ∂_3 b), shape (..., 4)."""
        w = self._scaled(t, x, domain)
        base = np.maximum(1.0 - np.sum(w * w, axis=-1), 0.0)
        return -8.0 * (base ** 3)[..., None] * w / np.asarray(self.radii)


# ---------------------------------------------------------
# NESTED QUADRATURE
# ---------------------------------------------------------
@dataclass(frozen=True)
class WeakResidual:
    """Quadrature of the weak form against one test function."""
    value: float
    scale: float
    relative: float
    nodes: int
    split_lines: int

    def to_dict(self) -> JsonDict:
        return asdict(self)


def _composite_gauss(n_nodes: int, panels: int) -> tuple[FloatArray, FloatArray]:
    """Composite Gauss–Legendre nodes and weights on [-1, 1]."""
    x, w = leggauss(n_nodes)
    edges = np.linspace(-1.0, 1.0, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None]).ravel()
    weights = (half[:, None] * w[None]).ravel()
    return nodes, weights


def _nest(nodes: FloatArray, weights: FloatArray, radius: FloatArray,
          rule: tuple[FloatArray, FloatArray]) -> tuple[FloatArray, FloatArray]:
    """Adds one level: points in [-radius, radius] for every outer point."""
    x, w = rule
    inner = radius[:, None] * x[None]
    new_w = weights[:, None] * radius[:, None] * w[None]
    cols = np.repeat(nodes, x.size, axis=0)
    return np.column_stack([cols, inner.ravel()]), new_w.ravel()


def _ball_lines(test: BumpTestFunction) -> tuple[FloatArray, FloatArray, FloatArray]:
    """
    Outer (t, y, z) points of the nested rule with their weights and the
    x1 half-width (in scaled units) of the line through each.
    """
    rule = _composite_gauss(WEAK_GAUSS_NODES, WEAK_GAUSS_PANELS)
    s, ws = rule
    pts, w = s[:, None], ws
    pts, w = _nest(pts, w, np.sqrt(np.maximum(1.0 - pts[:, 0] ** 2, 0.0)), rule)
    r2 = np.sqrt(np.maximum(1.0 - np.sum(pts ** 2, axis=1), 0.0))
    pts, w = _nest(pts, w, r2, rule)
    half = np.sqrt(np.maximum(1.0 - np.sum(pts ** 2, axis=1), 0.0))
    return pts, w, half


def _split_points(solver: LagrangianSolver, t: FloatArray, lo: FloatArray,
                  hi: FloatArray, y: FloatArray, z: FloatArray,
                  tol: float) -> tuple[FloatArray, FloatArray]:
    """
    x1 where each line (t, ·, y, z) crosses S, found by vectorised bisection
    on φ; lines without a crossing are cut at their midpoint.
    """
    def phi(x1: FloatArray) -> FloatArray:
        return solver.phi(t, np.column_stack([x1, y, z]))

    f_lo, f_hi = phi(lo), phi(hi)
    crosses = (f_lo < 0.0) & (f_hi > 0.0)
    a, b = lo.copy(), hi.copy()
    for _ in range(MAX_BISECTION_ITERATIONS):
        if not np.any(crosses & (b - a > tol)):
            break
        mid = 0.5 * (a + b)
        f_mid = phi(mid)
        right = crosses & (f_mid > 0.0)
        left = crosses & ~right
        b = np.where(right, mid, b)
        a = np.where(left, mid, a)
    cut = np.where(crosses, 0.5 * (a + b), 0.5 * (lo + hi))
    return cut, crosses


def _evaluate_solution(Y: LagrangianSolver | FieldProvider, domain: ChannelDomain,
                       t: FloatArray, x: FloatArray, side: FloatArray | None) -> FloatArray:
    if isinstance(Y, LagrangianSolver):
        out = np.empty((x.shape[0], 3))
        plus = side < 0.0
        for region, sel in ((Region.PLUS, plus), (Region.MINUS, ~plus)):
            if np.any(sel):
                out[sel] = Y.evaluate_branch(t[sel], x[sel], region)
        return out
    return Y.eval(t, domain.wrap(x))


def weak_residual(Y: LagrangianSolver | FieldProvider, data: ProblemData,
                  test: BumpTestFunction, domain: ChannelDomain | None = None) -> WeakResidual:
    """
    ∫∫ [Y·∂_t φ + (Y ⊗ u) : ∇φ + (Y·∇u)·φ + g·φ] for φ = b e.

    With a solver as input the branch is chosen by the side of S each
    quadrature node lies on; a provider (e.g. interpolated snapshots) is
    sampled directly. The relative value divides by ∫∫ of the integrand's
    absolute value.

    Raises:
        TestFunctionError: The support of φ is not inside Q.
    """
    dom = Y.domain if isinstance(Y, LagrangianSolver) else domain
    if dom is None:
        raise TestFunctionError("A domain is required for provider input", key="domain")
    test.check_support(data.T, dom)

    outer, w_outer, half = _ball_lines(test)
    (t0, c1, c2, c3), (at, a1, a2, a3) = test.center, test.radii
    t_line = t0 + at * outer[:, 0]
    y_line = c2 + a2 * outer[:, 1]
    z_line = c3 + a3 * outer[:, 2]
    lo, hi = c1 - a1 * half, c1 + a1 * half

    split_lines = 0
    if isinstance(Y, LagrangianSolver):
        cut, crosses = _split_points(Y, t_line, lo, hi, y_line, z_line,
                                     Y.settings.tolerance(dom))
        split_lines = int(np.count_nonzero(crosses))
    else:
        cut = 0.5 * (lo + hi)

    # two Gauss pieces per line, meeting at the cut
    xg, wg = leggauss(WEAK_GAUSS_NODES)
    pieces = []
    for a, b in ((lo, cut), (cut, hi)):
        mid, rad = 0.5 * (a + b), 0.5 * (b - a)
        pieces.append((mid[:, None] + rad[:, None] * xg[None],
                       (w_outer * rad)[:, None] * wg[None]))
    x1 = np.concatenate([p[0] for p in pieces], axis=1).ravel()
    weights = np.concatenate([p[1] for p in pieces], axis=1).ravel()
    # the outer nested weights are in scaled units, x1 is already physical
    weights = weights * at * a2 * a3
    reps = 2 * WEAK_GAUSS_NODES
    t = np.repeat(t_line, reps)
    x = np.column_stack([x1, np.repeat(y_line, reps), np.repeat(z_line, reps)])

    side = None
    if isinstance(Y, LagrangianSolver):
        first = np.concatenate([np.ones((lo.size, WEAK_GAUSS_NODES)),
                                np.zeros((lo.size, WEAK_GAUSS_NODES))], axis=1).ravel()
        crossing = np.repeat(crosses, reps)
        # left piece of a crossing line lies on the inflow side of S
        side = np.where(crossing & (first > 0.0), -1.0, 1.0)
        plain = ~crossing
        if np.any(plain):
            side[plain] = np.sign(Y.phi(t[plain], x[plain]))
    values = _evaluate_solution(Y, dom, t, x, side)

    e = test.unit_direction
    b = test.profile(t, x)
    db = test.profile_gradient(t, x)
    u = data.u.eval(t, x)
    grad_u = data.u.grad(t, x)
    g = data.g.eval(t, x)
    y_e = values @ e
    stretch = np.einsum("nik,nk->ni", grad_u, values) @ e
    integrand = y_e * (db[:, 0] + np.einsum("nk,nk->n", u, db[:, 1:])) + (stretch + g @ e) * b

    value = float(np.sum(weights * integrand))
    scale = float(np.sum(weights * np.abs(integrand)))
    relative = abs(value) / scale if scale > 0.0 else 0.0
    log.debug("Weak residual %.3e (relative %.3e) over %d nodes", value, relative, t.size)
    return WeakResidual(value, scale, relative, int(t.size), split_lines)
