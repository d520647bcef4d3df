"""
Compatibility Conditions
========================

Residuals of the corner compatibility conditions on Γ₊ at t = 0:

* cond₀: H(0) = Y₀,
* cond₁: ∂_t H(0) = ∂_t Y(0), with ∂_t Y(0) = W := g(0) - ∇Y₀ u₀ + ∇u₀ Y₀,
* cond₂: ∂_t² H(0) = ∂_t² Y(0), obtained by differentiating the equation
  once in time and substituting W for ∂_t Y(0),

and of the range-of-curl condition that keeps div Y = 0 when the data is
divergence free. Higher orders are evaluated only for analytic providers.
"""
from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from inflowlab.constants import COMPAT_TOL
from inflowlab.core.exceptions import CapabilityError, DataCoverageError
from inflowlab.geometry.domain import ChannelDomain, FloatArray, Side
from inflowlab.geometry.operators import surface_divergence
from inflowlab.transport.problem import ProblemData
from inflowlab.utils.logger import get_logger

log = get_logger(__name__)


def _mv(a: FloatArray, v: FloatArray) -> FloatArray:
    return np.einsum("...ik,...k->...i", a, v)


def cond1_vector(data: ProblemData, x: FloatArray) -> FloatArray:
    """∂_t H(0) + ∇Y₀ u₀ - ∇u₀ Y₀ - g(0) at points x on Γ₊."""
    u0 = data.u.eval(0.0, x)
    y0 = data.Y0.eval(0.0, x)
    return (data.H.dt(0.0, x) + _mv(data.Y0.grad(0.0, x), u0)
            - _mv(data.u.grad(0.0, x), y0) - data.g.eval(0.0, x))


def cond2_vector(data: ProblemData, x: FloatArray) -> FloatArray:
    """
    ∂_t²H(0) - ∂_t g(0) + ∇Y₀ ∂_t u + ∇W u₀ - ∇u₀ W - ∇∂_t u Y₀, where
    W = g(0) - ∇Y₀ u₀ + ∇u₀ Y₀ replaces ∂_t Y(0).

    Raises:
        CapabilityError: A provider has no second derivatives.
    """
    u, y0, g = data.u, data.Y0, data.g
    u0, du0, hu0 = u.eval(0.0, x), u.grad(0.0, x), u.hessian(0.0, x)
    ut, dut = u.dt(0.0, x), u.dt_grad(0.0, x)
    yv, dy, hy = y0.eval(0.0, x), y0.grad(0.0, x), y0.hessian(0.0, x)

    w = g.eval(0.0, x) - _mv(dy, u0) + _mv(du0, yv)
    # ∇(∇Y u)[i, m] = Σ_k ∂_m∂_k Y^i u^k + ∂_k Y^i ∂_m u^k
    grad_w = (g.grad(0.0, x)
              - np.einsum("...ikm,...k->...im", hy, u0) - dy @ du0
              + np.einsum("...ikm,...k->...im", hu0, yv) + du0 @ dy)
    return (data.H.dtt(0.0, x) - g.dt(0.0, x) + _mv(dy, ut) + _mv(grad_w, u0)
            - _mv(du0, w) - _mv(dut, yv))


def _wall(domain: ChannelDomain) -> FloatArray:
    return domain.boundary_nodes(Side.PLUS)


def cond0_residual(data: ProblemData, domain: ChannelDomain) -> FloatArray:
    """|H(0) - Y₀| on the Γ₊ nodes, shape (Ny, Nz)."""
    x = _wall(domain)
    return np.linalg.norm(data.H.eval(0.0, x) - data.Y0.eval(0.0, x), axis=-1)


def cond1_residual(data: ProblemData, domain: ChannelDomain) -> FloatArray:
    """|cond₁ vector| on the Γ₊ nodes."""
    return np.linalg.norm(cond1_vector(data, _wall(domain)), axis=-1)


def cond2_residual(data: ProblemData, domain: ChannelDomain) -> FloatArray:
    """|cond₂ vector| on the Γ₊ nodes."""
    return np.linalg.norm(cond2_vector(data, _wall(domain)), axis=-1)


def range_of_curl_residual(data: ProblemData, domain: ChannelDomain, t: float) -> FloatArray:
    """
    |∂_t Hⁿ + div_Γ(Hⁿ u^τ - Uⁿ H^τ) - g·n| on the Γ₊ nodes, with n = -e₁,
    so Hⁿ = -H₁, Uⁿ = -u₁ and g·n = -g₁.
    """
    x = _wall(domain)
    hv, uv = data.H.eval(t, x), data.u.eval(t, x)
    h_n, u_n = -hv[..., 0], -uv[..., 0]
    tangential = h_n[..., None] * uv - u_n[..., None] * hv
    tangential[..., 0] = 0.0
    div = surface_divergence(np.moveaxis(tangential, -1, 0), domain)
    return np.abs(-data.H.dt(t, x)[..., 0] + div + data.g.eval(t, x)[..., 0])


# ---------------------------------------------------------
# REPORT
# ---------------------------------------------------------
@dataclass
class CompatEntry:
    """Sup-norm residual of one condition with its status."""
    residual: float | None
    passed: bool | None
    trusted: bool = True
    available: bool = True
    note: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {"residual": self.residual, "passed": self.passed, "trusted": self.trusted,
                "available": self.available, "note": self.note}


@dataclass
class CompatReport:
    """Residuals of cond₀, cond₁, cond₂ and range_of_curl over the Γ₊ nodes."""
    tol: float
    entries: dict[str, CompatEntry] = field(default_factory=dict)
    fields: dict[str, FloatArray] = field(default_factory=dict)

    def passed(self, name: str) -> bool:
        return bool(self.entries[name].passed)

    def to_dict(self) -> dict[str, Any]:
        return {"tol": self.tol,
                "conditions": {k: v.to_dict() for k, v in self.entries.items()}}


ORDERED_CONDITIONS = ("cond0", "cond1", "cond2")


def compat_report(data: ProblemData, domain: ChannelDomain, tol: float = COMPAT_TOL,
                  times: Sequence[float] = (0.0,)) -> CompatReport:
    """
    Evaluates every condition. A failing cond_k marks all higher orders
    untrusted; missing derivatives mark a condition unavailable.
    """
    report = CompatReport(tol)
    checks: dict[str, Callable[[], FloatArray]] = {
        "cond0": lambda: cond0_residual(data, domain),
        "cond1": lambda: cond1_residual(data, domain),
        "cond2": lambda: cond2_residual(data, domain),
    }
    trusted = True
    for name in ORDERED_CONDITIONS:
        try:
            values = checks[name]()
        except (CapabilityError, DataCoverageError) as e:
            log.info("%s unavailable: %s", name, e)
            report.entries[name] = CompatEntry(None, None, trusted, False, str(e))
            continue
        sup = float(np.max(values))
        ok = sup <= tol
        report.entries[name] = CompatEntry(sup, ok, trusted)
        report.fields[name] = values
        trusted = trusted and ok

    try:
        curl_values = np.stack([range_of_curl_residual(data, domain, t) for t in times])
        sup = float(np.max(curl_values))
        report.entries["range_of_curl"] = CompatEntry(sup, sup <= tol)
        report.fields["range_of_curl"] = curl_values[0]
    except (CapabilityError, DataCoverageError) as e:
        report.entries["range_of_curl"] = CompatEntry(None, None, True, False, str(e))
    log.info("Compatibility: %s", ", ".join(
        f"{k}={'n/a' if v.residual is None else f'{v.residual:.3e}'}"
        for k, v in report.entries.items()))
    return report
