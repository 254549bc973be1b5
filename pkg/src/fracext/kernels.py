"""The scalar kernel family of the extension calculus.

Kernels are analytic functions of t > 0 parametrized by (sigma, z):

    b(t)   = z^{2 sigma} / (4^sigma Gamma(sigma)) * exp(-z^2/(4t)) / t^{1+sigma}
    B(t)   = exp(-z^2/(4t)) / (Gamma(sigma) t^{1-sigma})
    h(t)   = t^{sigma-1} / Gamma(sigma)
    e_eps(t) = exp(-eps t)

together with B - h (evaluated through a stable expm1-style difference)
and products with e_eps.  Every time- and z-derivative has an exact
closed form: the coefficient tables are generated by polynomial
recurrences and feed the Weyl fractional calculus, the Sobolev-algebra
norms, and the half-line convolution implemented here.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .quadrature import DecayHint, _graded_interval, integrate_halfline
from .specfun import FracOrder, cexpm1, cpow, gamma

__all__ = [
    "SectorPoint",
    "Kernel",
    "ExprKernel",
    "DerivativeCoefficients",
    "eval_kernel",
    "time_derivative",
    "z_derivative",
    "time_derivative_coefficients",
    "z_derivative_coefficients",
    "weyl_integral",
    "weyl_derivative",
    "sobolev_norm",
    "convolve_halfline",
]

MAX_DERIVATIVE_ORDER = 12


@dataclass(frozen=True)
class SectorPoint:
    """A point of the sector S_theta = {|arg z| < theta}.

    closed=True admits the boundary rays |arg z| = theta (used by the
    closed-sector extension formula); the open sector additionally
    guarantees Re(z^2) > 0 whenever theta <= pi/4.
    """

    z: complex
    sector_half_angle: float = math.pi / 4.0
    closed: bool = False

    def __post_init__(self):
        z = complex(self.z)
        theta = float(self.sector_half_angle)
        if not (0.0 < theta <= math.pi / 2.0):
            raise ValueError("sector_half_angle must lie in (0, pi/2]")
        if z == 0:
            raise ValueError("z = 0 is not a sector point")
        ang = abs(cmath.phase(z))
        if self.closed:
            if ang > theta + 1e-12:
                raise ValueError(f"|arg z| = {ang:.6f} outside closed sector {theta:.6f}")
        else:
            if ang >= theta - 1e-15:
                raise ValueError(f"|arg z| = {ang:.6f} not inside open sector {theta:.6f}")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "sector_half_angle", theta)


@dataclass(frozen=True)
class DerivativeCoefficients:
    """Coefficient table of an n-th kernel derivative.

    For time derivatives of b the entries are the d_{j,n} with
    d^n/dt^n b = (sum_j d_{j,n} z^{2j} / (4^j t^{j+n})) b, and analogously
    k_{j,n} for B; for z-derivatives the entries are the c_{j,n} with
    d^n/dz^n = (sum_j c_{j,n} z^{2j-n} / t^j) times the kernel.
    """

    order: int
    table: tuple


@lru_cache(maxsize=None)
def _time_poly(mu: complex, n: int) -> tuple:
    # Q_0 = 1, Q_{m+1}(x) = -x Q_m'(x) - (m + mu + x) Q_m(x);
    # d^n/dt^n [t^{-mu} e^{a/t}] = Q_n(a/t) t^{-n} [t^{-mu} e^{a/t}]
    q = [complex(1.0)]
    for m in range(n):
        new = [complex(0.0)] * (len(q) + 1)
        for j, c in enumerate(q):
            new[j] -= (j + m + mu) * c   # -x Q' and -(m+mu) Q
            new[j + 1] -= c              # -x Q
        q = new
    return tuple(q)


@lru_cache(maxsize=None)
def _z_poly(w: complex, n: int) -> tuple:
    # P_0 = 1, P_{m+1}(y) = 2 y P_m'(y) + (w - m - y/2) P_m(y);
    # d^n/dz^n kernel = z^{-n} P_n(z^2/t) kernel   (w = 2 sigma for b, 0 for B)
    p = [complex(1.0)]
    for m in range(n):
        new = [complex(0.0)] * (len(p) + 1)
        for j, c in enumerate(p):
            new[j] += (2 * j + w - m) * c
            new[j + 1] -= 0.5 * c
        p = new
    return tuple(p)


def time_derivative_coefficients(kind: str, n: int, sigma) -> DerivativeCoefficients:
    """d_{j,n} (kind 'b') or k_{j,n} (kind 'B') for the n-th time derivative."""
    s = sigma.sigma if isinstance(sigma, FracOrder) else complex(sigma)
    if kind == "b":
        mu = 1.0 + s
    elif kind == "B":
        mu = 1.0 - s
    else:
        raise ValueError("time-derivative tables exist for kinds 'b' and 'B'")
    q = _time_poly(mu, n)
    # (a/t)^j = (-1)^j (z^2/4)^j / t^j
    table = tuple((-1.0) ** j * q[j] for j in range(len(q)))
    return DerivativeCoefficients(order=n, table=table)


def z_derivative_coefficients(kind: str, n: int, sigma) -> DerivativeCoefficients:
    """c_{j,n} for the n-th z-derivative of kind 'b' or 'B'."""
    s = sigma.sigma if isinstance(sigma, FracOrder) else complex(sigma)
    if kind == "b":
        w = 2.0 * s
    elif kind == "B":
        w = 0.0 + 0.0j
    else:
        raise ValueError("z-derivative tables exist for kinds 'b' and 'B'")
    return DerivativeCoefficients(order=n, table=_z_poly(w, n))


def _falling(s: complex, n: int) -> complex:
    # (s-1)(s-2)...(s-n); equals 1 for n = 0
    out = 1.0 + 0.0j
    for i in range(1, n + 1):
        out *= s - i
    return out


# ---------------------------------------------------------------------------
# internal closed-form function objects


class _Expr:
    """const * (sum_j poly[j] t^{-j}) * t^rho * exp(a/t) * exp(-eps t)."""

    __slots__ = ("const", "rho", "a", "eps", "poly")

    def __init__(self, const, rho, a, eps, poly):
        self.const = complex(const)
        self.rho = complex(rho)
        self.a = complex(a)
        self.eps = float(eps)
        self.poly = tuple(complex(c) for c in poly)

    def __call__(self, t):
        t = np.asarray(t, dtype=complex)
        inv = 1.0 / t
        acc = np.zeros_like(t)
        for c in reversed(self.poly):
            acc = acc * inv + c
        out = self.const * acc * np.exp(self.rho * np.log(t))
        if self.a != 0:
            out = out * np.exp(self.a * inv)
        if self.eps:
            out = out * np.exp(-self.eps * t)
        return out

    def derivative(self):
        new = [0.0 + 0.0j] * (len(self.poly) + 2)
        for j, c in enumerate(self.poly):
            if c == 0:
                continue
            new[j + 1] += c * (self.rho - j)
            if self.a != 0:
                new[j + 2] += -c * self.a
            if self.eps:
                new[j] += -c * self.eps
        while len(new) > 1 and new[-1] == 0:
            new.pop()
        return _Expr(self.const, self.rho, self.a, self.eps, new)


class _BmhExpr:
    """n-th time derivative of (B - h) e_eps, grouped for stable evaluation.

    The j = 0 block of the B-table collapses onto (B - h) itself, which is
    evaluated through expm1; the j >= 1 remainder multiplies plain B.
    """

    __slots__ = ("sigma", "a", "eps", "n")

    def __init__(self, sigma, a, eps, n=0):
        self.sigma = complex(sigma)
        self.a = complex(a)
        self.eps = float(eps)
        self.n = int(n)

    def __call__(self, t):
        t = np.asarray(t, dtype=complex)
        inv = 1.0 / t
        s = self.sigma
        base = np.exp((s - 1.0) * np.log(t)) / gamma(s)
        stable = np.zeros_like(t)
        rem = np.zeros_like(t)
        z2_4 = -self.a
        for m in range(self.n + 1):
            if self.eps == 0.0 and m != self.n:
                continue
            w = math.comb(self.n, m) * (-self.eps) ** (self.n - m)
            k = time_derivative_coefficients("B", m, s).table
            stable = stable + (w * k[0]) * inv ** m
            for j in range(1, len(k)):
                rem = rem + (w * k[j] * z2_4 ** j) * inv ** (j + m)
        out = base * (stable * cexpm1(self.a * inv) + rem * np.exp(self.a * inv))
        if self.eps:
            out = out * np.exp(-self.eps * t)
        return out

    def derivative(self):
        return _BmhExpr(self.sigma, self.a, self.eps, self.n + 1)


class _SumExpr:
    __slots__ = ("parts",)

    def __init__(self, parts):
        self.parts = tuple(parts)

    def __call__(self, t):
        out = self.parts[0](t)
        for p in self.parts[1:]:
            out = out + p(t)
        return out

    def derivative(self):
        return _SumExpr([p.derivative() for p in self.parts])


# ---------------------------------------------------------------------------
# public kernel type


_KINDS = ("b", "B", "B_minus_h", "h", "exp_eps")


@dataclass(frozen=True)
class Kernel:
    """A member of the kernel family; eps != None multiplies by e_eps."""

    kind: str
    sigma: FracOrder | None = None
    z: SectorPoint | None = None
    eps: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind in ("b", "B", "B_minus_h"):
            if self.sigma is None or self.z is None:
                raise ValueError(f"kernel {self.kind!r} needs sigma and z")
        elif self.kind == "h":
            if self.sigma is None:
                raise ValueError("kernel 'h' needs sigma")
            if self.z is not None:
                raise ValueError("kernel 'h' carries no z")
        elif self.kind == "exp_eps":
            if self.eps is None:
                raise ValueError("kernel 'exp_eps' needs eps")
        if self.eps is not None and self.eps <= 0:
            raise ValueError("eps must be positive")

    # closed-form function objects -----------------------------------------

    def _fn0(self):
        eps = self.eps or 0.0
        if self.kind == "exp_eps":
            return _Expr(1.0, 0.0, 0.0, eps, (1.0,))
        s = self.sigma.sigma
        if self.kind == "h":
            return _Expr(1.0 / gamma(s), s - 1.0, 0.0, eps, (1.0,))
        z = self.z.z
        a = -z * z / 4.0
        if self.kind == "b":
            const = cpow(z, 2.0 * s) / (cpow(4.0, s) * gamma(s))
            return _Expr(const, -1.0 - s, a, eps, (1.0,))
        if self.kind == "B":
            return _Expr(1.0 / gamma(s), s - 1.0, a, eps, (1.0,))
        return _BmhExpr(s, a, eps)

    def fn(self, n: int = 0):
        """Closed-form n-th time derivative as a vectorized callable."""
        if n < 0:
            raise ValueError("derivative order must be >= 0")
        if n > MAX_DERIVATIVE_ORDER:
            raise ValueError(
                f"derivative order {n} exceeds the supported cap {MAX_DERIVATIVE_ORDER}"
            )
        f = self._fn0()
        for _ in range(n):
            f = f.derivative()
        return f

    # asymptotics used to drive quadrature ---------------------------------

    def zero_exponent(self) -> float | None:
        """Algebraic exponent at t -> 0+, or None for the essentially flat b."""
        if self.kind == "b":
            return None
        if self.kind == "exp_eps":
            return 0.0
        s = self.sigma.sigma
        if self.kind in ("h", "B", "B_minus_h"):
            return s.real - 1.0
        return 0.0

    def tail(self) -> tuple:
        """('exponential', rate) or ('algebraic', power) at t -> infinity."""
        if self.eps:
            return ("exponential", self.eps)
        if self.kind == "b":
            return ("algebraic", 1.0 + self.sigma.sigma.real)
        if self.kind == "B_minus_h":
            return ("algebraic", 2.0 - self.sigma.sigma.real)
        if self.kind in ("h", "B"):
            return ("nonintegrable", None)
        return ("nonintegrable", None)  # bare exp_eps never reaches here


def eval_kernel(kernel: Kernel, t):
    """Pointwise kernel value at t > 0 (scalar or array)."""
    t_arr = np.asarray(t)
    if np.any(np.real(t_arr) <= 0) and np.all(np.imag(t_arr) == 0):
        raise ValueError("kernel evaluation needs t > 0")
    out = kernel.fn(0)(t_arr)
    if np.ndim(t) == 0:
        return complex(out)
    return out


def time_derivative(kernel: Kernel, n: int, t):
    """Exact n-th time derivative at t (closed form, no differencing)."""
    t_arr = np.asarray(t)
    if np.any(np.real(t_arr) <= 0) and np.all(np.imag(t_arr) == 0):
        raise ValueError("kernel derivative needs t > 0")
    out = kernel.fn(n)(t_arr)
    if np.ndim(t) == 0:
        return complex(out)
    return out


def z_derivative_fn(kernel: Kernel, n: int):
    """Closed-form n-th z-derivative of a 'b' or 'B' kernel (callable in t)."""
    if kernel.kind not in ("b", "B"):
        raise ValueError("z-derivatives exist for kinds 'b' and 'B'")
    if n < 1:
        raise ValueError("z-derivative order must be >= 1")
    s = kernel.sigma.sigma
    z = kernel.z.z
    coeffs = z_derivative_coefficients(kernel.kind, n, s).table
    base = kernel._fn0()
    poly = tuple(coeffs[j] * cpow(z, 2 * j - n) if coeffs[j] != 0 else 0.0
                 for j in range(len(coeffs)))
    return _Expr(base.const, base.rho, base.a, base.eps, poly)


def z_derivative(kernel: Kernel, n: int, t):
    """Exact n-th z-derivative value at t."""
    out = z_derivative_fn(kernel, n)(np.asarray(t))
    if np.ndim(t) == 0:
        return complex(out)
    return out


# ---------------------------------------------------------------------------
# Weyl fractional calculus


def _guard_integrable(kernel_like):
    if isinstance(kernel_like, Kernel):
        if kernel_like.tail()[0] == "nonintegrable":
            raise ValueError(
                f"kernel {kernel_like.kind!r} without exponential weight is not "
                "integrable over (0, inf)"
            )


class _HintedFn:
    """A callable with explicit decay metadata for the Weyl machinery."""

    def __init__(self, fn, zero_exp, tail):
        self._fn = fn
        self._zero = zero_exp
        self._tail = tail

    def __call__(self, t):
        return self._fn(t)


def _expr_metadata(expr):
    """(zero exponent, tail) read off a closed-form kernel expression."""
    if isinstance(expr, _BmhExpr):
        s = complex(expr.sigma).real
        zero = s - 1.0 - expr.n
        if expr.eps:
            tail = ("exponential", expr.eps)
        else:
            tail = ("algebraic", 2.0 + expr.n - s)
        return zero, tail
    if isinstance(expr, _SumExpr):
        metas = [_expr_metadata(p) for p in expr.parts]
        zeros = [m[0] for m in metas]
        zero = None if any(z is None for z in zeros) else min(zeros)
        if all(m[1][0] == "exponential" for m in metas):
            tail = ("exponential", min(m[1][1] for m in metas))
        else:
            alg = [m[1][1] for m in metas if m[1][0] == "algebraic"]
            tail = ("algebraic", min(alg))
        return zero, tail
    nz = [j for j, c in enumerate(expr.poly) if c != 0]
    if not nz:
        return 0.0, ("exponential", 1.0)  # identically zero
    jmin, jmax = min(nz), max(nz)
    if expr.a != 0 and expr.a.real < 0:
        zero = None  # essentially flat at t -> 0+
    else:
        zero = expr.rho.real - jmax
    if expr.eps > 0:
        tail = ("exponential", expr.eps)
    else:
        tail = ("algebraic", -expr.rho.real + jmin)
    return zero, tail


class ExprKernel:
    """A closed-form kernel expression with decay metadata.

    Wraps the exact symbolic derivative chains, so derived kernels (z- or
    time-derivatives of b and B, differences, e_eps products) keep the same
    interface Kernel offers to pi_alpha and the Weyl calculus.
    """

    def __init__(self, expr, zero_exp, tail):
        self._expr = expr
        self._zero = zero_exp
        self._tail = tail

    @classmethod
    def from_expr(cls, expr) -> "ExprKernel":
        zero, tail = _expr_metadata(expr)
        return cls(expr, zero, tail)

    def __call__(self, t):
        return self._expr(t)

    def fn(self, n: int = 0):
        f = self._expr
        for _ in range(n):
            f = f.derivative()
        return f

    def zero_exponent(self):
        return self._zero

    def tail(self):
        return self._tail

    def derived(self, n: int = 1) -> "ExprKernel":
        return ExprKernel.from_expr(self.fn(n))


def _fd_deriv_provider(fn):
    """Central-difference derivatives (orders 1 and 2) for sampled integrands."""

    def deriv(n):
        if n == 0:
            return fn
        if n > 2:
            raise ValueError("sampled integrands support derivatives up to order 2")
        # fourth-order stencils keep the step large enough that quadrature
        # noise in fn does not dominate
        stencil = {1: ([1 / 12, -8 / 12, 8 / 12, -1 / 12], [-2, -1, 1, 2]),
                   2: ([-1 / 12, 16 / 12, -30 / 12, 16 / 12, -1 / 12], [-2, -1, 0, 1, 2])}
        w, off = stencil[n]

        def fd(t, n=n):
            t = np.asarray(t, dtype=float)
            h = np.maximum(3e-3 * np.abs(t), 1e-5)
            out = sum(c * np.asarray(fn(t + k * h)) for c, k in zip(w, off))
            return out / h ** n

        return fd

    return deriv


def _as_fn(phi):
    """(value callable, derivative provider, zero exponent, tail) for phi."""
    if isinstance(phi, (Kernel, ExprKernel)):
        return phi.fn(0), phi.fn, phi.zero_exponent(), phi.tail()
    if isinstance(phi, _HintedFn):
        return phi._fn, _fd_deriv_provider(phi._fn), phi._zero, phi._tail
    if isinstance(phi, (_Expr, _BmhExpr, _SumExpr)):
        def deriv(n, phi=phi):
            f = phi
            for _ in range(n):
                f = f.derivative()
            return f
        return phi, deriv, None, None
    if callable(phi):
        return phi, _fd_deriv_provider(phi), None, None
    raise TypeError(f"cannot interpret {phi!r} as a half-line function")


def _halfline_hints(zero_exp, tail):
    hints = []
    if zero_exp is None:
        hints.append(DecayHint("essential-singularity-at-zero"))
    elif zero_exp < 0.0:
        hints.append(DecayHint("algebraic-singularity-at-zero", exponent=zero_exp))
    if tail is not None:
        kind, par = tail
        if kind == "exponential":
            hints.append(DecayHint("exponential-at-infinity"))
        elif kind == "algebraic":
            hints.append(DecayHint("algebraic-at-infinity", power=par))
    return hints


def weyl_integral(phi, beta: float, s: float, tol: float = 1e-12):
    """Weyl fractional integral W^{-beta} phi(s) = (1/Gamma(beta))
    int_s^inf (t-s)^{beta-1} phi(t) dt, for beta > 0."""
    if beta <= 0:
        raise ValueError("weyl_integral needs beta > 0")
    _guard_integrable(phi)
    fn, _, zero_exp, tail = _as_fn(phi)
    gb = gamma(beta)

    def integrand(tau):
        return tau ** (beta - 1.0) * np.asarray(fn(s + tau)) / gb

    q0 = beta - 1.0
    if s == 0.0 and zero_exp is not None:
        q0 += zero_exp
    if q0 <= -1.0:
        raise ValueError("Weyl integral diverges at the lower endpoint")
    t_kind, t_par = tail if tail is not None else ("exponential", None)
    if t_kind == "algebraic":
        power = t_par - (beta - 1.0)
        if power <= 1.0:
            raise ValueError("Weyl integral diverges at infinity (tail bound fails)")
        hints = [DecayHint("algebraic-singularity-at-zero", exponent=min(q0, 0.0)),
                 DecayHint("algebraic-at-infinity", power=power)]
    else:
        hints = _halfline_hints(min(q0, 0.0), ("exponential", 1.0))
    res = integrate_halfline(integrand, hints, tol=tol)
    return res.value


def weyl_derivative(phi, alpha: float, s, tol: float = 1e-12):
    """Weyl fractional derivative W^alpha phi(s) for alpha > 0.

    Integer alpha is the exact (-1)^n phi^(n)(s); fractional alpha is
    computed derivative-first as W^{-(n-alpha)} applied to (-1)^n phi^(n)
    with n = floor(alpha) + 1.
    """
    if alpha < 0:
        raise ValueError("use weyl_integral for negative orders")
    _, deriv, zero_exp, tail = _as_fn(phi)
    if alpha == int(alpha):
        n = int(alpha)
        out = np.asarray(deriv(n)(np.asarray(s))) * (-1.0) ** n
        if np.ndim(s) == 0:
            return complex(out)
        return out
    n = int(math.floor(alpha)) + 1
    beta = n - alpha
    dn = deriv(n)
    sign = (-1.0) ** n

    def psi(t):
        return sign * np.asarray(dn(t))

    psi_zero = None if zero_exp is None else zero_exp - n
    psi_tail = tail
    if tail is not None and tail[0] == "algebraic":
        psi_tail = ("algebraic", tail[1] + n)
    wrapped = _HintedFn(psi, psi_zero, psi_tail)
    return weyl_integral(wrapped, beta, s, tol=tol)


def sobolev_norm(phi, alpha: float, tol: float = 1e-11) -> float:
    """Weighted-L1 norm (1/Gamma(alpha+1)) int_0^inf |W^alpha phi(t)| t^alpha dt."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    _guard_integrable(phi)
    _, deriv, zero_exp, tail = _as_fn(phi)
    ga1 = gamma(alpha + 1.0)
    if alpha == int(alpha):
        n = int(alpha)
        dn = deriv(n)

        def integrand(t):
            return np.abs(np.asarray(dn(t))) * t ** alpha / ga1
    else:
        def integrand(t):
            t = np.atleast_1d(t)
            vals = np.array([weyl_derivative(phi, alpha, float(tk), tol=tol * 10)
                             for tk in t])
            return np.abs(vals) * t ** alpha / ga1

    q0 = None if zero_exp is None else min(zero_exp - int(alpha) + alpha, 0.0)
    t_hs = tail
    if tail is not None and tail[0] == "algebraic":
        t_hs = ("algebraic", tail[1] + int(alpha) - alpha + alpha)  # power shifts cancel
    hints = _halfline_hints(q0, t_hs if t_hs is not None else ("exponential", 1.0))
    res = integrate_halfline(integrand, hints, tol=tol)
    return float(np.real(res.value))


def convolve_halfline(phi, psi, s: float, tol: float = 1e-11):
    """(phi * psi)(s) = int_0^s phi(s-t) psi(t) dt with graded endpoints.

    Each half of the interval is integrated in the variable measuring the
    distance to its own endpoint, so endpoint singularities see their
    argument exactly (no cancellation through s - t).
    """
    if s <= 0:
        raise ValueError("convolution needs s > 0")
    s = float(s)
    fphi, _, q_phi, _ = _as_fn(phi)
    fpsi, _, q_psi, _ = _as_fn(psi)
    mid = 0.5 * s

    def left(t):  # t near 0: psi's singularity
        return np.asarray(fphi(s - t)) * np.asarray(fpsi(t))

    def right(d):  # d = s - t near 0: phi's singularity
        return np.asarray(fphi(d)) * np.asarray(fpsi(s - d))

    total = 0.0 + 0.0j
    err = 0.0
    for g, q in ((left, q_psi), (right, q_phi)):
        ql = q if (q is not None and q < 0) else None
        res = _graded_interval(g, 0.0, mid, tol, q_left=ql)
        total += res.value
        err += res.error_estimate
    return total
