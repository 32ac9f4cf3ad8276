"""Lattice domain types, right-hand sides, and algebraic gates.

Three coupled-mode lattice systems share one geometry: N nodes placed at
x_n = -L + n*h, n = 0..N-1, with spacing h = 2L/N and coupling k = 1/h^2.

* ``dnls_rhs``    - cubic Schrodinger lattice with linear gain ``gamma`` and
                    nonlinear loss ``delta``, periodic closure:
                    i du/dt + k(u_{n+1} - 2u_n + u_{n-1}) + |u_n|^2 u_n
                        = i*gamma*u_n + i*delta*|u_n|^2 u_n
* ``al_rhs``      - the integrable Ablowitz-Ladik lattice, whose cubic term
                    couples neighbors:  i dphi/dt + k*Delta_d phi
                        + |phi_n|^2 (phi_{n-1} + phi_{n+1}) = 0
* ``shifted_rhs`` - the background-shifted system for U_n = u_n e^{-iA^2 t} - A,
                    integrated under zero Dirichlet closure.  Its constant
                    forcing i(gamma*A + delta*A^3) vanishes exactly at the
                    critical background A = sqrt(-gamma/delta), which is the
                    algebraic gate tested by ``solvability_gate``.

States are value-semantic; every operation here is a pure function of its
inputs, so parameter sweeps can evaluate them concurrently.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigError, DomainError, LengthMismatch, WavenumberError

__all__ = [
    "BoundaryKind",
    "LatticeConfig",
    "ComplexState",
    "NodeGrid",
    "BackgroundSpec",
    "GeneralizedBCSpec",
    "PlaneWaveIC",
    "AlgebraicBumpIC",
    "SechBumpIC",
    "node_grid",
    "central_node_index",
    "lattice_norm",
    "critical_amplitude",
    "solvability_gate",
    "generalized_gate",
    "discrete_laplacian",
    "dnls_rhs",
    "al_rhs",
    "shifted_rhs",
    "make_initial_condition",
    "sech",
]

# Overflow guard for sech tails: exp(700) is near the float64 ceiling and
# the profile has underflowed to 0 well before that.
_SECH_CLAMP = 700.0


class BoundaryKind(Enum):
    PERIODIC = "periodic"
    DIRICHLET_ZERO = "dirichlet_zero"


@dataclass(frozen=True)
class LatticeConfig:
    """Geometry, coupling, and gain/loss parameters shared by all systems.

    ``h`` and ``k`` default to 2L/N and 1/h^2.  If given explicitly they must
    satisfy h*N == 2L exactly and k*h^2 == 1 to machine precision.
    """

    L: float
    N: int
    gamma: float
    delta: float
    bc: BoundaryKind = BoundaryKind.PERIODIC
    h: float | None = None
    k: float | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.N, (int, np.integer)) or isinstance(self.N, bool):
            raise ConfigError(f"N must be an integer, got {self.N!r}")
        if self.N < 4:
            raise ConfigError(f"N must be at least 4, got {self.N}")
        if not (math.isfinite(self.L) and self.L > 0):
            raise ConfigError(f"L must be positive and finite, got {self.L}")
        for name in ("gamma", "delta"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if not isinstance(self.bc, BoundaryKind):
            raise ConfigError(f"bc must be a BoundaryKind, got {self.bc!r}")

        if self.h is None:
            object.__setattr__(self, "h", 2.0 * self.L / self.N)
        else:
            if not (math.isfinite(self.h) and self.h > 0):
                raise ConfigError(f"h must be positive and finite, got {self.h}")
            if self.h * self.N != 2.0 * self.L:
                raise ConfigError(
                    f"h*N must equal 2L exactly: h*N={self.h * self.N!r}, 2L={2.0 * self.L!r}"
                )
        if self.k is None:
            object.__setattr__(self, "k", 1.0 / (self.h * self.h))
        else:
            if not (math.isfinite(self.k) and self.k > 0):
                raise ConfigError(f"k must be positive and finite, got {self.k}")
            if abs(self.k * self.h * self.h - 1.0) > 1e-12:
                raise ConfigError(
                    f"k must equal 1/h^2 to machine precision, got k*h^2={self.k * self.h ** 2!r}"
                )


@dataclass(eq=False)
class ComplexState:
    """Length-N complex lattice state at one time stamp."""

    values: np.ndarray
    t: float = 0.0

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.complex128)
        if v.ndim != 1:
            raise DomainError(f"state must be one-dimensional, got shape {v.shape}")
        if v.size == 0:
            raise DomainError("state must contain at least one node")
        if not np.all(np.isfinite(v)):
            raise DomainError("state contains NaN or Inf entries")
        if not math.isfinite(self.t):
            raise DomainError(f"time stamp must be finite, got {self.t}")
        self.values = v

    def __len__(self) -> int:
        return self.values.size

    def copy(self) -> "ComplexState":
        return ComplexState(self.values.copy(), t=self.t)


@dataclass(frozen=True, eq=False)
class NodeGrid:
    """Node coordinates x_n = -L + n*h, n = 0..N-1."""

    x: np.ndarray


def node_grid(cfg: LatticeConfig) -> NodeGrid:
    return NodeGrid(x=-cfg.L + cfg.h * np.arange(cfg.N))


def central_node_index(cfg: LatticeConfig) -> int:
    """Index of the node at x = 0 (requires even N)."""
    if cfg.N % 2 != 0:
        raise ConfigError("central node tracking requires an even node count")
    return cfg.N // 2


def lattice_norm(values: np.ndarray, cfg: LatticeConfig) -> float:
    """Spacing-weighted l2 norm, (h * sum |v_n|^2)^(1/2)."""
    return math.sqrt(cfg.h) * float(np.linalg.norm(values))


# ---------------------------------------------------------------------------
# Algebraic gates
# ---------------------------------------------------------------------------

def _require_gain_loss(gamma: float, delta: float) -> None:
    if not (gamma > 0.0):
        raise DomainError(f"linear gain required: gamma must be > 0, got {gamma}")
    if not (delta < 0.0):
        raise DomainError(f"nonlinear loss required: delta must be < 0, got {delta}")


def critical_amplitude(gamma: float, delta: float) -> float:
    """Background amplitude sqrt(-gamma/delta) at which gain and loss balance.

    This is the only background amplitude for which the shifted system's
    constant forcing vanishes, hence the only one admitting localized
    solutions on an infinite lattice.
    """
    _require_gain_loss(gamma, delta)
    return math.sqrt(-gamma / delta)


def solvability_gate(A: float, gamma: float, delta: float, tol: float = 1e-9) -> bool:
    """True iff the background A sits at the critical amplitude within tol.

    The scenario runner uses this verdict to label runs "infinite-lattice
    relevant" (gate passes) versus "finite-lattice only".
    """
    if not (tol > 0.0):
        raise DomainError(f"tol must be positive, got {tol}")
    return abs(A - critical_amplitude(gamma, delta)) <= tol


@dataclass(frozen=True)
class BackgroundSpec:
    """Background amplitude paired with the critical amplitude of (gamma, delta)."""

    A: float
    A_star: float

    def __post_init__(self) -> None:
        if self.A < 0 or self.A_star < 0:
            raise DomainError("amplitudes must be nonnegative")

    @classmethod
    def from_gain_loss(cls, A: float, gamma: float, delta: float) -> "BackgroundSpec":
        a_star = critical_amplitude(gamma, delta)
        # Consistency of the defining relation A_star^2 * delta + gamma = 0.
        if abs(a_star * a_star * delta + gamma) > 1e-12 * abs(gamma):
            raise DomainError("critical amplitude inconsistent with gain/loss pair")
        return cls(A=A, A_star=a_star)


@dataclass(frozen=True)
class GeneralizedBCSpec:
    """Two-sided boundary values zeta_-, zeta_+ of common modulus zeta,
    rotating at frequency G^2."""

    zeta_minus: complex
    zeta_plus: complex
    zeta: float
    G: float

    def __post_init__(self) -> None:
        if self.zeta < 0:
            raise DomainError("zeta must be nonnegative")
        scale = max(self.zeta, 1.0)
        for side, val in (("zeta_minus", self.zeta_minus), ("zeta_plus", self.zeta_plus)):
            if abs(abs(val) - self.zeta) > 1e-12 * scale:
                raise DomainError(f"|{side}| must equal zeta within 1e-12")


def generalized_gate(
    spec: GeneralizedBCSpec, gamma: float, delta: float, tol: float = 1e-9
) -> bool:
    """Solvability gate for step-like boundary values: G^2 == zeta^2 and
    zeta == critical amplitude, both within tol."""
    if not (tol > 0.0):
        raise DomainError(f"tol must be positive, got {tol}")
    a_star = critical_amplitude(gamma, delta)
    return abs(spec.G**2 - spec.zeta**2) <= tol and abs(spec.zeta - a_star) <= tol


# ---------------------------------------------------------------------------
# Right-hand sides
# ---------------------------------------------------------------------------

def _check_length(values: np.ndarray, cfg: LatticeConfig) -> None:
    if values.size != cfg.N:
        raise LengthMismatch(f"state has {values.size} nodes, lattice expects {cfg.N}")


def _second_difference(u: np.ndarray, bc: BoundaryKind) -> np.ndarray:
    """u_{n+1} - 2 u_n + u_{n-1} with the configured boundary closure."""
    d = np.empty_like(u)
    d[1:-1] = u[2:] - 2.0 * u[1:-1] + u[:-2]
    if bc is BoundaryKind.PERIODIC:
        d[0] = u[1] - 2.0 * u[0] + u[-1]
        d[-1] = u[0] - 2.0 * u[-1] + u[-2]
    else:  # out-of-range neighbors are zero
        d[0] = u[1] - 2.0 * u[0]
        d[-1] = -2.0 * u[-1] + u[-2]
    return d


def _neighbor_sum(u: np.ndarray, bc: BoundaryKind) -> np.ndarray:
    """u_{n+1} + u_{n-1} with the configured boundary closure."""
    s = np.empty_like(u)
    s[1:-1] = u[2:] + u[:-2]
    if bc is BoundaryKind.PERIODIC:
        s[0] = u[1] + u[-1]
        s[-1] = u[0] + u[-2]
    else:
        s[0] = u[1]
        s[-1] = u[-2]
    return s


def laplacian_values(u: np.ndarray, cfg: LatticeConfig) -> np.ndarray:
    _check_length(u, cfg)
    return cfg.k * _second_difference(u, cfg.bc)


def dnls_rhs_values(u: np.ndarray, cfg: LatticeConfig) -> np.ndarray:
    if cfg.bc is not BoundaryKind.PERIODIC:
        raise ConfigError(
            "the unshifted gain/loss lattice runs under periodic closure only; "
            "use shifted_rhs for Dirichlet truncation"
        )
    _check_length(u, cfg)
    lap = cfg.k * _second_difference(u, cfg.bc)
    cubic = (u.real**2 + u.imag**2) * u
    return 1j * (lap + cubic) + cfg.gamma * u + cfg.delta * cubic


def al_rhs_values(phi: np.ndarray, cfg: LatticeConfig) -> np.ndarray:
    if cfg.bc is not BoundaryKind.PERIODIC:
        raise ConfigError("the Ablowitz-Ladik lattice runs under periodic closure")
    _check_length(phi, cfg)
    s = _neighbor_sum(phi, cfg.bc)
    return 1j * (cfg.k * (s - 2.0 * phi) + (phi.real**2 + phi.imag**2) * s)


def shifted_rhs_values(U: np.ndarray, cfg: LatticeConfig, A: float) -> np.ndarray:
    if cfg.bc is not BoundaryKind.DIRICHLET_ZERO:
        raise ConfigError("the background-shifted system runs under Dirichlet closure")
    if not (math.isfinite(A) and A >= 0):
        raise DomainError(f"background amplitude must be nonnegative, got {A}")
    _check_length(U, cfg)
    lap = cfg.k * _second_difference(U, cfg.bc)
    w = U + A
    density = w.real**2 + w.imag**2
    return 1j * (lap - A * A * w + density * w) + cfg.gamma * w + cfg.delta * density * w


def discrete_laplacian(state: ComplexState, cfg: LatticeConfig) -> ComplexState:
    """k(u_{n+1} - 2u_n + u_{n-1}) per node; linear in its input."""
    return ComplexState(laplacian_values(state.values, cfg), t=state.t)


def dnls_rhs(state: ComplexState, cfg: LatticeConfig) -> ComplexState:
    """du_n/dt = i[lap(u) + |u_n|^2 u_n] + gamma*u_n + delta*|u_n|^2 u_n."""
    return ComplexState(dnls_rhs_values(state.values, cfg), t=state.t)


def al_rhs(state: ComplexState, cfg: LatticeConfig) -> ComplexState:
    """dphi_n/dt = i[k(phi_{n+1} - 2phi_n + phi_{n-1}) + |phi_n|^2(phi_{n-1} + phi_{n+1})]."""
    return ComplexState(al_rhs_values(state.values, cfg), t=state.t)


def shifted_rhs(state: ComplexState, cfg: LatticeConfig, A: float) -> ComplexState:
    """Time derivative of the background-shifted field U_n.

    The original field is recovered as u_n = (U_n + A) exp(iA^2 t).  At
    U == 0 the derivative equals gamma*A + delta*A^3 per node, the
    computational witness of the solvability obstruction when A is off
    the critical amplitude.
    """
    return ComplexState(shifted_rhs_values(state.values, cfg, A), t=state.t)


# ---------------------------------------------------------------------------
# Initial conditions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlaneWaveIC:
    """(amplitude + perturbation) * exp(i * mode * pi * x_n / L)."""

    amplitude: float
    perturbation: float
    mode: int


@dataclass(frozen=True)
class AlgebraicBumpIC:
    """background + lam1 / (lam2 + lam3 * x^2), quadratically decaying."""

    background: float
    lam1: float
    lam2: float
    lam3: float


@dataclass(frozen=True)
class SechBumpIC:
    """background + sigma * sech(rho * x), exponentially decaying."""

    background: float
    sigma: float
    rho: float


InitialCondition = PlaneWaveIC | AlgebraicBumpIC | SechBumpIC


def sech(x: np.ndarray | float) -> np.ndarray | float:
    """2 / (e^x + e^-x) with argument clamping; underflows to 0 for |x| > 700."""
    x = np.asarray(x, dtype=np.float64)
    ax = np.minimum(np.abs(x), _SECH_CLAMP)
    out = np.where(np.abs(x) > _SECH_CLAMP, 0.0, 2.0 / (np.exp(ax) + np.exp(-ax)))
    return out if out.ndim else float(out)


def _validate_mode(mode: int, N: int) -> int:
    if isinstance(mode, bool) or not isinstance(mode, (int, np.integer)):
        if isinstance(mode, float) and mode.is_integer():
            mode = int(mode)
        else:
            raise WavenumberError(f"mode index must be an integer, got {mode!r}")
    if not (0 <= mode <= N / 2):
        raise WavenumberError(f"mode index must lie in [0, N/2] = [0, {N / 2:g}], got {mode}")
    return int(mode)


def make_initial_condition(ic: InitialCondition, cfg: LatticeConfig) -> ComplexState:
    """Evaluate an initial-condition descriptor on the lattice grid at t = 0."""
    x = node_grid(cfg).x
    if isinstance(ic, PlaneWaveIC):
        mode = _validate_mode(ic.mode, cfg.N)
        q = mode * math.pi / cfg.L
        values = (ic.amplitude + ic.perturbation) * np.exp(1j * q * x)
    elif isinstance(ic, AlgebraicBumpIC):
        if ic.lam2 <= 0:
            raise DomainError(f"lam2 must be positive, got {ic.lam2}")
        if ic.lam3 < 0:
            raise DomainError(f"lam3 must be nonnegative, got {ic.lam3}")
        values = (ic.background + ic.lam1 / (ic.lam2 + ic.lam3 * x * x)).astype(np.complex128)
    elif isinstance(ic, SechBumpIC):
        if ic.rho <= 0:
            raise DomainError(f"rho must be positive, got {ic.rho}")
        values = (ic.background + ic.sigma * sech(ic.rho * x)).astype(np.complex128)
    else:
        raise ConfigError(f"unknown initial-condition kind: {ic!r}")
    return ComplexState(values, t=0.0)
