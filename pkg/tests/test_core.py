"""Unit tests for the lattice domain types, gates, and right-hand sides."""
import math

import numpy as np
import pytest

from dnlslab.core import (
    AlgebraicBumpIC,
    BackgroundSpec,
    BoundaryKind,
    ComplexState,
    GeneralizedBCSpec,
    LatticeConfig,
    PlaneWaveIC,
    SechBumpIC,
    al_rhs,
    central_node_index,
    critical_amplitude,
    discrete_laplacian,
    dnls_rhs,
    generalized_gate,
    lattice_norm,
    make_initial_condition,
    node_grid,
    sech,
    shifted_rhs,
    solvability_gate,
)
from dnlslab.errors import (
    ConfigError,
    DomainError,
    LengthMismatch,
    WavenumberError,
)


@pytest.fixture
def cfg100():
    return LatticeConfig(L=50.0, N=100, gamma=1.5, delta=-1.5)


@pytest.fixture
def cfg100_dirichlet():
    return LatticeConfig(L=50.0, N=100, gamma=0.0025, delta=-0.01,
                         bc=BoundaryKind.DIRICHLET_ZERO)


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

class TestLatticeConfig:
    def test_derived_spacing_and_coupling(self, cfg100):
        assert cfg100.h == 1.0
        assert cfg100.k == 1.0
        assert cfg100.h * cfg100.N == 2.0 * cfg100.L

    def test_explicit_spacing_must_be_exact(self):
        LatticeConfig(L=50.0, N=100, gamma=1.0, delta=-1.0, h=1.0)  # fine
        with pytest.raises(ConfigError):
            LatticeConfig(L=50.0, N=100, gamma=1.0, delta=-1.0, h=1.0000001)

    def test_explicit_coupling_checked(self):
        with pytest.raises(ConfigError):
            LatticeConfig(L=50.0, N=100, gamma=1.0, delta=-1.0, k=1.01)

    def test_minimum_node_count(self):
        with pytest.raises(ConfigError):
            LatticeConfig(L=1.0, N=3, gamma=1.0, delta=-1.0)

    def test_rejects_nonfinite_parameters(self):
        with pytest.raises(ConfigError):
            LatticeConfig(L=50.0, N=100, gamma=math.nan, delta=-1.0)


class TestComplexState:
    def test_rejects_nan(self):
        v = np.ones(8, dtype=complex)
        v[3] = np.nan
        with pytest.raises(DomainError):
            ComplexState(v)

    def test_rejects_inf(self):
        v = np.ones(8, dtype=complex)
        v[0] = np.inf
        with pytest.raises(DomainError):
            ComplexState(v)

    def test_rejects_non_1d(self):
        with pytest.raises(DomainError):
            ComplexState(np.ones((2, 4), dtype=complex))

    def test_coerces_real_input(self):
        st = ComplexState(np.ones(4))
        assert st.values.dtype == np.complex128
        assert len(st) == 4


def test_node_grid_invariants(cfg100):
    x = node_grid(cfg100).x
    assert x[0] == -cfg100.L
    assert np.allclose(np.diff(x), cfg100.h)
    assert x.size == cfg100.N


def test_central_node_index(cfg100):
    idx = central_node_index(cfg100)
    assert node_grid(cfg100).x[idx] == 0.0
    with pytest.raises(ConfigError):
        central_node_index(LatticeConfig(L=2.5, N=5, gamma=1.0, delta=-1.0))


# ---------------------------------------------------------------------------
# Gates
# ---------------------------------------------------------------------------

class TestCriticalAmplitude:
    @pytest.mark.parametrize(
        "gamma,delta,expected",
        [(1.5, -1.5, 1.0), (0.0025, -0.01, 0.5), (0.01, -0.01, 1.0)],
    )
    def test_reference_values_exact(self, gamma, delta, expected):
        assert critical_amplitude(gamma, delta) == expected

    @pytest.mark.parametrize("gamma,delta", [(0.0, -1.0), (-1.0, -1.0), (1.0, 0.0), (1.0, 1.0)])
    def test_requires_gain_loss_regime(self, gamma, delta):
        with pytest.raises(DomainError):
            critical_amplitude(gamma, delta)


def test_solvability_gate_examples():
    assert solvability_gate(0.5, 0.0025, -0.01, 1e-9) is True
    assert solvability_gate(0.5, 0.01, -0.01, 1e-9) is False
    assert solvability_gate(1.0, 1.5, -1.5, 1e-9) is True
    with pytest.raises(DomainError):
        solvability_gate(0.5, -1.0, -0.01)


def test_generalized_gate_examples():
    z = 0.5 * complex(math.cos(math.pi / 4), math.sin(math.pi / 4))
    spec = GeneralizedBCSpec(zeta_minus=z, zeta_plus=z.conjugate(), zeta=0.5, G=0.5)
    assert generalized_gate(spec, 0.0025, -0.01, 1e-9) is True

    spec = GeneralizedBCSpec(zeta_minus=0.5, zeta_plus=0.5, zeta=0.5, G=0.7)
    assert generalized_gate(spec, 0.0025, -0.01, 1e-9) is False

    spec = GeneralizedBCSpec(zeta_minus=1.0, zeta_plus=1.0, zeta=1.0, G=1.0)
    assert generalized_gate(spec, 0.0025, -0.01, 1e-9) is False


def test_generalized_spec_modulus_invariant():
    with pytest.raises(DomainError):
        GeneralizedBCSpec(zeta_minus=0.5, zeta_plus=0.4, zeta=0.5, G=0.5)


def test_background_spec_factory():
    bg = BackgroundSpec.from_gain_loss(0.5, 0.0025, -0.01)
    assert bg.A_star == 0.5
    with pytest.raises(DomainError):
        BackgroundSpec(A=-1.0, A_star=0.5)


# ---------------------------------------------------------------------------
# Discrete Laplacian
# ---------------------------------------------------------------------------

class TestDiscreteLaplacian:
    def test_constant_sequence_vanishes(self, cfg100):
        st = ComplexState(np.full(100, 2.3 - 0.7j))
        out = discrete_laplacian(st, cfg100).values
        assert np.max(np.abs(out)) < 1e-12

    def test_impulse_stencil(self):
        cfg = LatticeConfig(L=2.0, N=4, gamma=0.1, delta=-0.1)
        st = ComplexState(np.array([1.0, 0.0, 0.0, 0.0], dtype=complex))
        out = discrete_laplacian(st, cfg).values
        assert np.array_equal(out, np.array([-2.0, 1.0, 0.0, 1.0], dtype=complex))

    def test_dirichlet_boundary_uses_zero_neighbors(self, cfg100_dirichlet):
        st = ComplexState(np.ones(100, dtype=complex))
        out = discrete_laplacian(st, cfg100_dirichlet).values
        assert out[0] == -1.0 and out[-1] == -1.0
        assert np.max(np.abs(out[1:-1])) == 0.0

    def test_plane_wave_eigenrelation_every_mode(self, cfg100):
        x = node_grid(cfg100).x
        N = cfg100.N
        for K in range(0, N // 2 + 1):
            q = K * math.pi / cfg100.L
            wave = np.exp(1j * q * x)
            out = discrete_laplacian(ComplexState(wave), cfg100).values
            # brute-force per-node stencil as the independent oracle
            oracle = np.array(
                [cfg100.k * (wave[(n + 1) % N] - 2 * wave[n] + wave[(n - 1) % N])
                 for n in range(N)]
            )
            assert np.max(np.abs(out - oracle)) < 1e-14, K
            eig = -4.0 * cfg100.k * math.sin(0.5 * cfg100.h * q) ** 2
            err = np.max(np.abs(out - eig * wave))
            assert err < 1e-10 * max(abs(eig), 1.0), K

    def test_linearity(self, cfg100):
        rng = np.random.default_rng(11)
        cfg = LatticeConfig(L=32.0, N=64, gamma=1.0, delta=-1.0)
        u = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        v = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        a, b = 0.7 - 0.3j, -1.2 + 0.9j
        lhs = discrete_laplacian(ComplexState(a * u + b * v), cfg).values
        rhs = (a * discrete_laplacian(ComplexState(u), cfg).values
               + b * discrete_laplacian(ComplexState(v), cfg).values)
        assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_length_mismatch(self, cfg100):
        with pytest.raises(LengthMismatch):
            discrete_laplacian(ComplexState(np.ones(64, dtype=complex)), cfg100)


# ---------------------------------------------------------------------------
# Right-hand sides
# ---------------------------------------------------------------------------

class TestDnlsRhs:
    def test_zero_is_fixed_point(self, cfg100):
        out = dnls_rhs(ComplexState(np.zeros(100, dtype=complex)), cfg100).values
        assert np.all(out == 0)

    def test_exact_plane_wave_cancellation(self, cfg100):
        a_star = critical_amplitude(cfg100.gamma, cfg100.delta)
        x = node_grid(cfg100).x
        q = 45 * math.pi / cfg100.L
        omega = 4.0 * cfg100.k * math.sin(0.5 * cfg100.h * q) ** 2 - a_star**2
        w = ComplexState(a_star * np.exp(1j * q * x))
        residual = dnls_rhs(w, cfg100).values - (-1j * omega * w.values)
        assert np.max(np.abs(residual)) < 1e-12

    def test_single_node_hand_value(self):
        cfg = LatticeConfig(L=2.0, N=4, gamma=0.1, delta=-0.1)
        st = ComplexState(np.array([1.0, 0.0, 0.0, 0.0], dtype=complex))
        out = dnls_rhs(st, cfg).values
        # node 0: i(-2 + 1) + 0.1 - 0.1 = -i; nodes 1 and 3 see the impulse
        assert out[0] == pytest.approx(-1j)
        assert out[1] == pytest.approx(1j)
        assert out[2] == 0
        assert out[3] == pytest.approx(1j)

    def test_rejects_dirichlet_closure(self, cfg100_dirichlet):
        with pytest.raises(ConfigError):
            dnls_rhs(ComplexState(np.ones(100, dtype=complex)), cfg100_dirichlet)


class TestAlRhs:
    def test_zero_is_fixed_point(self, cfg100):
        out = al_rhs(ComplexState(np.zeros(100, dtype=complex)), cfg100).values
        assert np.all(out == 0)

    def test_constant_background(self, cfg100):
        a = 0.8
        out = al_rhs(ComplexState(np.full(100, a, dtype=complex)), cfg100).values
        assert np.max(np.abs(out - 2j * a**3)) < 1e-15

    def test_rejects_dirichlet_closure(self, cfg100_dirichlet):
        with pytest.raises(ConfigError):
            al_rhs(ComplexState(np.ones(100, dtype=complex)), cfg100_dirichlet)


class TestShiftedRhs:
    def test_vanishes_exactly_at_critical_background(self, cfg100_dirichlet):
        a_star = critical_amplitude(0.0025, -0.01)
        zero = ComplexState(np.zeros(100, dtype=complex))
        out = shifted_rhs(zero, cfg100_dirichlet, a_star).values
        assert np.all(out == 0)

    @pytest.mark.parametrize("A", [0.3, 0.4, 0.6, 0.8, 1.0])
    def test_forcing_norm_off_critical(self, cfg100_dirichlet, A):
        cfg = cfg100_dirichlet
        zero = ComplexState(np.zeros(100, dtype=complex))
        norm = lattice_norm(shifted_rhs(zero, cfg, A).values, cfg)
        expected = abs(cfg.gamma * A + cfg.delta * A**3) * math.sqrt(cfg.N * cfg.h)
        assert norm == pytest.approx(expected, rel=1e-12)

    def test_rejects_periodic_closure(self, cfg100):
        with pytest.raises(ConfigError):
            shifted_rhs(ComplexState(np.zeros(100, dtype=complex)), cfg100, 1.0)


# ---------------------------------------------------------------------------
# Initial conditions
# ---------------------------------------------------------------------------

class TestInitialConditions:
    def test_plane_wave_modulus_and_phase(self, cfg100):
        st = make_initial_condition(PlaneWaveIC(1.0, 2.0, 45), cfg100)
        assert np.allclose(np.abs(st.values), 3.0)
        x = node_grid(cfg100).x
        expected = 3.0 * np.exp(1j * 45 * math.pi * x / cfg100.L)
        assert np.max(np.abs(st.values - expected)) < 1e-12

    @pytest.mark.parametrize("mode", [-1, 51, 0.5, 7.3])
    def test_plane_wave_mode_validation(self, cfg100, mode):
        with pytest.raises(WavenumberError):
            make_initial_condition(PlaneWaveIC(1.0, 0.0, mode), cfg100)

    def test_algebraic_bump_center_value(self):
        cfg = LatticeConfig(L=200.0, N=400, gamma=0.0025, delta=-0.01)
        st = make_initial_condition(AlgebraicBumpIC(0.5, 1.0, 1.0, 4.0), cfg)
        assert st.values[central_node_index(cfg)] == pytest.approx(1.5)

    def test_algebraic_bump_parameter_domain(self, cfg100):
        with pytest.raises(DomainError):
            make_initial_condition(AlgebraicBumpIC(0.5, 1.0, 0.0, 4.0), cfg100)
        with pytest.raises(DomainError):
            make_initial_condition(AlgebraicBumpIC(0.5, 1.0, 1.0, -1.0), cfg100)

    def test_sech_bump_center_and_tail(self):
        cfg = LatticeConfig(L=200.0, N=400, gamma=0.0025, delta=-0.01)
        st = make_initial_condition(SechBumpIC(0.5, 0.6, 1.0), cfg)
        assert st.values[central_node_index(cfg)] == pytest.approx(1.1)
        assert abs(st.values[0] - 0.5) < 1e-12  # sech(200) underflows

    def test_sech_bump_rho_domain(self, cfg100):
        with pytest.raises(DomainError):
            make_initial_condition(SechBumpIC(0.5, 0.6, 0.0), cfg100)


def test_sech_properties():
    assert sech(0.0) == 1.0
    assert sech(3.0) == sech(-3.0)
    assert sech(800.0) == 0.0  # clamped tail underflows to the correct limit
    assert sech(5.0) == pytest.approx(2.0 / (math.exp(5.0) + math.exp(-5.0)))
