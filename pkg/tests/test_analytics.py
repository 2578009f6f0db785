import math

import numpy as np
import pytest

from micromaser import (
    CouplingSpec,
    DomainError,
    FieldSpec,
    FitError,
    GainRegimeError,
    RatePair,
    ReservoirSpec,
    TimeSeries,
    UndefinedCorrelationError,
    analytic_trajectory,
    bose_einstein_occupation,
    config_from_mapping,
    decay_rate,
    diagonal_ratio_temperature,
    field_temperature,
    fit_decay_rate,
    g2_zero,
    mean_photon_number,
    multilevel_populations,
    projector,
    rates,
    run_simulation,
    thermal_field_state,
    thermalization_time,
    two_level_populations,
)

COUPLING = CouplingSpec(g=0.1, tau=0.5)  # r = 2, phi = 0.05


class TestMeanPhotonNumber:
    def test_vacuum(self):
        assert mean_photon_number(projector(6, 0)) == 0.0

    def test_fock_two(self):
        assert mean_photon_number(projector(6, 2)) == 2.0

    def test_thermal_reference(self):
        rho = thermal_field_state(FieldSpec(Omega=1.0, dim=60, T_f0=2.0))
        assert abs(mean_photon_number(rho) - 1.54149) < 1e-4


class TestBoseEinstein:
    def test_zero_temperature_limit(self):
        assert bose_einstein_occupation(1.0, 1e-3) < 1e-300

    def test_reference_points(self):
        assert bose_einstein_occupation(1.0, 2.0) == pytest.approx(1.5414940825367982, rel=1e-14)
        assert bose_einstein_occupation(1.0, 1.0) == pytest.approx(0.5819767068693265, rel=1e-14)

    def test_domain(self):
        with pytest.raises(DomainError):
            bose_einstein_occupation(1.0, 0.0)
        with pytest.raises(DomainError):
            bose_einstein_occupation(-1.0, 1.0)


class TestFieldTemperature:
    def test_inverts_occupation(self):
        for T in (0.05, 0.3, 1.0, 2.0, 10.0):
            n = bose_einstein_occupation(1.0, T)
            assert abs(field_temperature(n, 1.0) - T) / T < 1e-10

    def test_reference_points(self):
        assert field_temperature(0.58198, 1.0) == pytest.approx(1.0, abs=1e-4)
        assert field_temperature(1.54149, 1.0) == pytest.approx(2.0, abs=1e-4)

    def test_small_occupation_limit(self):
        assert field_temperature(1e-10, 1.0) < 0.05

    def test_vacuum_sentinel(self):
        assert field_temperature(0.0, 1.0) == 0.0
        assert field_temperature(-1e-12, 1.0) == 0.0


class TestG2Zero:
    @pytest.mark.parametrize("T,dim", [(0.5, 30), (1.0, 40), (2.0, 70)])
    def test_thermal_light(self, T, dim):
        rho = thermal_field_state(FieldSpec(dim=dim, T_f0=T))
        assert abs(g2_zero(rho) - 2.0) < 1e-6

    def test_single_photon_antibunching(self):
        assert g2_zero(projector(5, 1)) == 0.0

    def test_poissonian_light(self):
        lam, dim = 1.0, 40
        weights = np.array([lam**n / math.factorial(n) for n in range(dim)])
        weights *= math.exp(-lam)
        weights /= weights.sum()
        assert abs(g2_zero(np.diag(weights).astype(complex)) - 1.0) < 1e-3

    def test_floor(self):
        with pytest.raises(UndefinedCorrelationError):
            g2_zero(projector(5, 0))

    def test_diagonal_ratio_diagnostic(self):
        rho = thermal_field_state(FieldSpec(dim=40, T_f0=1.3))
        assert diagonal_ratio_temperature(rho, 1.0) == pytest.approx(1.3, rel=1e-10)


class TestRates:
    def test_single_atom_reference(self):
        reservoir = ReservoirSpec(kind="multi-atom", N=1, T_a=2.0)
        pair = rates(reservoir, COUPLING)
        p_e, p_g = two_level_populations(1.0, 2.0)
        assert pair.R_a == pytest.approx(2.0 * p_e * 0.05**2, rel=1e-12)
        assert pair.R_b == pytest.approx(2.0 * p_g * 0.05**2, rel=1e-12)
        assert pair.R_a == pytest.approx(1.8877e-3, abs=1e-7)
        assert pair.R_b == pytest.approx(3.1123e-3, abs=1e-7)

    def test_cluster_scales_linearly(self):
        res1 = ReservoirSpec(kind="multi-atom", N=1, T_a=2.0)
        res2 = ReservoirSpec(kind="multi-atom", N=2, T_a=2.0)
        one, two = rates(res1, COUPLING), rates(res2, COUPLING)
        assert two.R_a == pytest.approx(2.0 * one.R_a, rel=1e-14)
        assert two.R_b == pytest.approx(2.0 * one.R_b, rel=1e-14)

    def test_unreduced_coefficient_matches_reduced(self):
        # the N-atom generator coefficient carries (p_e + p_g)^(N-1) = 1
        p_e, p_g = two_level_populations(1.0, 0.3)
        N = 3
        unreduced = N * p_e * (p_e + p_g) ** (N - 1)
        assert unreduced == pytest.approx(N * p_e, rel=1e-14)

    def test_multilevel_reference(self):
        reservoir = ReservoirSpec(kind="multilevel", N=2, T_a=0.1)
        pair = rates(reservoir, COUPLING)
        assert pair.R_b - pair.R_a == pytest.approx(2.4997e-3, abs=1e-7)

    def test_gain_regime(self):
        reservoir = ReservoirSpec(kind="multi-atom", N=1, T_a=math.inf)
        with pytest.raises(GainRegimeError):
            rates(reservoir, COUPLING)

    def test_negative_rates_rejected(self):
        with pytest.raises(DomainError):
            RatePair(R_a=-1.0, R_b=1.0)


class TestDecayRate:
    def test_reference_point(self):
        reservoir = ReservoirSpec(kind="multi-atom", N=1, T_a=2.0)
        assert decay_rate(rates(reservoir, COUPLING)) == pytest.approx(1.2246e-3, abs=1e-7)

    def test_two_atom_cold_reference(self):
        reservoir = ReservoirSpec(kind="multi-atom", N=2, T_a=0.1)
        assert decay_rate(rates(reservoir, COUPLING)) == pytest.approx(9.9991e-3, abs=1e-7)

    def test_balanced_rates_rejected(self):
        with pytest.raises(GainRegimeError):
            decay_rate(RatePair(R_a=1.0, R_b=1.0))


class TestAnalyticTrajectory:
    def test_endpoints(self):
        assert analytic_trajectory(2.0, 0.5, 1e-3, [0.0])[0] == 2.0
        assert analytic_trajectory(2.0, 0.5, 1e-3, [1e9])[0] == pytest.approx(0.5)

    def test_one_decay_time(self):
        n0 = bose_einstein_occupation(1.0, 1.0)
        n_th = bose_einstein_occupation(1.0, 2.0)
        gamma = 1.2245933120185461e-3
        got = analytic_trajectory(n0, n_th, gamma, [1.0 / gamma])[0]
        assert got == pytest.approx(n_th + (n0 - n_th) / math.e, rel=1e-12)
        assert got == pytest.approx(1.18851, abs=1e-5)

    def test_monotone_and_bounded(self):
        times = np.linspace(0.0, 5e3, 400)
        traj = analytic_trajectory(0.2, 1.7, 1e-3, times)
        assert np.all(np.diff(traj) > 0)
        assert traj.min() >= 0.2 and traj.max() <= 1.7

    def test_needs_positive_rate(self):
        with pytest.raises(DomainError):
            analytic_trajectory(1.0, 0.5, 0.0, [0.0])


class TestThermalizationTime:
    def test_multi_atom_references(self):
        # frozen closed-form values at r=2, phi=0.05, T_a=0.1
        want = {1: 200.0182, 2: 100.0091, 3: 66.6727}
        for N, t_ref in want.items():
            res = ReservoirSpec(kind="multi-atom", N=N, T_a=0.1)
            pred = thermalization_time(res, COUPLING)
            assert pred.t_th == pytest.approx(t_ref, abs=1e-3)
            assert pred.low_T_approx == pytest.approx(100.0 / N * 2.0, rel=1e-12)
            assert pred.Gamma * pred.t_th == pytest.approx(1.0, rel=1e-15)

    def test_multilevel_references(self):
        want = {1: 200.0182, 2: 400.0545, 3: 600.1090}
        for N, t_ref in want.items():
            res = ReservoirSpec(kind="multilevel", N=N, T_a=0.1)
            pred = thermalization_time(res, COUPLING)
            assert pred.t_th == pytest.approx(t_ref, abs=1e-3)
            assert pred.low_T_approx == pytest.approx(200.0 * N, rel=1e-12)

    def test_warm_single_atom_reference(self):
        res = ReservoirSpec(kind="multi-atom", N=1, T_a=2.0)
        assert thermalization_time(res, COUPLING).t_th == pytest.approx(816.6, abs=0.05)

    def test_cluster_scaling_is_exact(self):
        base = thermalization_time(
            ReservoirSpec(kind="multi-atom", N=1, T_a=0.3), COUPLING
        ).t_th
        for N in (2, 3, 4):
            t = thermalization_time(
                ReservoirSpec(kind="multi-atom", N=N, T_a=0.3), COUPLING
            ).t_th
            assert t * N == pytest.approx(base, rel=1e-12)

    @pytest.mark.parametrize("T_a", [0.05, 0.1, 0.15])
    @pytest.mark.parametrize("N", [1, 2, 3, 4])
    def test_multilevel_low_temperature_limit(self, T_a, N):
        res = ReservoirSpec(kind="multilevel", N=N, T_a=T_a)
        pred = thermalization_time(res, COUPLING)
        assert abs(pred.t_th - pred.low_T_approx) / pred.low_T_approx < 0.01

    def test_steady_occupation_matches_reservoir(self):
        res = ReservoirSpec(kind="multi-atom", N=2, T_a=0.8)
        pred = thermalization_time(res, COUPLING)
        assert pred.n_bar_th == pytest.approx(bose_einstein_occupation(1.0, 0.8), rel=1e-12)

    def test_multilevel_steady_occupation(self):
        res = ReservoirSpec(kind="multilevel", N=2, T_a=0.1)
        p_e, p_gp = multilevel_populations(2, 1.0, 0.1)
        pred = thermalization_time(res, COUPLING)
        assert pred.n_bar_th == pytest.approx(p_e / (p_gp - p_e), rel=1e-12)


class TestFitDecayRate:
    def test_recovers_synthetic_exponential(self):
        gamma = 1e-3
        times = np.linspace(0.0, 20.0 / gamma, 2001)
        series = TimeSeries(times=times,
                            n_mean=analytic_trajectory(2.0, 0.5, gamma, times))
        fit = fit_decay_rate(series)
        assert abs(fit.Gamma - gamma) / gamma < 1e-6
        assert fit.r_squared > 0.999999
        assert fit.n_inf == pytest.approx(0.5, abs=1e-6)

    def test_constant_series_rejected(self):
        series = TimeSeries(times=np.arange(200.0), n_mean=np.full(200, 1.3))
        with pytest.raises(FitError):
            fit_decay_rate(series)

    def test_short_series_rejected(self):
        series = TimeSeries(times=np.arange(50.0), n_mean=np.linspace(1, 0, 50))
        with pytest.raises(FitError):
            fit_decay_rate(series)

    def test_simulated_cooling_run_matches_prediction(self):
        config = config_from_mapping({
            "field": {"T_f0": 1.0, "dim": 18},
            "reservoir": {"kind": "multi-atom", "N": 1, "T_a": 0.1},
            "coupling": {"g": 0.1, "tau": 0.5},
            "run": {"collisions_max": 12000},
        })
        series = run_simulation(config)
        fit = fit_decay_rate(series)
        pred = thermalization_time(config.reservoir, config.coupling)
        assert abs(fit.Gamma - pred.Gamma) / pred.Gamma < 0.10
