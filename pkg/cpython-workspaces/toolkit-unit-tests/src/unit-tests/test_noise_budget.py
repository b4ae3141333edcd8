"""Unit tests for the relaxation budget.

All benchmarks use the Q5 transmon (E_J = 32.191 GHz, E_C = 0.099 GHz) read
out through R5 (f_r = 6.468937 GHz, g = 28.1 MHz, κ = 550 kHz).
"""

import os
import tempfile
from unittest.mock import MagicMock

import numpy as np
import pytest
from quditkit.dispersive import ResonatorModel
from quditkit.errors import DispersiveBreakdownWarning, InfeasibleError, InputError, InvalidModelError
from quditkit.hamiltonian import TransmonModel, eigensolve
from quditkit.logger import Logger
from quditkit.noise_budget import (
    NoiseParams,
    RelaxationBudget,
    T1Series,
    dielectric_quality,
    fit_dielectric_params,
    gamma_dielectric,
    gamma_purcell,
    gamma_qp,
    read_t1_csv,
    thermal_factor,
    total_gamma,
)

R5 = ResonatorModel(f_r=6.468937, g=0.0281, kappa=0.00055)
PARAMS = NoiseParams(x_qp=1e-8, gap=200.0, q_diel0=3e6, epsilon=0.7, temperature=0.010)
T1_US = np.array([64, 34, 24, 21, 17, 14, 13, 14, 13], dtype=float)
T1_CSV = os.path.join(os.path.dirname(__file__), "files", "q5-t1.csv")


@pytest.fixture(scope="module")
def sol():
    """Provides the 12-level Q5 eigen-solution."""
    return eigensolve(TransmonModel(e_c=0.099, e_j=(32.191,)), 12)


@pytest.fixture
def budget(sol):
    """Creates a RelaxationBudget with a mocked logger.

    Args:
        sol: Q5 eigen-solution.
    """
    return RelaxationBudget(MagicMock(spec=Logger), sol, R5, PARAMS)


@pytest.mark.parametrize("field,value", [("x_qp", -1e-9), ("gap", 0.0), ("q_diel0", -1.0), ("temperature", 0.0)])
def test_invalid_noise_params(field, value):
    """Tests that out-of-range parameters are rejected.

    Args:
        field: Parameter name.
        value: Invalid value.
    """
    with pytest.raises(InvalidModelError):
        PARAMS.replace(**{field: value})


def test_quasiparticle_limits(sol):
    """Tests the 2.2 ms and 0.22 ms quasiparticle limits of levels 1 and 9.

    Args:
        sol: Q5 eigen-solution.
    """
    assert 1.0 / gamma_qp(sol, PARAMS, 1) == pytest.approx(2200.0, rel=0.1)
    assert 1.0 / gamma_qp(sol, PARAMS, 9) == pytest.approx(220.0, rel=0.1)
    assert gamma_qp(sol, PARAMS.replace(x_qp=0.0), 1) == 0.0


def test_quasiparticle_level_scaling(sol):
    """Tests that Γ_qp(i)/Γ_qp(1) follows i·√(f01/f_{i-1,i}).

    Args:
        sol: Q5 eigen-solution.
    """
    base = gamma_qp(sol, PARAMS, 1)
    for i in range(2, 10):
        expected = i * np.sqrt(sol.transition(0) / sol.transition(i - 1))
        assert gamma_qp(sol, PARAMS, i) / base == pytest.approx(expected, rel=0.15)


def test_purcell_limits(sol):
    """Tests the Purcell limits and the dip between levels 7 and 9.

    Args:
        sol: Q5 eigen-solution.
    """
    t1 = {i: 1.0 / gamma_purcell(sol, R5, i) for i in (1, 7, 9)}
    assert t1[1] == pytest.approx(271.0, rel=0.15)
    assert t1[7] == pytest.approx(95.0, rel=0.15)
    assert t1[9] == pytest.approx(101.0, rel=0.15)
    assert t1[9] > t1[7]
    uncoupled = ResonatorModel(f_r=6.468937, g=0.0, kappa=0.00055)
    assert gamma_purcell(sol, uncoupled, 1) == 0.0


def test_purcell_warns_near_resonance(sol):
    """Tests the breakdown warning for a transition within κ of the resonator.

    Args:
        sol: Q5 eigen-solution.
    """
    near = ResonatorModel(f_r=sol.transition(0) + 1e-4, g=0.0281, kappa=0.00055)
    with pytest.warns(DispersiveBreakdownWarning):
        gamma_purcell(sol, near, 1)


def test_dielectric_limits(sol):
    """Tests the 110 µs and 18 µs dielectric limits of levels 1 and 9.

    Args:
        sol: Q5 eigen-solution.
    """
    assert 1.0 / gamma_dielectric(sol, PARAMS, 1) == pytest.approx(110.0, rel=0.15)
    assert 1.0 / gamma_dielectric(sol, PARAMS, 9) == pytest.approx(18.0, rel=0.15)
    assert gamma_dielectric(sol, PARAMS, 9) > 4 * gamma_dielectric(sol, PARAMS, 1)


def test_dielectric_law():
    """Tests the quality factor law and the thermal factor."""
    assert dielectric_quality(6.0, PARAMS) == pytest.approx(3e6)
    assert dielectric_quality(3.0, PARAMS) == pytest.approx(3e6 * 2**0.7)
    assert thermal_factor(5.0, 0.010) == pytest.approx(2.0, abs=1e-4)
    assert thermal_factor(5.0, 0.2) > 2.1


def test_total_gamma(sol):
    """Tests that the breakdown sums its channels and is dielectric dominated.

    Args:
        sol: Q5 eigen-solution.
    """
    row = total_gamma(sol, R5, PARAMS, 1)
    assert row.total == pytest.approx(row.qp + row.purcell + row.dielectric)
    assert row.dielectric > row.purcell > row.qp
    assert row.t1 == pytest.approx(1.0 / row.total)
    assert row.warnings == ()
    assert row.to_dict()["level"] == 1


def test_total_gamma_records_warnings(sol):
    """Tests that channel warnings are re-emitted and recorded.

    Args:
        sol: Q5 eigen-solution.
    """
    near = ResonatorModel(f_r=sol.transition(0) + 1e-4, g=0.0281, kappa=0.00055)
    with pytest.warns(DispersiveBreakdownWarning):
        row = total_gamma(sol, near, PARAMS, 1)
    assert len(row.warnings) == 1


@pytest.mark.parametrize("level", [0, 12])
def test_level_range(sol, level):
    """Tests levels outside 1..levels-1.

    Args:
        sol: Q5 eigen-solution.
        level: Decay level.
    """
    with pytest.raises(InputError):
        gamma_qp(sol, PARAMS, level)


def test_fit_measured_t1(sol):
    """Tests the dielectric fit of the measured T1 series.

    Args:
        sol: Q5 eigen-solution.
    """
    fit = fit_dielectric_params(1.0 / T1_US, sol, R5, PARAMS)
    assert fit.q_diel0 == pytest.approx(2.2e6, rel=0.25)
    assert fit.epsilon == pytest.approx(1.2, rel=0.25)
    assert fit.levels == tuple(range(1, 10))
    assert fit.residuals.shape == (9,)


def test_fit_synthetic_round_trip(sol):
    """Tests exact recovery of (Q0, ε) from rates generated by the model.

    Args:
        sol: Q5 eigen-solution.
    """
    truth = PARAMS.replace(q_diel0=2.2e6, epsilon=1.2)
    rates = [total_gamma(sol, R5, truth, i).total for i in range(1, 10)]
    fit = fit_dielectric_params(rates, sol, R5, PARAMS)
    assert fit.q_diel0 == pytest.approx(2.2e6, rel=0.01)
    assert fit.epsilon == pytest.approx(1.2, rel=0.01)
    assert np.max(np.abs(fit.residuals)) < 1e-6


def test_fit_without_quasiparticles(sol):
    """Tests that dropping the quasiparticle floor moves the fit.

    Args:
        sol: Q5 eigen-solution.
    """
    with_qp = fit_dielectric_params(1.0 / T1_US, sol, R5, PARAMS)
    without_qp = fit_dielectric_params(1.0 / T1_US, sol, R5, PARAMS, include_qp=False)
    assert not without_qp.include_qp
    assert without_qp.q_diel0 != with_qp.q_diel0
    assert abs(without_qp.epsilon - with_qp.epsilon) < 0.5


def test_fit_rejects(sol):
    """Tests short series, mismatched lengths and rates below the floor.

    Args:
        sol: Q5 eigen-solution.
    """
    with pytest.raises(InputError):
        fit_dielectric_params([0.02, 0.03], sol, R5, PARAMS)
    with pytest.raises(InputError):
        fit_dielectric_params([0.02, 0.03, 0.04], sol, R5, PARAMS, levels=[1, 2])
    with pytest.raises(InputError):
        fit_dielectric_params([0.02, 0.03, 0.04], sol, R5, PARAMS, weights=[1.0])
    with pytest.raises(InfeasibleError) as excinfo:
        fit_dielectric_params([1e-5, 0.03, 0.04], sol, R5, PARAMS)
    assert excinfo.value.level == 1


def test_read_t1_csv():
    """Tests reading the measured Q5 series."""
    series = read_t1_csv(T1_CSV)
    np.testing.assert_array_equal(series.levels, np.arange(1, 10))
    np.testing.assert_array_equal(series.t1, T1_US)
    np.testing.assert_allclose(series.log_uncertainty[0], 15 / 64)
    np.testing.assert_allclose(series.rates, 1.0 / T1_US)


@pytest.mark.parametrize(
    "content",
    ["level,t1\n1,64\n", "level,t1_us\n", "level,t1_us\n1,abc\n", "level,t1_us\n1,0\n"],
)
def test_read_t1_csv_rejects(content):
    """Tests malformed T1 files.

    Args:
        content: File content.
    """
    path = os.path.join(tempfile.mkdtemp(), "t1.csv")
    with open(path, "w") as f:
        f.write(content)
    with pytest.raises(InputError):
        read_t1_csv(path)


def test_budget_breakdown(budget):
    """Tests the per-level budget and its debug record.

    Args:
        budget: Budget with a mocked logger.
    """
    rows = budget.breakdown(9)
    assert [r.level for r in rows] == list(range(1, 10))
    budget._log.debug.assert_called_once()
    budget._log.log_warnings.assert_called_once()


def test_budget_scaling_table(budget):
    """Tests the rate-versus-level curves.

    Args:
        budget: Budget with a mocked logger.
    """
    table = budget.scaling_table(9, [1e-9, 1e-8, 1e-7], [0.7, 1.2])
    assert list(table) == [
        "level",
        "purcell",
        "qp_x=1e-09",
        "qp_x=1e-08",
        "qp_x=1e-07",
        "diel_eps=0.7",
        "diel_eps=1.2",
    ]
    assert all(len(column) == 9 for column in table.values())
    assert table["qp_x=1e-07"][0] == pytest.approx(10 * table["qp_x=1e-08"][0])


def test_budget_fit(budget):
    """Tests the weighted fit and its info record.

    Args:
        budget: Budget with a mocked logger.
    """
    fit = budget.fit_dielectric_params(read_t1_csv(T1_CSV), weighted=True)
    assert fit.q_diel0 > 0
    budget._log.info.assert_called_once()
    assert budget._log.info.call_args.kwargs["weighted"] is True


def test_budget_fit_needs_uncertainties(budget):
    """Tests that a weighted fit requires every uncertainty.

    Args:
        budget: Budget with a mocked logger.
    """
    series = T1Series(np.arange(1, 4), np.array([64.0, 34.0, 24.0]), np.array([15.0, np.nan, 5.0]))
    with pytest.raises(InputError):
        budget.fit_dielectric_params(series, weighted=True)


def test_budget_logs_infeasible(budget):
    """Tests that infeasible rates are logged before being raised.

    Args:
        budget: Budget with a mocked logger.
    """
    series = T1Series(np.arange(1, 4), np.array([1e5, 34.0, 24.0]), np.full(3, 1.0))
    with pytest.raises(InfeasibleError):
        budget.fit_dielectric_params(series)
    budget._log.error.assert_called_once()
    assert budget._log.error.call_args.kwargs["infeasible_level"] == 1
