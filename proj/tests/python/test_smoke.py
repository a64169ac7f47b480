import math

import pytest

import qeskit


def test_two_level_spectrum_double_well():
    m = qeskit.model("razavy", {"A": 1.0, "alpha": 2.0})
    assert m.epsilon == pytest.approx(1.0)
    values, errors = qeskit.spectrum(m, k=4)
    assert min(abs(e) for e in values) < 1e-6
    assert min(abs(e - 1.0) for e in values) < 1e-6
    assert len(errors) == 4


def test_eigenstates_and_decomposition_sextic():
    m = qeskit.model("sextic")
    for which, energy in ((0, 0.0), (1, m.epsilon)):
        c = qeskit.verify_eigenstate(m, which)
        assert abs(c["energy"] - energy) < 1e-6
        assert c["residual"] < 1e-6
    coeffs, remainder = qeskit.decompose(m)
    assert coeffs["j+^2"] == pytest.approx(-1.5, abs=1e-8)
    assert remainder[6] == pytest.approx(0.5, abs=1e-8)
    equivalent, _, fit = qeskit.quartic_equivalence(m)
    assert not equivalent and fit > 1e-6


def test_sampled_functions_match_closed_form():
    m = qeskit.model("razavy")
    xs = [0.5, 1.0, 1.5]
    for x, w in zip(xs, m.w_plus(xs)):
        assert w == pytest.approx(math.sinh(2.0 * x))


def test_scalar_modes_and_errors():
    r0, r1, w2 = qeskit.scalar_mode_residuals(1.0, -1.0)
    assert r0 < 1e-8 and r1 < 1e-8 and w2 == pytest.approx(8.0)
    with pytest.raises(ValueError):
        qeskit.scalar_mode_residuals(1.0, 1.0)
    with pytest.raises(ValueError):
        qeskit.model("razavy", {"A": -1.0})


def test_cli_exit_codes(tmp_path):
    code, out, _ = qeskit.run_cli(["verify", "harmonic", "--out", str(tmp_path / "h")])
    assert code == 0 and "control.harmonic.E0" in out
    code, _, err = qeskit.run_cli(["scalarfield", "--B", "1", "--C", "1", "--out", str(tmp_path / "s")])
    assert code == 2 and "B = C" in err
