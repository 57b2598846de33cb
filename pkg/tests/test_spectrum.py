import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heliumqd.errors import DomainError, LimitError
from heliumqd.model import derive_scales
from heliumqd.specfun import cotpi, sinpi
from heliumqd.spectrum import (
    DefectParams,
    defect_from_lambda,
    eigencondition_residual,
    level,
    mean_x,
    normalization,
    normalization_reflection,
    spectrum_table,
)

DELTA = 0.0237
LAMBDA_0237 = 42.116094121124817  # pi cot(pi 0.0237)


@pytest.fixture(scope="module")
def scales():
    return derive_scales()


@pytest.fixture(scope="module")
def params():
    return DefectParams.from_delta(DELTA)


class TestDefectParams:
    def test_lambda_zero(self):
        assert defect_from_lambda(0.0).delta == 0.5

    def test_lambda_for_helium(self, params):
        assert params.lam == pytest.approx(LAMBDA_0237, rel=1e-14)
        assert defect_from_lambda(42.116).delta == pytest.approx(0.0237, abs=1e-6)
        assert defect_from_lambda(LAMBDA_0237).delta == pytest.approx(DELTA, rel=1e-13)

    def test_negative_branch(self):
        lam = -math.pi * cotpi(0.9)
        assert defect_from_lambda(-lam).delta == pytest.approx(0.9, rel=1e-14)

    def test_limits(self):
        assert 0 < defect_from_lambda(1e8).delta < 2e-8
        assert 1 - 2e-8 < defect_from_lambda(-1e8).delta < 1

    def test_inconsistent_pair(self):
        with pytest.raises(DomainError):
            DefectParams(lam=10.0, delta=0.1)

    @pytest.mark.parametrize("d", [0.0, 1.0, -0.1, 1.5])
    def test_delta_domain(self, d):
        with pytest.raises(DomainError):
            DefectParams.from_delta(d)

    def test_nonfinite_lambda(self):
        with pytest.raises(DomainError):
            defect_from_lambda(math.inf)

    @settings(max_examples=300)
    @given(st.floats(min_value=-1e4, max_value=1e4))
    def test_round_trip(self, lam):
        p = defect_from_lambda(lam)
        assert 0.0 < p.delta < 1.0
        back = math.pi * cotpi(p.delta)
        assert abs(back - lam) <= 1e-10 * max(1.0, abs(lam))

    @settings(max_examples=200)
    @given(st.floats(min_value=-1e4, max_value=1e4), st.floats(min_value=1e-3, max_value=10.0))
    def test_strictly_decreasing(self, lam, step):
        assert defect_from_lambda(lam + step).delta < defect_from_lambda(lam).delta


class TestEigencondition:
    def test_ground_index(self, params):
        assert eigencondition_residual(1 - DELTA, params) == pytest.approx(0.0, abs=1e-12)

    def test_half(self):
        assert eigencondition_residual(0.5, defect_from_lambda(0.0)) == pytest.approx(0.0, abs=1e-15)

    def test_off_index_sign(self):
        # cot decreases on (0, 1): at s = 0.9 < 1 - delta the residual is positive
        p = defect_from_lambda(42.116)
        r = eigencondition_residual(0.9, p)
        assert r == pytest.approx(cotpi(0.9) + 42.116 / math.pi, rel=1e-14)
        assert r > 0

    def test_integer_pole(self, params):
        with pytest.raises(DomainError):
            eigencondition_residual(2.0, params)
        with pytest.raises(DomainError):
            eigencondition_residual(-0.5, params)

    @settings(max_examples=100)
    @given(st.floats(min_value=1e-3, max_value=1 - 1e-3), st.integers(min_value=1, max_value=50))
    def test_every_level_is_a_root(self, delta, n):
        p = DefectParams.from_delta(delta)
        lam_pi = abs(p.lam) / math.pi
        assert abs(eigencondition_residual(n - delta, p)) <= 1e-10 * max(1.0, lam_pi)


class TestLevels:
    def test_ground(self, params, scales):
        st1 = level(1, params, scales)
        assert st1.s == pytest.approx(0.9763, rel=1e-15)
        assert st1.energy_e0 == pytest.approx(-1 / 0.9763**2, rel=1e-15)
        assert st1.energy_ghz == pytest.approx(-scales.e0_ghz / 0.9763**2, rel=1e-15)
        # the arithmetic with the rounded E0 = 159.123 GHz gives -166.942
        assert -159.123 / 0.9763**2 == pytest.approx(-166.942, abs=1e-3)
        assert st1.energy_ghz == pytest.approx(-166.95, abs=0.01)

    def test_second(self, params, scales):
        assert level(2, params, scales).energy_ghz == pytest.approx(-40.74, abs=0.005)
        assert -159.123 / 1.9763**2 == pytest.approx(-40.74, abs=0.005)

    def test_hydrogenic_limit(self, scales):
        p = DefectParams.from_delta(1e-9)
        for n in range(1, 6):
            assert level(n, p, scales).energy_e0 == pytest.approx(-1.0 / n**2, rel=1e-7)

    @pytest.mark.parametrize("n", [0, -1, 1.5])
    def test_bad_index(self, n, params, scales):
        with pytest.raises(DomainError):
            level(n, params, scales)

    def test_table(self, params, scales):
        table = spectrum_table(5, params, scales)
        got = [round(t.energy_ghz, 2) for t in table]
        assert got == pytest.approx([-166.94, -40.74, -17.96, -10.06, -6.43], abs=0.006)
        for want, t in zip([-166.95, -40.74, -17.96, -10.07, -6.43], table):
            assert t.energy_ghz == pytest.approx(want, abs=0.01)
        assert len(spectrum_table(1, params, scales)) == 1
        assert table[0].energy_ghz / table[1].energy_ghz == pytest.approx((table[1].s / table[0].s) ** 2, rel=1e-14)

    def test_table_properties(self, params, scales):
        table = spectrum_table(50, params, scales)
        energies = [t.energy_ghz for t in table]
        assert all(a < b < 0 for a, b in zip(energies, energies[1:]))
        for t in table:
            assert t.energy_e0 * t.s**2 == pytest.approx(-1.0, rel=1e-15)
            assert abs(eigencondition_residual(t.s, params)) <= 1e-10 * params.lam

    def test_table_limit(self, params, scales):
        with pytest.raises(LimitError):
            spectrum_table(51, params, scales)
        with pytest.raises(DomainError):
            spectrum_table(0, params, scales)


class TestNormalization:
    @settings(max_examples=300)
    @given(st.floats(min_value=1e-6, max_value=1 - 1e-6), st.integers(min_value=1, max_value=50))
    def test_two_forms_agree(self, delta, n):
        s = n - delta
        assert normalization(s) == pytest.approx(normalization_reflection(s), rel=1e-12)

    def test_reflection_identity_in_state(self, params, scales):
        for t in spectrum_table(10, params, scales):
            s = t.s
            assert t.norm > 0
            assert t.norm**2 * 2 * s * (math.pi * s / sinpi(s)) ** 2 == pytest.approx(1.0, rel=1e-10)


class TestMeanX:
    def test_closed_form(self, params, scales):
        assert mean_x(1, DefectParams.from_delta(1e-12), scales) == pytest.approx(3 * scales.x0, rel=1e-11)
        assert mean_x(1, params, scales) / scales.x0 == pytest.approx(2.95316, abs=1e-5)
        assert mean_x(3, params, scales) / scales.x0 == pytest.approx(26.8584, abs=1e-4)

    def test_bad_index(self, params, scales):
        with pytest.raises(DomainError):
            mean_x(0, params, scales)
