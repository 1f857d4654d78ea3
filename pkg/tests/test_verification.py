import numpy as np
import pytest

from app.core.exceptions import ValidationError
from app.models.support import Support
from app.schemas.trace import Algorithm
from app.services.selection_service import SelectionService
from app.services.verification_service import VerificationService
from conftest import LOGISTIC, LS


def _service(data, spec=LS):
    return VerificationService(spec, data, threads=1)


def _random_instances(make, count, seed, p_range=(3, 9)):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield rng, make(rng, n=50, p=int(rng.integers(*p_range)))


def _verify(service, algorithm, r, k):
    trace = SelectionService(service.solver, threads=1).run(algorithm, r)
    return service.verify_trace(trace, k)


class TestReportAssembly:

    def test_appendix_forward_stepwise_passes(self, appendix_data):
        service = _service(appendix_data)
        report = _verify(service, Algorithm.FORWARD_STEPWISE, 2, 2)
        assert report.opt_support == [0, 1]
        assert report.f_opt == pytest.approx(1.0 / 6.0, abs=1e-12)
        assert report.violations == []
        (theorem4,) = report.checks_for("theorem4")
        assert theorem4.passed and theorem4.certified
        assert all(params.certified for params in report.params)
        assert 3 in {params.k for params in report.params}

    def test_modular_oblivious_meets_bound_with_equality(self, orthonormal_data):
        report = _verify(_service(orthonormal_data), Algorithm.OBLIVIOUS, 2, 2)
        (check,) = report.checks_for("theorem3")
        assert check.passed
        assert check.lhs == pytest.approx(check.rhs, rel=1e-9)

    def test_theorem6_is_never_certified(self, appendix_data):
        report = _verify(_service(appendix_data), Algorithm.FORWARD_STEPWISE, 2, 2)
        assert all(not check.certified for check in report.checks_for("theorem6"))

    def test_sparsity_must_not_exceed_rounds(self, appendix_data):
        service = _service(appendix_data)
        trace = SelectionService(service.solver, threads=1).forward_stepwise(1)
        with pytest.raises(ValidationError):
            service.verify_trace(trace, 2)

    def test_foreign_trace_rejected(self, appendix_data, orthonormal_data):
        trace = SelectionService(_service(orthonormal_data).solver, threads=1).forward_stepwise(2)
        with pytest.raises(ValidationError):
            _service(appendix_data).verify_trace(trace)

    def test_analyze_merges_algorithms(self, appendix_data):
        report = _service(appendix_data).analyze(2, list(Algorithm), exhaustive_gamma=True)
        assert report.checks_for("theorem3") and report.checks_for("theorem4") and report.checks_for("theorem7")
        assert len(report.checks_for("lemma2")) == 1
        assert {tuple(g.U) for g in report.gamma_values} >= {()}
        assert report.violations == []


class TestSubmodularityRatioBound:
    """gamma_{U,k} >= m_{|U|+k} / M~_{|U|+1} on random least-squares instances."""

    def test_random_instances(self, make_ls_instance):
        checked = 0
        for rng, data in _random_instances(make_ls_instance, 200, seed=100):
            k = int(rng.integers(1, 4))
            U = Support.of(rng.choice(data.p, size=int(rng.integers(0, 3)), replace=False), data.p)
            service = _service(data)
            search = service.gamma(U, k)
            check = service.check_theorem1(U, k, search)
            if service.params(len(U) + k).m_k > 0.0:
                assert search.value > 0.0
            if check is not None:
                checked += 1
                assert check.passed, f"gamma={check.lhs} below m/M~={check.rhs}"
                weak = service.check_theorem1_weak(U, k, search)
                assert weak.passed and weak.rhs <= check.rhs + 1e-12
        assert checked >= 150


class TestGreedyGuarantees:

    @pytest.mark.parametrize("algorithm, theorem", [
        (Algorithm.FORWARD_STEPWISE, "theorem4"),
        (Algorithm.OMP, "theorem7"),
        (Algorithm.OBLIVIOUS, "theorem3"),
    ])
    def test_least_squares(self, make_ls_instance, algorithm, theorem):
        for rng, data in _random_instances(make_ls_instance, 200, seed=200):
            k = int(rng.integers(1, min(3, data.p) + 1))
            report = _verify(_service(data), algorithm, k, k)
            assert report.checks_for(theorem)
            assert report.violations == [], [c.theorem for c in report.violations]

    @pytest.mark.parametrize("algorithm, theorem", [
        (Algorithm.FORWARD_STEPWISE, "corollary5"),
        (Algorithm.OMP, "corollary_omp"),
    ])
    def test_twice_the_rounds(self, make_ls_instance, algorithm, theorem):
        for rng, data in _random_instances(make_ls_instance, 200, seed=300, p_range=(7, 9)):
            k = int(rng.integers(1, 4))
            report = _verify(_service(data), algorithm, 2 * k, k)
            (check,) = report.checks_for(theorem)
            assert check.passed
            assert report.violations == []

    @pytest.mark.slow
    def test_logistic(self, make_logistic_instance):
        rng = np.random.default_rng(400)
        for _ in range(200):
            data = make_logistic_instance(rng, n=100, p=int(rng.integers(3, 7)))
            k = int(rng.integers(1, min(3, data.p) + 1))
            service = _service(data, LOGISTIC)
            for algorithm in (Algorithm.FORWARD_STEPWISE, Algorithm.OMP, Algorithm.OBLIVIOUS):
                report = _verify(service, algorithm, k, k)
                assert all(not p.certified for p in report.params)
                assert report.violations == []


class TestRecoveryBound:

    def test_least_squares(self, make_ls_instance):
        rng = np.random.default_rng(500)
        for _ in range(50):
            data = make_ls_instance(rng, n=50, p=8)
            report = _verify(_service(data), Algorithm.FORWARD_STEPWISE, 4, 2)
            (check,) = report.checks_for("theorem8")
            assert check.certified
            assert check.lhs >= check.rhs - check.slack


class TestSqueezeLemma:

    def test_quadratic_instances(self, make_ls_instance):
        for rng, data in _random_instances(make_ls_instance, 100, seed=600):
            k = int(rng.integers(1, data.p + 1))
            checks = _service(data).check_lemma2(k)
            assert all(check.passed for check in checks)
