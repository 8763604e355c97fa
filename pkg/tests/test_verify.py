import pytest

from src import verify


def test_default_selection_skips_extended_criteria():
    default = verify.select()
    assert default[0] == 'A1'
    assert 'A12' not in default
    assert len(default) == 11
    assert verify.select(extended=True)[-1] == 'A12'


def test_only_keeps_suite_order():
    assert verify.select(['a9', ' A2 ']) == ['A2', 'A9']
    assert verify.select(['A12']) == ['A12']
    with pytest.raises(ValueError):
        verify.select(['A2', 'B1'])


def test_checks_collect_failures_and_notes():
    checks = verify.Checks()
    checks.expect(True, 'never shown')
    checks.note('took 3 steps')
    assert checks.passed
    checks.expect(False, 'bad value')
    assert not checks.passed
    assert checks.detail() == 'bad value; took 3 steps'


def test_measure_criterion_passes(settings):
    result = verify.run_criterion('A2', verify.Context(settings))
    assert result.passed, result.detail
    assert result.title == 'Measures'


def test_catalog_criterion_passes(settings):
    result = verify.run_criterion('A1', verify.Context(settings))
    assert result.passed, result.detail


def test_raising_criterion_is_a_failure(settings, monkeypatch):
    def broken(ctx):
        raise RuntimeError('boom')

    monkeypatch.setitem(verify.CRITERIA, 'A2', ('Measures', broken))
    result = verify.run_criterion('A2', verify.Context(settings))
    assert not result.passed
    assert result.detail == 'RuntimeError: boom'


def test_run_suite_and_report(settings):
    results = verify.run_suite(only=['A2'], settings=settings)
    text = verify.format_results(results)
    assert '[PASS] A2' in text
    assert '1/1 criteria passed' in text


def test_report_shows_failures():
    results = [verify.CriterionResult('A3', 'Two-qubit map convergence', False, '3/100 seeds', 1.3)]
    text = verify.format_results(results)
    assert '[FAIL] A3' in text
    assert '(1.3s)' in text
    assert '3/100 seeds' in text
    assert '0/1 criteria passed' in text
