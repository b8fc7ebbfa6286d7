import math

import pytest

from bethe.model import GenericRational, XXXChain
from cli.verify import (
    CHECKS,
    LEMMA_GROUPS,
    Check,
    lattice_cases,
    reference_cases,
    reference_states,
    richardson,
    run_check,
    run_checks,
)


class TestRunner:
    def test_richardson_removes_linear_term(self):
        assert richardson(lambda d: 2.0 + 3.0 * d) == pytest.approx(2.0, abs=1e-12)

    def test_groups(self):
        results = run_checks(0, LEMMA_GROUPS)
        assert {r.group for r in results} <= set(LEMMA_GROUPS)
        assert len(results) == sum(c.group in LEMMA_GROUPS for c in CHECKS)

    def test_exception_is_a_failure(self):
        def broken(rng):
            raise ZeroDivisionError("boom")

        result = run_check(Check("broken", "test", "raises", 1.0, broken), 0, 0)
        assert not result.passed
        assert "ZeroDivisionError" in result.detail

    def test_names_unique(self):
        assert len({c.name for c in CHECKS}) == len(CHECKS)

    def test_scale_is_recorded(self):
        result = run_check(Check("scaled", "test", "error with its scale", 1e-3, lambda rng: (1e-4, 50.0)), 0, 0)
        assert result.passed
        assert result.error == 1e-4
        assert result.scale == 50.0
        assert run_check(Check("plain", "test", "bare error", 1e-3, lambda rng: 1e-4), 0, 0).scale is None

    def test_control_passes_only_on_a_large_error(self):
        assert run_check(Check("control", "test", "must fail", 1e-8, lambda rng: 2.0, expect_failure=True), 0, 0).passed
        assert not run_check(Check("control", "test", "must fail", 1e-8, lambda rng: 1e-12, expect_failure=True), 0, 0).passed

    def test_control_that_raises_is_a_failure(self):
        def broken(rng):
            raise ValueError("boom")

        assert not run_check(Check("control", "test", "must fail", 1e-8, broken, expect_failure=True), 0, 0).passed

    def test_suite_has_a_control(self):
        controls = [c for c in CHECKS if c.expect_failure]
        assert [c.name for c in controls] == ["hab-sign-mutation"]


class TestReferenceCases:
    def test_sectors(self):
        sectors = {(type(model.split_twist()[0]).__name__, a, b) for model, a, b in reference_cases()}
        for sector in ((1, 0), (1, 1), (2, 1)):
            assert ("XXXChain", *sector) in sectors
        assert ("GenericRational", 0, 1) in sectors

    def test_every_case_has_several_states(self):
        for model, a, b in reference_cases():
            assert len(reference_states(model, a, b)) >= 2, (model, a, b)

    def test_lattice_cases_are_chains(self):
        cases = lattice_cases()
        assert all(isinstance(model.split_twist()[0], XXXChain) for model, _, _ in cases)
        assert not any(isinstance(model, GenericRational) for model, _, _ in cases)
        assert len(cases) == len(reference_cases()) - 1


@pytest.mark.parametrize("index", range(len(CHECKS)), ids=[c.name for c in CHECKS])
def test_check_passes(index):
    check = CHECKS[index]
    result = run_check(check, 0, index)
    assert result.passed, f"{check.name}: error {result.error:.3e} against {check.tolerance:.1e} {result.detail}"
    if check.expect_failure:
        assert math.isfinite(result.error) and result.error > check.tolerance


@pytest.mark.parametrize("seed", [3, 17, 101])
def test_scaled_checks_at_other_seeds(seed):
    for index, check in enumerate(CHECKS):
        if check.name in ("psum-closed-at-one", "gtilde-closed", "gtilde-derivative"):
            result = run_check(check, seed, index)
            assert result.passed, f"{check.name} at seed {seed}: error {result.error:.3e} on scale {result.scale:.3e}"
