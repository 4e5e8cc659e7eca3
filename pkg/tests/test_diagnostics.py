"""Spectrum comparison, verification reports and instance generation."""

import numpy as np
import pytest

import golden
from specpreserve import (
    InfeasiblePlanError,
    InstanceRecipe,
    PlanGroup,
    ReassignmentGroup,
    ReassignmentSpec,
    ScalarProductSpace,
    assemble_complex,
    extract_jordan_pairs,
    generate_instance,
    is_member,
    reassign_no_spillover,
    spectrum_multiset_compare,
    structure_residual,
    verify_reassignment,
)
from specpreserve.diagnostics import oracle_dim_limit


class TestSpectrumCompare:
    def test_equal_matrices_match_at_zero(self, rng):
        A = rng.standard_normal((5, 5))
        v = spectrum_multiset_compare(A, A, tol=1e-12)
        assert v.matched and v.max_distance <= 1e-12

    def test_tiny_perturbation_within_loose_tolerance(self, rng):
        A = rng.standard_normal((6, 6))
        E = 1e-12 * rng.standard_normal((6, 6))
        v = spectrum_multiset_compare(A, A + E, tol=1e-8)
        assert v.matched

    def test_conjugate_pair_swap_not_misreported(self):
        A = np.diag([1 + 1j, 1 - 1j])
        B = np.diag([1 - 1j, 1 + 1j])
        v = spectrum_multiset_compare(A, B, tol=1e-10)
        assert v.matched

    def test_printed_replacement_reports_both_sides(self):
        D = np.diag(golden.SYM3_CURRENT + [golden.SYM3_FIXED])
        E = np.diag(golden.SYM3_TARGET + [golden.SYM3_FIXED])
        v = spectrum_multiset_compare(D, E, tol=1e-3)
        assert not v.matched
        ua = sorted(x.real for x in v.unmatched_a)
        ub = sorted(x.real for x in v.unmatched_b)
        np.testing.assert_allclose(ua, sorted(golden.SYM3_CURRENT), atol=1e-9)
        np.testing.assert_allclose(ub, sorted(golden.SYM3_TARGET), atol=1e-9)
        matched_vals = [p[0] for p in v.pairs if p[2] <= v.threshold]
        assert any(abs(m - golden.SYM3_FIXED) < 1e-9 for m in matched_vals)

    def test_oracle_bound_respected(self, monkeypatch):
        monkeypatch.setenv("SPECPRESERVE_ORACLE_NMAX", "4")
        assert oracle_dim_limit() == 4
        from specpreserve import ArgumentError
        with pytest.raises(ArgumentError):
            spectrum_multiset_compare(np.eye(5), np.eye(5))

    def test_oracle_bound_default(self, monkeypatch):
        monkeypatch.delenv("SPECPRESERVE_ORACLE_NMAX", raising=False)
        assert oracle_dim_limit() == 64


class TestVerifyReassignment:
    def _asm(self, inst, mapping):
        groups = []
        for p in inst.pairs:
            key = complex(np.round(p.value, 6))
            if key in mapping:
                groups.append(ReassignmentGroup(p.value, mapping[key], (p.chain,)))
        return assemble_complex(inst.A, ReassignmentSpec(tuple(groups)),
                                inst.space, inst.cls)

    def test_zero_delta_all_clean(self):
        rec = InstanceRecipe("flip", "jordan", "complex", "CT",
                             (PlanGroup(1.0, (1,)), PlanGroup(-3.0, (1,)),
                              PlanGroup(2 + 1j, (1,)), PlanGroup(2 - 1j, (1,))),
                             seed=70)
        inst = generate_instance(rec)
        asm = self._asm(inst, {1.0: 1.0})
        rep = verify_reassignment(inst.A, np.zeros((4, 4)), asm, inst.space,
                                  inst.cls)
        assert rep.reassigned_residual <= 1e-12
        assert rep.structure_residual <= 1e-12
        assert rep.delta_rank == 0
        assert rep.spectrum_verdict.matched

    def test_printed_lie_report(self):
        from specpreserve import ToleranceProfile, reassign_simple
        space = ScalarProductSpace(golden.LIE4_H, star="ct")
        res = reassign_simple(
            golden.LIE4_A,
            list(zip(golden.LIE4_CURRENT,
                     [golden.LIE4_XC[:, j] for j in range(3)])),
            golden.LIE4_TARGET, space, "lie", Z=golden.LIE4_Z, mode="family",
            tol=ToleranceProfile(structure_tol=1e-3, residual_tol=1e-3))
        assert res.report.reassigned_residual <= 1e-3
        assert res.report.structure_residual <= 1e-3

    def test_supplied_fixed_pair(self):
        from specpreserve import ToleranceProfile, assemble_real_jordan
        space = ScalarProductSpace(golden.JORDAN5_H, star="t", field="real",
                                   structure_tol=1e-3)
        groups = tuple(
            ReassignmentGroup(c, t, (golden.JORDAN5_XC[:, [j]],))
            for j, (c, t) in enumerate(zip(golden.JORDAN5_CURRENT,
                                           golden.JORDAN5_TARGET)))
        asm = assemble_real_jordan(golden.JORDAN5_A, ReassignmentSpec(groups),
                                   space, chain_tol=1e-3)
        res = reassign_no_spillover(
            golden.JORDAN5_A, asm, space, "jordan", verify=False,
            tol=ToleranceProfile(structure_tol=1e-3, residual_tol=1e-3))
        rep = verify_reassignment(
            golden.JORDAN5_A, res.delta, asm, space, "jordan",
            fixed_pairs=(golden.JORDAN5_XF, golden.JORDAN5_LF),
            match_tol=1e-3)
        assert rep.fixed_residual <= 1e-3
        assert rep.realness


class TestGenerateInstance:
    def test_real_lie_pair_on_flip(self):
        rec = InstanceRecipe("flip", "lie", "real", "T",
                             (PlanGroup(1.0, (1,)), PlanGroup(-1.0, (1,))),
                             seed=71)
        inst = generate_instance(rec)
        assert inst.A.shape == (2, 2)
        assert structure_residual(inst.A, inst.space, inst.cls) <= 1e-12 * max(
            1.0, np.linalg.norm(inst.A))
        assert np.max(np.abs(inst.A.imag)) == 0.0

    def test_quadruple_round_trip_through_extraction(self):
        rec = InstanceRecipe("skewj", "lie", "real", "T",
                             (PlanGroup(1 + 2j, (1,)), PlanGroup(1 - 2j, (1,)),
                              PlanGroup(-1 + 2j, (1,)), PlanGroup(-1 - 2j, (1,))),
                             seed=72)
        inst = generate_instance(rec)
        pairs = extract_jordan_pairs(inst.A)
        key = lambda z: (round(z.real, 6), round(z.imag, 6))
        got = sorted((p.value for p in pairs), key=key)
        want = sorted((g.value for g in rec.plan), key=key)
        for a, b in zip(got, want):
            assert abs(a - b) <= 1e-6

    def test_pairing_violation_is_infeasible(self):
        with pytest.raises(InfeasiblePlanError):
            generate_instance(InstanceRecipe(
                "signature", "jordan", "real", "T",
                (PlanGroup(1 + 2j, (1,)),), seed=73))

    def test_ground_truth_chains_are_exact(self):
        rec = InstanceRecipe("random", "lie", "complex", "CT",
                             (PlanGroup(2 + 1j, (2,)), PlanGroup(-2 + 1j, (2,)),
                              PlanGroup(1.5j, (1,))),
                             seed=74)
        inst = generate_instance(rec)
        for p in inst.pairs:
            assert p.residual(inst.A) <= 1e-10 * max(1.0, np.linalg.norm(inst.A))
        assert is_member(inst.A, inst.space, inst.cls)

    def test_seed_determinism(self):
        rec = InstanceRecipe("flip", "jordan", "complex", "CT",
                             (PlanGroup(1.0, (1,)), PlanGroup(-2.0, (1,))),
                             seed=75)
        a = generate_instance(rec)
        b = generate_instance(rec)
        np.testing.assert_array_equal(a.A, b.A)
        np.testing.assert_array_equal(a.space.H, b.space.H)

    def test_round_trip_chain_lengths(self):
        rec = InstanceRecipe("signature", "jordan", "real", "T",
                             (PlanGroup(1 + 2j, (2,)), PlanGroup(1 - 2j, (2,)),
                              PlanGroup(3.0, (1,)), PlanGroup(-2.0, (2,))),
                             seed=76)
        inst = generate_instance(rec)
        pairs = extract_jordan_pairs(inst.A)

        def lengths(value):
            return sorted(p.length for p in pairs if abs(p.value - value) < 1e-2)

        assert lengths(1 + 2j) == [2]
        assert lengths(1 - 2j) == [2]
        assert lengths(3.0) == [1]
        assert lengths(-2.0) == [2]


class TestRecipeValidation:
    def test_preset_eps1_conflict(self):
        from specpreserve import ArgumentError
        with pytest.raises(ArgumentError):
            InstanceRecipe("flip", "jordan", eps1=-1)

    def test_unknown_kind(self):
        from specpreserve import ArgumentError
        with pytest.raises(ArgumentError):
            InstanceRecipe("torus", "jordan")
