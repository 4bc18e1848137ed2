"""
Unit Tests for GHZ State Family Module
"""

import math

import numpy as np
import pytest
import sys
from pathlib import Path

# Add repository root to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))


class TestGhzParams:
    """Tests for the (N, r, k) parametrisation."""

    def test_source_split(self):
        """Test r1 + r2 = r and r2 = k r1."""
        from evps.schemas import GhzParams

        params = GhzParams(N=4, r=0.2, k=0.82)
        assert params.r1 + params.r2 == pytest.approx(0.2)
        assert params.r2 == pytest.approx(0.82 * params.r1)
        assert params.local_squeezing == pytest.approx(0.82 * 0.2 / 1.82)

    def test_from_sources(self):
        """Test building from per-source squeezing."""
        from evps.schemas import GhzParams

        params = GhzParams.from_sources(3, 0.1, 0.05)
        assert params.k == pytest.approx(0.5)
        assert params.r == pytest.approx(0.15)

    def test_negative_k_rejected(self):
        """Test k must be non-negative."""
        from pydantic import ValidationError
        from evps.schemas import GhzParams

        with pytest.raises(ValidationError):
            GhzParams(N=4, r=0.2, k=-0.1)


class TestEscalation:
    """Tests for cutoff escalation."""

    def test_escalates_until_pass(self):
        """Test build is retried at cutoff + step."""
        from evps.core.errors import CutoffTooSmallError
        from evps.quantum.ghz import escalate_cutoff

        tried = []

        def build(cutoff):
            tried.append(cutoff)
            if cutoff < 12:
                raise CutoffTooSmallError("tail", cutoff=cutoff, tail=1e-6)
            return "ok"

        result, used = escalate_cutoff(build, start=8, ceiling=20, step=2)
        assert (result, used) == ("ok", 12)
        assert tried == [8, 10, 12]

    def test_ceiling_reraises(self):
        """Test the last error propagates past the ceiling."""
        from evps.core.errors import CutoffTooSmallError
        from evps.quantum.ghz import escalate_cutoff

        def build(cutoff):
            raise CutoffTooSmallError("tail", cutoff=cutoff, tail=1e-6)

        with pytest.raises(CutoffTooSmallError) as exc_info:
            escalate_cutoff(build, start=8, ceiling=10, step=2)
        assert exc_info.value.cutoff == 10

    def test_compare_waits_for_agreement(self):
        """Test a comparator keeps raising the cutoff until two results agree."""
        from evps.quantum.ghz import escalate_cutoff

        tried = []

        def build(cutoff):
            tried.append(cutoff)
            return 2.0 ** -cutoff

        result, used = escalate_cutoff(build, start=8, ceiling=30, step=2,
                                       compare=lambda a, b: abs(a - b), tolerance=2e-4)
        assert used == 14
        assert result == 2.0 ** -14
        assert tried == [8, 10, 12, 14]

    def test_compare_restarts_after_guard_failure(self):
        """Test results on either side of a failed cutoff are never compared."""
        from evps.core.errors import CutoffTooSmallError
        from evps.quantum.ghz import escalate_cutoff

        def build(cutoff):
            if cutoff == 10:
                raise CutoffTooSmallError("tail", cutoff=cutoff, tail=1e-6)
            return 1.0

        _, used = escalate_cutoff(build, start=8, ceiling=20, step=2,
                                  compare=lambda a, b: abs(a - b), tolerance=1e-9)
        assert used == 14

    def test_no_agreement_below_ceiling(self):
        """Test results that keep moving end in CutoffTooSmallError at the last cutoff."""
        from evps.core.errors import CutoffTooSmallError
        from evps.quantum.ghz import escalate_cutoff

        with pytest.raises(CutoffTooSmallError) as exc_info:
            escalate_cutoff(lambda c: float(c), start=8, ceiling=12, step=2,
                            compare=lambda a, b: abs(a - b), tolerance=1e-6)
        assert exc_info.value.cutoff == 12
        assert exc_info.value.tail == pytest.approx(2.0)


class TestDirectConstruction:
    """Tests for full-tensor state preparation."""

    def test_psi0_two_mode_log_negativity(self):
        """Test psi0(2, r) is locally a TMSV with parameter r/2."""
        from evps.quantum.entanglement import log_negativity
        from evps.quantum.fock import FockSpace
        from evps.quantum.ghz import prepare_psi0_direct
        from evps.schemas import SplittingSpec

        state = prepare_psi0_direct(2, 0.2, FockSpace(16, 2))
        spec = SplittingSpec(side_a=(0,), side_b=(1,))
        assert log_negativity(state, spec) == pytest.approx(0.2 / math.log(2), abs=1e-6)

    def test_mode_limit(self, settings_override):
        """Test direct construction refuses N above the configured limit."""
        from evps.core.errors import ParameterError
        from evps.quantum.fock import FockSpace
        from evps.quantum.ghz import prepare_phi0_direct
        from evps.schemas import GhzParams

        settings_override(direct_max_modes=2)
        with pytest.raises(ParameterError):
            prepare_phi0_direct(GhzParams(N=3, r=0.2), FockSpace(4, 3))

    def test_local_equivalence(self):
        """Test U_loc psi0(N, -r) = phi0(N, r1, r2)."""
        from evps.quantum.fock import FockSpace, fidelity
        from evps.quantum.ghz import local_equiv_unitary, prepare_phi0_direct, prepare_psi0_direct
        from evps.schemas import GhzParams

        params = GhzParams(N=2, r=0.2, k=1.0)
        space = FockSpace(20, 2)
        psi0 = prepare_psi0_direct(2, -0.2, space)
        rotated = local_equiv_unitary(params, space).apply(psi0)
        phi0 = prepare_phi0_direct(params, space)
        assert fidelity(rotated, phi0) == pytest.approx(1.0, abs=1e-8)

    def test_local_equiv_empty_at_k0(self):
        """Test k = 0 needs no local squeezers."""
        from evps.quantum.fock import FockSpace
        from evps.quantum.ghz import local_equiv_unitary
        from evps.schemas import GhzParams

        assert local_equiv_unitary(GhzParams(N=2, r=0.2), FockSpace(4, 2)).gates == ()


class TestComposite:
    """Tests for the composite-mode reduction."""

    def test_grouping_labels(self):
        """Test empty groups are dropped from the composite space."""
        from evps.schemas import CompositeGrouping

        grouping = CompositeGrouping(n=0, m=3, p=0)
        assert grouping.labels == ("A", "C")
        assert grouping.weights()["C"] == pytest.approx(math.sqrt(3 / 4))

    def test_grouping_must_match_params(self):
        """Test a grouping covering another N is rejected."""
        from evps.core.errors import ParameterError
        from evps.quantum.ghz import prepare_composite
        from evps.schemas import CompositeGrouping, GhzParams

        with pytest.raises(ParameterError):
            prepare_composite(GhzParams(N=5, r=0.2), CompositeGrouping(n=1, m=2))

    def test_two_composites_equal_direct(self):
        """Test N = 2 composites are the physical modes themselves."""
        from evps.quantum.fock import FockSpace, fidelity
        from evps.quantum.ghz import prepare_composite, prepare_psi0_direct
        from evps.schemas import CompositeGrouping, GhzParams

        prepared = prepare_composite(GhzParams(N=2, r=0.2), CompositeGrouping(n=0, m=1), cutoff=16)
        direct = prepare_psi0_direct(2, -0.2, FockSpace(16, 2))
        assert fidelity(prepared.state, direct) == pytest.approx(1.0, abs=1e-12)

    def test_leaky_cutoff_rejected(self):
        """Test a cutoff that cuts off more than the tail tolerance is refused."""
        from evps.core.errors import CutoffTooSmallError
        from evps.quantum.ghz import prepare_composite
        from evps.schemas import CompositeGrouping, GhzParams

        with pytest.raises(CutoffTooSmallError) as exc_info:
            prepare_composite(GhzParams(N=4, r=0.2), CompositeGrouping(n=1, m=2), cutoff=8)
        assert exc_info.value.cutoff == 8
        assert exc_info.value.tail > 1e-10

    def test_reduce_drops_labels(self):
        """Test reduce keeps the requested composites in order."""
        from evps.quantum.ghz import prepare_composite
        from evps.schemas import CompositeGrouping, GhzParams

        cs = prepare_composite(GhzParams(N=4, r=0.2), CompositeGrouping(n=0, m=2, p=1), cutoff=14)
        reduced = cs.reduce(["C", "A"])
        assert reduced.labels == ("A", "C")
        assert not reduced.state.is_pure

    def test_subtraction_weight_matches_direct(self):
        """Test the rotated-frame weight equals <b_A^dagger b_A> on phi0."""
        from evps.quantum.fock import FockSpace
        from evps.quantum.ghz import prepare_composite, prepare_phi0_direct, subtract_composite
        from evps.quantum.optics import subtract_photon
        from evps.schemas import CompositeGrouping, GhzParams

        params = GhzParams(N=2, r=0.2, k=0.5)
        cs = prepare_composite(params, CompositeGrouping(n=0, m=1), cutoff=16)
        _, weight = subtract_composite(cs)
        _, direct_weight = subtract_photon(prepare_phi0_direct(params, FockSpace(16, 2)), 0)
        assert weight == pytest.approx(direct_weight, abs=1e-9)

    def test_weak_squeezing_approaches_single_excitation(self):
        """Test the subtracted state tends to the W-like single excitation."""
        from evps.quantum.fock import fidelity
        from evps.quantum.ghz import prepare_composite, single_excitation_state, subtract_composite
        from evps.schemas import CompositeGrouping, GhzParams

        grouping = CompositeGrouping(n=1, m=2)
        cs = prepare_composite(GhzParams(N=4, r=1e-3), grouping, cutoff=6)
        out, weight = subtract_composite(cs)
        assert fidelity(out.state, single_excitation_state(grouping, 6)) == pytest.approx(1.0, abs=1e-5)
        assert weight < 1e-5

    def test_full_loss_is_vacuum(self):
        """Test l = 1 leaves composite vacuum."""
        from evps.quantum.ghz import loss_composite, prepare_composite
        from evps.schemas import CompositeGrouping, GhzParams

        cs = prepare_composite(GhzParams(N=2, r=0.2, k=0.5), CompositeGrouping(n=0, m=1), cutoff=14)
        lossy = loss_composite(cs, 1.0)
        assert lossy.labels == ("A", "C")
        assert lossy.partner is None
        assert lossy.main.density().data[0, 0].real == pytest.approx(1.0)

    def test_lossy_merges_a_side(self):
        """Test A and B merge into one composite with a complement partner."""
        from evps.quantum.ghz import loss_composite, prepare_composite
        from evps.schemas import CompositeGrouping, GhzParams

        cs = prepare_composite(GhzParams(N=5, r=0.2, k=1.0), CompositeGrouping(n=2, m=1, p=1),
                               cutoff=16)
        lossy = loss_composite(cs, 0.2, keep=("A", "B", "C"))
        assert lossy.labels == ("A", "C")
        assert lossy.overlap == pytest.approx(1 / math.sqrt(3))
        assert lossy.partner is not None
        assert lossy.main.trace() == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("keep_partner", [True, False])
    def test_lossy_weight_is_mode_occupation(self, keep_partner):
        """Test the heralding weight equals (1 - l) <b_0^dagger b_0> on phi0."""
        from evps.quantum.ghz import loss_composite, prepare_composite, subtract_lossy
        from evps.schemas import CompositeGrouping, GhzParams

        params = GhzParams(N=4, r=0.2, k=0.5)
        cs = prepare_composite(params, CompositeGrouping(n=1, m=2), cutoff=16)
        _, weight = subtract_lossy(loss_composite(cs, 0.2), keep_partner=keep_partner)
        occupation = (math.sinh(params.r1) ** 2 + 3 * math.sinh(params.r2) ** 2) / 4
        assert weight == pytest.approx(0.8 * occupation, rel=1e-8)

    def test_lossy_output_shape(self):
        """Test a kept partner is appended after the main composites."""
        from evps.quantum.ghz import loss_composite, prepare_composite, subtract_lossy
        from evps.schemas import CompositeGrouping, GhzParams

        cs = prepare_composite(GhzParams(N=4, r=0.2, k=1.0), CompositeGrouping(n=1, m=2),
                               cutoff=14)
        lossy = loss_composite(cs, 0.1)
        kept, _ = subtract_lossy(lossy, keep_partner=True)
        folded, _ = subtract_lossy(lossy, keep_partner=False)
        assert kept.num_modes == len(lossy.labels) + 1
        assert folded.num_modes == len(lossy.labels)
        assert kept.trace() == pytest.approx(1.0)
        assert folded.trace() == pytest.approx(1.0)

    def test_weak_squeezing_formula(self):
        """Test the limiting log-negativity formula."""
        from evps.quantum.ghz import weak_squeezing_log_negativity

        assert weak_squeezing_log_negativity(2, 1, 1) == pytest.approx(1.0)
        assert weak_squeezing_log_negativity(8, 4, 4) == pytest.approx(1.0)
        assert weak_squeezing_log_negativity(4, 1, 3) == pytest.approx(math.log2(1 + math.sqrt(3) / 2))

    def test_subtraction_operator(self):
        """Test the conjugated operator reduces to b at s = 0."""
        from evps.quantum.fock import destroy
        from evps.quantum.ghz import subtraction_operator

        np.testing.assert_allclose(subtraction_operator(0.0, 5), destroy(5))
