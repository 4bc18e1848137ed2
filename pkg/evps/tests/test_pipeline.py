"""
Tests for the Point Evaluation Pipeline

Composite reduction against the full tensor, the limiting laws and the
pinned single-point numbers.
"""

import math

import pytest
import sys
from pathlib import Path

# Add repository root to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))


def _classes(N):
    from evps.quantum.splittings import canonical_classes

    return canonical_classes(N, N - 2)


class TestLimits:
    """Tests for the two-mode and weak-squeezing limits."""

    def test_bell_limit(self):
        """Test weak squeezing on two modes subtracts to a Bell pair."""
        from evps.quantum.splittings import CanonicalSplitting
        from evps.schemas import GhzParams
        from evps.services.pipeline import evaluate_composite

        report = evaluate_composite(GhzParams(N=2, r=1e-3), CanonicalSplitting(n=0, m=1))
        assert report.e_after == pytest.approx(1.0, abs=1e-3)
        assert report.status == "ok"

    @pytest.mark.parametrize("r", [0.05, 0.1, 0.2, 0.3, 0.5])
    def test_two_mode_gain_exceeds_one(self, r):
        """Test two-mode subtraction more than doubles the log-negativity."""
        from evps.quantum.splittings import CanonicalSplitting
        from evps.schemas import GhzParams
        from evps.services.pipeline import evaluate_composite

        report = evaluate_composite(GhzParams(N=2, r=r), CanonicalSplitting(n=0, m=1))
        assert report.gain > 1.0

    @pytest.mark.parametrize("N,n_side,m_side", [(2, 1, 1), (4, 2, 2), (4, 1, 3), (8, 4, 4)])
    def test_weak_squeezing_law(self, N, n_side, m_side):
        """Test E_N after subtraction tends to log2(1 + 2 sqrt(nm)/N)."""
        from evps.quantum.ghz import weak_squeezing_log_negativity
        from evps.quantum.splittings import CanonicalSplitting
        from evps.schemas import GhzParams
        from evps.services.pipeline import evaluate_composite

        splitting = CanonicalSplitting(n=n_side - 1, m=m_side, p=N - n_side - m_side)
        report = evaluate_composite(GhzParams(N=N, r=1e-3), splitting)
        expected = weak_squeezing_log_negativity(N, n_side, m_side)
        assert report.e_after == pytest.approx(expected, abs=1e-3)

    @pytest.mark.parametrize("r", [0.2, 0.5])
    def test_initial_value_two_modes(self, r):
        """Test the composite initial value equals r/ln 2 for N = 2."""
        from evps.quantum.splittings import CanonicalSplitting
        from evps.schemas import GhzParams
        from evps.services.pipeline import evaluate_composite

        report = evaluate_composite(GhzParams(N=2, r=r), CanonicalSplitting(n=0, m=1))
        assert report.e_before == pytest.approx(r / math.log(2), abs=1e-6)
        assert report.cutoff > 8

    @pytest.mark.parametrize("r", [0.2, 0.5])
    @pytest.mark.parametrize("k", [0.0, 1.0])
    def test_stable_under_larger_cutoff(self, r, k):
        """Test restarting two levels above the accepted cutoff changes nothing."""
        from evps.quantum.splittings import CanonicalSplitting
        from evps.schemas import GhzParams
        from evps.services.pipeline import evaluate_composite

        params, splitting = GhzParams(N=3, r=r, k=k), CanonicalSplitting(n=0, m=2)
        report = evaluate_composite(params, splitting)
        larger = evaluate_composite(params, splitting, cutoff=report.cutoff + 2)
        assert larger.cutoff > report.cutoff
        assert larger.e_before == pytest.approx(report.e_before, abs=1e-6)
        assert larger.e_after == pytest.approx(report.e_after, abs=1e-6)
        assert larger.success_weight == pytest.approx(report.success_weight, abs=1e-6)

    def test_lossy_stable_under_larger_cutoff(self):
        """Test the lossy route is converged at its accepted cutoff."""
        from evps.quantum.splittings import CanonicalSplitting
        from evps.schemas import GhzParams
        from evps.services.pipeline import evaluate_composite

        params, splitting = GhzParams(N=4, r=0.3, k=0.5), CanonicalSplitting(n=1, m=1, p=1)
        report = evaluate_composite(params, splitting, loss=0.2)
        larger = evaluate_composite(params, splitting, loss=0.2, cutoff=report.cutoff + 2)
        assert report.cutoff > 8
        assert larger.e_before == pytest.approx(report.e_before, abs=1e-6)
        assert larger.e_after == pytest.approx(report.e_after, abs=1e-6)

    def test_undefined_gain_status(self, settings_override):
        """Test an initial value under the gain floor flags the gain as undefined."""
        from evps.quantum.splittings import CanonicalSplitting
        from evps.schemas import GhzParams
        from evps.services.pipeline import evaluate_composite

        settings_override(gain_floor=1.0)
        report = evaluate_composite(GhzParams(N=2, r=0.2), CanonicalSplitting(n=0, m=1))
        assert report.gain is None
        assert report.status == "undefined-gain"


class TestKInvariance:
    """Tests for k independence of the initial log-negativity."""

    @pytest.mark.parametrize("N", [2, 3, 4, 8])
    def test_composite_initial_value_independent_of_k(self, N):
        """Test e_before is the same for every k on the composite route."""
        from evps.quantum.splittings import four_party_classes
        from evps.schemas import GhzParams
        from evps.services.pipeline import evaluate_composite

        classes = four_party_classes(8)[:2] if N == 8 else _classes(N)
        for splitting in classes:
            values = [
                evaluate_composite(GhzParams(N=N, r=0.2, k=k), splitting).e_before
                for k in (0.0, 0.3, 1.0, 2.0, 5.0)
            ]
            assert max(values) - min(values) < 1e-8, splitting.label

    @pytest.mark.parametrize("N", [2, pytest.param(4, marks=pytest.mark.slow)])
    def test_direct_initial_value_independent_of_k(self, N):
        """Test e_before varies by less than 1e-6 across k on the full tensor."""
        from evps.schemas import GhzParams
        from evps.services.pipeline import evaluate_direct

        for splitting in _classes(N):
            values = [
                evaluate_direct(GhzParams(N=N, r=0.2, k=k), splitting).e_before
                for k in (0.0, 0.5, 1.0, 2.0)
            ]
            assert max(values) - min(values) < 1e-6, splitting.label


class TestCompositeAgainstDirect:
    """Tests for the composite reduction against the full tensor."""

    @pytest.mark.parametrize("N", [2, 3, pytest.param(4, marks=pytest.mark.slow)])
    @pytest.mark.parametrize("k", [0.0, 0.5, 1.0])
    def test_lossless(self, N, k):
        """Test both routes agree to 1e-6 before and after subtraction."""
        from evps.schemas import GhzParams
        from evps.services.pipeline import evaluate_composite, evaluate_direct

        params = GhzParams(N=N, r=0.2, k=k)
        for splitting in _classes(N):
            composite = evaluate_composite(params, splitting)
            direct = evaluate_direct(params, splitting)
            assert composite.e_before == pytest.approx(direct.e_before, abs=1e-6), splitting.label
            assert composite.e_after == pytest.approx(direct.e_after, abs=1e-6), splitting.label
            assert composite.success_weight == pytest.approx(direct.success_weight, abs=1e-6)

    @pytest.mark.parametrize("N", [2, pytest.param(3, marks=pytest.mark.slow)])
    @pytest.mark.parametrize("k", [0.0, 0.5, 1.0])
    def test_lossy(self, N, k):
        """Test both routes agree to 1e-6 at l = 0.2."""
        from evps.schemas import GhzParams
        from evps.services.pipeline import evaluate_composite, evaluate_direct

        params = GhzParams(N=N, r=0.2, k=k)
        for splitting in _classes(N):
            composite = evaluate_composite(params, splitting, loss=0.2)
            direct = evaluate_direct(params, splitting, loss=0.2)
            assert composite.e_before == pytest.approx(direct.e_before, abs=1e-6), splitting.label
            assert composite.e_after == pytest.approx(direct.e_after, abs=1e-6), splitting.label

    @pytest.mark.slow
    @pytest.mark.parametrize("k", [0.0, 0.5, 1.0])
    def test_lossy_four_modes(self, k):
        """Test lossy N = 4 classes keeping at most three modes against the full tensor."""
        from evps.schemas import GhzParams
        from evps.services.pipeline import evaluate_composite, evaluate_direct

        params = GhzParams(N=4, r=0.2, k=k)
        for splitting in _classes(4):
            if len(set(splitting.physical_spec().kept) | {0}) > 3:
                continue
            composite = evaluate_composite(params, splitting, loss=0.2)
            direct = evaluate_direct(params, splitting, loss=0.2)
            assert composite.e_before == pytest.approx(direct.e_before, abs=1e-6), splitting.label
            assert composite.e_after == pytest.approx(direct.e_after, abs=1e-6), splitting.label

    def test_explicit_physical_splitting(self):
        """Test an explicit labelling equals its class representative."""
        from evps.quantum.splittings import parse_explicit, parse_splitting
        from evps.schemas import GhzParams
        from evps.services.pipeline import evaluate_composite, evaluate_direct

        params = GhzParams(N=3, r=0.2, k=0.5)
        direct = evaluate_direct(params, parse_explicit("1,3:2", 3))
        composite = evaluate_composite(params, parse_splitting("1,3:2", 3))
        assert direct.e_after == pytest.approx(composite.e_after, abs=1e-6)


class TestLossAndStatuses:
    """Tests for loss handling and sweep-row statuses."""

    def test_zero_loss_equals_lossless(self, ghz4):
        """Test l = 0 through the sweep path equals the lossless pipeline."""
        from evps.quantum.splittings import CanonicalSplitting
        from evps.services.pipeline import evaluate_composite, evaluate_point

        splitting = CanonicalSplitting(n=1, m=2)
        point = evaluate_point(ghz4, splitting, loss=0.0)
        direct = evaluate_composite(ghz4, splitting)
        assert point.e_after == pytest.approx(direct.e_after, abs=1e-8)

    def test_full_loss_zero_entanglement(self, ghz4):
        """Test l = 1 destroys all entanglement."""
        from evps.quantum.splittings import CanonicalSplitting
        from evps.services.pipeline import evaluate_point

        report = evaluate_point(ghz4, CanonicalSplitting(n=1, m=2), loss=1.0)
        assert report.status == "no-photon"
        assert report.e_before is None

    def test_ceiling_marks_unavailable(self, ghz4):
        """Test a too-low ceiling yields an unavailable row, not an exception."""
        from evps.quantum.splittings import CanonicalSplitting
        from evps.services.pipeline import evaluate_point

        report = evaluate_point(ghz4, CanonicalSplitting(n=1, m=2), cutoff=3, cutoff_ceiling=3)
        assert report.status == "unavailable"
        assert report.cutoff == 3
        assert report.splitting.label == "(AB)_{1/2}-C_{1/2}"

    def test_detection_probability(self, ghz4):
        """Test the tap reflectivity scales the success weight."""
        from evps.quantum.splittings import CanonicalSplitting
        from evps.services.pipeline import evaluate_composite

        report = evaluate_composite(ghz4, CanonicalSplitting(n=1, m=2), tap_reflectivity=0.1)
        assert report.detection_probability == pytest.approx(0.1 * report.success_weight)

    def test_success_weight_scales_as_r_squared(self):
        """Test the weight falls with r^2 in the weak-squeezing limit."""
        from evps.quantum.splittings import CanonicalSplitting
        from evps.schemas import GhzParams
        from evps.services.pipeline import evaluate_composite

        splitting = CanonicalSplitting(n=1, m=2)
        w1 = evaluate_composite(GhzParams(N=4, r=1e-3), splitting).success_weight
        w2 = evaluate_composite(GhzParams(N=4, r=2e-3), splitting).success_weight
        assert w2 / w1 == pytest.approx(4.0, rel=1e-3)


@pytest.mark.slow
class TestHierarchyOnStates:
    """Tests for the partial-trace hierarchy on real states."""

    @pytest.mark.parametrize("k", [0.0, 0.82])
    def test_no_violations(self, k):
        """Test tracing out modes never raises the log-negativity."""
        from evps.quantum.entanglement import hierarchy_check
        from evps.schemas import GhzParams
        from evps.services.pipeline import evaluate_direct_splittings

        reports = evaluate_direct_splittings(GhzParams(N=4, r=0.2, k=k), max_traced=2)
        assert len(reports) == 25
        assert hierarchy_check(reports) == []

        for quantity in ("e_before", "e_after"):
            by_label = {r.splitting.label: getattr(r, quantity) for r in reports}
            assert by_label["123-4"] >= by_label["Tr(1)23-4"] - 1e-8
            assert by_label["Tr(1)23-4"] >= by_label["Tr(12)3-4"] - 1e-8
