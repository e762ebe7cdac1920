import json
import math

import pytest
from hypothesis import given, strategies as st

from ransomgame.core import (
    BUILTIN_DECAYS,
    CIRCULAR,
    LINEAR,
    QUADRATIC,
    DecayProfile,
    GameInstance,
    Reputation,
    build_profiles,
    instance_from_json,
    instance_to_json,
    make_instance,
    validate_instance,
)


class TestBuildProfiles:
    def test_linear_endpoints(self):
        losses, sales = build_profiles(500, 6, DecayProfile(LINEAR), 0.7)
        assert losses[5] == 0.0 and sales[5] == 0.0
        assert losses[2] == pytest.approx(250.0)
        assert sales[2] == pytest.approx(175.0)

    def test_circular_midpoint(self):
        losses, _ = build_profiles(500, 6, DecayProfile(CIRCULAR), 0.7)
        assert losses[2] == pytest.approx(500 * math.sqrt(3) / 2)

    def test_rejects_zero_rounds(self):
        with pytest.raises(ValueError):
            build_profiles(500, 0, DecayProfile(LINEAR), 0.7)

    def test_rejects_increasing_custom_table(self):
        with pytest.raises(ValueError):
            DecayProfile("custom", values=(1.0, 0.2, 0.5, 0.0))

    def test_custom_table_interpolates(self):
        prof = DecayProfile("custom", values=(1.0, 0.5, 0.0))
        losses, _ = build_profiles(100, 4, prof, 0.5)
        assert losses[1] == pytest.approx(50.0)  # f(1/2) hits the middle knot

    @pytest.mark.parametrize("kind", BUILTIN_DECAYS)
    def test_nonincreasing_and_final_zero(self, kind):
        for n in (1, 2, 5, 13):
            losses, sales = build_profiles(357.5, n, DecayProfile(kind), 0.7)
            for i in range(1, n):
                assert losses[i] <= losses[i - 1]
            assert losses[-1] == 0.0
            assert all(s == pytest.approx(0.7 * l) for s, l in zip(sales, losses))

    @given(
        st.floats(min_value=0.0, max_value=1e6),
        st.integers(min_value=1, max_value=20),
        st.sampled_from(BUILTIN_DECAYS),
        st.floats(min_value=0.1, max_value=10.0),
    )
    def test_homogeneous_in_value(self, V, n, kind, c):
        base_l, base_s = build_profiles(V, n, DecayProfile(kind), 0.7)
        scaled_l, scaled_s = build_profiles(c * V, n, DecayProfile(kind), 0.7)
        for a, b in zip(scaled_l, base_l):
            assert a == pytest.approx(c * b, rel=1e-12, abs=1e-9)
        for a, b in zip(scaled_s, base_s):
            assert a == pytest.approx(c * b, rel=1e-12, abs=1e-9)


class TestValidation:
    def test_increasing_losses_flagged(self):
        inst = GameInstance(2, (10, 10), 100, 0, (100, 150), (70, 105))
        violations = validate_instance(inst)
        assert any("not non-increasing at index 1" in v for v in violations)

    def test_zero_ransom_flagged(self):
        inst = GameInstance(2, (10, 0), 100, 0, (100, 50), (70, 35))
        assert any("ransom must be positive" in v for v in validate_instance(inst))

    def test_canonical_instance_is_valid(self):
        inst = make_instance(V=500, n=6, total_ransom=800, decay=LINEAR,
                             sale_ratio=0.7)
        assert validate_instance(inst) == []
        assert inst.ransoms[0] == pytest.approx(400.0)
        assert inst.ransoms[1] == pytest.approx(80.0)

    def test_length_mismatch_flagged(self):
        inst = GameInstance(3, (10, 10), 100, 0, (100, 50, 20), (70, 35, 14))
        assert any("length" in v for v in validate_instance(inst))

    def test_nonfinite_flagged(self):
        inst = GameInstance(1, (float("nan"),), 100, 0, (100,), (70,))
        assert any("not finite" in v for v in validate_instance(inst))


class TestReputation:
    def test_bounds_checked(self):
        with pytest.raises(ValueError):
            Reputation(1.5, (0.0,))
        with pytest.raises(ValueError):
            Reputation(0.5, (-0.1,))

    def test_named_corners(self):
        assert Reputation.worst(3).as_vector() == (0.0, 1.0, 1.0, 1.0)
        assert Reputation.perfect(3).as_vector() == (1.0, 0.0, 0.0, 0.0)


class TestJson:
    def test_round_trip(self):
        inst = make_instance(V=500, n=6, total_ransom=800, decay=QUADRATIC)
        back = instance_from_json(instance_to_json(inst))
        assert back == inst

    def test_derived_profiles(self):
        obj = {"n": 4, "ransoms": [100, 50, 50, 50], "data_value": 300,
               "decay": "linear", "sale_ratio": 0.5}
        inst = instance_from_json(obj)
        assert inst.losses[3] == 0.0
        assert inst.sale_profits[0] == pytest.approx(0.5 * inst.losses[0])

    def test_missing_key_reported(self):
        with pytest.raises(ValueError, match="data_value"):
            instance_from_json({"n": 1, "ransoms": [1]})

    def test_json_text_round_trip_9_digits(self):
        inst = make_instance(V=123.456789123, n=3, total_ransom=77.7, decay=LINEAR)
        text = json.dumps(instance_to_json(inst))
        again = instance_from_json(json.loads(text))
        assert again.losses == inst.losses
