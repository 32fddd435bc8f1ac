"""Echo pools, super-group placement, round planning, image census."""

import random

import pytest

from lamcode import echo, scrambler
from lamcode.errors import RangeError


def test_pool_arithmetic():
    report = echo.pool_arithmetic()
    assert report["native"] == 2 * 8**6 == 524288
    assert report["forced"] == 12 * 8**3 == 6144
    assert report["total"] == 530432
    assert report["total"] == report["native"] + report["forced"]
    assert report["n_q"] == 259 * 2**11 == report["total"]
    assert report["total"] == scrambler.POINT_SPACE
    assert report["image_space"] == 9**6 == 3**12 == 531441
    assert report["slack"] == 1009
    assert report["total"] <= report["image_space"]


def test_pack_extremes():
    low = echo.pack_native(echo.NativeSample(0, (0,) * 6))
    assert low.value == 0
    high = echo.pack_forced(echo.ForcedSample(11, (7, 7, 7)))
    assert high.value == 530431
    assert isinstance(low, scrambler.CodePoint)


def test_sample_validation():
    with pytest.raises(RangeError):
        echo.NativeSample(2, (0,) * 6)
    with pytest.raises(RangeError):
        echo.NativeSample(0, (0,) * 5)
    with pytest.raises(RangeError):
        echo.NativeSample(0, (0, 0, 0, 0, 0, 8))
    with pytest.raises(RangeError):
        echo.ForcedSample(12, (0, 0, 0))
    with pytest.raises(RangeError):
        echo.ForcedSample(0, (-1, 0, 0))
    with pytest.raises(RangeError):
        echo.unpack_sample(530432)
    with pytest.raises(RangeError):
        echo.unpack_sample(-1)


def test_pack_round_trip_exhaustive():
    for value in range(echo.POOL_TOTAL):
        sample = echo.unpack_sample(value)
        if value < echo.NATIVE_POOL:
            assert isinstance(sample, echo.NativeSample)
            assert echo.pack_native(sample).value == value
        else:
            assert isinstance(sample, echo.ForcedSample)
            assert echo.pack_forced(sample).value == value


def test_unpack_accepts_code_points():
    point = scrambler.unpack_point(524288)
    sample = echo.unpack_sample(point)
    assert isinstance(sample, echo.ForcedSample)
    assert sample.position == 0 and sample.digits == (0, 0, 0)


def test_schedule_round_example():
    assert echo.schedule_round(16, 20, 2) == 4
    assert 2 * 16**4 <= 20**4
    assert 2 * 16**3 > 20**3
    assert echo.schedule_round(8, 16, 2) == 1
    with pytest.raises(echo.Infeasible):
        echo.schedule_round(16, 16, 2)
    with pytest.raises(echo.Infeasible):
        echo.schedule_round(4, 3, 2)
    with pytest.raises(RangeError):
        echo.schedule_round(1, 3, 2)
    with pytest.raises(RangeError):
        echo.schedule_round(2, 3, 1)


def test_schedule_round_minimality():
    rng = random.Random(0xEC40)
    for _ in range(10000):
        data = rng.randrange(2, 65)
        capable = rng.randrange(data + 1, 129)
        modulus = rng.randrange(2, 1000000)
        count = echo.schedule_round(data, capable, modulus)
        assert modulus * data**count <= capable**count
        if count > 1:
            assert modulus * data ** (count - 1) > capable ** (count - 1)


def test_round_plan_invariant():
    plan = echo.plan_round(16, 20, 2)
    assert plan.word_count == 4
    assert plan.cancellation == 2
    with pytest.raises(RangeError):
        echo.RoundPlan(16, 20, 2, 2, 3)
    with pytest.raises(RangeError):
        echo.RoundPlan(16, 20, 2, 1, 4)
    with pytest.raises(RangeError):
        echo.RoundPlan(16, 20, 2, 3, 4)


def test_place_event():
    group = echo.SuperGroup(frozenset({0, 4}))
    placed = echo.place_event(group, 0)
    assert placed.echo.position == 0
    assert placed.delimiters == frozenset({0, 4})
    words = placed.words
    assert words[0] == "delimiter" and words[4] == "delimiter"
    assert all(w is None for i, w in enumerate(words[:6]) if i not in (0, 4))
    assert all(w == placed.echo for w in words[6:])
    with pytest.raises(echo.Conflict):
        echo.place_event(placed, 3)
    with pytest.raises(RangeError):
        echo.place_event(group, 12)
    with pytest.raises(RangeError):
        echo.SuperGroup(frozenset({7}))


def test_place_event_mii_mode():
    group = echo.SuperGroup()
    assert echo.place_event(group, 8, mii=True).echo.position == 8
    with pytest.raises(RangeError):
        echo.place_event(group, 9, mii=True)


def test_halves_never_mix():
    for delimiters in (frozenset(), frozenset({0}), frozenset(range(6))):
        for position in range(12):
            placed = echo.place_event(echo.SuperGroup(delimiters), position)
            words = placed.words
            assert all(w in (None, "delimiter") for w in words[:6])
            assert all(isinstance(w, echo.ForcedSample) for w in words[6:])
            with pytest.raises(echo.Conflict):
                echo.place_event(placed, position)


def test_event_resolution():
    assert echo.event_resolution() == (30.0, 15.0)
    assert echo.event_resolution(mii=True) == (40.0, 20.0)


def test_mock_round():
    assert echo.mock_round(2) == echo.MockRound(2, 1, 1)
    assert echo.mock_round(1).delay_bits == 0
    assert echo.mock_round(16).delay_bits == 4
    assert echo.mock_round(2).word_count == 1
    for bad in (0, 3, 12, -2):
        with pytest.raises(RangeError):
            echo.mock_round(bad)


def test_echo_area():
    assert echo.echo_area("preamble_sfd") == (64, 48)
    assert echo.echo_area("ifg") == (96, 80)
    assert echo.echo_area("frame") == (160, 128)
    gross = echo.echo_area("preamble_sfd")[0] + echo.echo_area("ifg")[0]
    net = echo.echo_area("preamble_sfd")[1] + echo.echo_area("ifg")[1]
    assert echo.echo_area("frame") == (gross, net)
    with pytest.raises(RangeError):
        echo.echo_area("idle")


def test_census_open_and_impossible():
    assert echo.image_filter_census() == 531441
    assert echo.image_filter_census(min_transits=13) == 0
    assert echo.image_filter_census(min_transits=12) == 0
    assert echo.image_filter_census(min_transits=11) > 0


def test_census_monotone_in_every_threshold():
    heads = [echo.image_filter_census(max_head_droop=h) for h in range(1, 13)]
    assert heads == sorted(heads)
    tails = [echo.image_filter_census(max_tail_droop=t) for t in range(1, 13)]
    assert tails == sorted(tails)
    bounds = [echo.image_filter_census(dc_bound=b) for b in range(13)]
    assert bounds == sorted(bounds)
    floors = [echo.image_filter_census(min_transits=t) for t in range(13)]
    assert floors == sorted(floors, reverse=True)


def test_census_matches_scalar_profile():
    rng = random.Random(0x1A6E)
    cols = echo.image_features()
    for _ in range(300):
        index = rng.randrange(echo.IMAGE_SPACE)
        profile = echo.image_profile(index)
        assert profile.index == index
        assert profile.head_droop == int(cols["head"][index])
        assert profile.tail_droop == int(cols["tail"][index])
        assert profile.dc_unbalance == int(cols["dc"][index])
        assert profile.transits == int(cols["transits"][index])


def test_image_profile_validation():
    with pytest.raises(RangeError):
        echo.image_profile(531441)
    with pytest.raises(RangeError):
        echo.Pam3Image((0,) * 11, 1, 1, 0, 0)
    with pytest.raises(RangeError):
        echo.Pam3Image((2,) + (0,) * 11, 1, 1, 0, 0)


def test_mean_transits_over_whole_space():
    cols = echo.image_features()
    # eleven boundaries, each unequal with probability 2/3
    assert int(cols["transits"].sum()) * 3 == 22 * echo.IMAGE_SPACE


def test_selection_sweep():
    rows = echo.selection_sweep()
    assert [r["count"] for r in rows] == sorted(r["count"] for r in rows)
    assert rows[2]["count"] == 531441
    assert rows[0]["count"] < echo.POOL_TOTAL
    # the middle criteria row reproduces the pool size exactly under the
    # plain signed-sum reading of the unbalance bound
    assert rows[1]["count"] == 530432
    assert rows[1]["matches_pool"] is True
    assert rows[0]["count"] == 527378


def test_census_sharding_agrees():
    assert echo.image_filter_census(8, 8, 8, 2, jobs=4) == 530432
    assert echo.image_filter_census(7, 7, 7, 3, jobs=3) == echo.image_filter_census(7, 7, 7, 3)


def test_dc_unit_scaling():
    assert echo.image_filter_census(dc_bound=4, dc_unit=3) == echo.image_filter_census(dc_bound=12)
    with pytest.raises(RangeError):
        echo.image_filter_census(dc_unit=0)
