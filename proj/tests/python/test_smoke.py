from fractions import Fraction

import pytest

import orbitmetrics as om

ROTATION_QUARTER = {"kind": "rotation", "angle": om.rational(1, 4)}
DOUBLING = {"kind": "doubling"}

CIRCLE_ZERO = {"kind": "circle", "num": "0", "den": "1"}
CIRCLE_QUARTER = {"kind": "circle", "num": "1", "den": "4"}


def test_version():
    assert om.__version__ == "0.1.0"


def test_distance_is_exact():
    space = {"kind": "circle", "streamDepth": 64}
    d = om.distance(space, CIRCLE_ZERO, CIRCLE_QUARTER)
    assert om.as_fraction(d["value"]) == Fraction(1, 4)
    assert om.as_fraction(d["error"]) == 0


def test_rational_rotation_matched_vs_paired():
    # same orbit set, shifted pointwise: matched mean 0, paired mean 1/4
    wm = om.orbit_stat(ROTATION_QUARTER, CIRCLE_ZERO, CIRCLE_QUARTER, {"kind": "weakMean"}, 16)
    bes = om.orbit_stat(ROTATION_QUARTER, CIRCLE_ZERO, CIRCLE_QUARTER, {"kind": "besicovitch"}, 16)
    assert om.as_fraction(wm["value"]) == 0
    assert om.as_fraction(bes["value"]) == Fraction(1, 4)


def test_orbit_series_shape():
    series = om.orbit_series(ROTATION_QUARTER, CIRCLE_ZERO, CIRCLE_QUARTER,
                             {"kind": "besicovitch"}, [4, 8, 16, 32])
    assert [int(s) for s in series["schedule"]] == [4, 8, 16, 32]
    assert len(series["samples"]) == 4
    assert all(om.as_fraction(s["value"]) == Fraction(1, 4) for s in series["samples"])


def trimmed_probe(system, max_n=512):
    cfg = om.default_probe_config(system)
    schedule = [16]
    while schedule[-1] < max_n:
        schedule.append(schedule[-1] * 2)
    cfg["schedule"] = schedule
    cfg["tolerance"] = om.rational(1, 20)
    cfg["samplesPerBall"] = 4
    return cfg


def test_doubling_probe_is_sensitive():
    cfg = trimmed_probe(DOUBLING)
    verdict = om.probe(DOUBLING, CIRCLE_ZERO, cfg, mode="weakMean")
    assert verdict["verdict"] == "sensitive-witnessed"
    assert verdict["witnesses"]


def test_rotation_probe_is_consistent():
    rotation = {"kind": "rotation", "angle": om.rational(679891637638612258,
                                                         1100087778366101931)}
    cfg = trimmed_probe(rotation, max_n=512)
    verdict = om.probe(rotation, CIRCLE_ZERO, cfg, mode="weakMean")
    assert verdict["verdict"] == "equicontinuous-consistent"


def test_density_of_even_numbers():
    horizon = 64
    evens = list(range(0, horizon, 2))
    out = om.density_estimate(evens, horizon, [8, 16, 32, 64])
    assert om.as_fraction(out["upperDensity"]["value"]) == Fraction(1, 2)
    assert om.as_fraction(out["lowerDensity"]["value"]) == Fraction(1, 2)


def test_verify_quick_passes():
    report = om.verify("quick")
    assert report["allPassed"] is True
    assert {s["name"] for s in report["suites"]} >= {"solver-oracles", "shift-stability"}


def test_content_hash_stable():
    doc = {"kind": "doubling"}
    assert om.content_hash(doc) == om.content_hash(dict(doc))
    assert om.content_hash(doc) != om.content_hash({"kind": "tent"})


def test_bad_config_raises_value_error():
    with pytest.raises(ValueError):
        om.probe({"kind": "warp"}, CIRCLE_ZERO, {}, mode="weakMean")
