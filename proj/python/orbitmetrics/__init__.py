"""Exact orbit-matching statistics and equicontinuity/sensitivity probes.

Thin wrappers over the compiled `_core` module: every operation takes and
returns plain dicts/lists, with rationals carried as {"num": str, "den": str}
so nothing is rounded on the way through.
"""
import json
import os
import sys

try:
    from . import _core  # installed wheel layout
except ImportError:  # development layout: _core lives in the build directory
    _build_dir = os.environ.get("ORBITMETRICS_BUILD_DIR")
    if _build_dir and _build_dir not in sys.path:
        sys.path.insert(0, _build_dir)
    import _core

__version__ = _core.version()

__all__ = [
    "rational",
    "as_fraction",
    "distance",
    "orbit_stat",
    "orbit_series",
    "default_probe_config",
    "probe",
    "search_tuples",
    "dichotomy",
    "agreement",
    "density_estimate",
    "verify",
    "content_hash",
]


def rational(num, den=1):
    """Build the wire form of an exact rational."""
    return {"num": str(num), "den": str(den)}


def as_fraction(r):
    """Convert a wire-form rational back to a Fraction."""
    from fractions import Fraction

    return Fraction(int(r["num"]), int(r["den"]))


def _dump(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def distance(space, x, y):
    return json.loads(_core.distance(_dump(space), _dump(x), _dump(y)))


def orbit_stat(system, x, y, stat, n):
    return json.loads(_core.orbit_stat(_dump(system), _dump(x), _dump(y), _dump(stat), n))


def orbit_series(system, x, y, stat, schedule):
    return json.loads(
        _core.orbit_series(_dump(system), _dump(x), _dump(y), _dump(stat), _dump(list(schedule)))
    )


def default_probe_config(system):
    return json.loads(_core.default_probe_config(_dump(system)))


def probe(system, x, probe_config, mode="weakMean", **extra):
    return json.loads(
        _core.probe(_dump(system), _dump(x), _dump(probe_config), mode,
                    json.dumps(extra) if extra else "")
    )


def search_tuples(system, probe_config, kind="inMean"):
    return json.loads(_core.search_tuples(_dump(system), _dump(probe_config), kind))


def dichotomy(system, probe_config, mode="strongMean"):
    return json.loads(_core.dichotomy(_dump(system), _dump(probe_config), mode))


def agreement(system, probe_config):
    return json.loads(_core.agreement(_dump(system), _dump(probe_config)))


def density_estimate(indices, horizon, schedule):
    return json.loads(_core.density_estimate(_dump(list(indices)), horizon, _dump(list(schedule))))


def verify(level="quick", seed=0x5EED):
    return json.loads(_core.verify(level, seed))


def content_hash(document):
    return _core.content_hash(_dump(document))
