"""Size caps shared by the enumeration-heavy routines.

Caps can be raised from the environment, e.g.::

    LVRKIT_CAPS="symmetric_group=9,weingarten=8" lvrkit wg-table --k 8
"""
import os

DEFAULT_CAPS = {
    "symmetric_group": 8,   # enumerate_symmetric_group
    "weingarten": 7,        # class Gram solves
    "faa_order": 8,         # q + qbar in differentiate_trace
    "wick_pairs": 8,        # M symbols in one Wick query (8! pairings)
    "ribbon_pairs": 12,     # half-edge pairs in ribbon enumeration
    "kappa_max": 3,         # number of source pairs in scalar cumulants
}


class CapExceeded(ValueError):
    """Requested size is beyond a configured cap."""


def _env_overrides():
    raw = os.environ.get("LVRKIT_CAPS", "")
    out = {}
    for item in filter(None, (s.strip() for s in raw.split(","))):
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in DEFAULT_CAPS:
            raise ValueError(f"unknown cap {key!r} in LVRKIT_CAPS")
        out[key] = int(value)
    return out


def cap(name):
    return _env_overrides().get(name, DEFAULT_CAPS[name])


def check_cap(name, value):
    limit = cap(name)
    if value > limit:
        raise CapExceeded(f"{name}={value} exceeds cap {limit} (raise via LVRKIT_CAPS)")
