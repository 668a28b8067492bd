"""Python face of the cavity-state preparation toolkit.

The heavy lifting lives in the compiled _core module; these wrappers decode
its JSON payloads into plain dicts.
"""

import json

try:
    from . import _core  # packaged layout
except ImportError:  # flat build-tree layout
    import _core

__all__ = [
    "optimize",
    "build_pattern",
    "phase_schedule",
    "simulate_exact",
    "verify",
    "config_hash",
]


def optimize(**kwargs):
    return json.loads(_core.optimize(**kwargs))


def build_pattern(amplitudes, **kwargs):
    return json.loads(_core.build_pattern(amplitudes, **kwargs))


def phase_schedule(amplitudes, k=1.0 / 26.0):
    psi, varphi = _core.phase_schedule(amplitudes, k)
    return {"psi": list(psi), "varphi": list(varphi)}


def simulate_exact(pattern, **kwargs):
    if isinstance(pattern, dict):
        pattern = json.dumps(pattern)
    return json.loads(_core.simulate_exact(pattern, **kwargs))


def verify(panels=2000, fast=True):
    return json.loads(_core.verify(panels, fast))


def config_hash(text):
    return _core.config_hash(text)
