"""Access to the data files shipped with the package.

Three instances are bundled: "small" (the 4-link illustration), "istanbul"
(30 links, 5 source-sink pairs with their allowed-path lists), and
"istanbul-overlay" (synthetic probabilities, costs, and budget for the same
network).  Stored permutations and golden reference outputs ride along for
the reproduction commands.
"""
from __future__ import annotations

from importlib import resources

from .model import Instance, ValidationError, apply_overlay, load_instance, load_overlay

INSTANCE_NAMES = ("small", "istanbul", "istanbul-overlay")


def _data_text(filename: str) -> str:
    return resources.files("quakeplan").joinpath("data", filename).read_text(encoding="utf-8")


def bundled_instance_text(name: str) -> str:
    if name not in INSTANCE_NAMES:
        raise ValidationError(f"unknown bundled instance {name!r}; have {', '.join(INSTANCE_NAMES)}")
    return _data_text(f"{name}.json")


def bundled_instance(name: str) -> Instance:
    """Load a bundled instance; "istanbul-overlay" is istanbul with the
    overlay already applied."""
    if name == "istanbul-overlay":
        base = load_instance(bundled_instance_text("istanbul"))
        return apply_overlay(base, bundled_overlay())
    return load_instance(bundled_instance_text(name))


def bundled_overlay() -> dict:
    return load_overlay(bundled_instance_text("istanbul-overlay"))


def bundled_permutations() -> tuple[tuple[int, ...], ...]:
    """The stored link permutations for the istanbul pairs, one per pair."""
    perms = []
    for line in _data_text("istanbul-permutations.txt").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        perms.append(tuple(int(tok) for tok in line.split()))
    return tuple(perms)


GOLDEN_TARGETS = ("table2", "table3", "table4", "small-optimum")


def golden_text(target: str) -> str:
    if target not in GOLDEN_TARGETS:
        raise ValidationError(f"unknown golden target {target!r}; have {', '.join(GOLDEN_TARGETS)}")
    return resources.files("quakeplan").joinpath("golden", f"{target}.txt").read_text(encoding="utf-8")
