"""Exception types shared across the reasoning modules."""

import os


class EvidentError(Exception):
    """Base class for reasoning failures (not syntax errors)."""


class ContradictorySources(EvidentError):
    """No combination of sources is consistent with the facts, so belief is undefined."""


class SizeLimit(EvidentError):
    """Exhaustive enumeration over 2^m subsets was refused."""


class RejectionLimit(EvidentError):
    """The rejection sampler gave up after too many consecutive inconsistent draws."""


class ReservedAtomError(ValueError):
    """A user formula mentions an atom reserved for the justification encoding."""


DEFAULT_MAX_M = 24
HARD_MAX_M = 30


def enumeration_cap() -> int:
    """Largest m allowed for 2^m enumeration; ``EVIDENT_MAX_M`` overrides up to 30."""
    raw = os.environ.get("EVIDENT_MAX_M")
    if not raw:
        return DEFAULT_MAX_M
    try:
        cap = int(raw)
    except ValueError:
        raise SizeLimit(f"EVIDENT_MAX_M must be an integer, got {raw!r}") from None
    if cap < 0 or cap > HARD_MAX_M:
        raise SizeLimit(f"EVIDENT_MAX_M={cap} outside 0..{HARD_MAX_M}")
    return cap


def check_size(m: int, what: str = "sources") -> None:
    cap = enumeration_cap()
    if m > cap:
        raise SizeLimit(
            f"{m} {what} exceeds the exact-enumeration cap of {cap}; "
            "use the Monte-Carlo estimator or raise EVIDENT_MAX_M"
        )
