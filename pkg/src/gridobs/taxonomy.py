"""Closed vocabularies for grid telemetry signals.

Quantity kinds, component kinds, validity tags, and the fixed relation
saying which quantities each component can report. Everything here is
immutable and safe to share across threads.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .errors import TaxonomyError


class QuantityKind(enum.Enum):
    MW = "MW"
    MVAR = "MVAR"
    KV = "KV"
    TAP = "TAP"
    STATUS = "STATUS"


class ComponentKind(enum.Enum):
    UNIT_LOAD_TRANSFORMER = "UNIT_LOAD_TRANSFORMER"
    TRANSMISSION_TRANSFORMER = "TRANSMISSION_TRANSFORMER"
    GENERATOR = "GENERATOR"
    TRANSMISSION_LINE = "TRANSMISSION_LINE"
    REACTOR_CAPACITOR = "REACTOR_CAPACITOR"
    BUSBAR = "BUSBAR"


class ValidityTag(enum.Enum):
    FAULTY = "F"
    NON_CURRENT = "N"
    VALID = "V"
    INVALID = "I"
    MANUAL = "M"


# Which quantities each component reports. Transformers carry tap position
# instead of a voltage of their own; shunt reactors/capacitors only report
# reactive power; busbars only voltage. Status exists everywhere.
APPLICABILITY: dict[ComponentKind, frozenset[QuantityKind]] = {
    ComponentKind.UNIT_LOAD_TRANSFORMER: frozenset(
        {QuantityKind.MW, QuantityKind.MVAR, QuantityKind.TAP, QuantityKind.STATUS}
    ),
    ComponentKind.TRANSMISSION_TRANSFORMER: frozenset(
        {QuantityKind.MW, QuantityKind.MVAR, QuantityKind.TAP, QuantityKind.STATUS}
    ),
    ComponentKind.GENERATOR: frozenset(
        {QuantityKind.MW, QuantityKind.MVAR, QuantityKind.KV, QuantityKind.STATUS}
    ),
    ComponentKind.TRANSMISSION_LINE: frozenset(
        {QuantityKind.MW, QuantityKind.MVAR, QuantityKind.KV, QuantityKind.STATUS}
    ),
    ComponentKind.REACTOR_CAPACITOR: frozenset(
        {QuantityKind.MVAR, QuantityKind.STATUS}
    ),
    ComponentKind.BUSBAR: frozenset({QuantityKind.KV, QuantityKind.STATUS}),
}

#: All valid (component, quantity) pairs, in a stable order.
VALID_PAIRS: tuple[tuple[ComponentKind, QuantityKind], ...] = tuple(
    (c, q) for c in ComponentKind for q in QuantityKind if q in APPLICABILITY[c]
)

_TAG_BY_CODE = {t.value: t for t in ValidityTag}
_TAG_BY_NAME = {t.name: t for t in ValidityTag}

# "MV" is how some exports abbreviate reactive power; normalize it to MVAR
# to avoid any reading as megavolts.
_QUANTITY_ALIASES = {"MV": QuantityKind.MVAR}


def _canon(token: str) -> str:
    return re.sub(r"[\s,/-]+", "_", token.strip()).upper()


def parse_quantity(token: str) -> QuantityKind:
    c = _canon(token)
    if c in _QUANTITY_ALIASES:
        return _QUANTITY_ALIASES[c]
    try:
        return QuantityKind[c]
    except KeyError:
        raise TaxonomyError(f"unknown quantity kind: {token!r}") from None


def parse_component(token: str) -> ComponentKind:
    try:
        return ComponentKind[_canon(token)]
    except KeyError:
        raise TaxonomyError(f"unknown component kind: {token!r}") from None


def parse_tag(code: str) -> ValidityTag:
    """Parse a one-letter validity tag (F, N, V, I, M); full names also accepted."""
    c = _canon(code)
    if c in _TAG_BY_CODE:
        return _TAG_BY_CODE[c]
    if c in _TAG_BY_NAME:
        return _TAG_BY_NAME[c]
    raise TaxonomyError(f"unknown validity tag: {code!r}")


def serialize_tag(tag: ValidityTag) -> str:
    return tag.value


def validate_pair(component: ComponentKind, quantity: QuantityKind) -> bool:
    """True iff the component can report the quantity."""
    return quantity in APPLICABILITY[component]


@dataclass(frozen=True)
class SignalDescriptor:
    """One telemetry point in the inventory.

    in_instruction marks signals named in operating instructions (they get a
    doubled weight in the weighted index); weighted_scope=False keeps a
    signal in the plain index but drops it from the weighted one.
    """

    signal_id: str
    area: str
    station: str
    component: ComponentKind
    quantity: QuantityKind
    in_instruction: bool = False
    weighted_scope: bool = True

    def __post_init__(self):
        if not self.signal_id:
            raise TaxonomyError("signal_id must be non-empty")
        if not validate_pair(self.component, self.quantity):
            raise TaxonomyError(
                f"signal {self.signal_id!r}: component {self.component.name} "
                f"does not report {self.quantity.name}"
            )


def applicability_tokens() -> dict[str, list[str]]:
    """Applicability map with string tokens, e.g. for the HTTP API and docs."""
    return {
        c.name: sorted(q.name for q in APPLICABILITY[c]) for c in ComponentKind
    }
