from __future__ import annotations

from typing import Hashable


class StructuralError(Exception):
    """Block data is malformed or inconsistent."""


class WindowOverflow(StructuralError):
    """A computation needed an index pair the window does not certify.

    Attributes:
        pair (tuple): The missing ``(alpha, beta)`` pair.
    """

    def __init__(self, pair: tuple[Hashable, Hashable], context: str = ""):
        self.pair = pair
        self.context = context
        where = f" ({context})" if context else ""
        super().__init__(f"window does not certify pair {pair!r}{where}")


class SpecFormatError(StructuralError):
    """A spec document violates the schema.

    Attributes:
        field (str): Path of the offending field, e.g. ``delta.g.0.iso``.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")


class GroupTableError(StructuralError):
    """A multiplication table is not a group."""


class BuilderError(StructuralError):
    """An example builder could not solve for its structure data."""


class CertificateError(StructuralError):
    """A module vector is missing a valid support certificate."""
