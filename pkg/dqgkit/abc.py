from abc import ABC, abstractmethod
from typing import Any


class AbstractDocument(ABC):
    """Represents an abstract illustration of anything written to disk or stdout."""

    @abstractmethod
    def to_json(self) -> dict[str, Any]:
        """Converts the object to a valid JSON."""
