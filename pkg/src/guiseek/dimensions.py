"""Search dimensions: the named facets along which screens are annotated,
embedded, scored, and weighted.

Dimension ids are the normative keys used everywhere (annotation maps,
index matrices, weight profiles); names and descriptions are prompt and
UI material only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_ID_PATTERN = re.compile(r"^[a-z0-9_]+$")


@dataclass(frozen=True)
class SearchDimension:
    """One named, described facet of a GUI with a default weight."""

    id: str
    name: str
    description: str
    default_weight: float = 1.0

    def __post_init__(self):
        if not self.id or not _ID_PATTERN.match(self.id):
            raise ValueError(
                f"dimension id must be lowercase with no spaces, got {self.id!r}"
            )
        if self.default_weight < 0:
            raise ValueError(
                f"dimension {self.id!r}: default_weight must be >= 0, "
                f"got {self.default_weight}"
            )


@dataclass(frozen=True)
class DimensionSet:
    """Ordered, immutable collection of search dimensions."""

    dimensions: tuple[SearchDimension, ...]

    def __post_init__(self):
        if not self.dimensions:
            raise ValueError("a dimension set needs at least one dimension")
        seen = set()
        for dim in self.dimensions:
            if dim.id in seen:
                raise ValueError(f"duplicate dimension id {dim.id!r}")
            seen.add(dim.id)

    def __iter__(self):
        return iter(self.dimensions)

    def __len__(self):
        return len(self.dimensions)

    def ids(self) -> tuple[str, ...]:
        return tuple(dim.id for dim in self.dimensions)

    def get(self, dim_id: str) -> SearchDimension:
        for dim in self.dimensions:
            if dim.id == dim_id:
                return dim
        raise KeyError(f"unknown dimension {dim_id!r}")

    def default_weights(self) -> dict[str, float]:
        return {dim.id: dim.default_weight for dim in self.dimensions}

    def to_records(self) -> list[dict]:
        return [
            {
                "id": dim.id,
                "name": dim.name,
                "description": dim.description,
                "default_weight": dim.default_weight,
            }
            for dim in self.dimensions
        ]

    @classmethod
    def from_records(cls, records: list[dict]) -> "DimensionSet":
        dims = tuple(
            SearchDimension(
                id=rec["id"],
                name=rec["name"],
                description=rec["description"],
                default_weight=float(rec.get("default_weight", 1.0)),
            )
            for rec in records
        )
        return cls(dims)


# Description texts are configuration written for this project, not ground
# truth; they steer annotation and decomposition prompts and can be replaced
# per dataset in the manifest.
_DEFAULT_DIMENSIONS = (
    SearchDimension(
        id="domain",
        name="Domain",
        description=(
            "The application domain or business area the screen belongs to, "
            "such as food delivery, banking, fitness, travel booking, or "
            "social networking."
        ),
    ),
    SearchDimension(
        id="functionality",
        name="Functionality",
        description=(
            "What the screen lets the user do: the tasks, features, and "
            "interactions it supports, such as logging in, searching "
            "products, tracking an order, or checking out."
        ),
    ),
    SearchDimension(
        id="design",
        name="Design",
        description=(
            "The visual style of the screen: color palette, light or dark "
            "theme, typography, imagery, layout density, and overall "
            "aesthetic."
        ),
    ),
    SearchDimension(
        id="gui_components",
        name="GUI components",
        description=(
            "The interface elements visible on the screen, such as buttons, "
            "input fields, lists, cards, navigation bars, tabs, sliders, "
            "and dialogs."
        ),
    ),
    SearchDimension(
        id="displayed_text",
        name="Displayed text",
        description=(
            "The literal text visible on the screen: headings, labels, "
            "button captions, and other on-screen copy."
        ),
    ),
)


def default_dimension_set() -> DimensionSet:
    """The five stock dimensions, every default weight 1.0."""
    return DimensionSet(_DEFAULT_DIMENSIONS)
