"""Goodness-of-fit method names and results."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from paired_gof.models import ModelKind


class GofMethod(str, Enum):
    G2 = "g2"
    X2 = "x2"
    X2ADJ = "x2adj"
    B1 = "b1"
    B2 = "b2"
    B3 = "b3"

    @property
    def is_bootstrap(self) -> bool:
        return self in (GofMethod.B1, GofMethod.B2, GofMethod.B3)

    @property
    def ordering_statistic(self) -> GofMethod | None:
        """Asymptotic statistic a bootstrap method orders replicates by (None for B3)."""
        return {GofMethod.B1: GofMethod.G2, GofMethod.B2: GofMethod.X2}.get(self)

    @property
    def label(self) -> str:
        return _LABELS[self]

    @classmethod
    def parse(cls, name: str) -> GofMethod:
        key = name.strip().lower().replace("²", "2").replace("_", "")
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown method: {name!r}") from None

    @classmethod
    def parse_list(cls, text: str) -> list[GofMethod]:
        """Comma-separated method names; ``all`` expands to every method in column order."""
        names = [part for part in (p.strip() for p in text.split(",")) if part]
        if any(n.lower() == "all" for n in names):
            return list(ALL_METHODS)
        methods: list[GofMethod] = []
        for name in names:
            method = cls.parse(name)
            if method not in methods:
                methods.append(method)
        return methods


_LABELS = {
    GofMethod.G2: "G2",
    GofMethod.X2: "X2",
    GofMethod.X2ADJ: "X2adj",
    GofMethod.B1: "B1",
    GofMethod.B2: "B2",
    GofMethod.B3: "B3",
}

ALL_METHODS: tuple[GofMethod, ...] = tuple(GofMethod)
ASYMPTOTIC_METHODS = (GofMethod.G2, GofMethod.X2, GofMethod.X2ADJ)
BOOTSTRAP_METHODS = (GofMethod.B1, GofMethod.B2, GofMethod.B3)


@dataclass(frozen=True)
class GofResult:
    """Outcome of one goodness-of-fit test.

    For B3 ``statistic`` holds the probability of the observed table.
    Bootstrap results report ``p_value = n_extreme / n_boot`` where
    ``n_boot`` counts only the replicates whose refit succeeded.
    """

    model: ModelKind
    method: GofMethod
    statistic: float
    p_value: float
    dof: int | None = None
    n_boot: int | None = None
    n_extreme: int | None = None
    n_ties: int | None = None
    failed_replicates: int | None = None
    boundary: bool = False
