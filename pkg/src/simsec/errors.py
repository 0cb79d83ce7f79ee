"""Exception types shared across the package."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Violation:
    """One broken invariant found while validating a complex or model."""

    kind: str
    message: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


class InvalidStructure(ValueError):
    """Raised with the complete list of violations, never just the first."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "\n".join(f"  {v}" for v in self.violations)
        super().__init__(f"{len(self.violations)} violation(s):\n{lines}")

    @property
    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


class InvalidComplex(InvalidStructure):
    pass


class InvalidModel(InvalidStructure):
    def __init__(self, violations, sn_violations=()):
        super().__init__(violations)
        self.sn_violations = list(sn_violations)


class UnknownVertex(KeyError):
    pass


class UnknownFacet(KeyError):
    pass


class UnknownAgent(KeyError):
    pass


class ReservedColourInUse(ValueError):
    pass


class ModulusTooSmall(ValueError):
    pass


class SingleAgent(ValueError):
    pass


class NotIndistinguishable(ValueError):
    pass


class BoundsTooLarge(RuntimeError):
    pass


class TooManyAtoms(RuntimeError):
    pass
