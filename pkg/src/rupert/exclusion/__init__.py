"""Region exclusion by the global and local theorems."""

from .types import CheckResult, GlobalWitness, LocalWitness, Step

__all__ = ["CheckResult", "GlobalWitness", "LocalWitness", "Step"]
