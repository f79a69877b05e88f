"""Exact computations with Beilinson-Green algebras of orbit categories over finite fields."""

from .phiorbit import AdmissibleSet, OrbitCategory, is_admissible
from .quivalg import Algebra, PathBoundSpec, build_algebra
from .tilt import Fingerprint, Scenario, fingerprint, verify_theorem31

__version__ = "0.1.0"

__all__ = [
    "AdmissibleSet", "Algebra", "Fingerprint", "OrbitCategory", "PathBoundSpec", "Scenario",
    "build_algebra", "fingerprint", "is_admissible", "verify_theorem31",
]
