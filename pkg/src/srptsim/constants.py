"""Physical constants used across the package, all SI."""

from scipy.constants import e, h, hbar
from scipy.constants import k as k_B

# Magnetic flux quantum h / (2e), in weber.
PHI0 = h / (2.0 * e)

__all__ = ["e", "h", "hbar", "k_B", "PHI0"]
