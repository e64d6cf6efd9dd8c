"""Soft-information network coding over a noisy two-source relay network."""

from .core import L_MAX, LINK_ABSENT, Permutation, boxplus, db_to_noise_variance, make_permutation

__all__ = ["L_MAX", "LINK_ABSENT", "Permutation", "boxplus", "db_to_noise_variance", "make_permutation"]
__version__ = "0.1.0"
