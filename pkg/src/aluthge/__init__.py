"""Finite-dimensional toolkit for the lambda-Aluthge transform.

Computes ``|T|^λ V |T|^(1-λ)`` from canonical polar factors, checks the
identities it satisfies on seeded random ensembles, and analyzes matrix
maps that commute with the transform of products.
"""
from .errors import AluthgeError
from .matcore import DEFAULT, ToleranceConfig, herm_eig, is_psd, polar, psd_power
from .transform import aluthge, aluthge_iterate, aluthge_rank_one, duggal

__all__ = [
    "AluthgeError",
    "DEFAULT",
    "ToleranceConfig",
    "aluthge",
    "aluthge_iterate",
    "aluthge_rank_one",
    "duggal",
    "herm_eig",
    "is_psd",
    "polar",
    "psd_power",
]
__version__ = "0.1.0"
