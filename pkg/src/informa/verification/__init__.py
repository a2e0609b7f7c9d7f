"""Norm oracles, feasible-set sampling and controller audits."""

from .audit import AuditReport, BoundType, Violation, audit, audit_base
from .membership import NoiseReconstruction, membership, reconstruct_noise, sample_members
from .norms import h2_norm, hinf_norm, hinf_norm_grid, sigma_max, solve_stein, spectral_radius

__all__ = [
    "AuditReport",
    "BoundType",
    "NoiseReconstruction",
    "Violation",
    "audit",
    "audit_base",
    "h2_norm",
    "hinf_norm",
    "hinf_norm_grid",
    "membership",
    "reconstruct_noise",
    "sample_members",
    "sigma_max",
    "solve_stein",
    "spectral_radius",
]
