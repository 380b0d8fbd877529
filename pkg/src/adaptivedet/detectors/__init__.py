"""Detector statistic banks."""

from .point import (
    ClairvoyantStats,
    PointStats,
    RankOneStats,
    clairvoyant_bank,
    rank_one_bank,
    stats_from_energies,
    subspace_bank,
)
from .distributed import (
    DirectionStats,
    DistributedHEStats,
    DistributedPHEStats,
    DistributedStats,
    DosStats,
    direction_bank,
    distributed_bank,
    distributed_rank1_he,
    distributed_rank1_phe,
    dos_bank,
    rao_he_recast,
    solve_sigma,
)
from .interference import (
    InterferenceGeometry,
    InterferenceStats,
    interference_bank,
    mismatch_geometry,
)

__all__ = [
    "PointStats", "RankOneStats", "ClairvoyantStats",
    "subspace_bank", "rank_one_bank", "clairvoyant_bank", "stats_from_energies",
    "DistributedHEStats", "DistributedPHEStats", "DistributedStats",
    "DirectionStats", "DosStats",
    "distributed_rank1_he", "distributed_rank1_phe", "distributed_bank",
    "direction_bank", "dos_bank", "rao_he_recast", "solve_sigma",
    "InterferenceStats", "InterferenceGeometry",
    "interference_bank", "mismatch_geometry",
]
