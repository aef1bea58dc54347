"""Combinatorics of scaled-curve stratifications: partition lattices,
collision-set nests, decorated dual trees, blowup-order transversality
checks, and stratum/fiber dimension reports."""

__version__ = "0.1.0"
