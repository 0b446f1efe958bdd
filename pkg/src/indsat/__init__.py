"""Saturation-based prover for unit-equational problems over algebraic
datatypes, extending superposition with rewriting calculi, structural
induction, and redundancy-aware induction skipping."""

from pathlib import Path

DATA_DIR = Path(__file__).parent / "data"

__all__ = ["DATA_DIR"]
