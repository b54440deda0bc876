"""Toolkit for pair correlation statistics of Dirichlet L-function zeros.

Layout:

- characters: unit groups mod q, exact character values, Gauss sums
- lfunc: Hurwitz zeta, L-values, completed-line real rotation
- zeros: certified zero scanning on the critical line
- sieve: prime/prime-power tables and weighted prime sums
- paircorr: pair correlation forms and their integral identities
- explicit: zero-sum reconstructions of prime-counting sums
- conjectures: numeric harnesses for error-term hypotheses
- store: binary zero caches and table emission
- cli: command-line front end
"""

from zeropair.characters import (
    CharacterLabel,
    DirichletCharacter,
    character,
    enumerate_characters,
)

__all__ = [
    "CharacterLabel",
    "DirichletCharacter",
    "character",
    "enumerate_characters",
]

__version__ = "0.1.0"
