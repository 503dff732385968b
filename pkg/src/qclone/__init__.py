"""Quantum cloning as an information-distribution primitive.

Modules
-------
qcore
    Small dense states, operators, Jacobi eigenvalues, Haar sampling.
ucm
    Optimal universal N -> M cloning, closed form and explicit channel.
pcm
    Probabilistic exact cloning and unambiguous identification via Gram matrices.
task1, task2
    Harnesses for the two cloning-enhanced computation games.
cli
    ``qclone`` command-line entry point.
"""

__version__ = "0.1.0"
