"""modsig: hidden-signal analysis for integer sequences.

Builds greedy numeration systems over recurrent bases, evaluates
self-referential sequences through their digit-shift closed forms, computes
rigorous distances ||beta * a_n|| at adaptive precision, classifies which
frequencies carry a signal, and measures the resulting circle distributions
with exact-reduction Weyl sums, FFT scans, and histograms.
"""

from . import algebra, hofstadter, limits, numeration, precision, seqcore, weyl

__version__ = "0.1.0"

__all__ = [
    "algebra",
    "hofstadter",
    "limits",
    "numeration",
    "precision",
    "seqcore",
    "weyl",
    "__version__",
]
