"""jdsp: block-diagram DSP simulation engine.

Submodules: signals (generation, WAV, CSV), filters (rational filters,
roots, stability), design (FIR/IIR design), spectral (FFT, windows,
multirate, QMF), lpc (linear prediction, formants), classify (k-means,
phoneme experiment), quantum (QFT statevector codec), graph + catalog
(block-diagram engine), cli, service.
"""

__version__ = "0.1.0"
