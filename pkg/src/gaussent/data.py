"""Measured covariance matrices of the type-II OPO experiment, ``A+, A-`` basis.

Entries are shot-noise normalized and rounded to two decimals.
The intermodal blocks were not trusted experimentally and are set to zero.
"""

import numpy as np

#: no intracavity coupling: squeezing on orthogonal quadratures
MEASURED_UNTILTED = np.diag([0.33, 7.94, 7.94, 0.33])

#: plate rotated by 0.3 degrees: the A- squeezing axis is tilted
MEASURED_TILTED = np.array(
    [
        [0.4, 0.0, 0.0, 0.0],
        [0.0, 12.59, 0.0, 0.0],
        [0.0, 0.0, 9.54, -5.28],
        [0.0, 0.0, -5.28, 3.45],
    ]
)

#: the tilted state after the passive (waveplate) correction
MEASURED_CORRECTED = np.diag([0.4, 12.59, 12.59, 0.4])

#: logarithmic negativities between A1 and A2 reported for these states
REPORTED_LOGNEG = {
    "untilted": 1.60,
    "tilted": 1.13,
    "corrected": 1.32,
}
