"""Bundled example data and reference values.

* A 5x5 cross-tabulation of responses to the polar adjective pair
  "not envious" / "envious" from a public Big Five administration of 725
  online respondents, reconstructed from its published relative
  frequencies.  The pair is the canonical demonstration of inattentive
  responding attenuating a strongly negative correlation.
* The latent correlation matrix, thresholds, and contaminating component
  used by the bundled simulation designs.
* Reference pairwise correlation matrices (maximum likelihood and robust,
  c = 0.6) for three 12-item adjective scales from the same
  administration, bundled as regression expectations for the
  "robust at least as strong as ML" difference pattern.
"""

import numpy as np

from .model import ContingencyTable

__all__ = [
    "envious_pair_frequencies",
    "envious_pair_table",
    "pair_design_thresholds",
    "pair_design_rho",
    "pair_design_contaminant",
    "matrix_design_correlations",
    "matrix_design_thresholds",
    "big_five_reference_matrices",
    "big_five_item_names",
]

_ENVIOUS_FREQ = np.array([
    [0.019, 0.007, 0.003, 0.028, 0.022],
    [0.007, 0.040, 0.050, 0.138, 0.014],
    [0.006, 0.047, 0.143, 0.030, 0.003],
    [0.054, 0.189, 0.029, 0.019, 0.007],
    [0.108, 0.018, 0.006, 0.008, 0.007],
])

_ENVIOUS_N = 725


def envious_pair_frequencies():
    """Published relative frequencies of the "not envious"/"envious" pair."""
    return _ENVIOUS_FREQ.copy()


def envious_pair_table():
    """Counts reconstructed as round(725 * frequencies); they total 725."""
    counts = np.rint(_ENVIOUS_FREQ * _ENVIOUS_N).astype(np.int64)
    return ContingencyTable(
        counts=counts,
        row_labels=(1, 2, 3, 4, 5),
        col_labels=(1, 2, 3, 4, 5),
    )


def pair_design_thresholds():
    """Symmetric 5-category thresholds of the single-coefficient design."""
    return np.array([-1.5, -0.5, 0.5, 1.5])


#: True latent correlation of the single-coefficient simulation design.
pair_design_rho = 0.5


def pair_design_contaminant():
    """Contaminating normal component: mean, variances, covariance.

    A tight cluster at (2, -2) that lands in the corner cells a positively
    correlated latent pair makes nearly impossible.
    """
    return {"mean": (2.0, -2.0), "variances": (0.2, 0.2), "covariance": 0.0}


def matrix_design_correlations():
    """Latent correlation matrix of the 5-variable matrix design."""
    r = np.array([
        [1.00, 0.56, 0.48, 0.40, 0.32],
        [0.56, 1.00, 0.42, 0.35, 0.28],
        [0.48, 0.42, 1.00, 0.30, 0.24],
        [0.40, 0.35, 0.30, 1.00, 0.20],
        [0.32, 0.28, 0.24, 0.20, 1.00],
    ])
    return r


def matrix_design_thresholds():
    """Common 5-category thresholds of the matrix design."""
    return np.array([-1.28, -0.52, 0.56, 1.28])


def _parse(rows):
    return np.array([[float(v) for v in row.split()] for row in rows.strip().splitlines()])


_NEUROTICISM_ITEMS = (
    "calm", "angry", "relaxed", "tense", "at ease", "nervous",
    "not envious", "envious", "stable", "unstable", "contented", "discontented",
)
_EXTROVERSION_ITEMS = (
    "extraverted", "introverted", "energetic", "unenergetic", "talkative", "silent",
    "bold", "timid", "assertive", "unassertive", "adventurous", "unadventurous",
)
_CONSCIENTIOUSNESS_ITEMS = (
    "organized", "disorganized", "responsible", "irresponsible", "conscientious", "negligent",
    "practical", "impractical", "thorough", "careless", "hardworking", "lazy",
)

_NEUROTICISM_ML = _parse("""
1.00 -0.37 0.71 -0.50 0.69 -0.49 0.27 -0.24 0.58 -0.47 0.42 -0.32
-0.37 1.00 -0.40 0.55 -0.39 0.47 -0.19 0.40 -0.39 0.60 -0.32 0.56
0.71 -0.40 1.00 -0.55 0.75 -0.54 0.26 -0.26 0.55 -0.41 0.53 -0.47
-0.50 0.55 -0.55 1.00 -0.54 0.65 -0.24 0.42 -0.41 0.57 -0.31 0.52
0.69 -0.39 0.75 -0.54 1.00 -0.53 0.29 -0.28 0.63 -0.44 0.52 -0.48
-0.49 0.47 -0.54 0.65 -0.53 1.00 -0.28 0.43 -0.44 0.58 -0.29 0.47
0.27 -0.19 0.26 -0.24 0.29 -0.28 1.00 -0.61 0.26 -0.20 0.18 -0.20
-0.24 0.40 -0.26 0.42 -0.28 0.43 -0.61 1.00 -0.33 0.46 -0.22 0.44
0.58 -0.39 0.55 -0.41 0.63 -0.44 0.26 -0.33 1.00 -0.69 0.53 -0.46
-0.47 0.60 -0.41 0.57 -0.44 0.58 -0.20 0.46 -0.69 1.00 -0.35 0.57
0.42 -0.32 0.53 -0.31 0.52 -0.29 0.18 -0.22 0.53 -0.35 1.00 -0.58
-0.32 0.56 -0.47 0.52 -0.48 0.47 -0.20 0.44 -0.46 0.57 -0.58 1.00
""")

_NEUROTICISM_ROBUST = _parse("""
1.00 -0.47 0.80 -0.58 0.79 -0.56 0.30 -0.26 0.63 -0.54 0.49 -0.39
-0.47 1.00 -0.48 0.58 -0.49 0.54 -0.26 0.45 -0.47 0.68 -0.43 0.63
0.80 -0.48 1.00 -0.66 0.85 -0.60 0.32 -0.32 0.64 -0.50 0.60 -0.56
-0.58 0.58 -0.66 1.00 -0.70 0.76 -0.37 0.49 -0.48 0.60 -0.35 0.55
0.79 -0.49 0.85 -0.70 1.00 -0.62 0.35 -0.39 0.66 -0.52 0.59 -0.57
-0.56 0.54 -0.60 0.76 -0.62 1.00 -0.42 0.49 -0.52 0.58 -0.37 0.53
0.30 -0.26 0.32 -0.37 0.35 -0.42 1.00 -0.92 0.35 -0.30 0.30 -0.33
-0.26 0.45 -0.32 0.49 -0.39 0.49 -0.92 1.00 -0.39 0.50 -0.33 0.53
0.63 -0.47 0.64 -0.48 0.66 -0.52 0.35 -0.39 1.00 -0.82 0.59 -0.55
-0.54 0.68 -0.50 0.60 -0.52 0.58 -0.30 0.50 -0.82 1.00 -0.44 0.61
0.49 -0.43 0.60 -0.35 0.59 -0.37 0.30 -0.33 0.59 -0.44 1.00 -0.75
-0.39 0.63 -0.56 0.55 -0.57 0.53 -0.33 0.53 -0.55 0.61 -0.75 1.00
""")

_EXTROVERSION_ML = _parse("""
1.00 -0.77 0.50 -0.26 0.70 -0.50 0.56 -0.42 0.51 -0.40 0.51 -0.32
-0.77 1.00 -0.38 0.34 -0.59 0.61 -0.45 0.54 -0.47 0.50 -0.35 0.37
0.50 -0.38 1.00 -0.65 0.43 -0.27 0.49 -0.28 0.47 -0.38 0.54 -0.39
-0.26 0.34 -0.65 1.00 -0.24 0.34 -0.30 0.40 -0.32 0.48 -0.38 0.49
0.70 -0.59 0.43 -0.24 1.00 -0.59 0.44 -0.36 0.46 -0.40 0.41 -0.25
-0.50 0.61 -0.27 0.34 -0.59 1.00 -0.27 0.56 -0.35 0.45 -0.24 0.37
0.56 -0.45 0.49 -0.30 0.44 -0.27 1.00 -0.41 0.64 -0.49 0.54 -0.34
-0.42 0.54 -0.28 0.40 -0.36 0.56 -0.41 1.00 -0.49 0.60 -0.27 0.40
0.51 -0.47 0.47 -0.32 0.46 -0.35 0.64 -0.49 1.00 -0.71 0.39 -0.23
-0.40 0.50 -0.38 0.48 -0.40 0.45 -0.49 0.60 -0.71 1.00 -0.34 0.45
0.51 -0.35 0.54 -0.38 0.41 -0.24 0.54 -0.27 0.39 -0.34 1.00 -0.68
-0.32 0.37 -0.39 0.49 -0.25 0.37 -0.34 0.40 -0.23 0.45 -0.68 1.00
""")

_EXTROVERSION_ROBUST = _parse("""
1.00 -0.87 0.55 -0.34 0.75 -0.62 0.58 -0.58 0.54 -0.45 0.55 -0.39
-0.87 1.00 -0.40 0.36 -0.67 0.63 -0.52 0.62 -0.52 0.51 -0.36 0.37
0.55 -0.40 1.00 -0.84 0.50 -0.32 0.56 -0.38 0.55 -0.43 0.57 -0.44
-0.34 0.36 -0.84 1.00 -0.30 0.35 -0.40 0.43 -0.41 0.54 -0.45 0.53
0.75 -0.67 0.50 -0.30 1.00 -0.71 0.50 -0.51 0.52 -0.50 0.42 -0.28
-0.62 0.63 -0.32 0.35 -0.71 1.00 -0.38 0.62 -0.47 0.47 -0.30 0.37
0.58 -0.52 0.56 -0.40 0.50 -0.38 1.00 -0.55 0.73 -0.64 0.61 -0.48
-0.58 0.62 -0.38 0.43 -0.51 0.62 -0.55 1.00 -0.61 0.66 -0.33 0.44
0.54 -0.52 0.55 -0.41 0.52 -0.47 0.73 -0.61 1.00 -0.85 0.44 -0.29
-0.45 0.51 -0.43 0.54 -0.50 0.47 -0.64 0.66 -0.85 1.00 -0.41 0.47
0.55 -0.36 0.57 -0.45 0.42 -0.30 0.61 -0.33 0.44 -0.41 1.00 -0.83
-0.39 0.37 -0.44 0.53 -0.28 0.37 -0.48 0.44 -0.29 0.47 -0.83 1.00
""")

_CONSCIENTIOUSNESS_ML = _parse("""
1.00 -0.76 0.56 -0.42 0.34 -0.35 0.37 -0.26 0.51 -0.40 0.43 -0.43
-0.76 1.00 -0.51 0.58 -0.24 0.55 -0.32 0.44 -0.43 0.61 -0.44 0.55
0.56 -0.51 1.00 -0.69 0.42 -0.55 0.57 -0.42 0.51 -0.54 0.65 -0.55
-0.42 0.58 -0.69 1.00 -0.39 0.75 -0.48 0.67 -0.42 0.70 -0.53 0.63
0.34 -0.24 0.42 -0.39 1.00 -0.32 0.39 -0.34 0.44 -0.33 0.38 -0.25
-0.35 0.55 -0.55 0.75 -0.32 1.00 -0.37 0.59 -0.38 0.71 -0.44 0.53
0.37 -0.32 0.57 -0.48 0.39 -0.37 1.00 -0.51 0.36 -0.38 0.39 -0.31
-0.26 0.44 -0.42 0.67 -0.34 0.59 -0.51 1.00 -0.38 0.59 -0.31 0.43
0.51 -0.43 0.51 -0.42 0.44 -0.38 0.36 -0.38 1.00 -0.43 0.54 -0.39
-0.40 0.61 -0.54 0.70 -0.33 0.71 -0.38 0.59 -0.43 1.00 -0.43 0.53
0.43 -0.44 0.65 -0.53 0.38 -0.44 0.39 -0.31 0.54 -0.43 1.00 -0.61
-0.43 0.55 -0.55 0.63 -0.25 0.53 -0.31 0.43 -0.39 0.53 -0.61 1.00
""")

_CONSCIENTIOUSNESS_ROBUST = _parse("""
1.00 -0.89 0.57 -0.56 0.36 -0.46 0.43 -0.35 0.54 -0.56 0.49 -0.52
-0.89 1.00 -0.58 0.64 -0.31 0.60 -0.38 0.47 -0.48 0.69 -0.52 0.61
0.57 -0.58 1.00 -0.86 0.45 -0.68 0.62 -0.54 0.55 -0.65 0.69 -0.64
-0.56 0.64 -0.86 1.00 -0.44 0.80 -0.57 0.74 -0.50 0.76 -0.61 0.66
0.36 -0.31 0.45 -0.44 1.00 -0.43 0.42 -0.46 0.17 -0.41 0.40 -0.26
-0.46 0.60 -0.68 0.80 -0.43 1.00 -0.48 0.70 -0.52 0.78 -0.55 0.59
0.43 -0.38 0.62 -0.57 0.42 -0.48 1.00 -0.68 0.39 -0.47 0.44 -0.33
-0.35 0.47 -0.54 0.74 -0.46 0.70 -0.68 1.00 -0.47 0.66 -0.42 0.45
0.54 -0.48 0.55 -0.50 0.17 -0.52 0.39 -0.47 1.00 -0.54 0.60 -0.45
-0.56 0.69 -0.65 0.76 -0.41 0.78 -0.47 0.66 -0.54 1.00 -0.59 0.61
0.49 -0.52 0.69 -0.61 0.40 -0.55 0.44 -0.42 0.60 -0.59 1.00 -0.69
-0.52 0.61 -0.64 0.66 -0.26 0.59 -0.33 0.45 -0.45 0.61 -0.69 1.00
""")


def big_five_item_names():
    """Item adjectives per scale, positive/negative opposites alternating."""
    return {
        "neuroticism": _NEUROTICISM_ITEMS,
        "extroversion": _EXTROVERSION_ITEMS,
        "conscientiousness": _CONSCIENTIOUSNESS_ITEMS,
    }


def big_five_reference_matrices():
    """Reference (ml, robust) correlation-matrix pairs per scale.

    Robust estimates used c = 0.6; entries are published to two decimals.
    """
    return {
        "neuroticism": (_NEUROTICISM_ML.copy(), _NEUROTICISM_ROBUST.copy()),
        "extroversion": (_EXTROVERSION_ML.copy(), _EXTROVERSION_ROBUST.copy()),
        "conscientiousness": (_CONSCIENTIOUSNESS_ML.copy(), _CONSCIENTIOUSNESS_ROBUST.copy()),
    }
