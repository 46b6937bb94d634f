from typing import Tuple

import numpy as np

REDUCE_MAP = {
    'mean': np.mean,
    'min': np.min,
    'median': np.median,
    'max': np.max,
}

FLOAT_FORMAT = '%.17g'


def canonical_order(values: np.ndarray) -> np.ndarray:
    """
    Sort permutation by real part, then imaginary part.

    :param values: Complex eigenvalues.
    :return: Index array.
    """
    values = np.asarray(values)
    return np.lexsort((values.imag, values.real))


def round_half_toward_zero(x: float) -> int:
    """Nearest integer, with exact halves rounded toward zero."""
    return int(np.sign(x) * np.ceil(abs(x) - 0.5))


def quadratic_roots(a: complex, b: complex, c: complex) -> Tuple[complex, complex, bool]:
    """
    Roots of a z^2 + b z + c = 0 without cancellation.

    The larger root comes from the sign of the square root aligned with -b,
    the smaller one from Vieta's product c / a.

    :param a: Leading coefficient, nonzero.
    :param b: Linear coefficient.
    :param c: Constant coefficient.
    :return: (large, small, degenerate) where degenerate marks a vanishing discriminant.
    """
    a, b, c = complex(a), complex(b), complex(c)
    disc = np.sqrt(b * b - 4.0 * a * c)
    scale = max(abs(b), 2.0 * np.sqrt(abs(a * c)), np.finfo(float).tiny)
    degenerate = abs(disc) <= 1e-12 * scale

    if (np.conj(-b) * disc).real < 0:
        disc = -disc

    q = -b + disc
    if q == 0:
        return 0j, 0j, degenerate

    large = q / (2.0 * a)
    small = (2.0 * c) / q
    if abs(small) > abs(large):
        large, small = small, large

    return complex(large), complex(small), bool(degenerate)
