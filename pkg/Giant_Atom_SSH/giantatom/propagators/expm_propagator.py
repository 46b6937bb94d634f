import hashlib

import numpy as np
from scipy.linalg import expm

from giantatom.propagators.propagator_abc import PropagatorABC


class ExpmPropagator(PropagatorABC):
    """Dense scaling-and-squaring matrix exponential. The last step operator is reused."""

    def __init__(self, rtol: float = 1e-10, atol: float = 1e-12):
        super().__init__(rtol, atol)
        self._key = None
        self._operator = None

    def propagate(self, H: np.ndarray, psi0: np.ndarray, t: float) -> np.ndarray:
        key = (t, H.shape, hashlib.sha256(np.ascontiguousarray(H).tobytes()).hexdigest())
        if key != self._key:
            self._operator = expm(-1j * t * H)
            self._key = key
        return self._operator @ psi0
