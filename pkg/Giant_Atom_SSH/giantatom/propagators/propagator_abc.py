import numpy as np


class PropagatorABC:
    """Parent Class for Schroedinger propagators psi(t) = exp(-iHt) psi0."""

    def __init__(self, rtol: float = 1e-10, atol: float = 1e-12):
        """
        Base propagator.

        :param rtol: Relative tolerance, used by adaptive steppers.
        :param atol: Absolute tolerance, used by adaptive steppers.
        """
        self.rtol = rtol
        self.atol = atol

    def propagate(self, H: np.ndarray, psi0: np.ndarray, t: float) -> np.ndarray:
        """
        Evolves a state.

        :param H: Dense Hamiltonian.
        :param psi0: Initial state.
        :param t: Final time, t >= 0.
        :return: Unrenormalized state at time t.
        """
        raise NotImplementedError()

    def __call__(self, H: np.ndarray, psi0: np.ndarray, t: float) -> np.ndarray:
        """
        Evolves a state.

        :param H: Dense Hamiltonian.
        :param psi0: Initial state.
        :param t: Final time, t >= 0.
        :return: Unrenormalized state at time t.
        """
        return self.propagate(np.asarray(H, dtype=complex), np.asarray(psi0, dtype=complex), float(t))
