import numpy as np
from scipy.integrate import solve_ivp

from giantatom.errors import NumericalError
from giantatom.propagators.propagator_abc import PropagatorABC


class RungeKuttaPropagator(PropagatorABC):
    """Adaptive DOP853 integration of i d psi/dt = H psi."""

    def __init__(self, rtol: float = 1e-10, atol: float = 1e-12, method: str = 'DOP853'):
        """
        Constructor.

        :param rtol: Relative tolerance.
        :param atol: Absolute tolerance.
        :param method: Any explicit solve_ivp method that accepts complex states.
        """
        super().__init__(rtol, atol)
        self.method = method

    def propagate(self, H: np.ndarray, psi0: np.ndarray, t: float) -> np.ndarray:
        if t == 0:
            return psi0.copy()
        result = solve_ivp(
            lambda _, y: -1j * (H @ y),
            (0.0, t),
            psi0,
            method=self.method,
            rtol=self.rtol,
            atol=self.atol,
            t_eval=[t],
        )
        if not result.success:
            raise NumericalError(f'adaptive integration failed at t = {result.t[-1] if len(result.t) else 0}: {result.message}')
        return result.y[:, -1]
