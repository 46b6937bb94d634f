from giantatom.propagators.expm_propagator import ExpmPropagator
from giantatom.propagators.propagator_abc import PropagatorABC
from giantatom.propagators.rk_propagator import RungeKuttaPropagator

__all__ = ["ExpmPropagator", "PropagatorABC", "RungeKuttaPropagator"]
