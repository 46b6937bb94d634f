"""
Closed-form amplitudes of giant-atom bound states and zero modes.

Every amplitude is a combination of the lattice kernel

    F(s) = (1/2pi) int dk e^{iks} / (x - (t1+gamma) e^{ik} - (t1-gamma) e^{-ik})

which equals c0 a^s for s >= 0 and c0 b^|s| for s < 0, where a and b are the
decaying roots of (t1+gamma) z^2 - x z + (t1-gamma) = 0 and 1/z of the growing one.
Amplitudes are ratios to the atom amplitude U_e and ignore the wrap of the ring.
"""
import logging
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from giantatom.errors import PreconditionError
from giantatom.model import CouplingConfig, Emitter, LatticeParams, LegMode, SiteIndexing
from giantatom.util import quadratic_roots

logger = logging.getLogger(__name__)


class LegSymbols(NamedTuple):
    """T = gE/t2, Y1 = g(t1-gamma)/t2, Y2 = g(t1+gamma)/t2, Y3 = g/(t1-gamma), Y4 = g/(t1+gamma)."""
    T: complex
    Y1: float
    Y2: float
    Y3: Optional[float]
    Y4: Optional[float]


def leg_symbols(E: complex, params: LatticeParams, g: float) -> LegSymbols:
    forward, backward, t2 = params.forward, params.backward, params.t2
    return LegSymbols(
        T=g * complex(E) / t2,
        Y1=g * backward / t2,
        Y2=g * forward / t2,
        Y3=g / backward if backward != 0 else None,
        Y4=g / forward if forward != 0 else None,
    )


class ClosedFormContext:
    """Symbols x, y, a, b and the kernel prefactor for one energy."""

    def __init__(self, E: complex, params: LatticeParams, g: float):
        """
        Constructor. Rejects energies whose kernel has no decaying expansion.

        :param E: Energy outside the band.
        :param params: Lattice parameters.
        :param g: Default coupling strength for leg_symbols.
        """
        forward, backward, t2 = params.forward, params.backward, params.t2
        if forward == 0:
            raise PreconditionError('t1 = -gamma leaves the kernel without a quadratic term')

        self.E = complex(E)
        self.params = params
        self.g = g
        self.x = (self.E ** 2 - forward * backward - t2 ** 2) / t2
        self.y = 1 if self.x.real > 0 else 0
        self.radicand = self.x ** 2 - 4.0 * forward * backward
        if self.E.imag == 0 and self.radicand.real < 0:
            raise PreconditionError(f'E = {E} gives a negative radicand {self.radicand.real:.6g}')

        outer, inner, degenerate = quadratic_roots(forward, -self.x, backward)
        if degenerate or not abs(inner) < 1.0 < abs(outer):
            raise PreconditionError(f'E = {E} lies in the band: kernel roots {inner:.6g}, {outer:.6g}')

        self.a = inner
        self.b = 1.0 / outer
        self.prefactor = -1.0 / (forward * (inner - outer))
        logger.debug('context E=%s x=%s y=%d a=%s b=%s', self.E, self.x, self.y, self.a, self.b)

    def leg_symbols(self, g: Optional[float] = None) -> LegSymbols:
        """T and Y1..Y4 at this energy for a leg of strength g (the context's g by default)."""
        return leg_symbols(self.E, self.params, self.g if g is None else g)


def make_context(E: complex, params: LatticeParams, g: float = 1.0) -> ClosedFormContext:
    return ClosedFormContext(E, params, g)


def lattice_propagator(ctx: ClosedFormContext, s: int) -> complex:
    """Kernel F(s)."""
    if s >= 0:
        return ctx.prefactor * ctx.a ** s
    return ctx.prefactor * ctx.b ** (-s)


def _check_legs(config: CouplingConfig, mode: LegMode, L: int, cell: int):
    if config.emitter != Emitter.GIANT_ATOM:
        raise PreconditionError('closed forms are derived for a giant atom')
    if config.mode != mode:
        raise PreconditionError(f'coupling mode is {config.mode.value}, expected {mode.value}')
    if L is not None and not 1 <= cell <= L:
        raise PreconditionError(f'cell {cell} outside 1..{L}')


def bound_amplitudes_AB(ctx: ClosedFormContext, config: CouplingConfig, l: int, L: int = None) -> Tuple[complex, complex]:
    """
    (A_l / U_e, B_l / U_e) with legs on A_n and B_m.

    :param ctx: Context of the bound-state energy.
    :param config: Giant-atom coupling in AB mode.
    :param l: Cell.
    :param L: Optional cell count for range checking.
    :return: Amplitude ratios.
    """
    _check_legs(config, LegMode.AB, L, l)
    F = lambda s: lattice_propagator(ctx, s)
    n, m = config.n, config.m
    leg_n, leg_m = ctx.leg_symbols(config.g_n), ctx.leg_symbols(config.g_m)

    a_ratio = leg_n.T * F(l - n) + leg_m.Y2 * F(l - m) + config.g_m * F(l - m - 1)
    b_ratio = leg_m.T * F(l - m) + leg_n.Y1 * F(l - n) + config.g_n * F(l - n + 1)
    return complex(a_ratio), complex(b_ratio)


def bound_amplitudes_AA(ctx: ClosedFormContext, config: CouplingConfig, l: int, L: int = None) -> Tuple[complex, complex]:
    """(A_l / U_e, B_l / U_e) with both legs on A sites."""
    _check_legs(config, LegMode.AA, L, l)
    F = lambda s: lattice_propagator(ctx, s)
    a_ratio = 0j
    b_ratio = 0j
    for leg, g in ((config.n, config.g_n), (config.m, config.g_m)):
        symbols = ctx.leg_symbols(g)
        a_ratio += symbols.T * F(l - leg)
        b_ratio += symbols.Y1 * F(l - leg) + g * F(l - leg + 1)
    return complex(a_ratio), complex(b_ratio)


def in_window(params: LatticeParams) -> bool:
    """-t2 + gamma < t1 < t2 - gamma, i.e. both intracell hoppings below |t2|."""
    t2 = abs(params.t2)
    return abs(params.forward) < t2 and abs(params.backward) < t2


def is_trivial(params: LatticeParams) -> bool:
    """Both intracell hoppings above |t2|, |t1| > t2 + |gamma|."""
    t2 = abs(params.t2)
    return abs(params.forward) > t2 and abs(params.backward) > t2


def zero_mode_AB(params: LatticeParams, config: CouplingConfig, l: int) -> Tuple[complex, complex]:
    """
    AB zero mode inside the window: A_l/U_e = Y3 (-(t1-gamma)/t2)^(l-m) for l > m
    and B_l/U_e = Y4 (-(t1+gamma)/t2)^(n-l) for l < n, zero elsewhere.
    """
    _check_legs(config, LegMode.AB, params.L, l)
    if not in_window(params):
        raise PreconditionError(f't1 = {params.t1} is outside the zero-mode window')
    if params.backward == 0 or params.forward == 0:
        raise PreconditionError('t1 = +-gamma makes Y3 or Y4 singular')

    t2 = params.t2
    a_ratio = 0.0
    b_ratio = 0.0
    if l > config.m:
        a_ratio = leg_symbols(0.0, params, config.g_m).Y3 * (-params.backward / t2) ** (l - config.m)
    if l < config.n:
        b_ratio = leg_symbols(0.0, params, config.g_n).Y4 * (-params.forward / t2) ** (config.n - l)
    return complex(a_ratio), complex(b_ratio)


def zero_mode_AA(params: LatticeParams, config: CouplingConfig, l: int) -> complex:
    """
    AA zero mode, B_l / U_e only (A ratios vanish).

    In the window each leg c contributes Y4 (-(t1+gamma)/t2)^(c-l) for l < c.
    In the trivial phase each leg contributes -Y4 (-t2/(t1+gamma))^(l-c) for l >= c.
    The strips t2 - |gamma| < |t1| < t2 + |gamma| have no analytic form.
    """
    _check_legs(config, LegMode.AA, params.L, l)
    forward, t2 = params.forward, params.t2
    if forward == 0:
        raise PreconditionError('t1 = -gamma makes Y4 singular')

    ratio = 0.0
    if in_window(params):
        base = -forward / t2
        for leg, g in ((config.n, config.g_n), (config.m, config.g_m)):
            if l < leg:
                ratio += leg_symbols(0.0, params, g).Y4 * base ** (leg - l)
    elif is_trivial(params):
        base = -t2 / forward
        for leg, g in ((config.n, config.g_n), (config.m, config.g_m)):
            if l >= leg:
                ratio -= leg_symbols(0.0, params, g).Y4 * base ** (l - leg)
    else:
        raise PreconditionError(f'no analytic form for the AA zero mode at t1 = {params.t1}')
    return complex(ratio)


class AmplitudeProfile:
    """Per-cell amplitude ratios A_l/U_e, B_l/U_e with the atom amplitude fixed to 1."""

    def __init__(self, A: np.ndarray, B: np.ndarray, kind: str):
        self.A = np.asarray(A, dtype=complex)
        self.B = np.asarray(B, dtype=complex)
        self.kind = kind

    @property
    def L(self) -> int:
        return len(self.A)

    def flat_vector(self, normalize: bool = False) -> np.ndarray:
        """Chain sites in flat order followed by U_e = 1."""
        vector = np.empty(2 * self.L + 1, dtype=complex)
        vector[0:2 * self.L:2] = self.A
        vector[1:2 * self.L:2] = self.B
        vector[-1] = 1.0
        if normalize:
            vector = vector / np.linalg.norm(vector)
        return vector

    def tail_ratios(self, sublattice: str, cells: Sequence[int]) -> np.ndarray:
        values = self.A if sublattice == 'A' else self.B
        idx = np.asarray(cells) - 1
        return np.abs(values[idx + 1] / values[idx])


PROFILE_KINDS = ('bound', 'zero')


def profile(params: LatticeParams, config: CouplingConfig, kind: str = 'bound', E: complex = None) -> AmplitudeProfile:
    """
    Closed-form profile over all cells.

    :param params: Lattice parameters.
    :param config: Giant-atom coupling.
    :param kind: 'bound' (needs E) or 'zero'.
    :param E: Bound-state energy.
    :return: AmplitudeProfile.
    """
    if kind not in PROFILE_KINDS:
        raise PreconditionError(f'unknown profile kind {kind}')
    cells = range(1, params.L + 1)

    if kind == 'zero':
        if config.mode == LegMode.AB:
            pairs = [zero_mode_AB(params, config, l) for l in cells]
        else:
            pairs = [(0j, zero_mode_AA(params, config, l)) for l in cells]
    else:
        if E is None:
            raise PreconditionError('bound profiles need the bound-state energy')
        ctx = make_context(E, params, config.g_m)
        amplitudes = bound_amplitudes_AB if config.mode == LegMode.AB else bound_amplitudes_AA
        pairs = [amplitudes(ctx, config, l, params.L) for l in cells]

    A, B = zip(*pairs)
    return AmplitudeProfile(np.array(A), np.array(B), kind)


def fidelity(psi_a: np.ndarray, psi_b: np.ndarray) -> float:
    """|<a|b>| / (|a| |b|)."""
    return float(abs(np.vdot(psi_a, psi_b)) / (np.linalg.norm(psi_a) * np.linalg.norm(psi_b)))


def leg_weights(psi: np.ndarray, L: int, config: CouplingConfig, radius: int = 5) -> Tuple[float, float]:
    """
    Share of the total weight near each leg.

    Chain cells within `radius` of a leg count for it, and so does a small atom
    attached to it. A giant atom counts for neither leg.

    :param psi: State in flat order.
    :param L: Number of cells.
    :param config: Coupling that defines the legs.
    :param radius: Cell radius around a leg.
    :return: (weight near n, weight near m).
    """
    weight = np.abs(np.asarray(psi)) ** 2
    total = float(np.sum(weight))
    indexing = SiteIndexing(L, config.n_atoms)
    result = []
    for k, leg in enumerate((config.n, config.m), start=1):
        near = sum(
            weight[indexing.offset(cell, sub)]
            for cell in range(1, L + 1)
            if indexing.cell_distance(cell, leg) <= radius
            for sub in ('A', 'B')
        )
        if config.emitter == Emitter.TWO_SMALL_ATOMS:
            near += weight[indexing.atom_offset(k)]
        result.append(float(near / total))
    return result[0], result[1]


def f_fourier_check(k: float, ctx: ClosedFormContext, P: int) -> Tuple[complex, complex]:
    """
    Direct kernel 1/(x - (t1+gamma) e^{ik} - (t1-gamma) e^{-ik}) against its
    truncated expansion c0 [1 + sum_p (a^p e^{-ikp} + b^p e^{ikp})].

    :param k: Momentum.
    :param ctx: Context with |a|, |b| < 1.
    :param P: Truncation order.
    :return: (direct, series).
    """
    if not (abs(ctx.a) < 1 and abs(ctx.b) < 1):
        raise PreconditionError('expansion diverges for |a| >= 1 or |b| >= 1')
    params = ctx.params
    direct = 1.0 / (ctx.x - params.forward * np.exp(1j * k) - params.backward * np.exp(-1j * k))
    p = np.arange(1, P + 1)
    series = ctx.prefactor * (1.0 + np.sum(ctx.a ** p * np.exp(-1j * k * p) + ctx.b ** p * np.exp(1j * k * p)))
    return complex(direct), complex(series)
