"""
Classical curved anisotropic oscillator.

The Hamiltonian in geodesic parallel coordinates is

    H = (px^2 / C(y)^2 + py^2) / 2 + (omega^2 / 2) (T(gamma x)^2 / C(y)^2 + T(y)^2)

with xi = gamma x and p_xi = px / gamma. It separates into the quadratic
integral H_xi, which factorizes through the ladder functions B+-, and the
shift functions A+-. For gamma = m/n the products (B+-)^n (A+-)^m are extra
constants of motion.

Every phase function accepts either a PhasePoint or an array whose last axis
holds (x, y, px, py); arrays are evaluated element-wise.
"""

import math
from typing import Callable, Dict, Tuple, Union

import numpy as np

from core.exceptions import DomainError, FlatCurvatureError, PoleError, ScatteringRegimeError
from core.ktrig import POLE_FLOOR, KappaLike, kappa_value, kcos, ksin, ktan
from core.params import ModelParams, PhasePoint

StateLike = Union[PhasePoint, np.ndarray]
PhaseFunction = Callable[[PhasePoint], Union[float, complex]]

SQRT2 = math.sqrt(2.0)

# bracket step h = BRACKET_STEP * (1 + |coordinate|)
BRACKET_STEP = 1e-5


def _unpack(s: StateLike):
    if isinstance(s, PhasePoint):
        return s.x, s.y, s.px, s.py
    arr = np.asarray(s, dtype=float)
    return arr[..., 0], arr[..., 1], arr[..., 2], arr[..., 3]


def _check_sign(sign: int) -> None:
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")


def _require_ratio(p: ModelParams) -> Tuple[int, int]:
    if p.ratio is None:
        raise DomainError("symmetries X+- need a commensurate ratio (m, n) with gamma = m/n")
    return p.ratio


def validate_state(p: ModelParams, s: PhasePoint) -> None:
    """
    Check that a state lies inside the regular region of the chart.

    On the sphere the state needs -pi/sqrt(kappa) < x <= pi/sqrt(kappa),
    |y| < pi/(2 sqrt(kappa)) and |gamma x| < pi/(2 sqrt(kappa)).

    Raises:
        DomainError: If any bound is violated
    """
    if p.kappa <= 0.0:
        return
    root = math.sqrt(p.kappa)
    wall = math.pi / (2.0 * root)
    if not (-math.pi / root < s.x <= math.pi / root):
        raise DomainError(f"x={s.x} outside (-pi/sqrt(kappa), pi/sqrt(kappa)] for kappa={p.kappa}")
    if not abs(s.y) < wall:
        raise DomainError(f"|y|={abs(s.y)} must stay below pi/(2 sqrt(kappa))={wall}")
    if not abs(p.gamma * s.x) < wall:
        raise DomainError(
            f"|xi|=|gamma x|={abs(p.gamma * s.x)} must stay below pi/(2 sqrt(kappa))={wall}"
        )


def hamiltonian(p: ModelParams, s: StateLike):
    """
    Evaluate the curved Hamiltonian H_kappa.

    Args:
        p: Model parameters
        s: State(s)

    Returns:
        Energy

    Raises:
        PoleError: If C(y) or C(gamma x) vanishes
    """
    x, y, px, py = _unpack(s)
    k = p.kappa
    ty = ktan(k, y)
    cy = kcos(k, y)
    tg = ktan(k, p.gamma * x)
    return 0.5 * (px * px / (cy * cy) + py * py) + 0.5 * p.omega ** 2 * (tg * tg / (cy * cy) + ty * ty)


def hamiltonian_alt(p: ModelParams, s: StateLike):
    """
    Rewritten form py^2/2 + (px^2/2 + omega^2/(2 kappa C(gamma x)^2)) / C(y)^2 - omega^2/(2 kappa).

    Only defined for kappa != 0.
    """
    if p.kappa == 0.0:
        raise FlatCurvatureError("the rewritten Hamiltonian divides by kappa; use hamiltonian() at kappa=0")
    x, y, px, py = _unpack(s)
    k = p.kappa
    cy = kcos(k, y)
    cg = kcos(k, p.gamma * x)
    if np.any(np.abs(cy) < POLE_FLOOR) or np.any(np.abs(cg) < POLE_FLOOR):
        raise PoleError("rewritten Hamiltonian is singular at a coordinate wall")
    w2 = p.omega ** 2
    return 0.5 * py * py + (0.5 * px * px + w2 / (2.0 * k * cg * cg)) / (cy * cy) - w2 / (2.0 * k)


def potential(p: ModelParams, s: StateLike):
    """Potential energy (omega^2/2)(T(gamma x)^2 / C(y)^2 + T(y)^2)."""
    x, y, _, _ = _unpack(s)
    k = p.kappa
    tg = ktan(k, p.gamma * x)
    ty = ktan(k, y)
    cy = kcos(k, y)
    return 0.5 * p.omega ** 2 * (tg * tg / (cy * cy) + ty * ty)


def h_xi_reduced(p: ModelParams, s: StateLike):
    """
    H_xi with its constant removed: p_xi^2/2 + (omega^2 / (2 gamma^2)) T(xi)^2.

    Equals H_xi - omega^2/(2 kappa gamma^2) for kappa != 0 and the flat H_xi
    at kappa = 0. It is the stable core of h_xi, cal_E and lambda_A.
    """
    x, _, px, _ = _unpack(s)
    t = ktan(p.kappa, p.gamma * x)
    p_xi = px / p.gamma
    return 0.5 * p_xi * p_xi + 0.5 * (p.omega / p.gamma) ** 2 * t * t


def h_xi(p: ModelParams, s: StateLike):
    """
    Quadratic integral H_xi = p_xi^2/2 + omega^2 / (2 kappa gamma^2 C(xi)^2).

    At kappa = 0 the flat integral p_xi^2/2 + omega^2 xi^2 / (2 gamma^2) is returned.

    Raises:
        PoleError: If C(xi) vanishes
    """
    reduced = h_xi_reduced(p, s)
    if p.kappa == 0.0:
        return reduced
    return reduced + p.omega ** 2 / (2.0 * p.kappa * p.gamma ** 2)


def h_y_flat(p: ModelParams, s: StateLike):
    """Second flat integral H_y = py^2/2 + omega^2 y^2 / 2."""
    _, y, _, py = _unpack(s)
    return 0.5 * py * py + 0.5 * p.omega ** 2 * y * y


def cal_E_squared(p: ModelParams, s: StateLike):
    """Return 2 kappa H_xi, computed as omega^2/gamma^2 + 2 kappa (H_xi reduced)."""
    return (p.omega / p.gamma) ** 2 + 2.0 * p.kappa * h_xi_reduced(p, s)


def cal_E(p: ModelParams, s: StateLike):
    """
    Conserved frequency cal_E = sqrt(2 kappa H_xi).

    At kappa = 0 this is the flat value omega/gamma.

    Raises:
        ScatteringRegimeError: If 2 kappa H_xi <= 0 (possible only for kappa < 0)
    """
    if p.kappa == 0.0:
        value = p.omega / p.gamma
        return value if isinstance(s, PhasePoint) else np.full(np.shape(_unpack(s)[0]), value)
    e2 = cal_E_squared(p, s)
    if np.any(np.asarray(e2) <= 0.0):
        raise ScatteringRegimeError(
            f"cal_E requires 2*kappa*H_xi > 0 (bound regime), got {np.min(e2):.6g} at kappa={p.kappa}"
        )
    return np.sqrt(e2) if isinstance(e2, np.ndarray) else math.sqrt(e2)


def ladder_B(p: ModelParams, s: StateLike, sign: int):
    """
    Ladder function B+- = -+(i/sqrt 2) C(xi) p_xi + (cal_E / sqrt 2) S(xi).

    Args:
        p: Model parameters
        s: State(s)
        sign: +1 for B+, -1 for B-

    Returns:
        Complex value; B+ is the conjugate of B-
    """
    _check_sign(sign)
    x, _, px, _ = _unpack(s)
    xi = p.gamma * x
    e = cal_E(p, s)
    return (-sign * 1j * kcos(p.kappa, xi) * (px / p.gamma) + e * ksin(p.kappa, xi)) / SQRT2


def shift_A(p: ModelParams, s: StateLike, sign: int):
    """
    Shift function A+- = -+(i/sqrt 2) py - (gamma cal_E / sqrt 2) T(y).

    Args:
        p: Model parameters
        s: State(s)
        sign: +1 for A+, -1 for A-

    Returns:
        Complex value
    """
    _check_sign(sign)
    _, y, _, py = _unpack(s)
    e = cal_E(p, s)
    return (-sign * 1j * py - p.gamma * e * ktan(p.kappa, y)) / SQRT2


def lambda_A(p: ModelParams, s: StateLike):
    """lambda_A = (gamma^2 cal_E^2 - omega^2) / (2 kappa), i.e. gamma^2 times the reduced H_xi."""
    return p.gamma ** 2 * h_xi_reduced(p, s)


def symmetry_X(p: ModelParams, s: StateLike, sign: int):
    """
    Higher-order constant of motion X+- = (B+-)^n (A+-)^m for gamma = m/n.

    Raises:
        DomainError: If the parameters carry no ratio
    """
    m, n = _require_ratio(p)
    return ladder_B(p, s, sign) ** n * shift_A(p, s, sign) ** m


def symmetry_modulus(p: ModelParams, s: StateLike):
    """Closed form of X+ X-: (H_xi reduced)^n (H - gamma^2 H_xi reduced)^m."""
    m, n = _require_ratio(p)
    reduced = h_xi_reduced(p, s)
    return reduced ** n * (hamiltonian(p, s) - p.gamma ** 2 * reduced) ** m


def real_symmetries(p: ModelParams, s: StateLike):
    """
    Real constants of motion X, Y built from X+.

    For m + n even X+ = X + i cal_E Y; for m + n odd X+ = X + i Y.

    Returns:
        Tuple (X, Y)
    """
    m, n = _require_ratio(p)
    xp = symmetry_X(p, s, 1)
    if (m + n) % 2 == 0:
        return np.real(xp), np.imag(xp) / cal_E(p, s)
    return np.real(xp), np.imag(xp)


def angular_momentum(kappa: KappaLike, s: StateLike):
    """
    Curved angular momentum J = S(x) py - C(x) T(y) px.

    Raises:
        PoleError: If C(y) vanishes
    """
    k = kappa_value(kappa)
    x, y, px, py = _unpack(s)
    return ksin(k, x) * py - kcos(k, x) * ktan(k, y) * px


def grad_H(p: ModelParams, s: StateLike):
    """
    Analytic gradient of the Hamiltonian.

    Returns:
        Tuple (dH/dx, dH/dy, dH/dpx, dH/dpy)

    Raises:
        PoleError: If C(y) or C(gamma x) vanishes
    """
    x, y, px, py = _unpack(s)
    k = p.kappa
    w2 = p.omega ** 2
    g = p.gamma
    cy = kcos(k, y)
    cg = kcos(k, g * x)
    if np.any(np.abs(cy) < POLE_FLOOR) or np.any(np.abs(cg) < POLE_FLOOR):
        raise PoleError(f"gradient of H singular at a coordinate wall (x={x}, y={y})")
    ty = ksin(k, y) / cy
    tg = ksin(k, g * x) / cg
    cy2 = cy * cy
    dx = w2 * g * tg / (cg * cg * cy2)
    dy = ty / cy2 * (k * (px * px + w2 * tg * tg) + w2)
    return dx, dy, px / cy2, py


def _partials(f: PhaseFunction, z: np.ndarray, step: float) -> list:
    partials = []
    for i in range(4):
        h = step * (1.0 + abs(z[i]))
        estimates = []
        for hh in (h, 0.5 * h):
            e = np.zeros(4)
            e[i] = hh
            plus = f(PhasePoint.from_array(z + e))
            minus = f(PhasePoint.from_array(z - e))
            estimates.append((plus - minus) / (2.0 * hh))
        # Richardson: cancels the h^2 term of the central difference
        partials.append((4.0 * estimates[1] - estimates[0]) / 3.0)
    return partials


def poisson_bracket(f: PhaseFunction, g: PhaseFunction, s: PhasePoint, step: float = BRACKET_STEP):
    """
    Numerical Poisson bracket {f, g} at a state.

    Derivatives are central differences at h and h/2 combined by Richardson
    extrapolation, with h = step * (1 + |coordinate|).

    Args:
        f: Phase function of a PhasePoint
        g: Phase function of a PhasePoint
        s: State at which to evaluate
        step: Relative base step

    Returns:
        {f, g} = f_x g_px + f_y g_py - f_px g_x - f_py g_y (complex if f or g is)
    """
    z = s.as_array()
    df = _partials(f, z, step)
    dg = _partials(g, z, step)
    return df[0] * dg[2] + df[1] * dg[3] - df[2] * dg[0] - df[3] * dg[1]


def flat_polynomial_algebra(p: ModelParams, s: PhasePoint) -> Dict[str, float]:
    """
    Brackets of the flat m:n oscillator integrals predicted in closed form.

    With X = Re X+, Y = Im X+ (flat ladder and shift functions):

        {H_xi, X} =  omega (n^2/m) Y      {H_xi, Y} = -omega (n^2/m) X
        {H_y, X}  = -m omega Y            {H_y, Y}  =  m omega X
        {X, Y}    = (omega / 2m) H_xi^(n-1) H_y^(m-1) (m^3 H_xi - n^3 H_y)

    Raises:
        DomainError: If kappa != 0 or no ratio is present
    """
    if p.kappa != 0.0:
        raise DomainError("the flat polynomial algebra holds at kappa = 0 only")
    m, n = _require_ratio(p)
    xp = symmetry_X(p, s, 1)
    x_val, y_val = xp.real, xp.imag
    hx = h_xi(p, s)
    hy = h_y_flat(p, s)
    w = p.omega
    return {
        "Hxi_X": w * n * n / m * y_val,
        "Hxi_Y": -w * n * n / m * x_val,
        "Hy_X": -m * w * y_val,
        "Hy_Y": m * w * x_val,
        "X_Y": w / (2.0 * m) * hx ** (n - 1) * hy ** (m - 1) * (m ** 3 * hx - n ** 3 * hy),
    }


def worked_case_symmetries(p: ModelParams, s: PhasePoint) -> Tuple[float, float]:
    """
    Explicit polynomial integrals of the three quadratically superintegrable cases.

    gamma = 1:   X = -(C(x) px py + E^2 S(x) T(y)) / 2,  Y = -J / 2
    gamma = 2:   X = -([S(2x) py - 2 C(2x) T(y) px] py - 4 E^2 S(2x) T(y)^2) / (2 sqrt 2)
                 Y = (C(2x) px py^2 + 4 E^2 T(y) [2 S(2x) py - C(2x) T(y) px]) / (4 sqrt 2)
    gamma = 1/2: X = -(4 [S(x) py - C(x/2)^2 T(y) px] px + E^2 S(x/2)^2 T(y)) / (4 sqrt 2)
                 Y = (4 C(x/2)^2 px^2 py - E^2 [S(x/2)^2 py - S(x) T(y) px]) / (2 sqrt 2)

    For the odd cases Re X+ = E * X and Im X+ = Y.

    Raises:
        DomainError: If gamma is not 1, 2 or 1/2
    """
    k = p.kappa
    x, y, px, py = s.x, s.y, s.px, s.py
    e2 = cal_E(p, s) ** 2
    ty = ktan(k, y)
    ratio = _require_ratio(p)
    if ratio == (1, 1):
        big_x = -0.5 * (kcos(k, x) * px * py + e2 * ksin(k, x) * ty)
        big_y = -0.5 * angular_momentum(k, s)
        return big_x, big_y
    if ratio == (2, 1):
        s2, c2 = ksin(k, 2.0 * x), kcos(k, 2.0 * x)
        big_x = -((s2 * py - 2.0 * c2 * ty * px) * py - 4.0 * e2 * s2 * ty * ty) / (2.0 * SQRT2)
        big_y = (c2 * px * py * py + 4.0 * e2 * ty * (2.0 * s2 * py - c2 * ty * px)) / (4.0 * SQRT2)
        return big_x, big_y
    if ratio == (1, 2):
        sh, ch = ksin(k, 0.5 * x), kcos(k, 0.5 * x)
        s1 = ksin(k, x)
        big_x = -(4.0 * (s1 * py - ch * ch * ty * px) * px + e2 * sh * sh * ty) / (4.0 * SQRT2)
        big_y = (4.0 * ch * ch * px * px * py - e2 * (sh * sh * py - s1 * ty * px)) / (2.0 * SQRT2)
        return big_x, big_y
    raise DomainError(f"no explicit integrals recorded for ratio {ratio[0]}:{ratio[1]}")


def potential_polar_isotropic(kappa: KappaLike, omega: float, r: float) -> float:
    """Isotropic (1:1) potential in polar variables, (omega^2/2) T(r)^2."""
    t = ktan(kappa, r)
    return 0.5 * omega ** 2 * t * t


def potential_polar_two_to_one(kappa: KappaLike, omega: float, r: float, phi: float) -> float:
    """
    The 2:1 potential written in geodesic polar variables.

    (omega^2/2) [4 T(r)^2 cos^2 phi / ((1 - k S(r)^2 sin^2 phi)(1 - k T(r)^2 cos^2 phi)^2)
                 + S(r)^2 sin^2 phi / (1 - k S(r)^2 sin^2 phi)]
    """
    k = kappa_value(kappa)
    s = ksin(k, r)
    t = ktan(k, r)
    c2, s2 = math.cos(phi) ** 2, math.sin(phi) ** 2
    a = 1.0 - k * s * s * s2
    b = 1.0 - k * t * t * c2
    return 0.5 * omega ** 2 * (4.0 * t * t * c2 / (a * b * b) + s * s * s2 / a)
