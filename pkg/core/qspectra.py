"""
Closed-form quantum spectra of the curved anisotropic oscillator.

With a = omega/gamma and the spectral parameter chi > 0 solving
chi (chi + hbar kappa) = a^2, the xi-levels are indexed by

    eps_mu = chi + (mu + 1) hbar kappa

and the two-dimensional levels are

    E(mu, nu) = [(gamma chi + (gamma (mu+1) + nu) hbar kappa)
                 (gamma chi + (gamma (mu+1) + nu + 1) hbar kappa) - omega^2] / (2 kappa)

for both signs of kappa. On the hyperboloid only finitely many (mu, nu) are
bound. The flat limit is hbar omega ((gamma + 1)/2 + gamma mu + nu).
"""

import logging
import math
from collections import defaultdict
from typing import Callable, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, field_validator

from core.exceptions import DomainError, FlatCurvatureError, NotHyperbolicError, QuantumNumberRangeError
from core.params import ModelParams

logger = logging.getLogger(__name__)

# distance to an integer below which a strict bound counts as reached
BOUNDARY_TOLERANCE = 1e-12


class SpectralParams(BaseModel):
    """
    Spectral parameter chi of a curved model.

    Attributes:
        kappa (float): Curvature, non-zero
        hbar (float): Planck constant
        omega (float): Frequency
        gamma (float): Anisotropy
        chi (float): Positive root of chi (chi + hbar kappa) = (omega/gamma)^2
    """
    kappa: float
    hbar: float
    omega: float
    gamma: float
    chi: float

    model_config = ConfigDict(frozen=True)

    @field_validator('chi')
    @classmethod
    def validate_chi(cls, v):
        """Validate that chi is positive."""
        if not v > 0.0:
            raise ValueError(f"chi must be > 0, got {v}")
        return v

    def identity_residual(self) -> float:
        """Relative residual of chi (chi + hbar kappa) = omega^2 / gamma^2."""
        target = (self.omega / self.gamma) ** 2
        return abs(self.chi * (self.chi + self.hbar * self.kappa) - target) / target


class SpectrumEntry(BaseModel):
    """One (mu, nu) level."""
    mu: int
    nu: int
    energy: float
    key: Optional[int] = None

    @field_validator('mu', 'nu')
    @classmethod
    def validate_quantum_number(cls, v, info):
        """Validate that quantum numbers are non-negative."""
        if v < 0:
            raise ValueError(f"{info.field_name} must be >= 0, got {v}")
        return v


class DegeneracyClass(BaseModel):
    """
    Levels sharing the key m mu + n nu.

    Attributes:
        key (int): Shared value of m mu + n nu
        members (List[Tuple[int, int]]): (mu, nu) pairs, ordered by mu
        energy (float): Mean energy of the members
        spread (float): (max - min) / |mean| over member energies
    """
    key: int
    members: List[Tuple[int, int]]
    energy: float
    spread: float

    @property
    def size(self) -> int:
        return len(self.members)


class Spectrum(BaseModel):
    """
    Enumerated levels with their degeneracy classes.

    Attributes:
        params (ModelParams): Parameters of the spectrum
        entries (List[SpectrumEntry]): Levels ordered by (mu, nu)
        classes (List[DegeneracyClass]): Classes ordered by key (empty without a ratio)
        empty_mu (List[int]): Hyperboloid mu values below mu_max that carry no bound nu
    """
    params: ModelParams
    entries: List[SpectrumEntry]
    classes: List[DegeneracyClass] = []
    empty_mu: List[int] = []

    def energies(self) -> List[float]:
        return [entry.energy for entry in self.entries]

    def to_dict(self) -> Dict:
        """JSON-ready representation."""
        return {
            'params': self.params.model_dump(),
            'entries': [
                {'mu': e.mu, 'nu': e.nu, 'energy': e.energy, 'key': e.key} for e in self.entries
            ],
            'classes': [
                {'key': c.key, 'size': c.size, 'energy': c.energy, 'spread': c.spread,
                 'members': [list(m) for m in c.members]}
                for c in self.classes
            ],
            'empty_mu': list(self.empty_mu),
        }


def _check_index(name: str, value: int) -> None:
    if int(value) != value or value < 0:
        raise QuantumNumberRangeError(f"{name} must be a non-negative integer, got {value}")


def _largest_integer_below(bound: float) -> int:
    """Largest integer strictly below bound, treating near-integers as reached."""
    return math.ceil(bound - BOUNDARY_TOLERANCE) - 1


def chi_of(p: ModelParams) -> SpectralParams:
    """
    Compute the spectral parameter chi.

    The root is taken in the form that avoids subtracting nearly equal terms.

    Raises:
        FlatCurvatureError: If kappa = 0
    """
    if p.kappa == 0.0:
        raise FlatCurvatureError("chi is defined for kappa != 0; use flat_level() for the plane")
    a2 = (p.omega / p.gamma) ** 2
    hk = p.hbar * p.kappa
    root = math.sqrt(hk * hk + 4.0 * a2)
    if hk > 0.0:
        chi = 2.0 * a2 / (root + hk)
    else:
        chi = 0.5 * (root - hk)
    return SpectralParams(kappa=p.kappa, hbar=p.hbar, omega=p.omega, gamma=p.gamma, chi=chi)


def max_quantum_numbers(p: ModelParams) -> Tuple[int, Callable[[int], int]]:
    """
    Bound-state limits on the hyperboloid.

    Returns:
        Tuple (mu_max, nu_max) where nu_max(mu) is the largest integer below
        gamma eps_mu / (hbar |kappa|) - 1. Negative values mean no bound state.

    Raises:
        NotHyperbolicError: If kappa >= 0
    """
    if p.kappa >= 0.0:
        raise NotHyperbolicError(f"quantum numbers are unbounded for kappa={p.kappa} >= 0")
    hk = p.hbar * abs(p.kappa)
    chi = chi_of(p).chi
    mu_max = _largest_integer_below(chi / hk - 1.0)

    def nu_max(mu: int) -> int:
        eps = chi - (mu + 1) * hk
        return _largest_integer_below(p.gamma * eps / hk - 1.0)

    return mu_max, nu_max


def _check_mu(p: ModelParams, mu: int) -> None:
    _check_index("mu", mu)
    if p.kappa < 0.0:
        mu_max, _ = max_quantum_numbers(p)
        if mu > mu_max:
            raise QuantumNumberRangeError(
                f"mu={mu} exceeds mu_max={mu_max}: bound xi-states need mu < chi/(hbar|kappa|) - 1"
            )


def _check_nu(p: ModelParams, mu: int, nu: int) -> None:
    _check_index("nu", nu)
    if p.kappa < 0.0:
        _, nu_max = max_quantum_numbers(p)
        limit = nu_max(mu)
        if nu > limit:
            raise QuantumNumberRangeError(
                f"nu={nu} exceeds nu_max({mu})={limit}: bound y-states need nu < gamma eps_mu/(hbar|kappa|) - 1"
            )


def epsilon_mu(p: ModelParams, mu: int) -> float:
    """
    Level parameter eps_mu = chi + (mu + 1) hbar kappa (omega/gamma at kappa = 0).

    Raises:
        QuantumNumberRangeError: If mu < 0, or mu > mu_max on the hyperboloid
    """
    _check_mu(p, mu)
    if p.kappa == 0.0:
        return p.omega / p.gamma
    return chi_of(p).chi + (mu + 1) * p.hbar * p.kappa


def xi_level_reduced(p: ModelParams, mu: int) -> float:
    """
    xi-level with the constant omega^2/(2 kappa gamma^2) removed.

    Equals (hbar/2) (chi (2 mu + 1) + hbar kappa (mu + 1)^2), and hbar (omega/gamma)(mu + 1/2) at kappa = 0.
    """
    _check_mu(p, mu)
    if p.kappa == 0.0:
        return p.hbar * p.omega / p.gamma * (mu + 0.5)
    chi = chi_of(p).chi
    return 0.5 * p.hbar * (chi * (2 * mu + 1) + p.hbar * p.kappa * (mu + 1) ** 2)


def xi_level(p: ModelParams, mu: int) -> float:
    """One-dimensional xi-level eps_mu^2 / (2 kappa); the flat oscillator level at kappa = 0."""
    if p.kappa == 0.0:
        return xi_level_reduced(p, mu)
    return epsilon_mu(p, mu) ** 2 / (2.0 * p.kappa)


def flat_level(p: ModelParams, mu: int, nu: int) -> float:
    """Euclidean level hbar omega ((gamma + 1)/2 + gamma mu + nu), whatever kappa is."""
    _check_index("mu", mu)
    _check_index("nu", nu)
    return p.hbar * p.omega * (0.5 * (p.gamma + 1.0) + p.gamma * mu + nu)


def level_product(p: ModelParams, mu: int, nu: int) -> float:
    """
    Two-dimensional level in product form.

    [(gamma chi + (gamma(mu+1) + nu) hbar kappa)(gamma chi + (gamma(mu+1) + nu + 1) hbar kappa) - omega^2] / (2 kappa)

    Raises:
        FlatCurvatureError: If kappa = 0
    """
    _check_mu(p, mu)
    _check_nu(p, mu, nu)
    chi = chi_of(p).chi
    g, hk = p.gamma, p.hbar * p.kappa
    s = g * (mu + 1) + nu
    return ((g * chi + s * hk) * (g * chi + (s + 1) * hk) - p.omega ** 2) / (2.0 * p.kappa)


def level_expanded(p: ModelParams, mu: int, nu: int) -> float:
    """
    Two-dimensional level in expanded form.

    gamma^2 (xi-level reduced) + (hbar gamma / 2) eps_mu (2 nu + 1) + (hbar^2 kappa / 2) nu (nu + 1).
    Stable for small |kappa| and equal to the flat level at kappa = 0.
    """
    _check_mu(p, mu)
    _check_nu(p, mu, nu)
    eps = epsilon_mu(p, mu)
    return (
        p.gamma ** 2 * xi_level_reduced(p, mu)
        + 0.5 * p.hbar * p.gamma * eps * (2 * nu + 1)
        + 0.5 * p.hbar ** 2 * p.kappa * nu * (nu + 1)
    )


def level(p: ModelParams, mu: int, nu: int) -> float:
    """
    Energy of the (mu, nu) level.

    Args:
        p: Model parameters
        mu: xi quantum number
        nu: y quantum number

    Returns:
        Closed-form energy; the flat level at kappa = 0

    Raises:
        QuantumNumberRangeError: If a quantum number is negative or not bound on the hyperboloid
    """
    if p.kappa == 0.0:
        return flat_level(p, mu, nu)
    return level_expanded(p, mu, nu)


def continuum_threshold(p: ModelParams) -> float:
    """
    Bottom of the continuous spectrum on the hyperboloid.

    omega^2 / (2|kappa|) + hbar^2 |kappa| / 8; the second term is the
    continuum edge of the free Laplacian on the hyperbolic plane.

    Raises:
        NotHyperbolicError: If kappa >= 0
    """
    if p.kappa >= 0.0:
        raise NotHyperbolicError(f"no continuum threshold for kappa={p.kappa} >= 0")
    k = abs(p.kappa)
    return p.omega ** 2 / (2.0 * k) + p.hbar ** 2 * k / 8.0


def _degeneracy_key(p: ModelParams, mu: int, nu: int) -> Optional[int]:
    if p.ratio is None:
        return None
    m, n = p.ratio
    return m * mu + n * nu


def _candidate_pairs(p: ModelParams, energy_cutoff: Optional[float], max_key: Optional[int]):
    if p.kappa < 0.0:
        mu_max, nu_max = max_quantum_numbers(p)
        for mu in range(mu_max + 1):
            for nu in range(nu_max(mu) + 1):
                yield mu, nu
        return

    if max_key is not None:
        if p.ratio is None:
            raise DomainError("a key cutoff needs a commensurate ratio (m, n)")
        m, n = p.ratio
        for mu in range(max_key // m + 1):
            for nu in range((max_key - m * mu) // n + 1):
                yield mu, nu
        return

    # energies increase in both quantum numbers for kappa >= 0
    mu = 0
    while level(p, mu, 0) <= energy_cutoff:
        nu = 0
        while level(p, mu, nu) <= energy_cutoff:
            yield mu, nu
            nu += 1
        mu += 1


def enumerate_levels(
    p: ModelParams,
    energy_cutoff: Optional[float] = None,
    max_key: Optional[int] = None,
) -> Spectrum:
    """
    Enumerate levels and group them into degeneracy classes.

    On the sphere and the plane a cutoff is required: either an energy or a
    maximal key m mu + n nu. On the hyperboloid every bound level is listed
    and the cutoffs further restrict the list.

    Args:
        p: Model parameters
        energy_cutoff: Keep levels with energy <= cutoff
        max_key: Keep levels with m mu + n nu <= max_key (needs a ratio)

    Returns:
        Spectrum with entries ordered by (mu, nu) and classes ordered by key

    Raises:
        DomainError: If no usable cutoff is given for kappa >= 0
    """
    if energy_cutoff is not None and not energy_cutoff > 0.0:
        raise DomainError(f"energy cutoff must be positive, got {energy_cutoff}")
    if max_key is not None and max_key < 0:
        raise DomainError(f"key cutoff must be non-negative, got {max_key}")
    if p.kappa >= 0.0 and energy_cutoff is None and max_key is None:
        raise DomainError("an energy or key cutoff is required for kappa >= 0 (the spectrum is infinite)")

    entries = []
    for mu, nu in _candidate_pairs(p, energy_cutoff, max_key):
        energy = level(p, mu, nu)
        key = _degeneracy_key(p, mu, nu)
        if energy_cutoff is not None and energy > energy_cutoff:
            continue
        if max_key is not None and key is not None and key > max_key:
            continue
        entries.append(SpectrumEntry(mu=mu, nu=nu, energy=energy, key=key))

    empty_mu = []
    if p.kappa < 0.0:
        mu_max, nu_max = max_quantum_numbers(p)
        empty_mu = [mu for mu in range(mu_max + 1) if nu_max(mu) < 0]
        for mu in empty_mu:
            logger.warning("mu=%s is xi-bound but carries no bound y-state (nu_max < 0)", mu)

    classes = group_degeneracies(entries) if p.ratio is not None else []
    logger.info("enumerated %s levels in %s classes", len(entries), len(classes))
    return Spectrum(params=p, entries=entries, classes=classes, empty_mu=empty_mu)


def group_degeneracies(entries: List[SpectrumEntry]) -> List[DegeneracyClass]:
    """Group entries by key into classes."""
    grouped: Dict[int, List[SpectrumEntry]] = defaultdict(list)
    for entry in entries:
        if entry.key is None:
            raise DomainError(f"entry ({entry.mu}, {entry.nu}) has no degeneracy key")
        grouped[entry.key].append(entry)

    classes = []
    for key in sorted(grouped):
        members = sorted(grouped[key], key=lambda e: (e.mu, e.nu))
        energies = [e.energy for e in members]
        mean = sum(energies) / len(energies)
        spread = (max(energies) - min(energies)) / max(abs(mean), 1e-300)
        classes.append(DegeneracyClass(
            key=key,
            members=[(e.mu, e.nu) for e in members],
            energy=mean,
            spread=spread,
        ))
    return classes


def min_level_gap(spectrum: Spectrum) -> float:
    """Smallest energy difference between two distinct entries (inf for fewer than two)."""
    energies = sorted(spectrum.energies())
    if len(energies) < 2:
        return math.inf
    return min(b - a for a, b in zip(energies, energies[1:]))
