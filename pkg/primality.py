"""
@file: primality.py
@description: Режимы I/II/III, классификация n по модам alpha_n и границам B_n, эталонное решето
@dependencies: spectral_analysis, numpy
@created: 2024-12-19
"""

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, FrozenSet, List, Optional, Tuple, Union

import numpy as np

from spectral_analysis import (
    FourierSpectrum, InitialCoefficients, analytic_fourier_modes, analytic_series,
    decidable_range, quadrature_sigma,
)


class RegimeLabel(Enum):
    """Диапазоны n: I = [2, d-1], II = [d, 2(d-1)], III = (2(d-1), (d-1)^2]"""
    I = "I"
    II = "II"
    III = "III"


class Verdict(Enum):
    PRIME = "prime"
    COMPOSITE = "composite"
    INCONCLUSIVE = "inconclusive"


def regime_of(n: int, d: int) -> RegimeLabel:
    if d < 2 or not 2 <= n <= (d - 1) ** 2:
        raise ValueError(f"n={n} вне диапазона [2, (d-1)^2] для d={d}")
    if n <= d - 1:
        return RegimeLabel.I
    if n <= 2 * (d - 1):
        return RegimeLabel.II
    return RegimeLabel.III


def sieve_oracle(limit: int) -> FrozenSet[int]:
    """Решето Эратосфена: простые числа <= limit. Только для проверки результатов."""
    if limit < 2:
        raise ValueError(f"Граница решета должна быть >= 2, получено: {limit}")
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, int(limit ** 0.5) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    return frozenset(int(n) for n in np.flatnonzero(is_prime))


@dataclass(frozen=True)
class ClassificationRow:
    """
    Строка отчёта. Для режима III agree означает отсутствие ложного "composite"
    у простого n; "inconclusive" считается согласованным.
    """
    n: int
    regime: RegimeLabel
    alpha: float
    bound: Optional[float]
    verdict: Verdict
    oracle: Verdict
    agree: bool

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "regime": self.regime.value,
            "alpha": self.alpha,
            "bound": self.bound,
            "verdict": self.verdict.value,
            "oracle": self.oracle.value,
            "agree": self.agree,
        }


@dataclass(frozen=True)
class ClassificationReport:
    d: int
    tau: float
    rows: Tuple[ClassificationRow, ...] = field(default=())
    clamped: bool = False

    @property
    def disagreements(self) -> List[ClassificationRow]:
        return [row for row in self.rows if not row.agree]

    @property
    def decidable_disagreements(self) -> List[ClassificationRow]:
        return [row for row in self.disagreements if row.regime != RegimeLabel.III]

    def summary(self) -> Dict[str, int]:
        counts = Counter(row.verdict.value for row in self.rows)
        result = {verdict.value: counts.get(verdict.value, 0) for verdict in Verdict}
        result["agree"] = sum(row.agree for row in self.rows)
        result["disagree"] = len(self.rows) - result["agree"]
        return result

    def to_dict(self) -> Dict:
        return {
            "d": self.d,
            "tau": self.tau,
            "clamped": self.clamped,
            "summary": self.summary(),
            "rows": [row.to_dict() for row in self.rows],
        }


def _verdict(regime: RegimeLabel, alpha: float, bound: Optional[float], tau: float) -> Verdict:
    if regime == RegimeLabel.I:
        return Verdict.PRIME if abs(alpha - bound) <= tau else Verdict.COMPOSITE
    if regime == RegimeLabel.II:
        return Verdict.PRIME if alpha <= tau else Verdict.COMPOSITE
    return Verdict.COMPOSITE if alpha > tau else Verdict.INCONCLUSIVE


def classify(spectrum: FourierSpectrum, tau: Union[float, "Tolerance"],
             include_regime_three: bool = True) -> ClassificationReport:
    """
    Режим I: prime, если |alpha_n - B_n| <= tau.
    Режим II: prime, если alpha_n <= tau.
    Режим III (если моды есть): composite, если alpha_n > tau, иначе inconclusive.
    tau - число или Tolerance; признак clamped переходит в отчёт.
    """
    clamped = False
    if isinstance(tau, Tolerance):
        tau, clamped = tau.value, tau.clamped
    d = spectrum.d
    if d < 4:
        raise ValueError(f"Классификация требует d >= 4, получено: {d}")
    if not tau >= 0:
        raise ValueError(f"Допуск tau должен быть неотрицательным, получено: {tau}")
    top = 2 * (d - 1)
    if spectrum.nmax < top:
        raise ValueError(f"Спектр должен покрывать n до 2(d-1) = {top}, есть только до {spectrum.nmax}")
    missing = [n for n in decidable_range(d) if spectrum.bound(n) is None]
    if missing:
        raise ValueError(f"Нет границ B_n для n = {missing[:5]}{'...' if len(missing) > 5 else ''}")
    last = spectrum.nmax if include_regime_three else top
    primes = sieve_oracle(last)
    rows = []
    for n in range(2, last + 1):
        regime = regime_of(n, d)
        alpha = spectrum.alpha(n)
        bound = spectrum.bound(n) if regime != RegimeLabel.III else None
        verdict = _verdict(regime, alpha, bound, tau)
        oracle = Verdict.PRIME if n in primes else Verdict.COMPOSITE
        if regime == RegimeLabel.III:
            agree = not (verdict == Verdict.COMPOSITE and oracle == Verdict.PRIME)
        else:
            agree = verdict == oracle
        rows.append(ClassificationRow(n, regime, alpha, bound, verdict, oracle, agree))
    return ClassificationReport(d, float(tau), tuple(rows), clamped)


def minimal_composite_excess(spectrum: FourierSpectrum) -> float:
    """Наименьшее alpha_n - B_n по составным n из D."""
    primes = sieve_oracle(2 * (spectrum.d - 1))
    excess = [spectrum.alpha(n) - spectrum.bound(n)
              for n in decidable_range(spectrum.d) if n not in primes]
    if not excess:
        raise ValueError(f"В D нет составных чисел для d={spectrum.d}")
    return min(excess)


@dataclass(frozen=True)
class Tolerance:
    """
    Допуск классификации. noiseless - часть без шума, sigma_max - наибольшая
    стандартная ошибка моды из D; clamped - допуск упёрся в половину превышения.
    """
    value: float
    noiseless: float
    excess: float
    sigma_max: float = 0.0
    clamped: bool = False


def tolerance_budget(d: int, shots: int = 0, p: Optional[int] = None, omega: float = 0.1,
                     logger: Optional[Callable[[str], None]] = None) -> Tolerance:
    """
    Без шума: tau = min(2/d^4, половина наименьшего превышения alpha_n - B_n у составных).
    С шумом: tau = min(tau + 3 * max_n sigma_n, половина превышения), sigma_n - стандартная
    ошибка моды по Симпсону (quadrature_sigma) при равномерном начальном состоянии.
    Выше половины превышения составное n с минимальным превышением неотличимо от простого.
    """
    if d < 4:
        raise ValueError(f"Допуск определён для d >= 4, получено: {d}")
    coeffs = InitialCoefficients.uniform(d)
    excess = minimal_composite_excess(analytic_fourier_modes(coeffs))
    noiseless = min(2.0 / d ** 4, excess / 2)
    if shots <= 0:
        return Tolerance(noiseless, noiseless, excess)
    if p is None:
        raise ValueError("Для оценки шума нужно число разбиений p")
    series = analytic_series(coeffs, omega, p)
    sigma_max = float(quadrature_sigma(series, shots, list(decidable_range(d))).max())
    wanted = noiseless + 3.0 * sigma_max
    if wanted <= excess / 2:
        return Tolerance(wanted, noiseless, excess, sigma_max)
    if logger:
        logger(f"⚠️ Шумовой допуск {wanted:.3e} больше половины минимального превышения "
               f"{excess:.3e}: tau ограничен {excess / 2:.3e}, ошибки классификации вероятны; "
               "увеличьте shots")
    return Tolerance(excess / 2, noiseless, excess, sigma_max, clamped=True)


def default_tolerance(d: int, shots: int = 0, p: Optional[int] = None, omega: float = 0.1,
                      logger: Optional[Callable[[str], None]] = None) -> float:
    return tolerance_budget(d, shots, p, omega, logger).value
