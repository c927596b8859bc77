"""
@file: spectral_analysis.py
@description: Аналитическая чистота gamma_A(t), её фурье-моды alpha_n, нижняя граница B_n и извлечение мод по Симпсону
@dependencies: numpy, scipy
@created: 2024-12-19

Обозначения: w_n = |c_n|^2, P[delta] = sum_k w_k w_{k+delta} - веса разностей пар.
  alpha_n = 4 * sum_{delta1 * delta2 = n} P[delta1] P[delta2]   (n >= 1)
  B_n     = 8 * P[n] * P[1]                                   (тривиальные разложения)
  gamma(t) = alpha_0 + sum_n alpha_n cos(n omega t)
"""

from dataclasses import dataclass, field, replace
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

import math

import numpy as np
from scipy.integrate import simpson

NORMALIZATION_TOLERANCE = 1e-12
IMAG_TOLERANCE = 1e-10

# до этого d моды считаются прямым перебором четвёрок индексов
DIRECT_ENUMERATION_MAX_D = 16

# ограничение на размер блока (число мод * число точек) при интегрировании
_SIMPSON_BLOCK = 2_000_000

ArrayLike = Union[float, Sequence[float], np.ndarray]


@dataclass(frozen=True)
class InitialCoefficients:
    """Квадраты модулей |c_n|^2, n = 1..d, начального состояния одной подсистемы"""
    d: int
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", weights)
        if self.d < 2:
            raise ValueError(f"Размерность d должна быть >= 2, получено: {self.d}")
        if weights.shape != (self.d,):
            raise ValueError(f"Ожидалось {self.d} коэффициентов, получено {weights.size}")
        if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
            raise ValueError("Все |c_n|^2 должны быть положительными (c_n != 0)")
        if abs(weights.sum() - 1.0) > NORMALIZATION_TOLERANCE:
            raise ValueError(f"Сумма |c_n|^2 должна равняться 1, получено: {weights.sum()!r}")

    @classmethod
    def uniform(cls, d: int) -> "InitialCoefficients":
        return cls(d, np.full(d, 1.0 / d))

    @classmethod
    def from_amplitudes(cls, amplitudes: Sequence[complex]) -> "InitialCoefficients":
        """Нормирует произвольные ненулевые амплитуды c_n."""
        squared = np.abs(np.asarray(amplitudes, dtype=complex)) ** 2
        total = squared.sum()
        if total == 0:
            raise ValueError("Нулевой вектор амплитуд нельзя нормировать")
        return cls(squared.size, squared / total)

    @property
    def is_uniform(self) -> bool:
        return bool(np.all(self.weights == self.weights[0]))

    def pair_difference_weights(self) -> np.ndarray:
        """P[delta], delta = 0..d-1."""
        w = self.weights
        return np.array([np.dot(w[: self.d - delta], w[delta:]) for delta in range(self.d)])

    def autocorrelation(self) -> Tuple[np.ndarray, np.ndarray]:
        """Полная автокорреляция весов: (delta = -(d-1)..d-1, D[delta])."""
        deltas = np.arange(-(self.d - 1), self.d)
        return deltas, np.correlate(self.weights, self.weights, mode="full")


@dataclass(frozen=True)
class PuritySeries:
    """Ряд чистоты на сетке t_i = i * (T/2) / p, i = 0..p"""
    d: int
    omega: float
    p: int
    times: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    method: str = "analytic"
    shots: int = 0
    seeds: Optional[Tuple[int, ...]] = field(default=None, repr=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if self.p < 1:
            raise ValueError(f"Число разбиений p должно быть положительным: {self.p}")
        if times.shape != (self.p + 1,) or values.shape != (self.p + 1,):
            raise ValueError(f"Сетка и значения должны содержать p+1 = {self.p + 1} точек")
        half_period = math.pi / self.omega
        if times[0] != 0.0 or not math.isclose(times[-1], half_period, rel_tol=1e-12):
            raise ValueError(f"Сетка должна покрывать [0, T/2] = [0, {half_period!r}]")
        if self.seeds is not None and len(self.seeds) != self.p + 1:
            raise ValueError("Число зёрен должно совпадать с числом точек сетки")

    @property
    def period(self) -> float:
        return 2 * math.pi / self.omega

    @property
    def step(self) -> float:
        return math.pi / (self.omega * self.p)


@dataclass(frozen=True)
class FourierSpectrum:
    """
    Моды alpha_n (индекс массива = n) и границы B_n для n из D.
    shots, p, omega переносятся из ряда чистоты: по ним classify оценивает шум.
    """
    d: int
    modes: np.ndarray = field(repr=False)
    source: str
    bounds: Mapping[int, float] = field(default_factory=dict, repr=False)
    shots: int = 0
    p: Optional[int] = None
    omega: Optional[float] = None

    def __post_init__(self):
        modes = np.asarray(self.modes, dtype=float)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "bounds", dict(sorted((int(n), float(b)) for n, b in self.bounds.items())))
        if self.source not in ("analytic", "simpson"):
            raise ValueError(f"Неизвестный источник мод: {self.source}")
        if self.shots < 0:
            raise ValueError(f"Число shots не может быть отрицательным: {self.shots}")
        if modes.ndim != 1 or not 2 <= modes.size <= (self.d - 1) ** 2 + 1:
            raise ValueError(f"Число мод должно быть в [2, (d-1)^2 + 1], получено: {modes.size}")
        for n in self.bounds:
            if not 2 <= n <= self.nmax:
                raise ValueError(f"Граница B_{n} вне диапазона мод [2, {self.nmax}]")

    @property
    def nmax(self) -> int:
        return self.modes.size - 1

    @property
    def alpha0(self) -> float:
        return float(self.modes[0])

    def alpha(self, n: int) -> float:
        if not 0 <= n <= self.nmax:
            raise ValueError(f"Мода n={n} вне диапазона [0, {self.nmax}]")
        return float(self.modes[n])

    def bound(self, n: int) -> Optional[float]:
        return self.bounds.get(n)

    def with_modes(self, modes: np.ndarray) -> "FourierSpectrum":
        return replace(self, modes=modes)

    def to_dict(self) -> Dict:
        return {
            "d": self.d,
            "source": self.source,
            "nmax": self.nmax,
            "alpha0": self.alpha0,
            "shots": self.shots,
            "p": self.p,
            "omega": self.omega,
            "modes": [{"n": n, "alpha": float(self.modes[n]), "bound": self.bounds.get(n)}
                      for n in range(1, self.nmax + 1)],
        }


def analytic_purity(coeffs: InitialCoefficients, omega: float, t: float,
                    method: str = "grouped") -> float:
    """
    gamma_A(t) = sum_{jklm} w_j w_k w_l w_m exp(-i omega t (j-k)(l-m)).

    method="direct": полная четверная сумма, O(d^4), эталон.
    method="grouped": D^T E D по автокорреляции весов, O(d^2).
    """
    if method == "direct":
        w = coeffs.weights
        idx = np.arange(coeffs.d)
        diffs = idx[:, None] - idx[None, :]
        pair_weights = np.outer(w, w)
        total = 0j
        for j in range(coeffs.d):
            for k in range(coeffs.d):
                phases = np.exp(-1j * omega * t * diffs[j, k] * diffs)
                total += pair_weights[j, k] * np.sum(pair_weights * phases)
    elif method == "grouped":
        deltas, corr = coeffs.autocorrelation()
        phases = np.exp(-1j * omega * t * np.outer(deltas, deltas))
        total = corr @ phases @ corr
    else:
        raise ValueError(f"Неизвестный метод вычисления чистоты: {method}")
    if abs(total.imag) > IMAG_TOLERANCE:
        raise ArithmeticError(f"Мнимая часть чистоты не сократилась: {total.imag:.3e}")
    return float(total.real)


def _modes_direct(coeffs: InitialCoefficients) -> np.ndarray:
    # перебор всех четвёрок j > k, l > m
    d = coeffs.d
    w = coeffs.weights
    k, j = np.triu_indices(d, 1)
    pair_delta = j - k
    pair_weight = w[j] * w[k]
    alpha = np.zeros((d - 1) ** 2 + 1)
    np.add.at(alpha, np.multiply.outer(pair_delta, pair_delta).ravel(),
              4 * np.multiply.outer(pair_weight, pair_weight).ravel())
    return alpha


def _modes_divisor(coeffs: InitialCoefficients) -> np.ndarray:
    # для каждого n: сумма по делителям delta1 | n с delta1, n / delta1 <= d - 1
    d = coeffs.d
    pair = coeffs.pair_difference_weights()
    alpha = np.zeros((d - 1) ** 2 + 1)
    for n in range(1, (d - 1) ** 2 + 1):
        total = 0.0
        for delta1 in range(max(1, -(-n // (d - 1))), min(d - 1, n) + 1):
            delta2, remainder = divmod(n, delta1)
            if remainder == 0 and delta2 <= d - 1:
                total += pair[delta1] * pair[delta2]
        alpha[n] = 4 * total
    return alpha


def decidable_range(d: int) -> range:
    """n из D = I u II: 2 <= n <= 2(d-1)."""
    return range(2, 2 * (d - 1) + 1)


def _attach_bounds(coeffs: InitialCoefficients, nmax: int) -> Dict[int, float]:
    return {n: lower_bound(coeffs, n) for n in decidable_range(coeffs.d) if n <= nmax}


def analytic_fourier_modes(coeffs: InitialCoefficients, method: str = "auto") -> FourierSpectrum:
    """
    alpha_n для n = 0..(d-1)^2. alpha_0 дополняет сумму до gamma(0) = (sum w)^4.
    auto: прямой перебор при d <= 16, разложение по делителям при больших d.
    """
    if method == "auto":
        method = "direct" if coeffs.d <= DIRECT_ENUMERATION_MAX_D else "divisor"
    if method == "direct":
        alpha = _modes_direct(coeffs)
    elif method == "divisor":
        alpha = _modes_divisor(coeffs)
    else:
        raise ValueError(f"Неизвестный метод вычисления мод: {method}")
    alpha[0] = coeffs.weights.sum() ** 4 - alpha[1:].sum()
    nmax = alpha.size - 1
    return FourierSpectrum(coeffs.d, alpha, "analytic", _attach_bounds(coeffs, nmax))


def lower_bound(coeffs: InitialCoefficients, n: int) -> float:
    """B_n = 8 sum_{k <= d-n, m <= d-1} w_k w_m w_{k+n} w_{m+1}; пустая сумма при n >= d."""
    d = coeffs.d
    if not 2 <= n <= (d - 1) ** 2:
        raise ValueError(f"Граница B_n определена для 2 <= n <= {(d - 1) ** 2}, получено: {n}")
    w = coeffs.weights
    if n >= d:
        return 0.0
    return 8.0 * float(np.dot(w[: d - n], w[n:])) * float(np.dot(w[: d - 1], w[1:]))


def uniform_lower_bound(d: int, n: int) -> float:
    """Кусочная прямая: -8(d-1)n/d^4 + 8(d-1)/d^3 в режиме I и 0 дальше."""
    if d < 2 or not 2 <= n <= (d - 1) ** 2:
        raise ValueError(f"Граница B_n определена для 2 <= n <= (d-1)^2, получено: d={d}, n={n}")
    if n > d - 1:
        return 0.0
    return -8 * (d - 1) * n / d ** 4 + 8 * (d - 1) / d ** 3


def purity_grid(omega: float, p: int) -> np.ndarray:
    """t_i = i * (T/2) / p, i = 0..p; T = 2 pi / omega."""
    if not omega > 0 or not math.isfinite(omega):
        raise ValueError(f"Частота omega должна быть положительной, получено: {omega}")
    if p < 2 or p % 2:
        raise ValueError(f"Число разбиений p должно быть чётным и >= 2, получено: {p}")
    half_period = math.pi / omega
    times = np.arange(p + 1) * (half_period / p)
    times[-1] = half_period
    return times


def reconstruct_purity(spectrum: FourierSpectrum, omega: float, t: ArrayLike) -> np.ndarray:
    """gamma(t) = alpha_0 + sum_{n >= 1} alpha_n cos(n omega t)."""
    times = np.atleast_1d(np.asarray(t, dtype=float))
    n = np.arange(1, spectrum.nmax + 1)
    return spectrum.alpha0 + np.cos(omega * np.outer(times, n)) @ spectrum.modes[1:]


def analytic_series(coeffs: InitialCoefficients, omega: float, p: int) -> PuritySeries:
    """Точный ряд на сетке Симпсона (через аналитические моды)."""
    times = purity_grid(omega, p)
    values = reconstruct_purity(analytic_fourier_modes(coeffs), omega, times)
    return PuritySeries(coeffs.d, omega, p, times, values, method="analytic")


def simpson_weights(p: int, h: float) -> np.ndarray:
    """Веса составной формулы Симпсона: h/3 * [1, 4, 2, 4, ..., 2, 4, 1]."""
    if p < 2 or p % 2:
        raise ValueError(f"Формула Симпсона требует чётного p >= 2, получено: {p}")
    weights = np.full(p + 1, 2.0)
    weights[1::2] = 4.0
    weights[0] = weights[-1] = 1.0
    return weights * h / 3


def _check_nmax(d: int, nmax: int):
    if not 1 <= nmax <= (d - 1) ** 2:
        raise ValueError(f"nmax должен быть в [1, {(d - 1) ** 2}], получено: {nmax}")


def simpson_fourier(series: PuritySeries, nmax: int,
                    coeffs: Optional[InitialCoefficients] = None) -> FourierSpectrum:
    """
    alpha_n = (2 omega / pi) * int_0^{T/2} gamma(t) cos(n omega t) dt, n = 1..nmax,
    составной формулой Симпсона на сетке ряда. alpha_0 - среднее gamma по полупериоду.
    Границы B_n берутся из coeffs (по умолчанию равномерные).
    """
    if series.p % 2:
        raise ValueError(f"Формула Симпсона требует чётного p, получено: {series.p}")
    _check_nmax(series.d, nmax)
    coeffs = coeffs if coeffs is not None else InitialCoefficients.uniform(series.d)
    if coeffs.d != series.d:
        raise ValueError(f"Коэффициенты заданы для d={coeffs.d}, а ряд для d={series.d}")
    t, gamma, omega = series.times, series.values, series.omega
    modes = np.empty(nmax + 1)
    modes[0] = omega / math.pi * simpson(gamma, x=t)
    block = max(1, _SIMPSON_BLOCK // t.size)
    for start in range(1, nmax + 1, block):
        n = np.arange(start, min(start + block, nmax + 1))
        integrand = gamma[None, :] * np.cos(omega * np.outer(n, t))
        modes[n] = 2 * omega / math.pi * simpson(integrand, x=t, axis=-1)
    return FourierSpectrum(series.d, modes, "simpson", _attach_bounds(coeffs, nmax),
                           shots=series.shots, p=series.p, omega=series.omega)


def quadrature_sigma(series: PuritySeries, shots: int, n: Union[int, Sequence[int]]) -> np.ndarray:
    """
    Стандартное отклонение alpha_n от шума выборки:
    sigma_n = (2 omega / pi) * sqrt(sum_i (s_i cos(n omega t_i))^2 * (1 - gamma_i^2) / shots),
    s_i - веса Симпсона; дисперсия оценки 2 P0 - 1 равна (1 - gamma^2) / shots.
    """
    modes = np.atleast_1d(np.asarray(n, dtype=float))
    if shots <= 0:
        return np.zeros(modes.size)
    weights = simpson_weights(series.p, series.step)
    variance = (1.0 - np.clip(series.values, -1.0, 1.0) ** 2) / shots
    basis = np.cos(series.omega * np.outer(modes, series.times)) * weights[None, :]
    return 2 * series.omega / math.pi * np.sqrt((basis ** 2) @ variance)
