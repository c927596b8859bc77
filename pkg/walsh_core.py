"""
@file: walsh_core.py
@description: Функции Уолша (порядок Пэли), быстрое преобразование Уолша и разреженный спектр углов U(t)
@dependencies: numpy
@created: 2024-12-19

Соглашения по битам (общие для всего модуля):
  - j в двоичной записи: j_1 - младший бит (LSB);
  - k в диадической записи: k_1 - старший бит (MSB);
  - w_jk = (-1)^(sum_i j_i * k_i).
Кубит q_i хранит диадический бит k_i, поэтому базисное состояние |k>
лежит в амплитуде с индексом k.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterator, Mapping, Tuple

import math

import numpy as np

# Предел int64 для сырых углов
MAX_RAW_ANGLE = 2 ** 63 - 1


def is_power_of_two(value: int) -> bool:
    return value >= 1 and value & (value - 1) == 0


def qubit_count(d: int) -> int:
    """Число кубитов q из условия кодирования d^2 = 2^q."""
    if not isinstance(d, (int, np.integer)) or d < 2 or not is_power_of_two(int(d)):
        raise ValueError(f"Размерность d должна быть степенью двойки и >= 2, получено: {d}")
    return 2 * (int(d).bit_length() - 1)


def hamming_weight(j: int) -> int:
    return bin(j).count("1")


def set_bit_positions(j: int) -> Tuple[int, ...]:
    """Позиции m_i единичных битов j (нумерация с 1, по возрастанию)."""
    positions = []
    m = 1
    while j:
        if j & 1:
            positions.append(m)
        j >>= 1
        m += 1
    return tuple(positions)


def msb_position(j: int) -> int:
    """Позиция m_{h_j} старшего единичного бита j."""
    if j < 1:
        raise ValueError(f"У индекса {j} нет единичных битов")
    return j.bit_length()


def _check_index(value: int, q: int, name: str):
    if q < 1:
        raise ValueError(f"Число кубитов должно быть положительным, получено: {q}")
    if not 0 <= value <= 2 ** q - 1:
        raise ValueError(f"Индекс {name}={value} вне диапазона [0, {2 ** q - 1}] для q={q}")


def _bit_reverse_permutation(q: int) -> np.ndarray:
    idx = np.arange(2 ** q, dtype=np.int64)
    rev = np.zeros_like(idx)
    for b in range(q):
        rev |= ((idx >> b) & 1) << (q - 1 - b)
    return rev


@dataclass(frozen=True)
class PhaseVector:
    """Вектор фаз f: f[(n_A-1)*d + (n_B-1)] = n_A * n_B (нормировка kappa = 1)"""
    d: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        q = qubit_count(self.d)
        if len(self.entries) != 2 ** q:
            raise ValueError(f"Длина вектора фаз {len(self.entries)} не равна d^2 = {2 ** q}")

    @property
    def q(self) -> int:
        return qubit_count(self.d)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class WalshSpectrum:
    """Разреженный спектр: j -> сырой угол a_j (целое, без множителей omega*t/d^2)"""
    q: int
    entries: Mapping[int, int]

    def __post_init__(self):
        clean = {}
        for j, value in self.entries.items():
            j = int(j)
            _check_index(j, self.q, "j")
            if j == 0:
                raise ValueError("Спектр хранит только j >= 1 (w_0 = I отбрасывается)")
            value = int(value)
            if value == 0:
                raise ValueError(f"Нулевой угол a_{j} не хранится в разреженном спектре")
            if abs(value) > MAX_RAW_ANGLE:
                raise OverflowError(f"Угол a_{j} = {value} не помещается в int64")
            clean[j] = value
        object.__setattr__(self, "entries", dict(sorted(clean.items())))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[int]:
        return iter(self.entries)

    def __getitem__(self, j: int) -> int:
        return self.entries.get(j, 0)

    def items(self):
        return self.entries.items()

    def support(self) -> frozenset:
        return frozenset(self.entries)


@dataclass(frozen=True)
class EvolutionParams:
    """Параметры эволюции; lambda, mu и hbar поглощены в omega"""
    omega: float
    t: float
    d: int

    def __post_init__(self):
        if not self.omega > 0 or not math.isfinite(self.omega):
            raise ValueError(f"Частота omega должна быть положительной, получено: {self.omega}")
        if not math.isfinite(self.t):
            raise ValueError(f"Время t должно быть конечным, получено: {self.t}")
        qubit_count(self.d)

    @property
    def period(self) -> float:
        return 2 * math.pi / self.omega


def walsh_function(j: int, k: int, q: int) -> int:
    """w_jk = (-1)^(sum j_i k_i), j_i из bin(j) (LSB первым), k_i из dyad(k) (MSB первым)."""
    _check_index(j, q, "j")
    _check_index(k, q, "k")
    exponent = 0
    for i in range(1, q + 1):
        j_i = (j >> (i - 1)) & 1
        k_i = (k >> (q - i)) & 1
        exponent += j_i * k_i
    return -1 if exponent % 2 else 1


def walsh_row(j: int, q: int) -> np.ndarray:
    """
    Строка w_(j,.) матрицы Уолша по рекурсивному построению из строк Радемахера.
    Для j = l_r получается чередование блоков (+1) и (-1) длины T_r = 2^(q-r).
    """
    _check_index(j, q, "j")
    size = 2 ** q
    if j == 0:
        return np.ones(size, dtype=np.int8)
    positions = set_bit_positions(j)
    # R_{m_h}: блок из +1 длины T_{m_h}
    row = np.ones(2 ** (q - positions[-1]), dtype=np.int8)
    lengths = [2 ** (q - m) for m in reversed(positions[:-1])] + [size]
    for length in lengths:
        pair = np.concatenate((row, -row))
        row = np.tile(pair, length // pair.size)
    return row


def phase_vector(d: int) -> PhaseVector:
    """f = [P_1, P_2, ..., P_d], P_eta = [eta, 2*eta, ..., d*eta]."""
    qubit_count(d)
    levels = np.arange(1, d + 1, dtype=np.int64)
    return PhaseVector(d=d, entries=np.outer(levels, levels).reshape(-1))


def _fwht_natural(values: np.ndarray) -> np.ndarray:
    # бабочки по битам индекса, O(q * 2^q)
    a = np.asarray(values, dtype=np.int64).copy()
    n = a.size
    h = 1
    while h < n:
        a = a.reshape(-1, 2, h)
        a = np.stack((a[:, 0, :] + a[:, 1, :], a[:, 0, :] - a[:, 1, :]), axis=1)
        h *= 2
    return a.reshape(n)


def walsh_transform_full(values) -> np.ndarray:
    """
    Все сырые коэффициенты a_j = sum_k f_k w_jk, j = 0..2^q-1, в порядке Пэли.
    Множитель 1/2^q не применяется.
    """
    values = np.asarray(values)
    n = values.size
    if n < 2 or not is_power_of_two(n):
        raise ValueError(f"Длина вектора должна быть степенью двойки, получено: {n}")
    if not np.issubdtype(values.dtype, np.integer):
        raise ValueError("Преобразование работает с целочисленными векторами")
    q = n.bit_length() - 1
    natural = _fwht_natural(values)
    # порядок Пэли: a_j = H[bitrev(j)]
    return natural[_bit_reverse_permutation(q)]


def inverse_walsh_transform(coefficients) -> np.ndarray:
    """f_k = (1/2^q) sum_j a_j w_jk по полному набору сырых коэффициентов (включая j = 0)."""
    coefficients = np.asarray(coefficients, dtype=np.int64)
    n = coefficients.size
    restored = walsh_transform_full(coefficients)
    if np.any(restored % n):
        raise ValueError("Коэффициенты не соответствуют целочисленному вектору")
    return restored // n


def walsh_transform(f: PhaseVector) -> WalshSpectrum:
    """Сырой спектр a_j (j >= 1) через быстрое преобразование; нулевые углы опускаются."""
    values = f.entries if isinstance(f, PhaseVector) else np.asarray(f)
    full = walsh_transform_full(values)
    q = full.size.bit_length() - 1
    if np.abs(full).max(initial=0) > MAX_RAW_ANGLE // 2:
        raise OverflowError("Сырые углы выходят за пределы int64")
    entries = {int(j): int(full[j]) for j in np.flatnonzero(full) if j != 0}
    return WalshSpectrum(q=q, entries=entries)


def _exact_div(numerator: int, denominator: int) -> int:
    quotient, remainder = divmod(numerator, denominator)
    if remainder:
        raise ArithmeticError(f"{numerator}/{denominator} не является целым")
    return quotient


def closed_form_spectrum(d: int) -> WalshSpectrum:
    """
    Ненулевые углы W1 u W2 за O(q^2) без полного преобразования.

    W1 (h_j = 1): a_j = -(1+d) d^3 / (8j) при j <= d/2 и -(1+d) d^4 / (8j) при j >= d.
    W2 (h_j = 2): j = l1 + l2, l1 <= d/2, l2 >= d, a_j = d^5 / (16 l1 l2).
    Только для чётного q; для остальных случаев есть walsh_transform.
    """
    try:
        q = qubit_count(d)
    except ValueError:
        raise ValueError(
            f"Замкнутая форма определена только для d = 2^s (чётное q), получено d={d}; "
            "используйте walsh_transform"
        )
    half = q // 2
    entries: Dict[int, int] = {}
    for m in range(1, q + 1):
        j = 1 << (m - 1)
        numerator = (1 + d) * d ** 3 if j <= d // 2 else (1 + d) * d ** 4
        entries[j] = -_exact_div(numerator, 8 * j)
    for m1 in range(1, half + 1):
        for m2 in range(half + 1, q + 1):
            l1, l2 = 1 << (m1 - 1), 1 << (m2 - 1)
            entries[l1 + l2] = _exact_div(d ** 5, 16 * l1 * l2)
    return WalshSpectrum(q=q, entries=entries)


def scale_angles(spectrum: WalshSpectrum, params: EvolutionParams) -> Dict[int, float]:
    """a_j(t) = (-omega * t / d^2) * a_j."""
    if spectrum.q != qubit_count(params.d):
        raise ValueError(
            f"Спектр построен для q={spectrum.q}, а параметры для d={params.d}"
        )
    factor = -params.omega * params.t / params.d ** 2
    return {j: factor * a for j, a in spectrum.items()}
