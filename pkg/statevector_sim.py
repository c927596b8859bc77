"""
@file: statevector_sim.py
@description: Плотная симуляция вектора состояния, точная редуцированная чистота, SWAP-тест и выборка по shots
@dependencies: circuit_ir, walsh_core, numpy
@created: 2024-12-19

Индекс кубита 0 соответствует старшему биту индекса амплитуды, поэтому
кубит i - это ось i у представления amplitudes.reshape((2,) * n).
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

import hashlib
import math

import numpy as np

from circuit_ir import Circuit, Gate, GateKind, PipelineMode, build_pipeline
from walsh_core import EvolutionParams, qubit_count

# 2^25 амплитуд complex128 ~ 512 МиБ
SWAP_EXACT_MAX_WIDTH = 25

NORM_TOLERANCE = 1e-12
IMAG_TOLERANCE = 1e-12

_INV_SQRT2 = 1 / math.sqrt(2)


class ResourceLimitError(RuntimeError):
    """Схема не помещается в бюджет памяти плотной симуляции"""


class PurityMethod(Enum):
    """Способ оценки чистоты"""
    EXACT_TRACE = "exact-trace"
    SWAP_EXACT = "swap-exact"
    SWAP_SAMPLED = "swap-sampled"


@dataclass
class StateVector:
    """Вектор состояния из 2^width комплексных амплитуд"""
    width: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.width < 1:
            raise ValueError(f"Ширина состояния должна быть положительной: {self.width}")
        if self.amplitudes.shape != (2 ** self.width,):
            raise ValueError(
                f"Ожидалось {2 ** self.width} амплитуд, получено {self.amplitudes.size}"
            )

    @classmethod
    def zero(cls, width: int) -> "StateVector":
        amplitudes = np.zeros(2 ** width, dtype=np.complex128)
        amplitudes[0] = 1.0
        return cls(width, amplitudes)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def copy(self) -> "StateVector":
        return StateVector(self.width, self.amplitudes.copy())


@dataclass(frozen=True)
class PurityEstimate:
    """Оценка gamma_A; для SWAP-методов value = 2 * p0 - 1"""
    value: float
    method: PurityMethod
    shots: int = 0
    p0: Optional[float] = None

    def to_dict(self) -> Dict:
        return {"value": self.value, "method": self.method.value, "shots": self.shots, "p0": self.p0}


def _index(n: int, fixed: Dict[int, int]) -> Tuple:
    return tuple(fixed.get(axis, slice(None)) for axis in range(n))


def _apply_gate(psi: np.ndarray, gate: Gate):
    # psi - представление (2,)*n, изменяется на месте
    n = psi.ndim
    if gate.kind == GateKind.HADAMARD:
        (t,) = gate.targets
        i0, i1 = _index(n, {t: 0}), _index(n, {t: 1})
        a0 = psi[i0].copy()
        a1 = psi[i1]
        psi[i0] = (a0 + a1) * _INV_SQRT2
        psi[i1] = (a0 - a1) * _INV_SQRT2
    elif gate.kind == GateKind.ROTATION_Z:
        (t,) = gate.targets
        half = gate.angle / 2
        psi[_index(n, {t: 0})] *= complex(math.cos(half), -math.sin(half))
        psi[_index(n, {t: 1})] *= complex(math.cos(half), math.sin(half))
    elif gate.kind == GateKind.CONTROLLED_NOT:
        (c,), (t,) = gate.controls, gate.targets
        _swap_blocks(psi, _index(n, {c: 1, t: 0}), _index(n, {c: 1, t: 1}))
    elif gate.kind == GateKind.CONTROLLED_SWAP:
        (c,), (a, b) = gate.controls, gate.targets
        _swap_blocks(psi, _index(n, {c: 1, a: 0, b: 1}), _index(n, {c: 1, a: 1, b: 0}))
    else:
        raise ValueError("Измерения не применяются к вектору состояния; используйте sample_purity")


def _swap_blocks(psi: np.ndarray, first: Tuple, second: Tuple):
    tmp = psi[first].copy()
    psi[first] = psi[second]
    psi[second] = tmp


def apply_circuit(state: StateVector, circuit: Circuit, check_norm: bool = False) -> StateVector:
    """
    Применяет вентили схемы по порядку к копии состояния.

    check_norm: проверять сохранение нормы после каждого вентиля (|norm^2 - 1| <= 1e-12).
    """
    if state.width != circuit.width:
        raise ValueError(f"Ширина состояния {state.width} не совпадает с шириной схемы {circuit.width}")
    if circuit.has_measurements:
        raise ValueError("Схема содержит измерения; используйте circuit.without_measurements()")
    result = state.copy()
    psi = result.amplitudes.reshape((2,) * result.width)
    for position, gate in enumerate(circuit.gates):
        _apply_gate(psi, gate)
        if check_norm:
            drift = abs(result.norm_squared() - 1.0)
            if drift > NORM_TOLERANCE:
                raise ArithmeticError(
                    f"Норма нарушена на вентиле #{position} ({gate.kind.value}): отклонение {drift:.3e}"
                )
    return result


def reduced_purity_exact(state: StateVector, cut: int) -> PurityEstimate:
    """
    gamma_A = Tr(rho_A^2), rho_A = M M^+, где M - матрица d x d
    (строка - индекс подсистемы A, столбец - индекс B).
    """
    if state.width % 2 or cut != state.width // 2:
        raise ValueError(f"Разрез {cut} должен делить регистр из {state.width} кубитов пополам")
    matrix = state.amplitudes.reshape(2 ** cut, -1)
    rho = matrix @ matrix.conj().T
    trace = np.trace(rho @ rho)
    if abs(trace.imag) > IMAG_TOLERANCE:
        raise ArithmeticError(f"Мнимая часть Tr(rho^2) не сократилась: {trace.imag:.3e}")
    return PurityEstimate(float(trace.real), PurityMethod.EXACT_TRACE)


def swap_test_p0(state: StateVector) -> float:
    """P0: сумма |amplitude|^2 по базисным состояниям с анциллой (кубит 0) в |0>."""
    if state.width < 3 or state.width % 2 == 0:
        raise ValueError(f"Состояние SWAP-теста должно иметь ширину 2q+1, получено: {state.width}")
    half = state.amplitudes.size // 2
    head = state.amplitudes[:half]
    return float(np.vdot(head, head).real)


def point_seed(base_seed: int, index: int) -> int:
    """Зерно точки сетки: blake2b(base_seed, index), 64 бита, не зависит от порядка выполнения."""
    if base_seed < 0 or index < 0:
        raise ValueError(f"Зерно и индекс должны быть неотрицательными: {base_seed}, {index}")
    payload = base_seed.to_bytes(16, "little") + index.to_bytes(8, "little")
    digest = hashlib.blake2b(payload, digest_size=8, person=b"entprimes").digest()
    return int.from_bytes(digest, "little")


def sample_purity(p0: float, shots: int, seed: int) -> PurityEstimate:
    """
    shots испытаний Бернулли(p0) на счётчиковом генераторе Philox.
    Сумма испытаний берётся одной биномиальной величиной.
    """
    if shots < 1:
        raise ValueError(f"Число shots должно быть >= 1, получено: {shots}")
    if not -NORM_TOLERANCE <= p0 <= 1 + NORM_TOLERANCE:
        raise ValueError(f"Вероятность p0 вне [0, 1]: {p0}")
    p0 = min(max(float(p0), 0.0), 1.0)
    rng = np.random.Generator(np.random.Philox(seed))
    successes = int(rng.binomial(shots, p0))
    return PurityEstimate(2 * successes / shots - 1, PurityMethod.SWAP_SAMPLED, shots, p0)


def swap_operator(dim: int) -> np.ndarray:
    """Матрица SWAP на C^dim (x) C^dim: |i, j> -> |j, i>."""
    if dim < 1:
        raise ValueError(f"Размерность должна быть положительной: {dim}")
    swap = np.zeros((dim * dim, dim * dim))
    i, j = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    swap[(j * dim + i).ravel(), (i * dim + j).ravel()] = 1.0
    return swap


def swap_trace(first: np.ndarray, second: np.ndarray) -> complex:
    """Tr((V1 (x) V2) SWAP); по тождеству SWAP-трассы равно Tr(V1 V2)."""
    first, second = np.asarray(first), np.asarray(second)
    if first.shape != second.shape or first.shape[0] != first.shape[1]:
        raise ValueError(f"Нужны квадратные матрицы одного размера: {first.shape}, {second.shape}")
    return complex(np.trace(np.kron(first, second) @ swap_operator(first.shape[0])))


def simulate_pipeline_state(d: int, params: EvolutionParams, optimized: bool = False,
                            check_norm: bool = False) -> StateVector:
    """Состояние |psi(t)> на q кубитах после подготовки и эволюции."""
    circuit = build_pipeline(d, params, PipelineMode.STATE_ONLY, optimized)
    return apply_circuit(StateVector.zero(circuit.width), circuit, check_norm)


def exact_trace_purity(d: int, params: EvolutionParams, optimized: bool = False) -> PurityEstimate:
    state = simulate_pipeline_state(d, params, optimized)
    return reduced_purity_exact(state, state.width // 2)


def simulate_swap_test_p0(d: int, params: EvolutionParams, optimized: bool = False) -> PurityEstimate:
    """Полная схема на 2q+1 кубитах без измерения; gamma = 2 * P0 - 1."""
    width = 2 * qubit_count(d) + 1
    if width > SWAP_EXACT_MAX_WIDTH:
        raise ResourceLimitError(
            f"SWAP-схема для d={d} требует {width} кубитов (предел {SWAP_EXACT_MAX_WIDTH}); "
            "используйте --backend fast-sampled"
        )
    circuit = build_pipeline(d, params, PipelineMode.SWAP_TEST, optimized).without_measurements()
    state = apply_circuit(StateVector.zero(circuit.width), circuit)
    p0 = swap_test_p0(state)
    return PurityEstimate(2 * p0 - 1, PurityMethod.SWAP_EXACT, 0, p0)
