"""
@file: circuit_ir.py
@description: Промежуточное представление схем, синтез диагонального U(t) лестницами CNOT и аудит числа вентилей
@dependencies: walsh_core, numpy
@created: 2024-12-19

Кубит q_i (нумерация с 1) -> индекс i-1. Внутри регистра из q кубитов первый
кубит хранит старший диадический бит k_1.
"""

import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from walsh_core import (
    EvolutionParams, WalshSpectrum, closed_form_spectrum, qubit_count,
    scale_angles, set_bit_positions,
)

# Повороты с |theta| ниже порога отбрасываются в оптимизированном режиме
PRUNE_THRESHOLD = 1e-15

# Условная стоимость CSWAP в элементарных вентилях (для сравнения с G3)
CSWAP_ELEMENTARY_COST = 3


class GateKind(Enum):
    """Типы элементарных вентилей"""
    HADAMARD = "h"
    ROTATION_Z = "rz"
    CONTROLLED_NOT = "cx"
    CONTROLLED_SWAP = "cswap"
    MEASURE_Z = "measure"


_ARITY = {
    GateKind.HADAMARD: (0, 1),
    GateKind.ROTATION_Z: (0, 1),
    GateKind.CONTROLLED_NOT: (1, 1),
    GateKind.CONTROLLED_SWAP: (1, 2),
    GateKind.MEASURE_Z: (0, 1),
}


class PipelineMode(Enum):
    """Режим сборки полной схемы"""
    SWAP_TEST = "swap-test"
    STATE_ONLY = "state-only"


@dataclass(frozen=True)
class Gate:
    """Элементарный вентиль: управляющие кубиты, целевые кубиты и угол (только для Rz)"""
    kind: GateKind
    targets: Tuple[int, ...]
    controls: Tuple[int, ...] = ()
    angle: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        n_controls, n_targets = _ARITY[self.kind]
        if len(self.controls) != n_controls or len(self.targets) != n_targets:
            raise ValueError(f"Неверное число кубитов для {self.kind.value}: {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"Кубиты вентиля {self.kind.value} должны различаться: {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise ValueError(f"Отрицательный индекс кубита: {self.qubits}")
        if self.kind == GateKind.ROTATION_Z:
            if self.angle is None or not math.isfinite(self.angle):
                raise ValueError(f"Угол Rz должен быть конечным, получено: {self.angle}")
        elif self.angle is not None:
            raise ValueError(f"Угол допустим только для Rz, а не для {self.kind.value}")

    @property
    def qubits(self) -> Tuple[int, ...]:
        return self.controls + self.targets

    @classmethod
    def h(cls, target: int) -> "Gate":
        return cls(GateKind.HADAMARD, (target,))

    @classmethod
    def rz(cls, target: int, theta: float) -> "Gate":
        return cls(GateKind.ROTATION_Z, (target,), angle=float(theta))

    @classmethod
    def cx(cls, control: int, target: int) -> "Gate":
        return cls(GateKind.CONTROLLED_NOT, (target,), (control,))

    @classmethod
    def cswap(cls, control: int, first: int, second: int) -> "Gate":
        return cls(GateKind.CONTROLLED_SWAP, (first, second), (control,))

    @classmethod
    def measure(cls, target: int) -> "Gate":
        return cls(GateKind.MEASURE_Z, (target,))

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "qubits": list(self.qubits), "angle": self.angle}

    @classmethod
    def from_dict(cls, data: Mapping) -> "Gate":
        kind = GateKind(data["kind"])
        qubits = tuple(data["qubits"])
        n_controls = _ARITY[kind][0]
        return cls(kind, qubits[n_controls:], qubits[:n_controls], data.get("angle"))


@dataclass(frozen=True)
class Stage:
    """Именованный участок схемы [start, stop); pruned - число отброшенных поворотов"""
    name: str
    start: int
    stop: int
    pruned: int = 0


@dataclass(frozen=True)
class Circuit:
    """Неизменяемая схема: ширина, упорядоченные вентили и разметка этапов"""
    width: int
    gates: Tuple[Gate, ...] = ()
    stages: Tuple[Stage, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "stages", tuple(self.stages))
        if self.width < 1:
            raise ValueError(f"Ширина схемы должна быть положительной: {self.width}")
        seen_measure = False
        for gate in self.gates:
            if max(gate.qubits) >= self.width:
                raise ValueError(f"Вентиль {gate.kind.value}{gate.qubits} выходит за ширину {self.width}")
            if gate.kind == GateKind.MEASURE_Z:
                seen_measure = True
            elif seen_measure:
                raise ValueError("Измерения допускаются только в конце схемы")

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    @property
    def has_measurements(self) -> bool:
        return any(g.kind == GateKind.MEASURE_Z for g in self.gates)

    def then(self, other: "Circuit") -> "Circuit":
        """Последовательное соединение; соседние этапы с одним именем сливаются."""
        offset = len(self.gates)
        stages = list(self.stages)
        for stage in other.stages:
            shifted = Stage(stage.name, stage.start + offset, stage.stop + offset, stage.pruned)
            if stages and stages[-1].name == shifted.name and stages[-1].stop == shifted.start:
                last = stages.pop()
                shifted = Stage(last.name, last.start, shifted.stop, last.pruned + shifted.pruned)
            stages.append(shifted)
        return Circuit(max(self.width, other.width), self.gates + other.gates, tuple(stages))

    def widened(self, width: int) -> "Circuit":
        if width < self.width:
            raise ValueError(f"Нельзя сузить схему с {self.width} до {width} кубитов")
        return Circuit(width, self.gates, self.stages)

    def stage(self, name: str) -> Optional[Stage]:
        for stage in self.stages:
            if stage.name == name:
                return stage
        return None

    def stage_gates(self, name: str) -> Tuple[Gate, ...]:
        stage = self.stage(name)
        return self.gates[stage.start:stage.stop] if stage else ()

    def count_by_kind(self, name: Optional[str] = None) -> Dict[str, int]:
        gates = self.gates if name is None else self.stage_gates(name)
        counts = Counter(g.kind.value for g in gates)
        return {kind.value: counts.get(kind.value, 0) for kind in GateKind}

    def without_measurements(self) -> "Circuit":
        gates = tuple(g for g in self.gates if g.kind != GateKind.MEASURE_Z)
        stages = tuple(
            Stage(s.name, min(s.start, len(gates)), min(s.stop, len(gates)), s.pruned)
            for s in self.stages
        )
        return Circuit(self.width, gates, stages)

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "gates": [g.to_dict() for g in self.gates],
            "stages": [
                {"name": s.name, "start": s.start, "stop": s.stop, "pruned": s.pruned}
                for s in self.stages
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Circuit":
        gates = tuple(Gate.from_dict(g) for g in data["gates"])
        stages = tuple(
            Stage(s["name"], s["start"], s["stop"], s.get("pruned", 0))
            for s in data.get("stages", ())
        )
        return cls(int(data["width"]), gates, stages)


@dataclass(frozen=True)
class GateCountReport:
    """Итоги аудита: фактические счётчики по этапам против G1, G2, G3 на одну копию"""
    q: int
    copies: int
    counts: Dict[str, Dict[str, int]]
    predicted: Dict[str, int]
    observed: Dict[str, Optional[int]]
    matches: Dict[str, Optional[bool]]
    pruned: int = 0

    @property
    def all_match(self) -> bool:
        return all(m for m in self.matches.values() if m is not None)

    @property
    def consistent(self) -> bool:
        """Совпадение с G1..G3; при отброшенных поворотах G2 допускается только меньше формулы."""
        for key, match in self.matches.items():
            if match is None or match:
                continue
            observed = self.observed[key]
            if key == "G2" and self.pruned and observed is not None and observed < self.predicted[key]:
                continue
            return False
        return True

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "copies": self.copies,
            "counts": self.counts,
            "predicted": self.predicted,
            "observed": self.observed,
            "matches": self.matches,
            "pruned": self.pruned,
            "cswap_elementary_cost": CSWAP_ELEMENTARY_COST,
        }


def predicted_gate_counts(q: int) -> Dict[str, int]:
    """G1 = q, G2 = 3/4 q^2 + q, G3 = 3/2 q + 2 (q чётное)."""
    if q < 2 or q % 2:
        raise ValueError(f"Формулы G1..G3 определены для чётного q >= 2, получено: {q}")
    return {"G1": q, "G2": 3 * q * q // 4 + q, "G3": 3 * q // 2 + 2}


def _staircase(j: int, theta: float, register: int) -> Tuple[Gate, ...]:
    positions = set_bit_positions(j)
    target = register + positions[-1] - 1
    controls = [register + m - 1 for m in positions[:-1]]
    ladder = tuple(Gate.cx(c, target) for c in controls)
    return ladder + (Gate.rz(target, theta),) + tuple(reversed(ladder))


def synthesize_diagonal(scaled: Mapping[int, float], q: int, register: int = 0,
                        optimized: bool = False) -> Circuit:
    """
    Фрагмент схемы для prod_j exp(i a_j(t) w_j).

    Для каждого j: CNOT от кубитов q_{m_i} (i < h_j) на кубит старшего бита,
    Rz(theta_j = -2 a_j(t)) на нём же и зеркальные CNOT. Углы обходятся
    по возрастанию j.
    """
    if q < 1:
        raise ValueError(f"Число кубитов должно быть положительным, получено: {q}")
    if register < 0:
        raise ValueError(f"Смещение регистра не может быть отрицательным: {register}")
    gates = []
    pruned = 0
    for j in sorted(scaled):
        if not 1 <= j <= 2 ** q - 1:
            raise ValueError(f"Индекс j={j} вне диапазона [1, {2 ** q - 1}]")
        theta = -2.0 * float(scaled[j])
        if optimized and abs(theta) < PRUNE_THRESHOLD:
            pruned += 1
            continue
        gates.extend(_staircase(j, theta, register))
    stage = Stage("evolve", 0, len(gates), pruned)
    return Circuit(register + q, tuple(gates), (stage,))


def prepare_uniform(q: int, register: int = 0) -> Circuit:
    """Адамар на каждый кубит регистра: ровно q вентилей (G1)."""
    if q < 1 or register < 0:
        raise ValueError(f"Некорректный регистр: q={q}, смещение={register}")
    gates = tuple(Gate.h(register + i) for i in range(q))
    return Circuit(register + q, gates, (Stage("prepare", 0, len(gates)),))


def build_swap_test(q: int) -> Circuit:
    """
    Модифицированный SWAP-тест: анцилла 0, копия 1 на 1..q, копия 2 на q+1..2q.
    CSWAP только между первыми q/2 кубитами копий (подсистема A).
    """
    if q < 2 or q % 2:
        raise ValueError(f"SWAP-тест требует чётного q >= 2, получено: {q}")
    gates = [Gate.h(0)]
    gates += [Gate.cswap(0, i, q + i) for i in range(1, q // 2 + 1)]
    gates += [Gate.h(0), Gate.measure(0)]
    return Circuit(2 * q + 1, tuple(gates), (Stage("swap_test", 0, len(gates)),))


def evolution_fragment(d: int, params: EvolutionParams, register: int = 0,
                       optimized: bool = False,
                       spectrum: Optional[WalshSpectrum] = None) -> Circuit:
    spectrum = spectrum if spectrum is not None else closed_form_spectrum(d)
    return synthesize_diagonal(scale_angles(spectrum, params), spectrum.q, register, optimized)


def build_pipeline(d: int, params: EvolutionParams,
                   mode: PipelineMode = PipelineMode.SWAP_TEST,
                   optimized: bool = False) -> Circuit:
    """
    Полная схема. state-only: ширина q, подготовка + эволюция.
    swap-test: ширина 2q+1, обе копии готовятся и эволюционируют одинаково,
    затем SWAP-тест.
    """
    q = qubit_count(d)
    if params.d != d:
        raise ValueError(f"Параметры эволюции заданы для d={params.d}, а схема для d={d}")
    spectrum = closed_form_spectrum(d)
    if mode == PipelineMode.STATE_ONLY:
        return prepare_uniform(q).then(evolution_fragment(d, params, 0, optimized, spectrum))
    if mode != PipelineMode.SWAP_TEST:
        raise ValueError(f"Неизвестный режим схемы: {mode}")
    width = 2 * q + 1
    circuit = prepare_uniform(q, 1).then(prepare_uniform(q, q + 1))
    circuit = circuit.then(evolution_fragment(d, params, 1, optimized, spectrum))
    circuit = circuit.then(evolution_fragment(d, params, q + 1, optimized, spectrum))
    return circuit.then(build_swap_test(q)).widened(width)


def _elementary_count(counts: Mapping[str, int]) -> int:
    total = 0
    for kind, n in counts.items():
        if kind == GateKind.MEASURE_Z.value:
            continue
        total += n * (CSWAP_ELEMENTARY_COST if kind == GateKind.CONTROLLED_SWAP.value else 1)
    return total


def audit_gates(circuit: Circuit, d: int) -> GateCountReport:
    """
    Подсчёт вентилей по этапам и сравнение с G1, G2, G3.
    Для схемы с двумя копиями этапы подготовки и эволюции делятся на 2.
    CSWAP считается за 3 элементарных вентиля, измерение не учитывается.
    """
    q = qubit_count(d)
    if circuit.width == 2 * q + 1:
        copies = 2
    elif circuit.width == q:
        copies = 1
    else:
        raise ValueError(f"Ширина схемы {circuit.width} не соответствует d={d}")
    predicted = predicted_gate_counts(q)
    counts = {s.name: circuit.count_by_kind(s.name) for s in circuit.stages}
    observed: Dict[str, Optional[int]] = {}
    matches: Dict[str, Optional[bool]] = {}
    for key, name, per_copy in (("G1", "prepare", True), ("G2", "evolve", True),
                                ("G3", "swap_test", False)):
        if name not in counts:
            observed[key], matches[key] = None, None
            continue
        total = _elementary_count(counts[name])
        value = total // copies if per_copy else total
        if per_copy and total % copies:
            value = None
        observed[key] = value
        matches[key] = value == predicted[key]
    pruned = sum(s.pruned for s in circuit.stages)
    return GateCountReport(q, copies, counts, predicted, observed, matches, pruned)


def realized_diagonal(circuit: Circuit) -> np.ndarray:
    """
    Диагональ унитарной матрицы схемы из CNOT и Rz по базисным состояниям.
    Базисное состояние |k> прослеживается как битовый вектор, фаза накапливается.
    """
    n = circuit.width
    allowed = {GateKind.CONTROLLED_NOT, GateKind.ROTATION_Z}
    if any(g.kind not in allowed for g in circuit.gates):
        raise ValueError("Диагональ считается только для схем из CNOT и Rz")
    index = np.arange(2 ** n, dtype=np.int64)
    bits = (index[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1
    phase = np.zeros(2 ** n)
    for gate in circuit.gates:
        if gate.kind == GateKind.CONTROLLED_NOT:
            (c,), (t,) = gate.controls, gate.targets
            bits[:, t] ^= bits[:, c]
        else:
            (t,) = gate.targets
            phase += np.where(bits[:, t] == 1, gate.angle / 2, -gate.angle / 2)
    if np.any(bits != ((index[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1)):
        raise ValueError("Схема не диагональна: базисные состояния переставлены")
    return np.exp(1j * phase)
