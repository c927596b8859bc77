"""
@file: purity_backends.py
@description: Backend'ы оценки чистоты в точке сетки и параллельный проход по сетке [0, T/2]
@dependencies: run_config, statevector_sim, spectral_analysis, walsh_core
@created: 2024-12-19
"""

import time
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from run_config import Backend, RunConfig
from spectral_analysis import PuritySeries, purity_grid
from statevector_sim import (
    SWAP_EXACT_MAX_WIDTH, PurityEstimate, ResourceLimitError, exact_trace_purity,
    point_seed, sample_purity, simulate_swap_test_p0,
)
from walsh_core import EvolutionParams


@dataclass
class SweepResult:
    """Результат прохода по сетке"""
    success: bool
    message: str
    series: Optional[PuritySeries] = None
    seeds: Tuple[int, ...] = ()
    elapsed: float = 0.0
    error: Optional[str] = None
    exception: Optional[Exception] = field(default=None, repr=False)


class PurityBackend(ABC):
    """Оценка gamma_A(t_i) для одной точки сетки"""

    name: Backend

    def check(self, config: RunConfig):
        """Проверка ресурсов до начала прохода"""

    @abstractmethod
    def estimate(self, config: RunConfig, t: float, seed: int) -> PurityEstimate:
        pass


class ExactTraceBackend(PurityBackend):
    """Схема на q кубитах и частичный след; shots не используются"""

    name = Backend.EXACT_TRACE

    def estimate(self, config: RunConfig, t: float, seed: int) -> PurityEstimate:
        params = EvolutionParams(config.omega, t, config.d)
        return exact_trace_purity(config.d, params, config.optimized)


class SwapExactBackend(PurityBackend):
    """Полная схема SWAP-теста на 2q+1 кубитах; при shots > 0 выборка из её P0"""

    name = Backend.SWAP_EXACT

    def check(self, config: RunConfig):
        width = 2 * config.q + 1
        if width > SWAP_EXACT_MAX_WIDTH:
            raise ResourceLimitError(
                f"swap-exact для d={config.d} требует {width} кубитов (предел {SWAP_EXACT_MAX_WIDTH}); "
                "используйте --backend fast-sampled"
            )

    def estimate(self, config: RunConfig, t: float, seed: int) -> PurityEstimate:
        params = EvolutionParams(config.omega, t, config.d)
        exact = simulate_swap_test_p0(config.d, params, config.optimized)
        if config.shots == 0:
            return exact
        return sample_purity(exact.p0, config.shots, seed)


class FastSampledBackend(PurityBackend):
    """Точная чистота -> P0 = (1 + gamma) / 2 -> выборка shots испытаний"""

    name = Backend.FAST_SAMPLED

    def estimate(self, config: RunConfig, t: float, seed: int) -> PurityEstimate:
        params = EvolutionParams(config.omega, t, config.d)
        exact = exact_trace_purity(config.d, params, config.optimized)
        if config.shots == 0:
            return exact
        return sample_purity((1 + exact.value) / 2, config.shots, seed)


class PurityBackendFactory:
    """Фабрика backend'ов чистоты"""

    @staticmethod
    def create_backend(backend: Backend) -> PurityBackend:
        if backend == Backend.EXACT_TRACE:
            return ExactTraceBackend()
        elif backend == Backend.SWAP_EXACT:
            return SwapExactBackend()
        elif backend == Backend.FAST_SAMPLED:
            return FastSampledBackend()
        else:
            raise ValueError(f"Неизвестный backend: {backend}")


def get_purity_backend(name: str) -> PurityBackend:
    """Backend по строке"""
    try:
        return PurityBackendFactory.create_backend(Backend(name.lower()))
    except ValueError:
        raise ValueError(f"Поддерживаемые backend'ы: {[b.value for b in Backend]}")


def sweep_purity(config: RunConfig, logger=print) -> SweepResult:
    """
    Чистота во всех p+1 точках сетки. Зерно точки зависит только от (seed, индекс),
    результаты раскладываются по индексу, поэтому ряд не зависит от числа потоков.
    """
    started = time.perf_counter()
    backend = PurityBackendFactory.create_backend(config.backend)
    try:
        backend.check(config)
        times = purity_grid(config.omega, config.p)
        seeds = tuple(point_seed(config.seed, i) for i in range(times.size))
        logger(f"🔄 {backend.name.value}: d={config.d}, p={config.p}, shots={config.shots}, "
               f"потоков {config.worker_count}")
        values: List[float] = [0.0] * times.size
        with ThreadPoolExecutor(max_workers=config.worker_count) as pool:
            futures = {pool.submit(backend.estimate, config, float(t), seed): i
                       for i, (t, seed) in enumerate(zip(times, seeds))}
            for future, i in futures.items():
                values[i] = future.result().value
        sampled = config.shots > 0 and config.backend != Backend.EXACT_TRACE
        series = PuritySeries(
            d=config.d, omega=config.omega, p=config.p, times=times, values=values,
            method=config.backend.value, shots=config.shots if sampled else 0,
            seeds=seeds if sampled else None,
        )
        elapsed = time.perf_counter() - started
        logger(f"✅ Сетка из {times.size} точек рассчитана за {elapsed:.2f} с")
        return SweepResult(True, "Ряд чистоты рассчитан", series, seeds, elapsed)
    except Exception as e:
        logger(f"❌ Ошибка расчёта ряда чистоты: {e}")
        return SweepResult(False, "Ошибка расчёта ряда чистоты", error=str(e), exception=e,
                           elapsed=time.perf_counter() - started)


def estimate_point(config: RunConfig, t: float, index: int = 0) -> PurityEstimate:
    """Одна точка: удобно для `simulate --t`."""
    backend = PurityBackendFactory.create_backend(config.backend)
    backend.check(config)
    return backend.estimate(config, t, point_seed(config.seed, index))
