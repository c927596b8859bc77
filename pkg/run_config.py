"""
@file: run_config.py
@description: Конфигурация запуска: RunConfig, режимы backend/синтеза/формата, загрузка настроек из config/ и YAML
@dependencies: walsh_core, PyYAML
@created: 2024-12-19
"""

import dataclasses
import json
import os
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import yaml

from walsh_core import qubit_count

APP_VERSION = "1.0.0"

CONFIG_PATH = Path(__file__).resolve().parent / "config" / "config.json"
OUTPUT_DIR_ENV = "ENTPRIMES_OUTPUT_DIR"

# d=16: p=375 округлено до чётного
DEFAULT_PARTITIONS = {16: 376, 32: 1500, 64: 6000}

# d, начиная с которого sweep требует явного --large
LARGE_D = 64


class ConfigError(ValueError):
    """Некорректная конфигурация запуска"""


class Backend(Enum):
    """Способ получения чистоты в точке сетки"""
    EXACT_TRACE = "exact-trace"
    SWAP_EXACT = "swap-exact"
    FAST_SAMPLED = "fast-sampled"


class SynthesisMode(Enum):
    """faithful - все повороты; optimized - повороты с |theta| < 1e-15 отбрасываются"""
    FAITHFUL = "faithful"
    OPTIMIZED = "optimized"


class OutputFormat(Enum):
    CSV = "csv"
    JSON = "json"


def _parse_enum(enum_cls, value, label: str):
    if isinstance(value, enum_cls):
        return value
    try:
        return enum_cls(str(value).lower())
    except ValueError:
        raise ConfigError(f"Неизвестное значение {label}: {value}. "
                          f"Поддерживаемые: {[m.value for m in enum_cls]}")


def get_backend(name: str) -> Backend:
    """Backend по строке (без учёта регистра)"""
    return _parse_enum(Backend, name, "backend")


def default_partitions(d: int, table: Optional[Mapping[int, int]] = None) -> int:
    """
    p по таблице, иначе наименьшее чётное p >= 2((d-1)^2 + 2(d-1)):
    при таком p формула Симпсона точна для всех частот спектра и мод до 2(d-1).
    """
    table = DEFAULT_PARTITIONS if table is None else table
    if d in table:
        return int(table[d])
    p = 2 * ((d - 1) ** 2 + 2 * (d - 1))
    return p + p % 2


@dataclass
class RunConfig:
    """Параметры запуска; по умолчанию 10^5 shots и omega = 0.1"""
    d: int = 16
    omega: float = 0.1
    p: Optional[int] = None
    shots: int = 100_000
    seed: int = 20241219
    backend: Backend = Backend.FAST_SAMPLED
    synthesis: SynthesisMode = SynthesisMode.FAITHFUL
    regime_three: bool = False
    output_dir: str = "results"
    fmt: OutputFormat = OutputFormat.CSV
    threads: Optional[int] = None
    large: bool = False
    t: Optional[float] = None

    def __post_init__(self):
        self.backend = _parse_enum(Backend, self.backend, "backend")
        self.synthesis = _parse_enum(SynthesisMode, self.synthesis, "synthesis")
        self.fmt = _parse_enum(OutputFormat, self.fmt, "format")
        try:
            qubit_count(self.d)
        except ValueError as e:
            raise ConfigError(str(e))
        if not isinstance(self.omega, (int, float)) or not self.omega > 0:
            raise ConfigError(f"omega должна быть положительной, получено: {self.omega}")
        if self.p is None:
            self.p = default_partitions(self.d)
        if self.p < 2 or self.p % 2:
            raise ConfigError(f"Число разбиений p должно быть чётным и >= 2, получено: {self.p}")
        if self.shots < 0:
            raise ConfigError(f"shots не может быть отрицательным: {self.shots}")
        if self.seed < 0:
            raise ConfigError(f"seed не может быть отрицательным: {self.seed}")
        if self.threads is not None and self.threads < 1:
            raise ConfigError(f"threads должно быть >= 1, получено: {self.threads}")

    @property
    def q(self) -> int:
        return qubit_count(self.d)

    @property
    def optimized(self) -> bool:
        return self.synthesis == SynthesisMode.OPTIMIZED

    @property
    def nmax(self) -> int:
        """Моды до 2(d-1), с regime_three - до (d-1)^2."""
        return (self.d - 1) ** 2 if self.regime_three else 2 * (self.d - 1)

    @property
    def worker_count(self) -> int:
        return self.threads or os.cpu_count() or 1

    def require_large(self):
        if self.d >= LARGE_D and not self.large:
            raise ConfigError(f"Запуск для d={self.d} долгий; подтвердите флагом --large")

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        data = dataclasses.asdict(self)
        for key, value in data.items():
            if isinstance(value, Enum):
                data[key] = value.value
        return data


# секции config/config.json -> поля RunConfig
_SECTION_FIELDS = {
    "Simulation": {
        "Omega": "omega", "Shots": "shots", "Seed": "seed", "Backend": "backend",
        "Synthesis": "synthesis", "RegimeThree": "regime_three", "Threads": "threads",
    },
    "Output": {"Format": "fmt", "Directory": "output_dir"},
}


def load_defaults(path: Optional[Path] = None) -> Dict[str, Any]:
    """
    Значения по умолчанию из config/config.json и переменной окружения
    ENTPRIMES_OUTPUT_DIR. Возвращает словарь полей RunConfig и таблицу разбиений.
    """
    path = Path(path) if path else CONFIG_PATH
    values: Dict[str, Any] = {}
    partitions: Dict[int, int] = dict(DEFAULT_PARTITIONS)
    if path.exists():
        try:
            with open(path, "r", encoding="utf-8") as f:
                raw = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"Повреждён файл настроек {path}: {e}")
        for section, mapping in _SECTION_FIELDS.items():
            for key, field_name in mapping.items():
                if key in raw.get(section, {}):
                    values[field_name] = raw[section][key]
        for d, p in raw.get("Partitions", {}).items():
            partitions[int(d)] = int(p)
    env_dir = os.environ.get(OUTPUT_DIR_ENV)
    if env_dir:
        values["output_dir"] = env_dir
    values["partitions"] = partitions
    return values


def load_config_file(path: str) -> Dict[str, Any]:
    """Пользовательский файл настроек (YAML или JSON) с плоскими ключами полей RunConfig."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Файл настроек не найден: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"Не удалось разобрать {path}: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"Файл настроек {path} должен содержать словарь")
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"Неизвестные ключи в {path}: {unknown}")
    return data


def build_config(overrides: Optional[Mapping[str, Any]] = None,
                 config_file: Optional[str] = None,
                 defaults_path: Optional[Path] = None) -> RunConfig:
    """Порядок приоритета: config/config.json < файл --config < явные значения."""
    values = load_defaults(defaults_path)
    partitions = values.pop("partitions")
    if config_file:
        values.update(load_config_file(config_file))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    d = values.get("d", RunConfig.d)
    if values.get("p") is None and isinstance(d, int) and d >= 2:
        values["p"] = default_partitions(d, partitions)
    try:
        return RunConfig(**values)
    except TypeError as e:
        raise ConfigError(f"Некорректные параметры запуска: {e}")
