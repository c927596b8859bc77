"""
@file: cli.py
@description: Командная строка: углы, синтез схем, расчёт ряда чистоты, моды, классификация, аудит вентилей
@dependencies: run_config, purity_backends, spectral_analysis, primality, circuit_ir, walsh_core, exporters
@created: 2024-12-19

Коды выхода: 0 - успех, 1 - расхождение классификации с решетом или аудита с G1..G3,
2 - ошибка конфигурации или входных данных, 3 - превышен бюджет ресурсов.
"""

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from circuit_ir import PipelineMode, audit_gates, build_pipeline
from exporters import (
    read_series, read_spectrum, write_angles, write_json, write_report, write_series, write_spectrum,
)
from primality import classify, tolerance_budget
from purity_backends import estimate_point, sweep_purity
from run_config import APP_VERSION, ConfigError, RunConfig, build_config
from spectral_analysis import simpson_fourier
from statevector_sim import ResourceLimitError, point_seed
from utils import ensure_dir, sha256_file
from walsh_core import EvolutionParams, closed_form_spectrum, phase_vector, scale_angles, walsh_transform

EXIT_OK = 0
EXIT_DISAGREEMENT = 1
EXIT_CONFIG = 2
EXIT_RESOURCE = 3

TOOL_NAME = "entanglement-primes"


@dataclass
class RunManifest:
    """Сопровождает каждый запуск: конфигурация, версия, тайминги, зёрна и контрольные суммы"""
    command: str
    config: Dict
    timings: Dict[str, float] = field(default_factory=dict)
    seeds: Optional[List[int]] = None
    outputs: Dict[str, str] = field(default_factory=dict)

    def record_output(self, path: Path):
        self.outputs[Path(path).name] = sha256_file(path)

    def to_dict(self) -> Dict:
        return {
            "tool": TOOL_NAME,
            "version": APP_VERSION,
            "command": self.command,
            "config": self.config,
            "timings": self.timings,
            "seeds": self.seeds,
            "checksums": self.outputs,
        }

    def write(self, config: RunConfig) -> Path:
        path = Path(config.output_dir) / f"manifest_{self.command}_d{config.d}.json"
        return write_json(self.to_dict(), path)


class _StageTimer:
    def __init__(self, manifest: RunManifest, stage: str):
        self.manifest = manifest
        self.stage = stage

    def __enter__(self):
        self.started = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        self.manifest.timings[self.stage] = round(time.perf_counter() - self.started, 6)
        return False


def _output_path(config: RunConfig, stem: str, suffix: Optional[str] = None) -> Path:
    suffix = suffix or config.fmt.value
    return Path(config.output_dir) / f"{stem}_d{config.d}.{suffix}"


def _make_logger(quiet: bool):
    if quiet:
        return lambda message: None
    return lambda message: print(message, file=sys.stderr)


def _evolution_time(config: RunConfig) -> float:
    # без --t берётся четверть периода
    return config.t if config.t is not None else math.pi / (2 * config.omega)


def cmd_angles(config: RunConfig, verify: bool = False, logger=print) -> int:
    """Разреженный спектр углов; с --t ещё и масштабированные углы a_j(t)."""
    manifest = RunManifest("angles", config.to_dict())
    with _StageTimer(manifest, "angles"):
        spectrum = closed_form_spectrum(config.d)
    if verify:
        with _StageTimer(manifest, "verify"):
            brute = walsh_transform(phase_vector(config.d))
        if dict(brute.items()) != dict(spectrum.items()):
            extra = sorted(brute.support() ^ spectrum.support())
            logger(f"❌ Замкнутая форма расходится с полным преобразованием (j: {extra[:10]})")
            return EXIT_DISAGREEMENT
        logger(f"✅ Замкнутая форма совпала с полным преобразованием: {len(spectrum)} углов")
    scaled = None
    if config.t is not None:
        scaled = scale_angles(spectrum, EvolutionParams(config.omega, config.t, config.d))
    path = write_angles(spectrum, _output_path(config, "angles"), scaled,
                        {"d": config.d, "t": config.t if config.t is not None else ""})
    manifest.record_output(path)
    manifest.write(config)
    logger(f"✅ Углы записаны: {path} ({len(spectrum)} ненулевых)")
    return EXIT_OK


def cmd_synth(config: RunConfig, logger=print) -> int:
    """Полная схема SWAP-теста в JSON."""
    manifest = RunManifest("synth", config.to_dict())
    t = _evolution_time(config)
    with _StageTimer(manifest, "synth"):
        circuit = build_pipeline(config.d, EvolutionParams(config.omega, t, config.d),
                                 PipelineMode.SWAP_TEST, config.optimized)
    payload = circuit.to_dict()
    payload.update({"d": config.d, "omega": config.omega, "t": t})
    path = write_json(payload, _output_path(config, "circuit", "json"))
    manifest.record_output(path)
    manifest.write(config)
    logger(f"✅ Схема из {len(circuit)} вентилей на {circuit.width} кубитах: {path}")
    return EXIT_OK


def _simulate(config: RunConfig, manifest: RunManifest, logger) -> Path:
    config.require_large()
    if config.d >= 64:
        logger(f"⚠️ d={config.d}: {config.p + 1} точек, расчёт займёт заметное время")
    with _StageTimer(manifest, "simulate"):
        result = sweep_purity(config, logger)
    if not result.success:
        raise result.exception
    if result.series.shots:
        manifest.seeds = list(result.seeds)
    path = write_series(result.series, _output_path(config, "series"))
    manifest.record_output(path)
    logger(f"✅ Ряд чистоты записан: {path}")
    return path


def cmd_simulate(config: RunConfig, logger=print) -> int:
    """Ряд gamma_A(t_i) на [0, T/2]; с --t - одна точка в stdout."""
    manifest = RunManifest("simulate", config.to_dict())
    if config.t is not None:
        with _StageTimer(manifest, "simulate"):
            estimate = estimate_point(config, config.t)
        if estimate.shots:
            manifest.seeds = [point_seed(config.seed, 0)]
        print(json.dumps({"t": config.t, **estimate.to_dict()}))
        manifest.write(config)
        return EXIT_OK
    _simulate(config, manifest, logger)
    manifest.write(config)
    return EXIT_OK


def _spectrum(config: RunConfig, series_path: Path, manifest: RunManifest, logger) -> Path:
    series = read_series(series_path)
    if series.d != config.d:
        logger(f"⚠️ d берётся из файла ряда: {series.d}")
        config = config.replace(d=series.d, p=series.p)
    with _StageTimer(manifest, "spectrum"):
        spectrum = simpson_fourier(series, config.nmax)
    path = write_spectrum(spectrum, _output_path(config, "spectrum"))
    manifest.record_output(path)
    logger(f"✅ Моды 1..{spectrum.nmax} записаны: {path}")
    return path


def cmd_spectrum(config: RunConfig, input_path: Optional[str] = None, logger=print) -> int:
    manifest = RunManifest("spectrum", config.to_dict())
    _spectrum(config, Path(input_path) if input_path else _output_path(config, "series"), manifest, logger)
    manifest.write(config)
    return EXIT_OK


def _classify(config: RunConfig, spectrum_path: Path, tau: Optional[float],
              manifest: RunManifest, logger) -> int:
    spectrum = read_spectrum(spectrum_path)
    if spectrum.d != config.d:
        config = config.replace(d=spectrum.d, p=None)
    if tau is None:
        # шум оценивается по параметрам ряда, из которого получен спектр
        if spectrum.source == "analytic" or spectrum.shots == 0:
            tau = tolerance_budget(config.d)
        else:
            tau = tolerance_budget(config.d, spectrum.shots, spectrum.p or config.p,
                                   spectrum.omega or config.omega, logger)
    with _StageTimer(manifest, "classify"):
        report = classify(spectrum, tau, include_regime_three=config.regime_three)
    path = write_report(report, _output_path(config, "classification"))
    manifest.record_output(path)
    summary = report.summary()
    logger(f"🔄 tau={report.tau:.3e}: prime {summary['prime']}, composite {summary['composite']}, "
           f"inconclusive {summary['inconclusive']}")
    if report.disagreements:
        for row in report.disagreements:
            logger(f"❌ n={row.n} (режим {row.regime.value}): {row.verdict.value}, решето: {row.oracle.value}")
        return EXIT_DISAGREEMENT
    logger(f"✅ Классификация совпала с решетом: {path}")
    return EXIT_OK


def cmd_classify(config: RunConfig, input_path: Optional[str] = None, tau: Optional[float] = None,
                 logger=print) -> int:
    manifest = RunManifest("classify", config.to_dict())
    code = _classify(config, Path(input_path) if input_path else _output_path(config, "spectrum"),
                     tau, manifest, logger)
    manifest.write(config)
    return code


def _audit(config: RunConfig, manifest: RunManifest, logger) -> bool:
    t = _evolution_time(config)
    with _StageTimer(manifest, "audit"):
        circuit = build_pipeline(config.d, EvolutionParams(config.omega, t, config.d),
                                 PipelineMode.SWAP_TEST, config.optimized)
        report = audit_gates(circuit, config.d)
    path = write_json(report.to_dict(), _output_path(config, "audit", "json"))
    manifest.record_output(path)
    for key in ("G1", "G2", "G3"):
        mark = "✅" if report.matches[key] else "⚠️"
        logger(f"{mark} {key}: {report.observed[key]} (формула {report.predicted[key]})")
    if report.pruned:
        logger(f"⚠️ Отброшено поворотов: {report.pruned}")
    if not report.consistent:
        logger("❌ Число вентилей расходится с формулами G1..G3")
    return report.consistent


def cmd_audit(config: RunConfig, logger=print) -> int:
    manifest = RunManifest("audit", config.to_dict())
    consistent = _audit(config, manifest, logger)
    manifest.write(config)
    return EXIT_OK if consistent else EXIT_DISAGREEMENT


def cmd_run_all(config: RunConfig, tau: Optional[float] = None, logger=print) -> int:
    """simulate -> spectrum -> classify -> audit с одним манифестом."""
    manifest = RunManifest("run-all", config.to_dict())
    series_path = _simulate(config, manifest, logger)
    spectrum_path = _spectrum(config, series_path, manifest, logger)
    code = _classify(config, spectrum_path, tau, manifest, logger)
    if not _audit(config, manifest, logger):
        code = EXIT_DISAGREEMENT
    manifest.write(config)
    return code


def _add_common_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--d", type=int, help="размерность подсистемы (степень двойки)")
    parser.add_argument("--omega", type=float, help="частота omega (по умолчанию 0.1)")
    parser.add_argument("--p", type=int, help="число разбиений Симпсона (чётное)")
    parser.add_argument("--shots", type=int, help="число shots (0 - точные значения)")
    parser.add_argument("--seed", type=int, help="базовое зерно генератора")
    parser.add_argument("--backend", choices=["exact-trace", "swap-exact", "fast-sampled"])
    synthesis = parser.add_mutually_exclusive_group()
    synthesis.add_argument("--faithful", action="store_const", const="faithful", dest="synthesis",
                           help="все повороты, включая нулевые (по умолчанию)")
    synthesis.add_argument("--optimized", action="store_const", const="optimized", dest="synthesis",
                           help="отбрасывать повороты с |theta| < 1e-15")
    parser.add_argument("--regime-three", action="store_const", const=True, dest="regime_three",
                        help="считать моды до (d-1)^2")
    parser.add_argument("--format", choices=["csv", "json"], dest="fmt")
    parser.add_argument("--output-dir", dest="output_dir")
    parser.add_argument("--config", dest="config_file", help="файл настроек YAML/JSON")
    parser.add_argument("--threads", type=int)
    parser.add_argument("--large", action="store_const", const=True,
                        help="разрешить долгие запуски (d >= 64)")
    parser.add_argument("--t", type=float, help="момент времени t")
    parser.add_argument("--quiet", action="store_true", help="без сообщений в stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=TOOL_NAME,
        description="Распознавание простых чисел по спектру чистоты запутанных кубитов",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {APP_VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    angles = subparsers.add_parser("angles", help="ненулевые углы Уолша")
    angles.add_argument("--verify", action="store_true", help="сверить с полным преобразованием")
    subparsers.add_parser("synth", help="схема SWAP-теста в JSON")
    subparsers.add_parser("simulate", help="ряд чистоты на [0, T/2]")
    spectrum = subparsers.add_parser("spectrum", help="моды alpha_n по Симпсону")
    spectrum.add_argument("--input", help="файл ряда чистоты")
    classify_cmd = subparsers.add_parser("classify", help="классификация n и сверка с решетом")
    classify_cmd.add_argument("--input", help="файл спектра мод")
    classify_cmd.add_argument("--tau", type=float, help="допуск (по умолчанию вычисляется)")
    subparsers.add_parser("audit", help="число вентилей против G1, G2, G3")
    run_all = subparsers.add_parser("run-all", help="simulate -> spectrum -> classify -> audit")
    run_all.add_argument("--tau", type=float)

    for sub in subparsers.choices.values():
        _add_common_arguments(sub)
    return parser


_CONFIG_KEYS = ("d", "omega", "p", "shots", "seed", "backend", "synthesis", "regime_three",
                "fmt", "output_dir", "threads", "large", "t")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logger = _make_logger(args.quiet)
    try:
        overrides = {key: getattr(args, key) for key in _CONFIG_KEYS}
        config = build_config(overrides, args.config_file)
        ensure_dir(config.output_dir)
        if args.command == "angles":
            return cmd_angles(config, args.verify, logger)
        if args.command == "synth":
            return cmd_synth(config, logger)
        if args.command == "simulate":
            return cmd_simulate(config, logger)
        if args.command == "spectrum":
            return cmd_spectrum(config, args.input, logger)
        if args.command == "classify":
            return cmd_classify(config, args.input, args.tau, logger)
        if args.command == "audit":
            return cmd_audit(config, logger)
        return cmd_run_all(config, args.tau, logger)
    except ResourceLimitError as e:
        logger(f"❌ {e}")
        return EXIT_RESOURCE
    except (ConfigError, ValueError, FileNotFoundError) as e:
        logger(f"❌ {e}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
