"""
@file: exporters.py
@description: Запись и чтение рядов чистоты, спектров, отчётов и манифестов в CSV/JSON
@dependencies: spectral_analysis, primality, circuit_ir, walsh_core, utils
@created: 2024-12-19

CSV: строки метаданных "# key=value", затем заголовок и данные.
Вещественные числа пишутся с 17 значащими цифрами. Схемы описаны в docs/FORMATS.md.
"""

import csv
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np

from primality import ClassificationReport, regime_of
from spectral_analysis import FourierSpectrum, PuritySeries
from utils import ensure_dir, format_float, parse_float
from walsh_core import WalshSpectrum

SERIES_COLUMNS = ("t", "gamma")
SPECTRUM_COLUMNS = ("n", "alpha", "bound", "regime")
REPORT_COLUMNS = ("n", "regime", "alpha", "bound", "verdict", "oracle", "agree")
ANGLE_COLUMNS = ("j", "a_j", "a_j_t")


def _write_csv(path, metadata: Mapping[str, Any], columns: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    ensure_dir(path.parent)
    with open(path, "w", encoding="utf-8", newline="") as f:
        for key, value in metadata.items():
            f.write(f"# {key}={value}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)
    return path


def _read_csv(path) -> Tuple[Dict[str, str], List[Dict[str, str]]]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Файл не найден: {path}")
    metadata: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8", newline="") as f:
        lines = f.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            metadata[key.strip()] = value.strip()
        elif line:
            body.append(line)
    return metadata, list(csv.DictReader(body))


def write_json(payload: Any, path) -> Path:
    path = Path(path)
    ensure_dir(path.parent)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, ensure_ascii=False)
        f.write("\n")
    return path


def read_json(path) -> Any:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Файл не найден: {path}")
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def _is_json(path) -> bool:
    return Path(path).suffix.lower() == ".json"


# --- ряд чистоты ---

def series_to_dict(series: PuritySeries) -> Dict:
    return {
        "d": series.d,
        "omega": series.omega,
        "p": series.p,
        "method": series.method,
        "shots": series.shots,
        "points": [{"t": float(t), "gamma": float(g)} for t, g in zip(series.times, series.values)],
    }


def series_from_dict(data: Mapping) -> PuritySeries:
    points = data["points"]
    return PuritySeries(
        d=int(data["d"]), omega=float(data["omega"]), p=int(data["p"]),
        times=[pt["t"] for pt in points], values=[pt["gamma"] for pt in points],
        method=data.get("method", "unknown"), shots=int(data.get("shots", 0)),
    )


def write_series(series: PuritySeries, path) -> Path:
    if _is_json(path):
        return write_json(series_to_dict(series), path)
    metadata = {"d": series.d, "omega": format_float(series.omega), "p": series.p,
                "method": series.method, "shots": series.shots}
    rows = ((format_float(t), format_float(g)) for t, g in zip(series.times, series.values))
    return _write_csv(path, metadata, SERIES_COLUMNS, rows)


def read_series(path) -> PuritySeries:
    if _is_json(path):
        return series_from_dict(read_json(path))
    metadata, rows = _read_csv(path)
    try:
        return PuritySeries(
            d=int(metadata["d"]), omega=float(metadata["omega"]), p=int(metadata["p"]),
            times=[float(r["t"]) for r in rows], values=[float(r["gamma"]) for r in rows],
            method=metadata.get("method", "unknown"), shots=int(metadata.get("shots", 0)),
        )
    except KeyError as e:
        raise ValueError(f"В файле ряда {path} нет поля {e}")


# --- спектр мод ---

def spectrum_from_dict(data: Mapping) -> FourierSpectrum:
    modes = [float(data["alpha0"])] + [float(m["alpha"]) for m in data["modes"]]
    bounds = {int(m["n"]): float(m["bound"]) for m in data["modes"] if m.get("bound") is not None}
    p, omega = data.get("p"), data.get("omega")
    return FourierSpectrum(int(data["d"]), np.array(modes), data["source"], bounds,
                           shots=int(data.get("shots", 0)),
                           p=int(p) if p is not None else None,
                           omega=float(omega) if omega is not None else None)


def write_spectrum(spectrum: FourierSpectrum, path) -> Path:
    if _is_json(path):
        return write_json(spectrum.to_dict(), path)
    metadata = {"d": spectrum.d, "source": spectrum.source, "nmax": spectrum.nmax,
                "alpha0": format_float(spectrum.alpha0), "shots": spectrum.shots,
                "p": spectrum.p if spectrum.p is not None else "",
                "omega": format_float(spectrum.omega)}
    rows = []
    for n in range(1, spectrum.nmax + 1):
        regime = regime_of(n, spectrum.d).value if n >= 2 else ""
        rows.append((n, format_float(spectrum.modes[n]), format_float(spectrum.bound(n)), regime))
    return _write_csv(path, metadata, SPECTRUM_COLUMNS, rows)


def read_spectrum(path) -> FourierSpectrum:
    if _is_json(path):
        return spectrum_from_dict(read_json(path))
    metadata, rows = _read_csv(path)
    try:
        modes = [float(metadata["alpha0"])] + [float(r["alpha"]) for r in rows]
        bounds = {int(r["n"]): parse_float(r["bound"]) for r in rows if r["bound"] != ""}
        # файлы без shots/p/omega читаются как спектр без шума
        p = metadata.get("p", "")
        return FourierSpectrum(int(metadata["d"]), np.array(modes), metadata["source"], bounds,
                               shots=int(metadata.get("shots", 0)),
                               p=int(p) if p != "" else None,
                               omega=parse_float(metadata.get("omega", "")))
    except KeyError as e:
        raise ValueError(f"В файле спектра {path} нет поля {e}")


# --- отчёт классификации ---

def write_report(report: ClassificationReport, path) -> Path:
    if _is_json(path):
        return write_json(report.to_dict(), path)
    metadata = {"d": report.d, "tau": format_float(report.tau), "clamped": str(report.clamped).lower()}
    metadata.update({key: value for key, value in report.summary().items()})
    rows = ((r.n, r.regime.value, format_float(r.alpha), format_float(r.bound),
             r.verdict.value, r.oracle.value, str(r.agree).lower()) for r in report.rows)
    return _write_csv(path, metadata, REPORT_COLUMNS, rows)


# --- углы Уолша ---

def angles_to_dict(spectrum: WalshSpectrum, scaled: Mapping[int, float] = None) -> Dict:
    entries = []
    for j, a in spectrum.items():
        entry = {"j": j, "a_j": a}
        if scaled is not None:
            entry["a_j_t"] = scaled[j]
        entries.append(entry)
    return {"q": spectrum.q, "count": len(spectrum), "entries": entries}


def write_angles(spectrum: WalshSpectrum, path, scaled: Mapping[int, float] = None,
                 metadata: Mapping[str, Any] = None) -> Path:
    if _is_json(path):
        payload = angles_to_dict(spectrum, scaled)
        payload.update(metadata or {})
        return write_json(payload, path)
    header = {"q": spectrum.q, "count": len(spectrum)}
    header.update(metadata or {})
    rows = ((j, a, format_float(scaled[j]) if scaled is not None else "") for j, a in spectrum.items())
    return _write_csv(path, header, ANGLE_COLUMNS, rows)


def read_angles(path) -> WalshSpectrum:
    if _is_json(path):
        data = read_json(path)
        return WalshSpectrum(int(data["q"]), {int(e["j"]): int(e["a_j"]) for e in data["entries"]})
    metadata, rows = _read_csv(path)
    return WalshSpectrum(int(metadata["q"]), {int(r["j"]): int(r["a_j"]) for r in rows})
