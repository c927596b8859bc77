# utils.py
import hashlib
from pathlib import Path


def ensure_dir(path):
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def format_float(value) -> str:
    # 17 значащих цифр: обратное чтение без потерь
    if value is None:
        return ""
    return f"{float(value):.17g}"


def parse_float(text: str):
    return None if text == "" else float(text)
