# test_run_config.py
import json
import os
import shutil
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

from run_config import (
    OUTPUT_DIR_ENV, Backend, ConfigError, OutputFormat, RunConfig, SynthesisMode,
    build_config, default_partitions, get_backend, load_config_file, load_defaults,
)


class TestEnums(unittest.TestCase):
    """Тесты перечислений"""

    def test_values(self):
        self.assertEqual(Backend.FAST_SAMPLED.value, "fast-sampled")
        self.assertEqual(SynthesisMode.OPTIMIZED.value, "optimized")
        self.assertEqual(OutputFormat.JSON.value, "json")

    def test_get_backend_case_insensitive(self):
        self.assertEqual(get_backend("SWAP-EXACT"), Backend.SWAP_EXACT)

    def test_get_backend_invalid(self):
        with self.assertRaises(ConfigError) as ctx:
            get_backend("qiskit")
        self.assertIn("exact-trace", str(ctx.exception))


class TestRunConfig(unittest.TestCase):
    """Тесты параметров запуска"""

    def test_defaults(self):
        config = RunConfig()
        self.assertEqual(config.d, 16)
        self.assertEqual(config.p, 376)
        self.assertEqual(config.shots, 100_000)
        self.assertEqual(config.omega, 0.1)
        self.assertEqual(config.backend, Backend.FAST_SAMPLED)
        self.assertEqual(config.nmax, 30)
        self.assertFalse(config.optimized)

    def test_partition_table(self):
        self.assertEqual(default_partitions(16), 376)
        self.assertEqual(default_partitions(32), 1500)
        self.assertEqual(default_partitions(64), 6000)
        self.assertEqual(default_partitions(4), 30)
        self.assertEqual(default_partitions(8), 126)

    def test_string_enums(self):
        config = RunConfig(d=4, backend="exact-trace", synthesis="optimized", fmt="json")
        self.assertEqual(config.backend, Backend.EXACT_TRACE)
        self.assertTrue(config.optimized)
        self.assertEqual(config.fmt, OutputFormat.JSON)

    def test_validation(self):
        with self.assertRaises(ConfigError):
            RunConfig(d=6)
        with self.assertRaises(ConfigError):
            RunConfig(d=16, p=375)
        with self.assertRaises(ConfigError):
            RunConfig(shots=-1)
        with self.assertRaises(ConfigError):
            RunConfig(omega=0.0)
        with self.assertRaises(ValueError):
            RunConfig(threads=0)

    def test_regime_three_nmax(self):
        self.assertEqual(RunConfig(d=8, regime_three=True).nmax, 49)

    def test_large_gate(self):
        with self.assertRaises(ConfigError):
            RunConfig(d=64).require_large()
        RunConfig(d=64, large=True).require_large()
        RunConfig(d=16).require_large()

    def test_to_dict(self):
        data = RunConfig(d=4).to_dict()
        self.assertEqual(data["backend"], "fast-sampled")
        self.assertEqual(data["p"], 30)
        json.dumps(data)


class TestConfigFiles(unittest.TestCase):
    """Тесты загрузки файлов настроек"""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def _write(self, name, text):
        path = Path(self.temp_dir) / name
        path.write_text(text, encoding="utf-8")
        return path

    def test_load_defaults(self):
        path = self._write("config.json", json.dumps({
            "Simulation": {"Omega": 0.2, "Shots": 500},
            "Output": {"Directory": "out"},
            "Partitions": {"8": 200},
        }))
        with patch.dict(os.environ, {}, clear=False):
            os.environ.pop(OUTPUT_DIR_ENV, None)
            values = load_defaults(path)
        self.assertEqual(values["omega"], 0.2)
        self.assertEqual(values["shots"], 500)
        self.assertEqual(values["output_dir"], "out")
        self.assertEqual(values["partitions"][8], 200)
        self.assertEqual(values["partitions"][16], 376)

    def test_env_output_dir(self):
        path = self._write("config.json", "{}")
        with patch.dict(os.environ, {OUTPUT_DIR_ENV: "/tmp/entprimes"}):
            self.assertEqual(load_defaults(path)["output_dir"], "/tmp/entprimes")

    def test_broken_defaults(self):
        path = self._write("config.json", "{broken")
        with self.assertRaises(ConfigError):
            load_defaults(path)

    def test_yaml_file(self):
        path = self._write("run.yaml", "d: 8\nshots: 0\nbackend: exact-trace\n")
        self.assertEqual(load_config_file(path), {"d": 8, "shots": 0, "backend": "exact-trace"})

    def test_unknown_key(self):
        path = self._write("run.yaml", "d: 8\nqubits: 6\n")
        with self.assertRaises(ConfigError):
            load_config_file(path)

    def test_missing_file(self):
        with self.assertRaises(FileNotFoundError):
            load_config_file(Path(self.temp_dir) / "missing.yaml")

    def test_build_config_precedence(self):
        defaults = self._write("config.json", json.dumps({
            "Simulation": {"Shots": 500, "Seed": 1},
            "Partitions": {"8": 200},
        }))
        user = self._write("run.yaml", "d: 8\nshots: 0\n")
        with patch.dict(os.environ, {}, clear=False):
            os.environ.pop(OUTPUT_DIR_ENV, None)
            config = build_config({"seed": 9, "omega": None}, str(user), defaults_path=defaults)
        self.assertEqual(config.d, 8)
        self.assertEqual(config.p, 200)
        self.assertEqual(config.shots, 0)
        self.assertEqual(config.seed, 9)
        self.assertEqual(config.omega, 0.1)


if __name__ == "__main__":
    unittest.main()
