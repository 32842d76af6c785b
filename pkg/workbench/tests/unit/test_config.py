import os
import unittest
from unittest.mock import patch

from config import AppConfig


class TestAppConfig(unittest.TestCase):
    """Test the centralized AppConfig model."""

    def test_defaults(self):
        with patch.dict(os.environ, {}, clear=True):
            config = AppConfig(_env_file=None)
        self.assertEqual(config.workbench_seed, 0)
        self.assertEqual(config.workbench_lasso_samples, 200)
        self.assertEqual(config.workbench_bound, 4)
        self.assertEqual(config.log_level, "INFO")
        self.assertFalse(config.otel_enabled)
        self.assertEqual(config.otel_service_name, "hd-workbench")

    def test_environment_overrides(self):
        env = {"WORKBENCH_SEED": "7", "WORKBENCH_BOUND": "6", "LOG_LEVEL": "debug", "OTEL_ENABLED": "true"}
        with patch.dict(os.environ, env, clear=True):
            config = AppConfig(_env_file=None)
        self.assertEqual(config.workbench_seed, 7)
        self.assertEqual(config.workbench_bound, 6)
        self.assertEqual(config.log_level, "DEBUG")
        self.assertTrue(config.otel_enabled)

    def test_lasso_samples_validation(self):
        """Test that a non-positive sample count raises ValueError."""
        with self.assertRaises(ValueError) as cm:
            AppConfig(_env_file=None, workbench_lasso_samples=0)
        self.assertIn("WORKBENCH_LASSO_SAMPLES must be positive", str(cm.exception))

    def test_bound_validation(self):
        with self.assertRaises(ValueError) as cm:
            AppConfig(_env_file=None, workbench_bound=-1)
        self.assertIn("WORKBENCH_BOUND must be non-negative", str(cm.exception))

    def test_limit_validation(self):
        for field in ("workbench_max_cycle", "workbench_frontier_limit", "workbench_arena_node_limit"):
            with self.subTest(field=field):
                with self.assertRaises(ValueError) as cm:
                    AppConfig(_env_file=None, **{field: 0})
                self.assertIn(f"{field.upper()} must be positive", str(cm.exception))

    def test_log_level_validation(self):
        with self.assertRaises(ValueError) as cm:
            AppConfig(_env_file=None, log_level="verbose")
        self.assertIn("LOG_LEVEL must be one of", str(cm.exception))


if __name__ == "__main__":
    unittest.main()
