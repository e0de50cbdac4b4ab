import json

import structlog

from src.logging_config import configure_logging
from src.settings import RuntimeSettings


def test_runtime_settings_from_environment(monkeypatch):
    monkeypatch.setenv("DCPSO_MAX_CONCURRENCY", "3")
    monkeypatch.setenv("DCPSO_LOG_JSON", "true")
    settings = RuntimeSettings(_env_file=None)
    assert settings.max_concurrency == 3
    assert settings.log_json is True
    assert settings.output_dir == "outputs"


def test_json_logs_go_to_stderr(capsys):
    configure_logging("INFO", json_logs=True)
    structlog.get_logger().info("run_completed", seed=3)
    structlog.get_logger().debug("filtered_out")

    captured = capsys.readouterr()
    assert captured.out == ""
    lines = captured.err.strip().splitlines()
    assert len(lines) == 1
    event = json.loads(lines[0])
    assert (event["event"], event["seed"], event["level"]) == ("run_completed", 3, "info")
    assert "timestamp" in event
