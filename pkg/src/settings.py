"""
Runtime Settings
Process-level knobs read from the environment or a .env file (DCPSO_ prefix)
"""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class RuntimeSettings(BaseSettings):
    """Settings that affect how experiments execute, never what they compute"""

    model_config = SettingsConfigDict(env_prefix="DCPSO_", env_file=".env", extra="ignore")

    log_level: str = "INFO"
    log_json: bool = False
    max_concurrency: int = Field(1, ge=1)
    output_dir: str = "outputs"
