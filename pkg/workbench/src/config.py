from pydantic import Field, field_validator
from pydantic_settings import BaseSettings

LOG_LEVELS = ("CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG")


class AppConfig(BaseSettings):
    """Centralized configuration model for all environment variables."""

    # Sampling configuration
    workbench_seed: int = Field(default=0, env="WORKBENCH_SEED")
    workbench_lasso_samples: int = Field(default=200, env="WORKBENCH_LASSO_SAMPLES")
    workbench_max_prefix: int = Field(default=4, env="WORKBENCH_MAX_PREFIX")
    workbench_max_cycle: int = Field(default=4, env="WORKBENCH_MAX_CYCLE")

    # Exploration limits
    # Stack height / counter bound for VPA and uniform-automata expansions.
    workbench_bound: int = Field(default=4, env="WORKBENCH_BOUND")
    workbench_frontier_limit: int = Field(default=200_000, env="WORKBENCH_FRONTIER_LIMIT")
    workbench_arena_node_limit: int = Field(default=3_000_000, env="WORKBENCH_ARENA_NODE_LIMIT")

    # Logging configuration
    log_level: str = Field(default="INFO", env="LOG_LEVEL")

    # OpenTelemetry configuration
    otel_enabled: bool = Field(default=False, env="OTEL_ENABLED")
    otel_service_name: str = Field(default="hd-workbench", env="OTEL_SERVICE_NAME")
    otel_exporter_otlp_endpoint: str = Field(default="localhost:4317", env="OTEL_EXPORTER_OTLP_ENDPOINT")

    model_config = {
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "case_sensitive": False,
        "extra": "ignore",  # Ignore extra environment variables
    }

    @field_validator("workbench_lasso_samples")
    @classmethod
    def validate_lasso_samples(cls, v: int) -> int:
        if v <= 0:
            raise ValueError("WORKBENCH_LASSO_SAMPLES must be positive")
        return v

    @field_validator("workbench_max_prefix", "workbench_bound")
    @classmethod
    def validate_non_negative(cls, v: int, info) -> int:
        if v < 0:
            raise ValueError(f"{info.field_name.upper()} must be non-negative")
        return v

    @field_validator("workbench_max_cycle", "workbench_frontier_limit", "workbench_arena_node_limit")
    @classmethod
    def validate_positive(cls, v: int, info) -> int:
        if v <= 0:
            raise ValueError(f"{info.field_name.upper()} must be positive")
        return v

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Normalize to upper case; only standard level names are accepted."""
        level = v.upper()
        if level not in LOG_LEVELS:
            raise ValueError(f"LOG_LEVEL must be one of {', '.join(LOG_LEVELS)}")
        return level
