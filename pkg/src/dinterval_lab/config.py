# src/dinterval_lab/config.py

from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Manages application-wide settings, loading from a .env file.
    Every value can also be overridden by an environment variable of the same name.
    """
    # --- Solver Budgets ---
    # Cap on explored branch-and-bound nodes for the exact integral solvers.
    SEARCH_NODE_BUDGET: int = 10_000_000
    # Cap on simplex pivots for a single exact LP solve.
    LP_PIVOT_BUDGET: int = 100_000
    # Cap on the number of maximal matchings enumerated for the fractional edge chromatic number.
    MAX_MAXIMAL_MATCHINGS: int = 20_000

    # --- Generator Guards ---
    # Largest family the length-threshold generator is allowed to emit.
    MAX_GENERATED_EDGES: int = 5_000
    # Rejection-sampling attempts per edge before the random generator gives up.
    RANDOM_MAX_RETRIES: int = 1_000

    # --- Witness Store ---
    # Root directory of the witness store (one JSON file per witness plus a manifest).
    WITNESS_STORE_DIR: Path = Path("witnesses")

    # --- Logging ---
    LOG_LEVEL: str = "INFO"

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding='utf-8',
        case_sensitive=False,
        extra='ignore'
    )


# A single, importable instance of the settings.
settings = Settings()


def verify_directories(store_dir: Path | None = None) -> Path:
    """
    Ensures that the witness store directory exists and returns it.
    """
    root = store_dir or settings.WITNESS_STORE_DIR
    root.mkdir(parents=True, exist_ok=True)
    return root
