"""
Halin Weight Certifier - Configuration Management

CONTEXT:
This module manages all configuration settings for the certifier, including:
- Default modulus and edge multiplicity cap used by the certificate pipeline
- Scale guards for the exhaustive oracles (search, polynomial, brute force)
- Permanent kernel chunking and fuzz worker count
- Logging configuration (plain text or JSON lines)

The configuration is loaded from environment variables with sensible defaults
for desk-scale experiments. Batch runs can override via .env file.

DEPENDENCIES:
- pydantic: Type-safe configuration with validation
- pydantic-settings: Environment variable loading
- python-dotenv: .env file support
- python-json-logger: JSON log formatting

USAGE:
    from src.config import settings

    # Access configuration
    print(settings.modulus)
    print(settings.search_edge_limit)
"""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict
from pythonjsonlogger import jsonlogger
import logging


LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class Settings(BaseSettings):
    """
    Application configuration settings.

    All settings can be overridden via environment variables with HALIN_ prefix.
    Example: HALIN_SEARCH_BUDGET=500000
    """

    # Logging
    log_level: str = Field(
        default="INFO",
        description="Logging level (DEBUG, INFO, WARNING, ERROR)"
    )
    log_json: bool = Field(
        default=False,
        description="Emit log records as JSON lines"
    )

    # Certificate pipeline
    modulus: int = Field(
        default=3,
        description="Odd prime used by the vertex-column reduction"
    )
    edge_cap: int = Field(
        default=2,
        ge=1,
        description="Maximum multiplicity of an edge column in a certificate"
    )

    # Scale guards
    search_edge_limit: int = Field(
        default=20,
        description="Largest edge count accepted by the exhaustive certificate search"
    )
    search_budget: int = Field(
        default=200_000,
        description="Maximum number of index functions tried by one search"
    )
    oracle_edge_limit: int = Field(
        default=12,
        description="Largest edge count accepted by the polynomial expansion oracle"
    )
    brute_force_element_limit: int = Field(
        default=10,
        description="Largest |V| + |E| accepted by the choosability brute force"
    )

    # Performance
    permanent_chunk_size: int = Field(
        default=65_536,
        description="Number of Ryser terms evaluated per vectorised chunk"
    )
    fuzz_workers: int = Field(
        default=4,
        ge=1,
        description="Worker processes used by the fuzz driver"
    )
    default_seed: int = Field(
        default=0,
        description="Seed used when the caller does not provide one"
    )

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="HALIN_",
        case_sensitive=False
    )

    def configure_logging(self) -> None:
        """Configure application logging based on settings."""
        handler = logging.StreamHandler()
        if self.log_json:
            handler.setFormatter(jsonlogger.JsonFormatter(LOG_FORMAT))
        else:
            handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logging.basicConfig(
            level=getattr(logging, self.log_level.upper()),
            handlers=[handler]
        )


# Global settings instance
settings = Settings()

# Configure logging on module import
settings.configure_logging()

logger = logging.getLogger(__name__)
logger.debug(f"Configuration loaded: modulus={settings.modulus}, edge_cap={settings.edge_cap}")
