"""
Runtime settings for robust-localization
Values come from the environment (a .env file is honoured) and can be
overridden by CLI flags.
"""
import contextvars
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Iterator, List, Optional, TypeVar

from dotenv import load_dotenv

from .errors import ConfigurationError

logger = logging.getLogger(__name__)


def _int_from_env(name: str, default: int, minimum: int = 1) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigurationError(f"{name} must be an integer, got '{raw}'")
    if value < minimum:
        raise ConfigurationError(f"{name} must be >= {minimum}, got {value}")
    return value


@dataclass(frozen=True)
class Settings:
    output_dir: str = "reports"
    max_pivots: int = 10000
    vertex_limit: int = 12
    search_budget: int = 200000
    workers: int = 1
    log_level: str = "WARNING"

    @classmethod
    def from_env(cls) -> "Settings":
        load_dotenv()
        return cls(
            output_dir=os.environ.get("ROBLOC_OUTPUT_DIR", cls.output_dir),
            max_pivots=_int_from_env("ROBLOC_MAX_PIVOTS", cls.max_pivots),
            vertex_limit=_int_from_env("ROBLOC_VERTEX_LIMIT", cls.vertex_limit),
            search_budget=_int_from_env("ROBLOC_SEARCH_BUDGET", cls.search_budget),
            workers=_int_from_env("ROBLOC_WORKERS", cls.workers),
            log_level=os.environ.get("ROBLOC_LOG_LEVEL", cls.log_level).upper(),
        )

    def with_overrides(self, **overrides: Optional[object]) -> "Settings":
        """Return a copy where every non-None override replaces the field"""
        changes = {k: v for k, v in overrides.items() if v is not None}
        unknown = set(changes) - set(self.__dataclass_fields__)
        if unknown:
            raise ConfigurationError(f"unknown settings: {', '.join(sorted(unknown))}")
        return replace(self, **changes)


_settings_instance: Optional[Settings] = None
_scoped_settings: contextvars.ContextVar = contextvars.ContextVar("robloc_settings", default=None)

T = TypeVar("T")
R = TypeVar("R")


def get_settings() -> Settings:
    """Settings of the current scope, else the process-wide settings"""
    global _settings_instance
    scoped = _scoped_settings.get()
    if scoped is not None:
        return scoped
    if _settings_instance is None:
        _settings_instance = Settings.from_env()
        logger.debug(f"Loaded settings: {_settings_instance}")
    return _settings_instance


def reset_settings() -> None:
    global _settings_instance
    _settings_instance = None


@contextmanager
def settings_scope(settings: Settings) -> Iterator[Settings]:
    """Use `settings` for everything called inside the block (per thread / task)"""
    token = _scoped_settings.set(settings)
    try:
        yield settings
    finally:
        _scoped_settings.reset(token)


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int) -> List[R]:
    """Map in a thread pool when workers > 1; results keep the input order"""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    contexts = [contextvars.copy_context() for _ in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda pair: pair[0].run(fn, pair[1]), zip(contexts, items)))
