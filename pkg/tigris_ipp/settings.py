import collections.abc
import os
from dataclasses import dataclass, field, fields
from typing import Any, Optional, Sequence, Union, get_args, get_origin  # type: ignore

SCALARS = (int, float, str, bool)


def _parse_bool(value: str) -> bool:
    return value.lower() in ("yes", "y", "true", "1")


def _parse_scalar(value: str, _type: type):
    return _parse_bool(value) if _type is bool else _type(value)


def parse_env_value(name: str, _type: Any, value: str):
    """Convert the string `value` of environment variable `name` to `_type`.

    Supported are int, float, str and bool, Optional[...] of one of those and
    Sequence[...] of one of those written as a comma-separated list.
    """
    if _type in SCALARS:
        return _parse_scalar(value, _type)

    origin, args = get_origin(_type), get_args(_type)
    if origin is Union:
        # Optional[X] is Union[X, None]; anything wider has no single target type.
        options = [arg for arg in args if arg is not type(None)]
        if len(args) == 2 and len(options) == 1 and options[0] in SCALARS:
            return _parse_scalar(value, options[0])
    elif origin is not None and issubclass(origin, collections.abc.Sequence):
        if not args:
            raise TypeError(
                f"{name} is a Sequence without an item type and can't be read from "
                "the environment."
            )
        return [_parse_scalar(item.strip(), args[0]) for item in value.split(",") if item.strip()]

    raise TypeError(f"{name} has type {_type}, which can't be read from the environment.")


@dataclass
class Settings:
    """Runtime settings of the planner tools (logging, parallelism, output).

    Planning parameters themselves live in the scenario file; these only control how
    the tools run. The order of priority in which settings are obtained is as follows:
    1. Environment variables
    2. Constructor arguments, if specified
    3. The default value set here.
    """

    DEBUG: bool = False
    LOG_FILE: Optional[str] = None
    LOG_FORMAT: str = "[%(asctime)s][%(name)s][%(levelname)s] %(message)s"

    # Number of trials that run at the same time during a benchmark.
    NUM_WORKERS: int = 1
    # Run every trial in its own child process so plans don't share the GIL.
    USE_PROCESSES: bool = True
    OUTPUT_DIR: str = "."
    DEFAULT_PLANNERS: Sequence[str] = field(
        default_factory=lambda: ["tigris", "rig"]
    )
    # Significant digits used when writing floats to scenario and result files.
    FLOAT_DIGITS: int = 17

    def __post_init__(self):
        for f in fields(self):
            if f.name in os.environ:
                setattr(self, f.name, parse_env_value(f.name, f.type, os.environ[f.name]))

        if self.NUM_WORKERS < 1:
            raise ValueError(f"NUM_WORKERS must be at least 1, got {self.NUM_WORKERS}.")
        if not 1 <= self.FLOAT_DIGITS <= 17:
            raise ValueError(
                f"FLOAT_DIGITS must be between 1 and 17, got {self.FLOAT_DIGITS}."
            )
