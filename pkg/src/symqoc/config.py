"""Run configuration: plain-text sectioned key = value files.

Every command writes a resolved copy of its configuration next to its
outputs; re-running a resolved config reproduces the outputs byte for byte
within one build.
"""

from __future__ import annotations

import configparser
import io
import os
from dataclasses import dataclass, field

from . import __version__

RESOLVED_CONFIG_NAME = "resolved.cfg"
THREADS_ENV_VAR = "SYMQOC_THREADS"
DEFAULT_TIMED_THREADS = 1


@dataclass(frozen=True)
class RunConfig:
    command: str
    options: dict[str, str] = field(default_factory=dict)
    seed: int = 0
    version: str = __version__


def serialize_run_config(cfg: RunConfig) -> str:
    parser = configparser.ConfigParser()
    parser["run"] = {
        "command": cfg.command,
        "seed": str(cfg.seed),
        "version": cfg.version,
    }
    parser["options"] = dict(sorted(cfg.options.items()))
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def parse_run_config(text: str) -> RunConfig:
    parser = configparser.ConfigParser()
    parser.read_string(text)
    run = parser["run"]
    options = dict(parser["options"]) if parser.has_section("options") else {}
    return RunConfig(
        run["command"],
        options,
        int(run.get("seed", "0")),
        run.get("version", __version__),
    )


def write_resolved_config(cfg: RunConfig, out_dir: str) -> str:
    path = os.path.join(out_dir, RESOLVED_CONFIG_NAME)
    with open(path, "w") as fh:
        fh.write(serialize_run_config(cfg))
    return path


def thread_cap() -> int:
    """Worker-thread cap from the environment (default 1 for timed paths)."""
    raw = os.environ.get(THREADS_ENV_VAR, "")
    try:
        value = int(raw)
    except ValueError:
        return DEFAULT_TIMED_THREADS
    return max(1, value)


def limit_threads():
    """Context manager capping BLAS/OpenMP threads to the configured value."""
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=thread_cap())
