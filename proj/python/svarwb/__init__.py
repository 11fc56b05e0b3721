"""Structural VAR workbench with exogenous breaks."""

import os

from ._core import SvarwbError, ols_fit, version
from ._core import run as _run

__all__ = ["SvarwbError", "ols_fit", "run", "version"]
__version__ = version()


def run(command, config, seed=None, threads=None, out=None):
    """Run a workbench command on a JSON config and return its report as a dict.

    Thread count precedence matches the command line: the argument, then the
    SVARWB_THREADS environment variable, then the config.
    """
    if threads is None and os.environ.get("SVARWB_THREADS"):
        threads = int(os.environ["SVARWB_THREADS"])
    return _run(command, os.fspath(config), seed=seed, threads=threads,
                out=None if out is None else os.fspath(out))
