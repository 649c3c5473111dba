import os
import subprocess
import sys

import pytest

from volspec import BACKEND
from volspec._backend import get_kernels


def _backend_under(value):
    env = dict(os.environ, VOLSPEC_BACKEND=value)
    res = subprocess.run([sys.executable, "-c", "import volspec; print(volspec.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    return res.stdout.strip()


def test_forced_python_fallback():
    assert _backend_under("python") == "python"


def test_auto_prefers_extension():
    try:
        get_kernels("cython")
    except ImportError:
        assert BACKEND == "python"
    else:
        assert _backend_under("auto") == "cython"


def test_unknown_backend_name():
    with pytest.raises(ValueError):
        get_kernels("fortran")
