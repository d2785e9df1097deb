import os
import shutil
from pathlib import Path

import pytest


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("EIGSGD_CLI") or shutil.which("eigsgd")
    if not path or not Path(path).exists():
        pytest.skip("eigsgd command-line binary not available; set EIGSGD_CLI")
    return path
