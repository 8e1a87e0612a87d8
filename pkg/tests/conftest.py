import os
import tempfile

import pytest

# keep the structure-polynomial cache out of the user's home during tests
os.environ.setdefault("WITTDISP_CACHE", os.path.join(tempfile.gettempdir(), "wittdisp-test-cache"))


@pytest.fixture(scope="session")
def cache_env():
    return os.environ["WITTDISP_CACHE"]
