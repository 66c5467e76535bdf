import os

import pytest

from tigris_ipp import Settings

acceptance = pytest.mark.skipif(
    os.environ.get("TIGRIS_ACCEPTANCE") != "1",
    reason="Set TIGRIS_ACCEPTANCE=1 to run the long acceptance checks.",
)


@pytest.fixture(scope="session")
def settings():
    return Settings()
