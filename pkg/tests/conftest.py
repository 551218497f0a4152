import pytest

from isingpt.kernels import warm_kernels


@pytest.fixture(scope="session", autouse=True)
def _jit_warm():
    """Compile all kernels once so individual tests never pay for JIT."""
    warm_kernels()
