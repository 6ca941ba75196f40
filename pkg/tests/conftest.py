import pytest


@pytest.fixture(params=["numpy", "numba"])
def backend(request, monkeypatch):
    """Run a test once per kernel backend."""
    if request.param == "numba":
        pytest.importorskip("numba")
    monkeypatch.setenv("LBKD_BACKEND", request.param)
    return request.param
