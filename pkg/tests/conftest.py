import pytest


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    """One shared rule cache so high orders are computed once per run."""
    return str(tmp_path_factory.mktemp("glq-cache"))
