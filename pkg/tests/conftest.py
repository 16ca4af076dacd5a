import pytest

from qssim.qubit import RandomStream


@pytest.fixture
def rng():
    return RandomStream(20240601)


@pytest.fixture
def config_file(tmp_path):
    """Writes a config file and returns its path"""

    def write(text, name="qssim.cfg"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write
