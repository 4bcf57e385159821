import pytest

from app.config import get_settings
from app.graph import Graph, cycle_graph, empty_graph


@pytest.fixture(autouse=True)
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def c5() -> Graph:
    return cycle_graph(5)


@pytest.fixture
def empty6() -> Graph:
    return empty_graph(6)


@pytest.fixture
def write_graph6(tmp_path):
    def write(name: str, text: str) -> str:
        path = tmp_path / name
        path.write_text(text + "\n", encoding="ascii")
        return str(path)

    return write
