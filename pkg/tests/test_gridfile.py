import pytest

from bootperc.gridfile import GridFormatError, format_grid, parse_grid, read_grid, write_grid
from bootperc.lattice import Configuration, NeighborhoodSpec


def test_parse_tolerates_layout():
    text = "# diagonal\n2 3 3 cube\n\n1 1   2\n3 3\n1 1  # corner\n2 2\n1 1\n"
    config, spec = parse_grid(text)
    assert spec == NeighborhoodSpec((1, 1), 2)
    assert config.dims == (3, 3) and config.geometry == "cube"
    assert config.sites() == [(1, 1), (2, 2), (3, 3)]
    assert format_grid(config, spec) == "2 3 3 cube\n1 1 2\n1 1\n2 2\n3 3\n"


def test_roundtrip(tmp_path):
    config = Configuration.from_sites((4, 5, 2), [(4, 5, 2), (1, 1, 1)], "torus")
    spec = NeighborhoodSpec((1, 2, 3), 4)
    write_grid(tmp_path / "g.grid", config, spec)
    assert read_grid(tmp_path / "g.grid") == (config, spec)


@pytest.mark.parametrize(
    "text",
    [
        "",
        "2 3 3 cube\n",
        "2 3 cube\n1 1 2\n",
        "2 3 3 sphere\n1 1 2\n",
        "2 3 3 cube\n1 2\n",
        "2 3 3 cube\n1 1 2\n1 2 3\n",
        "2 3 3 cube\n1 1 2\n4 1\n",
        "2 3 3 cube\n2 1 2\n",
        "2 3 3 cube\n1 1 x\n",
    ],
)
def test_malformed(text):
    with pytest.raises(GridFormatError):
        parse_grid(text)
