from tcckit.coloring import solve
from tcckit.dot import to_dot


def test_triangle_dot(triangle):
    text = to_dot(triangle)
    assert text.count(" -- ") == 3
    assert sum(1 for line in text.splitlines() if "label=" in line) == 3
    assert "tcc_color" not in text


def test_colored_dot_has_attributes(triangle):
    col = solve(triangle, 3)
    text = to_dot(triangle, col)
    assert text.count("tcc_color=") == 6
    assert 'label="0\\nd=2"' in text


def test_dot_is_deterministic(icosahedron):
    col = solve(icosahedron, 7)
    assert to_dot(icosahedron, col) == to_dot(icosahedron, col.copy())
