from hypothesis import settings, strategies as st

from lipbaire.prefix_core import Point

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


@st.composite
def points(draw, letters=3, max_stem=6):
    stem = draw(st.lists(st.integers(0, letters - 1), max_size=max_stem))
    return Point(tuple(stem), draw(st.integers(0, letters - 1)))


words = st.lists(st.integers(0, 3), max_size=5).map(tuple)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
