from fractions import Fraction

from hypothesis import strategies as st

from cubeslice.linalg import RatMatrix


def M(*rows) -> RatMatrix:
    """Shorthand: ``M("1 2", "1/2 0")`` or ``M([1, 2], [0, 1])``."""
    out = []
    for r in rows:
        if isinstance(r, str):
            r = r.split()
        out.append(tuple(Fraction(x) for x in r))
    return RatMatrix(tuple(out))


small_rationals = st.builds(Fraction, st.integers(-3, 3), st.sampled_from([1, 1, 1, 2, 3]))


@st.composite
def matrices(draw, k_min=1, k_max=6, m_min=1, m_max=4, entries=small_rationals):
    k = draw(st.integers(k_min, k_max))
    m = draw(st.integers(m_min, m_max))
    rows = draw(st.lists(st.lists(entries, min_size=k, max_size=k), min_size=m, max_size=m))
    return RatMatrix(tuple(tuple(r) for r in rows))
