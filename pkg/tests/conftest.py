from fractions import Fraction

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


def exact_q(ps, n):
    """Exact probability of hitting state 0 first, from state ``n``.

    Plain Gaussian elimination over Fractions on the first-step equations,
    shares no code with the library.
    """
    ps = [Fraction(p) for p in ps]
    N = len(ps) + 1
    # unknowns h_1..h_{N-1}; h_0 = 1, h_N = 0
    size = N - 1
    if size == 0:
        return Fraction(1) if n == 0 else Fraction(0)
    A = [[Fraction(0)] * size for _ in range(size)]
    rhs = [Fraction(0)] * size
    for row in range(size):
        i = row + 1
        A[row][row] = Fraction(1)
        if i - 1 == 0:
            rhs[row] += ps[i - 1]
        else:
            A[row][row - 1] -= ps[i - 1]
        if i + 1 < N:
            A[row][row + 1] -= 1 - ps[i - 1]
    for col in range(size):
        piv = next(r for r in range(col, size) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        rhs[col], rhs[piv] = rhs[piv], rhs[col]
        for r in range(size):
            if r != col and A[r][col] != 0:
                f = A[r][col] / A[col][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
                rhs[r] -= f * rhs[col]
    return rhs[n - 1] / A[n - 1][n - 1]


@pytest.fixture
def exact():
    return exact_q


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
