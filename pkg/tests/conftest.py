import math

import numpy as np
import pytest
from hypothesis import strategies as st

from moebius_willmore.moebius import MoebiusMap, inv_translation, stretch_rotation, translation
from moebius_willmore.qmat2 import QMat2
from moebius_willmore.quat import ImQuaternion, Quaternion

finite = st.floats(-3.0, 3.0, allow_nan=False, allow_infinity=False)
unit_interval = st.floats(-1.0, 1.0, allow_nan=False)

quaternions = st.builds(Quaternion, finite, finite, finite, finite)
im_quaternions = st.builds(ImQuaternion, finite, finite, finite)
nonzero_quaternions = quaternions.filter(lambda q: q.norm() > 1e-2)
nonzero_im = im_quaternions.filter(lambda v: v.norm() > 1e-2)


@st.composite
def unit_vectors(draw):
    v = np.array([draw(unit_interval) for _ in range(3)])
    n = np.linalg.norm(v)
    if n < 1e-2:
        v, n = np.array([0.0, 0.0, 1.0]), 1.0
    return ImQuaternion(*(v / n))


qmats = st.builds(QMat2, quaternions, quaternions, quaternions, quaternions)


@st.composite
def sp11_words(draw, length=3, scale=1.0):
    """Products of translations, stretch rotations and inverted translations."""
    A = MoebiusMap.identity()
    small = st.floats(-scale, scale, allow_nan=False)
    for _ in range(length):
        kind = draw(st.integers(0, 2))
        if kind == 0:
            g = translation(ImQuaternion(draw(small), draw(small), draw(small)))
        elif kind == 1:
            q = draw(nonzero_quaternions)
            g = stretch_rotation(q * (math.exp(0.3 * draw(small)) / q.norm()))
        else:
            g = inv_translation(ImQuaternion(draw(small), draw(small), draw(small)))
        A = A @ g
    return A


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance summary ---------------------------------------------------------

_ACCEPTANCE = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""

    def record(number, title, passed, detail):
        line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}: {title} ({detail})"
        _ACCEPTANCE.append((number, line))
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE):
        terminalreporter.write_line(line)
