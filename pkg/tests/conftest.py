import math

import numpy as np
import pytest
from hypothesis import strategies as st

from ampshare.channel import ChannelGains, LinkBudget, PowerBudget

# log-uniform over [-20, 40] dB, linear scale
db = st.floats(min_value=-20.0, max_value=40.0, allow_nan=False)
linear = db.map(lambda v: 10.0 ** (v / 10.0))


@st.composite
def link_budgets(draw):
    return LinkBudget(draw(linear), draw(linear), draw(linear), draw(linear))


@st.composite
def instances(draw):
    """(gains, budget) with unit noise and unit powers so gains equal SNR/INR."""
    s1, s2, i1, i2 = (draw(linear) for _ in range(4))
    return ChannelGains(g11=s1, g12=i1, g21=i2, g22=s2), PowerBudget(1.0, 1.0, 1.0)


@st.composite
def scaled_instances(draw):
    """Same channel family with arbitrary powers and noise."""
    g = [draw(linear) for _ in range(4)]
    p1 = draw(st.floats(0.1, 100.0))
    p2 = draw(st.floats(0.1, 100.0))
    n0 = draw(st.floats(0.01, 10.0))
    return ChannelGains(*g), PowerBudget(p1, p2, n0)


def random_link_budgets(rng, n):
    """``n`` link budgets as a (4, n) array of snr1, snr2, inr1, inr2."""
    return 10.0 ** (rng.uniform(-20.0, 40.0, size=(4, n)) / 10.0)


def instance_from(snr1, snr2, inr1, inr2):
    return ChannelGains(g11=snr1, g12=inr1, g21=inr2, g22=snr2), PowerBudget(1.0, 1.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


LOG2_3 = math.log2(3.0)


# acceptance criteria record (number -> (passed, detail)); printed at the end
ACCEPTANCE = {}


def record(number, passed, detail):
    ACCEPTANCE[number] = (bool(passed), detail)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
