"""Shared fixtures for the test suite.

Locating the golden-mean parameter of the K=0.5 standard family to 1e-9
costs about twenty seconds, so one SuiteContext is shared per session.  Its
cached values are exactly the ones the verify suite uses, so the unit tests
and the acceptance runs see the same base point.
"""

import pytest

from rotascope import SuiteContext


@pytest.fixture(scope="session")
def ctx():
    return SuiteContext(seed=0)


@pytest.fixture(scope="session")
def arnold_half(ctx):
    return ctx.arnold_half


@pytest.fixture(scope="session")
def t_golden(ctx):
    return ctx.t_golden


@pytest.fixture(scope="session")
def alpha_radius(ctx):
    return ctx.alpha_radius


@pytest.fixture(scope="session")
def fp_golden(ctx):
    return ctx.fp_golden
