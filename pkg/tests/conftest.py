import numpy as np
import pytest

from modsig import hofstadter, precision, seqcore


@pytest.fixture(scope="session")
def narayana400():
    return seqcore.generate_recurrent(seqcore.narayana_spec(), 400, increasing=True)


@pytest.fixture(scope="session")
def alpha3():
    return precision.named_constant("alpha3")


@pytest.fixture(scope="session")
def h3_1e6():
    return hofstadter.eval_direct(3, 10 ** 6)


@pytest.fixture(scope="session")
def ulam_1e4():
    return seqcore.generate_ulam(10 ** 4)
