import time
from dataclasses import dataclass

import pytest

from rabi import ModelParams, SpectrumTable, compute_spectrum_table

# Large enough that interval windows centered anywhere in [1024, 2048] are
# fully covered (pattern checks reach labels n + 4).
BIG_MAX_LABEL = 2056


@dataclass(frozen=True)
class TimedTable:
    table: SpectrumTable
    elapsed: float


@pytest.fixture(scope="session")
def params() -> ModelParams:
    return ModelParams(g=0.7, delta=0.4)


@pytest.fixture(scope="session")
def params_delta0() -> ModelParams:
    return ModelParams(g=0.7, delta=0.0)


@pytest.fixture(scope="session")
def table_small(params) -> SpectrumTable:
    return compute_spectrum_table(params, max_label=72)


@pytest.fixture(scope="session")
def table_delta0_small(params_delta0) -> SpectrumTable:
    return compute_spectrum_table(params_delta0, max_label=50)


@pytest.fixture(scope="session")
def timed_table_delta0(params_delta0) -> TimedTable:
    start = time.perf_counter()
    table = compute_spectrum_table(params_delta0, max_label=200)
    return TimedTable(table=table, elapsed=time.perf_counter() - start)


@pytest.fixture(scope="session")
def timed_table_big(params) -> TimedTable:
    start = time.perf_counter()
    table = compute_spectrum_table(params, max_label=BIG_MAX_LABEL)
    return TimedTable(table=table, elapsed=time.perf_counter() - start)


@pytest.fixture(scope="session")
def table_big(timed_table_big) -> SpectrumTable:
    return timed_table_big.table
