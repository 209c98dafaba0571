import pytest

from miworlds.metrics import measure_configuration
from miworlds.solver import MAXWELL, solve_configuration


@pytest.fixture(scope="session")
def maxwell_configs():
    """Solved Maxwell configurations shared across the suite."""
    sizes = (2, 8, 16, 22, 32, 64, 128, 256, 512, 1024, 2048, 4096)
    return {n: solve_configuration(MAXWELL, n) for n in sizes}


@pytest.fixture(scope="session")
def sweep_rows(maxwell_configs):
    """Distance/coupling measurements over the doubling ladder 8..4096."""
    sizes = (8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096)
    return [measure_configuration(maxwell_configs[n]) for n in sizes]
