import pytest

from redcap_coverage.analysis import Evaluator
from redcap_coverage.bundle import bundled_dataset_path, load_bundle


@pytest.fixture(scope="session")
def bundle_path():
    return bundled_dataset_path()


@pytest.fixture(scope="session")
def bundle(bundle_path):
    return load_bundle(bundle_path)


@pytest.fixture(scope="session")
def evaluator(bundle):
    return Evaluator(bundle)
