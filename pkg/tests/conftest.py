import pytest

from advlab.fixture import generate_toy_fixture
from advlab.modelio import save_dataset, save_model


@pytest.fixture(scope="session")
def toy_bundle():
    """The seed-42 fixture: trained reference CNN + held-out dataset."""
    return generate_toy_fixture(42)


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory, toy_bundle):
    d = tmp_path_factory.mktemp("fixture")
    save_model(toy_bundle.network, d / "model.json")
    save_dataset(toy_bundle.test, toy_bundle.class_names, d / "dataset.json")
    return d
