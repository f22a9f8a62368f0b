"""Bundled example inputs."""

from importlib import resources


def fixture_path(name: str):
    """Filesystem path of a bundled fixture file."""
    return resources.files(__name__).joinpath(name)


def read_fixture(name: str) -> str:
    return fixture_path(name).read_text()
