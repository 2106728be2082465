import numpy as np
import pytest

from roimark import fixtures
from roimark.strength import ClassMask


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    """The synthetic corpus written to disk once per session."""
    root = tmp_path_factory.mktemp("corpus")
    fixtures.write_corpus(str(root))
    return root


@pytest.fixture(scope="session")
def corpus():
    """(name, host, classes) triples held in memory."""
    out = []
    for name in fixtures.FIXTURE_NAMES:
        host = fixtures.make_image(name)
        classes = tuple(
            ClassMask(cls, mask, 1.0) for cls, mask in fixtures.make_masks(name).items()
        )
        out.append((name, host, classes))
    return tuple(out)


@pytest.fixture(scope="session")
def logo():
    return fixtures.default_logo()


def class_flags(corpus_dir) -> list:
    """CLI --class arguments pointing at the on-disk corpus masks."""
    flags = []
    for cls in fixtures.CLASS_NAMES:
        flags += ["--class", f"name={cls},mask={corpus_dir}/{{stem}}_{cls}.pgm,coeff=1.0"]
    return flags
