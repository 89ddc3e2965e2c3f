from __future__ import annotations

import numpy as np
import pytest

from cdc.errors import ConfigError
from cdc.semigroup import decompose
from cdc.zoo import FAMILIES, describe, family, load_generator, make_generator


@pytest.mark.parametrize("kind", [k for k in FAMILIES if k != "explicit"])
@pytest.mark.parametrize("n", [2, 4, 8, 16])
def test_families_are_valid(kind, n):
    gen = family(kind, n)
    sd = decompose(gen)
    assert gen.n == n
    assert np.isclose(gen.mu.sum(), 1.0)
    assert sd.eigenvalues[0] == pytest.approx(0.0, abs=1e-12)
    assert sd.kernel_dim == 1


def test_explicit_flat_and_nested_agree():
    a = make_generator({"type": "explicit", "Q": [[-1, 1], [1, -1]]})
    b = make_generator({"type": "explicit", "Q": [-1, 1, 1, -1]})
    assert np.array_equal(a.Q, b.Q)
    assert a.fingerprint() == b.fingerprint()


def test_fingerprint_distinguishes():
    assert family("cycle", 6).fingerprint() != family("path", 6).fingerprint()


def test_birth_death_detailed_balance():
    gen = make_generator({"type": "birth-death", "n": 4, "births": [1, 2, 3],
                          "deaths": [2, 2, 1]})
    F = gen.mu[:, None] * gen.Q
    assert np.allclose(F, F.T)


@pytest.mark.parametrize("cfg, field", [
    ({"n": 3}, "type"),
    ({"type": "cycle"}, "n"),
    ({"type": "hypercube", "n": 6}, "n"),
    ({"type": "explicit"}, "Q"),
    ({"type": "cycle", "n": 3, "mu": [1, 2]}, "mu"),
])
def test_config_errors_name_field(cfg, field):
    with pytest.raises(ConfigError) as info:
        make_generator(cfg)
    assert info.value.field == field


def test_load_generator(tmp_path):
    p = tmp_path / "g.json"
    p.write_text('{"type": "complete", "n": 5}')
    assert load_generator(p).n == 5


def test_describe_covers_families():
    assert [row["type"] for row in describe()] == list(FAMILIES)
