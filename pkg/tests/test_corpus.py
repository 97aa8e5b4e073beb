import pytest

from blockgraph.corpus import CorpusSpec, generate


def test_shape_and_determinism():
    spec = CorpusSpec(base_size=1000, copies=5, mutation_rate=0.01, seed=4)
    a, b = generate(spec), generate(spec)
    assert a == b and len(a) == 5000 and set(a) <= set(b"ACGT")


def test_exact_substitutions():
    text = generate(CorpusSpec(base_size=2000, copies=3, substitutions=2, seed=1))
    base = text[:2000]
    for c in range(1, 3):
        copy = text[2000 * c : 2000 * (c + 1)]
        assert sum(x != y for x, y in zip(base, copy)) == 2


def test_zero_rate_copies_are_identical():
    text = generate(CorpusSpec(base_size=300, copies=4, seed=2))
    assert text == text[:300] * 4


def test_indels_change_length():
    text = generate(CorpusSpec(base_size=5000, copies=3, indel_rate=0.01, seed=3))
    assert len(text) != 15000


def test_custom_alphabet():
    assert set(generate(CorpusSpec(base_size=500, copies=2, mutation_rate=0.1, alphabet=b"xy"))) <= {120, 121}


@pytest.mark.parametrize("kw", [{"base_size": 0, "copies": 1}, {"base_size": 1, "copies": 0},
                                {"base_size": 1, "copies": 1, "mutation_rate": 1.5}])
def test_rejects_bad_specs(kw):
    with pytest.raises(ValueError):
        generate(CorpusSpec(**kw))
