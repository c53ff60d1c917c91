import shutil

import pytest

from itlmc import (
    Corpus,
    Derivation,
    DynamicPoset,
    EdgeSpec,
    RealSystem,
    UnknownEntry,
    paper_suite,
)


@pytest.fixture(scope="module")
def corpus():
    return Corpus()


def test_every_entry_loads(corpus):
    kinds = {
        "poset-model": lambda v: isinstance(v[0], DynamicPoset),
        "real-system": lambda v: isinstance(v, RealSystem),
        "derivation": lambda v: isinstance(v, Derivation),
        "edge": lambda v: all(isinstance(e, EdgeSpec) for e in v),
    }
    entries = corpus.entries()
    assert len(entries) == 21
    for entry in entries:
        value = corpus.load(entry.id)
        assert kinds[entry.kind](value), entry.id
        assert corpus.kind_of(entry.id) == entry.kind
        assert corpus.text_of(entry.id)
        assert entry.anchor


def test_unknown_entry(corpus):
    with pytest.raises(UnknownEntry):
        corpus.get("no-such-entry")
    with pytest.raises(UnknownEntry):
        corpus.load("no-such-entry")


def test_edges_shape(corpus):
    edges = corpus.edges()
    assert len(edges) == 18
    assert sum(1 for e in edges if e.style == "solid") == 8
    assert {e.style for e in edges} == {"solid", "dashed"}
    labels = {e.label for e in edges}
    assert labels == {"fs-next", "cd", "cd-minus", "cem"}


def test_derivation_entries_declare_their_logic(corpus):
    for entry in corpus.entries():
        if entry.kind == "derivation":
            assert entry.logic and entry.logic.endswith(".db")
        else:
            assert entry.logic is None


def test_env_override_and_explicit_root(tmp_path, monkeypatch, corpus):
    copy = tmp_path / "corpus"
    shutil.copytree(corpus.root, copy)
    monkeypatch.setenv("ITL_CORPUS", str(copy))
    assert Corpus().root == copy
    monkeypatch.delenv("ITL_CORPUS")
    explicit = Corpus(copy)
    assert explicit.load("fig4-fs")[0].worlds == ("w", "v", "u")
    with pytest.raises(UnknownEntry, match="index"):
        Corpus(tmp_path / "missing")


def test_paper_suite_filter(corpus):
    results = paper_suite(corpus, filter="fig4-fs")
    assert results and all("fig4" in fact.id for fact, _ in results)
    everything = paper_suite(corpus)
    assert len(everything) == 25
    assert all(result.ok for _, result in everything)
