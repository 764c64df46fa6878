"""Wires the stores and seed resources into one working set.

A workspace owns the corpus store, vocabulary, gazetteer, tag lexicon, name
lists, domain rules, curation queue and event history for one data
directory. With no directory everything lives in memory, which is what the
tests and demo scripts use.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .corpus import DocumentStore
from .curation import CurationQueue
from .events import EventStore
from .geo import Gazetteer
from .pipeline import (
    EventCandidate,
    NameLists,
    TagLexicon,
    build_content_tree,
    extract_event_candidates,
)
from .rules import DomainRule, load_rules
from .vocab import Vocabulary, load_folksonomy, load_stoplist, load_thesaurus

FOLKSONOMY_COUNTRIES = ("MX", "CO", "EC", "UY")


def data_path(name: str) -> Path:
    """Path of a packaged seed data file."""
    return Path(resources.files("hemeroclim").joinpath("data", name))


def load_seed_vocabulary(
    journal: str | Path | None = None,
    thesaurus: str | Path | None = None,
    folksonomies: dict[str, str | Path] | None = None,
    damages: str | Path | None = None,
) -> Vocabulary:
    vocab = Vocabulary(journal=journal)
    load_thesaurus(thesaurus or data_path("thesaurus.tsv"), vocab)
    folk = folksonomies or {
        country: data_path(f"folksonomy_{country.lower()}.tsv")
        for country in FOLKSONOMY_COUNTRIES
    }
    for country, path in folk.items():
        load_folksonomy(path, country, vocab)
    damages_path = Path(damages) if damages else data_path("damages_es.txt")
    vocab.add_damage_terms(
        line.strip()
        for line in damages_path.read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.startswith("#")
    )
    return vocab


@dataclass
class Workspace:
    root: Path | None
    store: DocumentStore
    vocab: Vocabulary
    gazetteer: Gazetteer
    lexicon: TagLexicon
    name_lists: NameLists
    rules: list[DomainRule]
    stoplist: set[str]
    queue: CurationQueue
    events: EventStore

    @classmethod
    def open(
        cls, root: str | Path | None = None, resources: dict | None = None
    ) -> "Workspace":
        """Open a workspace; `resources` optionally overrides seed file
        paths (keys: gazetteer, lexicon, thesaurus, rules, stopwords,
        damages, names_persons, names_orgs, folksonomies: {CC: path})."""
        res = resources or {}
        root = Path(root) if root else None
        store = DocumentStore(root / "corpus" if root else None)
        vocab = load_seed_vocabulary(
            journal=root / "vocab" / "journal.jsonl" if root else None,
            thesaurus=res.get("thesaurus"),
            folksonomies=res.get("folksonomies"),
            damages=res.get("damages"),
        )
        gazetteer = Gazetteer.from_file(res.get("gazetteer") or data_path("gazetteer.csv"))
        lexicon = TagLexicon.from_file(res.get("lexicon") or data_path("lexicon.tsv"))
        name_lists = NameLists.from_files(
            res.get("names_persons") or data_path("names_persons.txt"),
            res.get("names_orgs") or data_path("names_orgs.txt"),
        )
        rules = load_rules(res.get("rules") or data_path("rules.jsonl"))
        stoplist = load_stoplist(res.get("stopwords") or data_path("stopwords_es.txt"))
        queue = CurationQueue(store, gazetteer, root / "curation" if root else None)
        events = EventStore(root / "events" if root else None)
        return cls(
            root=root,
            store=store,
            vocab=vocab,
            gazetteer=gazetteer,
            lexicon=lexicon,
            name_lists=name_lists,
            rules=rules,
            stoplist=stoplist,
            queue=queue,
            events=events,
        )

    # -- pipeline runs ---------------------------------------------------------

    def run_pipeline(self, article_id: str | None = None, enqueue: bool = True) -> dict:
        """Build content trees and extract candidates for one article or the
        whole store; newly produced candidates are queued for curation."""
        articles = [self.store.get(article_id)] if article_id else sorted(
            self.store, key=lambda a: (a.publication_date.sort_key(), a.id)
        )
        queued_articles = {t.candidate.article_id for t in self.queue.all_tasks()}
        candidates: list[EventCandidate] = []
        for article in articles:
            tree = build_content_tree(article, self.lexicon, self.gazetteer, self.name_lists)
            for candidate in extract_event_candidates(
                tree, self.vocab.meteorological_terms(), self.vocab.damage_terms()
            ):
                candidates.append(candidate)
        fresh = [c for c in candidates if c.article_id not in queued_articles]
        tasks = self.queue.enqueue(fresh) if enqueue else []
        return {
            "articles": len(articles),
            "candidates": len(candidates),
            "tasks_created": len(tasks),
        }

    def content_tree(self, article_id: str):
        return build_content_tree(
            self.store.get(article_id), self.lexicon, self.gazetteer, self.name_lists
        )


def load_config(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def sample_corpus_lines() -> list[str]:
    """The packaged demonstration corpus (line-delimited records)."""
    return data_path("sample_corpus.jsonl").read_text(encoding="utf-8").splitlines()
