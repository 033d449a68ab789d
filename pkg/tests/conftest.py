"""Test fixtures and configuration."""

import json
import os
import tempfile

import numpy as np
import pytest

# Set test environment before importing modules
os.environ["DELINEATE_LOG_LEVEL"] = "WARNING"
os.environ["DELINEATE_INGEST_WORKERS"] = "2"

from delineate.models.records import BibRecord, Language  # noqa: E402
from delineate.services.core_selector import load_seed_terms  # noqa: E402
from delineate.services.ingest import RecordStore  # noqa: E402
from delineate.services.keyword_compiler import compile_keywords, load_keyword_file  # noqa: E402

# Words for synthetic titles: keyword hits, near misses and filler.
TITLE_WORDS = [
    "Gender", "gender-based", "GENRE", "Género", "genero", "engendered", "sex", "Sexe", "sexual",
    "sexuality", "Essex", "Sussex", "sexism", "women", "Women's", "woman", "womanhood", "mujeres",
    "Mulher", "femmes", "femme", "feminism", "Féministe", "feminista", "feminine", "feminicide",
    "LGBT", "LGBTQ+", "lgbtqia", "lgbtphobia", "LGBTI", "queer", "Queers", "queerness", "gay",
    "gays", "gaya", "lesbian", "lesbianas", "lesbianism", "girl", "girls", "girlhood", "niñas",
    "menina", "filles", "homosexual", "homossexual", "bisexual", "masculinities", "masculinité",
    "violence", "based", "obstetric", "domestic", "violência", "doméstica", "contra", "mulher",
    "men", "menopause", "non-binary", "nonbinary", "non", "binary", "two", "spirit", "2",
    "cisgender", "cissexual", "transphobia", "transfobia", "travesti", "travestis", "widow",
    "viuda", "viúvo", "abortion", "aborto", "avortement", "pregnancy", "embarazo", "maternal",
    "paternity", "trafficking", "trata", "de", "personas", "identity", "identities", "glass",
    "ceiling", "maize", "photosynthesis", "in", "of", "the", "and", "a", "la", "les", "des",
    "economic", "growth", "soil", "protein", "Brazil", "politics", "health", "work", "rights",
]

LANGUAGES = ["en", "es", "fr", "pt"]


def make_record(doi: str = "10.1/x", **fields) -> BibRecord:
    """BibRecord with test defaults for every field not given."""
    values = {
        "doi": doi,
        "title": "",
        "journal_id": "jour.1",
        "journal_name": "Journal One",
        "year": 2000,
        "language": Language.EN,
    }
    values.update(fields)
    return BibRecord(**values)


def record_line(doi: str = "10.1/x", **fields) -> str:
    """One serialized input record."""
    values = {"doi": doi, "title": "A title", "year": 2000, "language": "en", "journal_id": "jour.1"}
    values.update(fields)
    return json.dumps(values)


def synthetic_titles(n: int, seed: int) -> list[tuple[str, str, str]]:
    """(doi, title, language) triples with 1-8 words drawn from TITLE_WORDS."""
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(n):
        size = int(rng.integers(1, 9))
        words = [TITLE_WORDS[int(j)] for j in rng.integers(0, len(TITLE_WORDS), size=size)]
        language = LANGUAGES[int(rng.integers(0, len(LANGUAGES)))]
        rows.append((f"10.9/{seed}.{i:06d}", " ".join(words), language))
    return rows


def synthetic_store(n: int, seed: int) -> RecordStore:
    return RecordStore(
        make_record(doi, title=title, language=Language(language))
        for doi, title, language in synthetic_titles(n, seed)
    )


@pytest.fixture
def seeds():
    """The shipped seed term set."""
    return load_seed_terms()


@pytest.fixture(scope="session")
def shipped_specs():
    """Specs of the shipped reference keyword file."""
    return load_keyword_file().specs


@pytest.fixture(scope="session")
def shipped_matcher(shipped_specs):
    """Compiled matcher over the shipped keyword file."""
    matcher, _ = compile_keywords(shipped_specs)
    return matcher


@pytest.fixture
def temp_manifest_db():
    """Create a temporary manifest database path for testing."""
    with tempfile.TemporaryDirectory() as directory:
        yield os.path.join(directory, "manifest.db")


def write_pipeline_inputs(directory, output_dir: str = "out"):
    """Records, curation file and config for a small end-to-end run. Returns the config path."""
    rng = np.random.default_rng(0)
    lines = []
    vocabularies = (["queer", "lesbian", "gay", "lgbt", "pride"], ["pregnancy", "maternal", "birth", "midwife", "obstetric"])
    for i in range(40):
        vocab = vocabularies[i % 2]
        words = [vocab[int(j)] for j in rng.choice(5, size=3, replace=False)]
        lines.append(record_line(
            f"10.7/core.{i:03d}", title=" ".join(words).capitalize(), year=2000 + i % 10,
            journal_id="jour.core", journal_name="Journal of Gender Studies",
            disciplines=["4405 Gender Studies"], citations=i % 7,
        ))
    for i in range(10):
        lines.append(record_line(
            f"10.7/plant.{i:03d}", title=f"Sex differences in maize growth {i}", year=2005,
            journal_id="jour.plant", journal_name="Plant Science", disciplines=["06 Biological Sciences"],
        ))
        lines.append(record_line(
            f"10.7/photo.{i:03d}", title="Photosynthesis in maize", year=2006,
            journal_id="jour.plant", journal_name="Plant Science", disciplines=["06 Biological Sciences"],
        ))
    lines.append(record_line("10.7/de.001", title="Geschlecht und Arbeit", language="de"))
    (directory / "records.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")

    (directory / "curation.csv").write_text(
        "candidate,action,replacements,note\nheterosexual,add,,\n", encoding="utf-8"
    )
    config_path = directory / f"{output_dir}.json"
    config_path.write_text(json.dumps({
        "inputs": ["records.jsonl"],
        "output_dir": output_dir,
        "topics": {"seed": 1, "k": 2, "min_cluster_size": 5, "top_n": 5},
        "curation_file": "curation.csv",
    }), encoding="utf-8")
    return config_path


@pytest.fixture
def pipeline_config(tmp_path):
    """Config path of a small end-to-end pipeline tree."""
    return write_pipeline_inputs(tmp_path)
