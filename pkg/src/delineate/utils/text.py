"""Text normalization shared by journal matching, tokenizing and retrieval."""

import re
import unicodedata
from importlib import resources
from pathlib import Path

_HYPHENS = re.compile(r"[\-‐-―−]+")
_WHITESPACE = re.compile(r"\s+")
_WORD = re.compile(r"[^\W_]+")

STOPWORD_LANGUAGES = ("en", "es", "fr", "pt")


# Latin letters with no decomposition into base letter plus mark.
_LATIN_LETTERS = str.maketrans({
    "æ": "ae", "œ": "oe", "ø": "o", "ł": "l", "đ": "d", "ð": "d", "þ": "th",
    "ı": "i", "ħ": "h", "ŧ": "t", "ŋ": "n", "ĸ": "k", "ƀ": "b", "ƒ": "f", "ɨ": "i", "ʉ": "u",
})


def _fold(text: str) -> str:
    text = unicodedata.normalize("NFKD", text.casefold())
    return "".join(ch for ch in text if not unicodedata.combining(ch)).casefold().translate(_LATIN_LETTERS)


def normalize_text(raw: str | None) -> str:
    """Lowercase, fold diacritics, turn hyphens into spaces and collapse whitespace.

    Idempotent: normalize_text(normalize_text(x)) == normalize_text(x).

    Args:
        raw: Any UTF-8 text (None is treated as empty)

    Returns:
        Normalized text, e.g. "Género y Sociedad" -> "genero y sociedad"
    """
    if not raw:
        return ""
    text = _fold(_fold(raw))
    text = _HYPHENS.sub(" ", text)
    return _WHITESPACE.sub(" ", text).strip()


def words(normalized: str) -> list[str]:
    """Split normalized text into alphanumeric word tokens."""
    return _WORD.findall(normalized)


def load_stopwords(directory: Path | None = None) -> dict[str, frozenset[str]]:
    """Load the per-language stopword lists (one normalized word per line).

    Args:
        directory: Folder holding en.txt, es.txt, fr.txt, pt.txt; the shipped
            lists are used when omitted

    Returns:
        Map language -> stopword set
    """
    lists: dict[str, frozenset[str]] = {}
    for language in STOPWORD_LANGUAGES:
        if directory is None:
            text = resources.files("delineate.data").joinpath(f"stopwords/{language}.txt").read_text(
                encoding="utf-8"
            )
        else:
            path = Path(directory) / f"{language}.txt"
            text = path.read_text(encoding="utf-8") if path.exists() else ""
        entries = (normalize_text(line) for line in text.splitlines() if not line.startswith("#"))
        lists[language] = frozenset(entry for entry in entries if entry)
    return lists
