"""Seeded generator of French-like country subcorpora in the ``<doc>`` dump format.

Every country shares one content vocabulary but draws from it with its own
perturbed weights, and sprinkles a handful of planted place and person names.
Stop words are spread over every document with noisy, country-independent
rates, and "de" is usually followed by "la".
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from tqdm import tqdm

logger = logging.getLogger(__name__)

COUNTRIES = ("cd", "ci", "dz", "fr", "ma", "sn")
REFERENCE_TLD = "ref"

MARKERS = {
    "cd": ("kinshasa", "lubumbashi", "congolais", "tshisekedi", "kivu"),
    "ci": ("abidjan", "yamoussoukro", "ivoirien", "ouattara", "bouaké"),
    "dz": ("alger", "oran", "algérien", "constantine", "tebboune"),
    "fr": ("paris", "lyon", "marseille", "bretagne", "macron"),
    "ma": ("casablanca", "rabat", "marocain", "marrakech", "tanger"),
    "sn": ("dakar", "sénégal", "ziguinchor", "touba", "sénégalais"),
}

STOP_WORDS = ("de", "la", "le", "et", "les", "des", "en", "un", "une", "du",
              "pour", "que", "dans", "est", "qui", "sur", "au", "par", "pas", "il")

CONTENT_WORDS = (
    "ville", "marché", "gouvernement", "président", "ministre", "projet", "école", "santé", "route",
    "économie", "entreprise", "travail", "famille", "enfant", "femme", "homme", "jeune", "pays",
    "région", "quartier", "eau", "électricité", "prix", "argent", "banque", "commerce", "port",
    "football", "équipe", "match", "musique", "festival", "culture", "langue", "religion", "mosquée",
    "église", "université", "étudiant", "professeur", "hôpital", "médecin", "maladie", "vaccin",
    "élection", "parti", "député", "loi", "justice", "police", "sécurité", "armée", "frontière",
    "agriculture", "récolte", "pluie", "saison", "soleil", "désert", "fleuve", "mer", "plage",
    "tourisme", "hôtel", "restaurant", "cuisine", "riz", "poisson", "viande", "pain", "thé", "café",
    "transport", "taxi", "bus", "train", "avion", "aéroport", "voyage", "visa", "diaspora",
    "jeunesse", "emploi", "chômage", "salaire", "grève", "syndicat", "patron", "usine", "mine",
    "pétrole", "gaz", "énergie", "climat", "environnement", "forêt", "animal", "village", "paysan",
    "terre", "maison", "loyer", "construction", "ciment", "pont", "stade", "capitale", "province",
    "commune", "maire", "conseil", "réunion", "accord", "partenariat", "coopération", "aide",
    "développement", "croissance", "dette", "budget", "impôt", "douane", "exportation", "importation",
    "téléphone", "internet", "réseau", "journal", "radio", "télévision", "presse", "article", "photo",
    "histoire", "mémoire", "indépendance", "colonie", "révolution", "paix", "conflit", "crise",
    "nouveau", "grand", "petit", "national", "public", "social", "politique", "important", "difficile",
    "annonce", "déclare", "explique", "organise", "construit", "vend", "achète", "travaille", "arrive",
)

STOP_WEIGHTS = 1.0 / np.arange(1, len(STOP_WORDS) + 1)
STOP_WEIGHTS /= STOP_WEIGHTS.sum()


@dataclass(frozen=True)
class GeneratorSettings:
    words_per_doc: tuple[int, int] = (200, 400)
    sentence_words: tuple[int, int] = (8, 19)
    stop_rate: tuple[float, float] = (0.25, 0.55)
    marker_rate: float = 0.01
    de_la_rate: float = 0.5
    concentration: float = 1500.0


@dataclass(frozen=True)
class CountryProfile:
    tld: str
    markers: tuple[str, ...]
    content_weights: np.ndarray


def _base_weights() -> np.ndarray:
    weights = 1.0 / (np.arange(len(CONTENT_WORDS)) + 5.0)
    return weights / weights.sum()


def country_profiles(countries: Sequence[str], rng: np.random.Generator,
                     settings: GeneratorSettings) -> list[CountryProfile]:
    base = _base_weights()
    profiles = []
    for tld in countries:
        markers = MARKERS.get(tld) or tuple(f"{tld}ville{i}" for i in range(5))
        weights = rng.dirichlet(base * settings.concentration)
        profiles.append(CountryProfile(tld, markers, weights))
    return profiles


def _units(rng: np.random.Generator, profile: CountryProfile | None, settings: GeneratorSettings) -> list[str]:
    """Word units of one document; a unit may be the pair "de la"."""
    n = int(rng.integers(*settings.words_per_doc))
    stop_rate = rng.uniform(*settings.stop_rate)
    marker_rate = settings.marker_rate if profile is not None else 0.0
    draw = rng.random(n)
    is_marker = draw < marker_rate
    is_stop = ~is_marker & (draw < marker_rate + stop_rate)
    is_content = ~(is_marker | is_stop)

    weights = profile.content_weights if profile is not None else _base_weights()
    units = np.empty(n, dtype=object)
    units[is_content] = rng.choice(CONTENT_WORDS, size=int(is_content.sum()), p=weights)
    units[is_stop] = rng.choice(STOP_WORDS, size=int(is_stop.sum()), p=STOP_WEIGHTS)
    if is_marker.any():
        units[is_marker] = rng.choice(profile.markers, size=int(is_marker.sum()))
    pair = (units == "de") & (rng.random(n) < settings.de_la_rate)
    units[pair] = "de la"
    units = list(units)

    # every stop word occurs in every document
    present = set(" ".join(units).split())
    for word in STOP_WORDS:
        if word not in present:
            units.insert(int(rng.integers(0, len(units) + 1)), word)
    return units


def _render(units: list[str], rng: np.random.Generator, settings: GeneratorSettings) -> list[str]:
    """Group units into capitalised sentences and paragraphs of 2-4 sentences."""
    sentences = []
    pos = 0
    while pos < len(units):
        size = int(rng.integers(*settings.sentence_words))
        words = " ".join(units[pos:pos + size])
        sentences.append(words[:1].upper() + words[1:] + ".")
        pos += size
    paragraphs = []
    pos = 0
    while pos < len(sentences):
        size = int(rng.integers(2, 5))
        paragraphs.append(" ".join(sentences[pos:pos + size]))
        pos += size
    return paragraphs


def _dump(tld: str, documents: list[list[str]]) -> str:
    parts = []
    for i, paragraphs in enumerate(documents):
        body = "\n".join(f"<p>{p}</p>" for p in paragraphs)
        parts.append(f'<doc id="{tld}-{i}" url="http://www.example.{tld}/{i}">\n{body}\n</doc>\n')
    return "".join(parts)


def generate_corpus(countries: Sequence[str] = COUNTRIES, docs_per_country: int = 200, seed: int = 7,
                    settings: GeneratorSettings | None = None, progress: bool = False) -> dict[str, str]:
    """``{tld: dump text}`` for every country; identical for identical arguments."""
    settings = settings or GeneratorSettings()
    rng = np.random.default_rng(seed)
    profiles = country_profiles(countries, rng, settings)
    dumps = {}
    for profile in tqdm(profiles, desc="countries", disable=not progress):
        documents = [_render(_units(rng, profile, settings), rng, settings) for _ in range(docs_per_country)]
        dumps[profile.tld] = _dump(profile.tld, documents)
    return dumps


def generate_reference(docs: int = 300, seed: int = 11, settings: GeneratorSettings | None = None) -> str:
    """An unmarked corpus drawn from the shared base weights."""
    settings = settings or GeneratorSettings()
    rng = np.random.default_rng(seed)
    documents = [_render(_units(rng, None, settings), rng, settings) for _ in range(docs)]
    return _dump(REFERENCE_TLD, documents)


def write_corpus(out_dir: Path | str, countries: Sequence[str] = COUNTRIES, docs_per_country: int = 200,
                 seed: int = 7, reference_docs: int = 300, progress: bool = False) -> dict[str, Path]:
    """Write ``<tld>.txt`` dumps (plus ``ref.txt`` when ``reference_docs`` > 0)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dumps = generate_corpus(countries, docs_per_country, seed, progress=progress)
    if reference_docs:
        dumps[REFERENCE_TLD] = generate_reference(reference_docs, seed + 1)
    paths = {}
    for tld, text in dumps.items():
        paths[tld] = out_dir / f"{tld}.txt"
        paths[tld].write_text(text, encoding="utf-8")
        logger.info("Saved %s dump → %s", tld, paths[tld])
    return paths
