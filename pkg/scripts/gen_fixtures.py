"""Regenerate the bundled sample data: the 50-d embedding table and the
two article lexicon files. Run from the repo root:

    python scripts/gen_fixtures.py

Vectors are seeded; synonym pairs are constructed at fixed cosines above
the 0.9 matching threshold, everything else lands near orthogonal. The
script asserts no accidental near-duplicates before writing.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "src" / "revisecoach" / "data"
DIM = 50

MVP_TOPICS = {
    "Hospital": ["hospital", "doctor", "medicine", "medication", "treatment", "nurse", "patients", "electricity"],
    "Malaria": ["malaria", "mosquito", "mosquitoes", "nets", "disease", "bitten"],
    "Farming": ["farming", "farmers", "crops", "fertilizer", "irrigation", "harvest", "seeds"],
    "School": ["school", "students", "supplies", "fees", "attendance"],
}

MVP_CATEGORIES = {
    "hospital_conditions": ["beds", "crowded", "electricity", "generator", "wards"],
    "medical_supplies": ["medicine", "medication", "vaccines", "treatment"],
    "malaria_details": ["nets", "mosquito", "mosquitoes", "chemicals", "bitten"],
    "malaria_toll": ["deaths", "children", "sick", "preventable"],
    "farm_inputs": ["fertilizer", "seeds", "irrigation", "water"],
    "harvest_outcomes": ["crops", "harvest", "hunger", "food"],
    "school_access": ["fees", "chores", "attendance", "enrollment"],
    "school_resources": ["supplies", "books", "pencils", "lunch", "meals"],
}

SPACE_TOPICS = {
    "People": ["people", "poverty", "hunger", "families"],
    "Earth": ["earth", "pollution", "oceans", "fuels", "energy"],
    "Cost": ["cost", "budget", "billion", "billions", "dollars", "spending"],
    "Exploration": ["exploration", "space", "astronauts", "satellites", "spacecraft", "moon"],
}

SPACE_CATEGORIES = {
    "poverty_needs": ["poverty", "housing", "food", "medicine"],
    "disease_prevention": ["malaria", "nets", "disease"],
    "environment": ["pollution", "fuels", "oceans", "energy", "air"],
    "budget_shares": ["billion", "billions", "budget", "percent", "defense", "education"],
    "medical_innovation": ["instruments", "monitor", "astronauts", "doctors"],
    "satellite_benefits": ["satellites", "crops", "soil", "rainfall"],
    "competition_motivation": ["competition", "nations", "race", "moon", "science"],
}

# (new word, anchor keyword, target cosine)
SYNONYMS = [
    ("clinic", "hospital", 0.95),
    ("clinics", "hospital", 0.93),
    ("physician", "doctor", 0.93),
    ("agriculture", "farming", 0.94),
    ("classroom", "school", 0.92),
    ("rocket", "spacecraft", 0.94),
]

FILLER = [
    "author", "village", "kids", "night", "problems", "working", "water",
    "team", "reader", "argument", "evidence", "article", "writing",
]

MVP_ARTICLE = """A Village Changes Course

Aid workers who visited the village in 2014 found a struggling place. The small hospital had three children to a bed, no running water, and no doctor on duty. Medicine for the most common illnesses was missing from its shelves.

Malaria spread quickly in the wet season. Mosquitoes came at night, and families who could not afford bed nets were bitten while they slept. Cheap nets and simple medicines could have prevented most of the deaths.

In the fields, farmers watched their crops fail year after year. Without fertilizer or irrigation, the soil gave back less food each season, and many families went hungry.

The school had eager students but almost nothing else. Parents could not pay the fees, so children stayed home to haul water and firewood instead of learning to read.

Four years later the picture had changed: stocked clinics, bed nets at every sleeping site, stronger harvests, and a full classroom with free lunches. The village shows that steady help can beat poverty.
"""

MVP_MARKERS = {
    "Hospital": [
        "The small hospital had three children to a bed, no running water, and no doctor on duty.",
        "Medicine for the most common illnesses was missing from its shelves.",
    ],
    "Malaria": [
        "Malaria spread quickly in the wet season.",
        "Mosquitoes came at night, and families who could not afford bed nets were bitten while they slept.",
    ],
    "Farming": [
        "In the fields, farmers watched their crops fail year after year.",
        "Without fertilizer or irrigation, the soil gave back less food each season, and many families went hungry.",
    ],
    "School": [
        "The school had eager students but almost nothing else.",
        "Parents could not pay the fees, so children stayed home to haul water and firewood instead of learning to read.",
    ],
}

SPACE_ARTICLE = """Why Explore Space?

Critics say the money should stay on the ground. Millions of people still live in poverty and struggle to pay for housing, food, and medicine. The Earth itself needs attention too, as pollution from burning fuels damages the air and the oceans.

The cost is real: a space program consumes billions of dollars from the national budget every year. Yet that spending is a small share compared with what nations spend on defense.

Supporters answer that exploration pays the planet back. Instruments built to monitor astronauts in orbit became tools that doctors use every day. Satellites watch crops, soil, and rainfall, helping farmers grow more food at lower cost. And the race to the moon pushed whole nations to invest in education and science.

Looking outward, they argue, is one of the best ways to fix problems at home.
"""

SPACE_MARKERS = {
    "People": ["Millions of people still live in poverty and struggle to pay for housing, food, and medicine."],
    "Earth": ["The Earth itself needs attention too, as pollution from burning fuels damages the air and the oceans."],
    "Cost": ["The cost is real: a space program consumes billions of dollars from the national budget every year."],
    "Exploration": ["Supporters answer that exploration pays the planet back."],
}


def build_embeddings() -> dict[str, np.ndarray]:
    rng = np.random.default_rng(20240817)

    def unit(v: np.ndarray) -> np.ndarray:
        return v / np.linalg.norm(v)

    def near(base: np.ndarray, cosine: float) -> np.ndarray:
        w = rng.normal(size=DIM)
        w = unit(w - (w @ base) * base)
        return unit(cosine * base + np.sqrt(1.0 - cosine * cosine) * w)

    words: set[str] = set(FILLER)
    for group in (MVP_TOPICS, MVP_CATEGORIES, SPACE_TOPICS, SPACE_CATEGORIES):
        for keywords in group.values():
            words.update(keywords)
    vectors = {w: unit(rng.normal(size=DIM)) for w in sorted(words)}
    for word, anchor, cosine in SYNONYMS:
        vectors[word] = near(vectors[anchor], cosine)

    engineered = {(w, a) for w, a, _ in SYNONYMS} | {(a, w) for w, a, _ in SYNONYMS}
    # Two synonyms of one anchor are close to each other as well.
    by_anchor: dict[str, list[str]] = {}
    for w, a, _ in SYNONYMS:
        by_anchor.setdefault(a, []).append(w)
    for group in by_anchor.values():
        for x in group:
            for y in group:
                if x != y:
                    engineered.add((x, y))
    names = sorted(vectors)
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            if (a, b) in engineered:
                continue
            sim = float(vectors[a] @ vectors[b])
            assert sim < 0.85, f"accidental near-pair {a}/{b}: {sim:.3f}"
    return vectors


def write_embeddings(vectors: dict[str, np.ndarray]) -> None:
    out = DATA / "embeddings" / "sample-50d.txt"
    lines = [
        word + " " + " ".join(f"{x:.6f}" for x in vec) for word, vec in sorted(vectors.items())
    ]
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {out} ({len(lines)} entries)")


def spans_for(article: str, markers: dict[str, list[str]]) -> list[dict]:
    spans = []
    for topic, fragments in markers.items():
        for fragment in fragments:
            start = article.find(fragment)
            assert start >= 0, f"marker not found for {topic}: {fragment[:40]}..."
            spans.append({"topic": topic, "start": start, "end": start + len(fragment)})
    return sorted(spans, key=lambda s: s["start"])


def write_lexicon(
    article_id: str,
    topics: dict[str, list[str]],
    categories: dict[str, list[str]],
    article: str,
    markers: dict[str, list[str]],
) -> None:
    payload = {
        "schema_version": 1,
        "article_id": article_id,
        "window_size": 8,
        "stride": 1,
        "similarity_threshold": 0.9,
        "alpha": 2,
        "beta": 4,
        "gamma": 2,
        "topics": [{"name": n, "keywords": kws} for n, kws in topics.items()],
        "categories": [{"name": n, "keywords": kws} for n, kws in categories.items()],
        "article_text": article,
        "topic_highlight_spans": spans_for(article, markers),
    }
    out = DATA / "lexicons" / f"{article_id}.json"
    out.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {out}")


def main() -> None:
    write_embeddings(build_embeddings())
    write_lexicon("mvp", MVP_TOPICS, MVP_CATEGORIES, MVP_ARTICLE, MVP_MARKERS)
    write_lexicon("space", SPACE_TOPICS, SPACE_CATEGORIES, SPACE_ARTICLE, SPACE_MARKERS)


if __name__ == "__main__":
    main()
