import json
from pathlib import Path

from dialecto.synthetic import COUNTRIES, write_corpus

# -----------------------------
# CONFIG
# -----------------------------

DOCS_PER_COUNTRY = 200
REFERENCE_DOCS = 300
SEED = 7

RAW_DIR = Path("Data/raw")
CONFIG_PATH = Path("Data/experiment.json")

# -----------------------------
# Generate dumps
# -----------------------------

print("Generating country dumps...")
paths = write_corpus(RAW_DIR, COUNTRIES, DOCS_PER_COUNTRY, SEED, REFERENCE_DOCS, progress=True)

# -----------------------------
# Experiment config next to the dumps
# -----------------------------

config = {
    "corpora": [{"tld": tld, "path": f"raw/{tld}.txt"} for tld in COUNTRIES],
    "reference_corpora": [{"tld": "ref", "path": "raw/ref.txt"}],
    "granularities": ["document", "sentence"],
    "seed": 0,
    "output_dir": "../out",
}
CONFIG_PATH.write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")

print("\n🎉 Corpus generated successfully!")
for tld, path in paths.items():
    print(f"📁 {tld}: {path} ({path.stat().st_size} bytes)")
print(f"⚙️  Config: {CONFIG_PATH}")
