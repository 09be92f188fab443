"""Parse newswire input, tokenize it, and walk the topic taxonomy.

Run from the repository root:  python3 demos/01_parse_and_tokenize.py
"""

from pathlib import Path

from newsevents.corpus import load_iptc_taxonomy, parse_newsml, split_article

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

article = parse_newsml((FIXTURES / "germanwings.xml").read_bytes())
print("headline:", article.headline)
print("created: ", article.created.isoformat())
print("dateline:", article.dateline)
print("IPTC codes:", ", ".join(article.iptc_codes))

stream = split_article(article)
print(f"\n{len(stream)} tokens across {stream.sentence_count()} sentences")
print("sentence 0 (the headline):")
print("  ", [t.norm for t in stream.tokens if t.sentence == 0])
print("every span slices back to its surface form:",
      all(article.text[t.start:t.end] == t.surface for t in stream))

taxonomy = load_iptc_taxonomy((FIXTURES / "iptc.csv").read_bytes())
code = article.iptc_codes[4]
chain = " -> ".join(t.label for t in taxonomy.ancestors(code))
print(f"\ntopic {code} ({taxonomy.get(code).label}) sits under: {chain}")
