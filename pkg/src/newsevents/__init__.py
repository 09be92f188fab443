"""Event-linked news: map articles to knowledge-base events, cluster event
types into coarse schemas, annotate property values in text, and search the
result through combined keyword and structured filters."""

__version__ = "0.1.0"
