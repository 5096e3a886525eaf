import unicodedata


def _fold(s: str) -> str:
    s = unicodedata.normalize("NFKD", s.casefold())
    return "".join(ch for ch in s if not unicodedata.combining(ch))


def normalize_name(raw: str) -> str:
    """Canonical join key: case-folded, accents stripped, whitespace collapsed."""
    s = _fold(raw)
    # casefold can expose new decomposable characters; settle to a fixed point
    t = _fold(s)
    while t != s:
        s, t = t, _fold(t)
    return " ".join(s.split())
