"""Inuktitut syllabics <-> roman orthography (ICI standard).

Each mapped syllabic codepoint has exactly one roman spelling.  Plain
concatenation of spellings is ambiguous (``ᑦᐊ`` and ``ᑕ`` both read "ta"),
so :func:`romanize` inserts a boundary mark ``'`` between two syllabics
exactly where a greedy longest-match reading would otherwise merge them.
Ordinary Inuktitut words such as ``ᓄᓇᕗᑦ`` -> ``nunavut`` never need it.
"""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path

BOUNDARY = "'"

# onset -> (i, ii, u, uu, a, aa, ai, final); None where the form does not exist
_SERIES = {
    "": (0x1403, 0x1404, 0x1405, 0x1406, 0x140A, 0x140B, 0x1401, None),
    "p": (0x1431, 0x1432, 0x1433, 0x1434, 0x1438, 0x1439, 0x142F, 0x1449),
    "t": (0x144E, 0x144F, 0x1450, 0x1451, 0x1455, 0x1456, 0x144C, 0x1466),
    "k": (0x146D, 0x146E, 0x146F, 0x1470, 0x1472, 0x1473, 0x146B, 0x1483),
    "g": (0x148B, 0x148C, 0x148D, 0x148E, 0x1490, 0x1491, 0x1489, 0x14A1),
    "m": (0x14A5, 0x14A6, 0x14A7, 0x14A8, 0x14AA, 0x14AB, 0x14A3, 0x14BB),
    "n": (0x14C2, 0x14C3, 0x14C4, 0x14C5, 0x14C7, 0x14C8, 0x14C0, 0x14D0),
    "s": (0x14EF, 0x14F0, 0x14F1, 0x14F2, 0x14F4, 0x14F5, 0x14ED, 0x1505),
    "l": (0x14D5, 0x14D6, 0x14D7, 0x14D8, 0x14DA, 0x14DB, 0x14D3, 0x14EA),
    "j": (0x1528, 0x1529, 0x152A, 0x152B, 0x152D, 0x152E, 0x1526, 0x153E),
    "v": (0x1555, 0x1556, 0x1557, 0x1558, 0x1559, 0x155A, 0x1553, 0x155D),
    "r": (0x1546, 0x1547, 0x1548, 0x1549, 0x154B, 0x154C, 0x1542, 0x1550),
    "q": (0x157F, 0x1580, 0x1581, 0x1582, 0x1583, 0x1584, 0x166F, 0x1585),
    "ng": (0x158F, 0x1590, 0x1591, 0x1592, 0x1593, 0x1594, 0x1670, 0x1595),
    "nng": (0x1671, 0x1672, 0x1673, 0x1674, 0x1675, 0x1676, None, 0x1596),
    "&": (0x15A0, 0x15A1, 0x15A2, 0x15A3, 0x15A4, 0x15A5, None, 0x15A6),
}
_VOWELS = ("i", "ii", "u", "uu", "a", "aa", "ai")

# standalone letters without a syllable series
_EXTRA = {0x157C: "h", 0x15AF: "b"}


def _ici_pairs():
    for onset, cps in _SERIES.items():
        for vowel, cp in zip(_VOWELS, cps[:7]):
            if cp is not None:
                yield chr(cp), onset + vowel
        if cps[7] is not None:
            yield chr(cps[7]), onset
    for cp, roman in _EXTRA.items():
        yield chr(cp), roman


class TransliterationTable:
    """Injective map between syllabic codepoints and roman strings."""

    def __init__(self, to_roman: dict[str, str]):
        if not to_roman:
            raise ValueError("transliteration table is empty")
        inverse = {}
        for char, roman in to_roman.items():
            if len(char) != 1:
                raise ValueError(f"table key {char!r} is not a single codepoint")
            if not roman or BOUNDARY in roman or any(c.isspace() for c in roman):
                raise ValueError(f"bad roman spelling {roman!r} for {char!r}")
            if roman in inverse:
                raise ValueError(f"roman {roman!r} is used by both {inverse[roman]!r} and {char!r}")
            inverse[roman] = char
        self.to_roman = dict(to_roman)
        self.to_syllabic = inverse
        self.max_key = max(map(len, inverse))

    @classmethod
    def default(cls) -> TransliterationTable:
        return _default_table()

    @classmethod
    def from_file(cls, path, base: TransliterationTable | None = None) -> TransliterationTable:
        """Load a two-column override file: ``<codepoint> <roman>`` per line.

        The codepoint column is either the character itself, ``U+XXXX`` or
        bare hex.  Entries override ``base`` (the built-in table by default);
        blank lines and ``#`` comments are skipped.
        """
        table = dict((base or cls.default()).to_roman)
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected two columns, got {len(parts)}")
            key, roman = parts
            if len(key) != 1:
                key = chr(int(key[2:] if key.upper().startswith("U+") else key, 16))
            # drop whatever previously owned this spelling so overrides can swap entries
            for k in [k for k, v in table.items() if v == roman and k != key]:
                del table[k]
            table[key] = roman
        return cls(table)

    def longest_match(self, text: str, pos: int) -> int:
        """Length of the longest roman key starting at ``pos`` (0 if none)."""
        for n in range(min(self.max_key, len(text) - pos), 0, -1):
            if text[pos:pos + n] in self.to_syllabic:
                return n
        return 0

    def romanize(self, text: str) -> str:
        pieces = [(self.to_roman.get(ch), ch) for ch in text]
        out = []
        following = ""
        # right to left, so each boundary check sees the real text after it
        for i in range(len(pieces) - 1, -1, -1):
            roman, ch = pieces[i]
            if roman is None:
                piece = ch
                # a literal mark right after a syllabic is escaped by doubling it
                if (ch == BOUNDARY and i > 0 and pieces[i - 1][0] is not None
                        and (following[:1] == BOUNDARY or self.longest_match(following, 0))):
                    piece += BOUNDARY
            else:
                piece = roman
                nxt = pieces[i + 1][0] if i + 1 < len(pieces) else None
                if nxt is not None and self.longest_match(roman + following[:self.max_key], 0) > len(roman):
                    piece += BOUNDARY
            out.append(piece)
            following = piece + following[:self.max_key]
        return "".join(reversed(out))

    def deromanize(self, text: str) -> str:
        out = []
        i = 0
        prev_matched = False
        while i < len(text):
            if prev_matched and text[i] == BOUNDARY and (
                    text[i + 1:i + 2] == BOUNDARY or self.longest_match(text, i + 1)):
                i += 1
                prev_matched = False
                continue
            n = self.longest_match(text, i)
            if n:
                out.append(self.to_syllabic[text[i:i + n]])
                i += n
                prev_matched = True
            else:
                out.append(text[i])
                i += 1
                prev_matched = False
        return "".join(out)


@lru_cache(maxsize=1)
def _default_table() -> TransliterationTable:
    return TransliterationTable(dict(_ici_pairs()))


def romanize(text: str, table: TransliterationTable | None = None) -> str:
    """Replace mapped syllabics by roman spellings; anything else passes through."""
    return (table or _default_table()).romanize(text)


def deromanize(text: str, table: TransliterationTable | None = None) -> str:
    """Greedy longest-match conversion of roman spellings back to syllabics.

    Matching is case-sensitive: uppercase letters never match, but the
    lowercase remainder of a capitalised word does.
    """
    return (table or _default_table()).deromanize(text)
