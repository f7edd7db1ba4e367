"""
Romanizing Inuktitut
====================

Syllabic text is mapped to the roman orthography one syllable at a time.
Where two neighbouring syllables would read back as a single longer one,
an apostrophe keeps them apart so the text can be restored exactly.
"""
from iuprep.translit import TransliterationTable, deromanize, romanize

###############################################################################
# A few words, including some that need the boundary mark.
words = ["ᓄᓇᕗᑦ", "ᐃᓄᒃᑎᑐᑦ", "ᐊᐊ", "ᐸᐃ", "ᑦᐊ"]
for w in words:
    r = romanize(w)
    print(f"{w:8s} -> {r:10s} -> {deromanize(r)}")

###############################################################################
# Anything outside the table passes through unchanged.
print(romanize("WMT 2020: ᐅᖃᐅᓯᖅ!"))

###############################################################################
# The built-in table covers the ICI syllabics plus finals.
table = TransliterationTable.default()
print(len(table.to_roman), "mapped codepoints")
print(sorted(set("".join(table.to_roman.values()))))
