"""Certificate text format, the embedded certificate database, period tools.

A certificate body is a string over the base-36 alphabet ``0-9A-Z`` (one
symbol per position, lowercase accepted) with arbitrary whitespace.  In
files, lines whose first non-blank character is ``#`` are comments.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from functools import cached_property

from .core import Coloring, ColoringLike, VerificationReport, as_coloring, verify
from .errors import (
    CertificateParseError,
    InvalidParameterError,
    SymbolOutOfRangeError,
    UnrepresentableColorError,
)

ALPHABET = string.digits + string.ascii_uppercase
MAX_COLORS = len(ALPHABET)
_SYMBOL_TO_COLOR = {ch: i for i, ch in enumerate(ALPHABET)}
_SYMBOL_TO_COLOR.update({ch.lower(): i for ch, i in list(_SYMBOL_TO_COLOR.items())})


def parse_certificate(text: str, r_declared: int = MAX_COLORS) -> Coloring:
    """Parse a certificate body into a coloring.

    Errors carry the 1-based character offset into ``text``; a symbol whose
    color is >= ``r_declared`` also reports its 1-based sequence position.
    """
    if not 1 <= r_declared <= MAX_COLORS:
        raise InvalidParameterError(f"r must be in 1..{MAX_COLORS}, got {r_declared}")
    colors: list[int] = []
    offset = 0
    for line in text.splitlines(keepends=True):
        if line.lstrip().startswith("#"):
            offset += len(line)
            continue
        for ch in line:
            offset += 1
            if ch.isspace():
                continue
            c = _SYMBOL_TO_COLOR.get(ch)
            if c is None:
                raise CertificateParseError(offset, ch)
            if c >= r_declared:
                raise SymbolOutOfRangeError(offset, ch, len(colors) + 1, c, r_declared)
            colors.append(c)
    if not colors:
        raise InvalidParameterError("certificate contains no color symbols")
    return Coloring(tuple(colors))


def format_certificate(coloring: ColoringLike, line_width: int = 80) -> str:
    if line_width < 1:
        raise InvalidParameterError(f"line width must be positive, got {line_width}")
    symbols = []
    for pos, c in enumerate(as_coloring(coloring), start=1):
        if c >= MAX_COLORS:
            raise UnrepresentableColorError(
                f"color {c} at position {pos} has no symbol (max {MAX_COLORS - 1})"
            )
        symbols.append(ALPHABET[c])
    flat = "".join(symbols)
    return "\n".join(flat[i : i + line_width] for i in range(0, len(flat), line_width))


def detect_period(coloring: ColoringLike) -> int:
    """Smallest p with colors[i] == colors[i+p] for every i; N if none shorter.

    Uses the KMP failure function: the longest proper border b of the whole
    sequence gives the smallest period N - b.
    """
    seq = as_coloring(coloring).colors
    n = len(seq)
    fail = [0] * n
    b = 0
    for i in range(1, n):
        while b and seq[i] != seq[b]:
            b = fail[b - 1]
        if seq[i] == seq[b]:
            b += 1
        fail[i] = b
    return n - fail[-1]


def unroll(block: ColoringLike, N: int) -> Coloring:
    """Repeat ``block`` cyclically out to length N."""
    seq = as_coloring(block).colors
    if N < 1:
        raise InvalidParameterError(f"N must be >= 1, got {N}")
    p = len(seq)
    return Coloring(tuple(seq[i % p] for i in range(N)))


# Bodies are kept exactly as published, including any transcription slips;
# verification reports witnesses rather than repairing them.
_W7_3 = """\
00113434103225034635411511224545214336145046522622335656325440256150633033446060436551
36026104414455010154066240130215525566121265100351241326636600232306211462352430040011
34341032250346354115112245452143361450465226223356563254402561506330334460604365513602
610441445501015406624013021552556612126510035124132663660023230621146235243004
"""

_W8_3 = """\
12140440452561661536300300732420300701415255217573373367404373363202141142616776775603
07677574342022045256656615373656616070434430141551552176751552536307007320211211426561
21141757363367434224220451524220261675775607044044301214044345256166153630030073242030
07014152552175733733674043733632021411426167767756030767757434202204525665661537365661
60704344301413515521767515525363070073202112114265612114175736336743422422045152422026
1675775607044044305
"""

_W9_3 = """\
24403861826453756867557736282433551407203756486707866884730354466251831486750781807700
58414655773620425078618020188116052576688473153618072013120022716368770058426472018312
42311338274708811605375831204235342244038581002271648604231534645335514060211338275071
53426457564466251713224403861826453756867557736282433551407203756486707866884730354466
25183148675078180770058414655773620425078618020188116052576688473153618072013120022716
36877005842647201831242311338274708811605375831204235342244038581002271648604231534645
3355140602113382750715342645756446625171320
"""

_W10_3 = """\
78804022787297879915122151228989915899151338983089800262332623390900269002624490941909
11373443734401011370113735501052010224845548455121224812248466121631213359566595662323
35923359577232742324460677606773434460344606883438534355717887178845455714557179945496
45466828998289956566825668280056507565779390093900676779367793911676186768804011040117
87880478804022787297879915122151228989915899151338983089800262332623390900269002624490
94190911373443734401011370113735501052010224845548455121224812248466121631213359566595
66232335923359577232742324460677606773434460344606883438534355717887178845455714557179
94549645466823998239956566825668280056507565779390093900676779367793911676186768804011
0401178788040
"""

_W11_3 = """\
3568726047804797AA45469066939253A179746798371589558A8005657A977A4A364028A8578A948269A2
69091167680A88050475139096890A5937A077A1A227879109916158624A1A79A106A48018802033898A21
AA272697350208A02170591299131449A9032003837A84613190132816A23AA24255A0A143114948095724
2A12439270340035366010254225A591A6835302354A38145114647712136533606A207946413465049256
2257588232476447170318A5752457615A367336869934358755828142906868568726047844797AA45469
866939253A179746798371589558A8005657A977A4A364028A8578A948269A669091167680A88050475139
096890A5937A077A1A227879109916158624A1A79A106A48018802033898A21AA272697350208A02170591
299131449A9032003837A84613190132816A23AA24255A0A1431149480957242A124392703400353660102
54225A591A6835302354A38145114647712136533606A2079464134650492562257588232476447170318A
5752457615A3673368699343587578281429068609
"""


@dataclass(frozen=True)
class CertificateRecord:
    name: str
    r: int
    k: int
    claimed_bound: int
    old_bound: int
    text: str

    @cached_property
    def coloring(self) -> Coloring:
        return parse_certificate(self.text, self.r)

    def audit(self) -> "RecordAudit":
        coloring = self.coloring
        return RecordAudit(
            record=self,
            report=verify(coloring, self.k, self.r),
            actual_length=len(coloring),
        )


@dataclass(frozen=True)
class RecordAudit:
    record: CertificateRecord
    report: VerificationReport
    actual_length: int

    @property
    def length_matches(self) -> bool:
        return self.actual_length == self.record.claimed_bound

    @property
    def verified(self) -> bool:
        return self.report.valid and self.length_matches


_DB = (
    CertificateRecord("W(7,3)", 7, 3, 336, 273, _W7_3),
    CertificateRecord("W(8,3)", 8, 3, 449, 354, _W8_3),
    CertificateRecord("W(9,3)", 9, 3, 559, 454, _W9_3),
    CertificateRecord("W(10,3)", 10, 3, 701, 592, _W10_3),
    CertificateRecord("W(11,3)", 11, 3, 816, 731, _W11_3),
)


def db_entries() -> list[CertificateRecord]:
    return list(_DB)


def _normalize_name(name: str) -> str:
    key = "".join(name.split()).upper()
    if not key.startswith("W("):
        key = f"W({key.strip('()')})"
    return key


def get_entry(name: str) -> CertificateRecord:
    """Look up a record by name; accepts ``W(7,3)``, ``w(7, 3)`` or ``7,3``."""
    key = _normalize_name(name)
    for rec in _DB:
        if rec.name == key:
            return rec
    known = ", ".join(rec.name for rec in _DB)
    raise KeyError(f"no embedded certificate {name!r} (known: {known})")
