"""Lexicon sentiment scoring (dual positive/negative strengths) and Plutchik emotion counts.

Scoring rules, applied per sentence (sentences end at ``.``, ``!`` or ``?``):

* every lexicon term contributes its strength (stems end in ``*`` in the lexicon);
* a booster immediately before a term moves its magnitude by +-1, clamped to [2, 5];
* a letter repeated three or more times ("greaaat") adds 1 to the magnitude;
* a negator among the two preceding tokens turns a positive term negative with
  magnitude reduced by 1 (minimum 2), and cancels a negative term;
* the sentence scores are the strongest positive (floor 1) and negative (ceiling -1)
  contributions; the message score is the extremum over its sentences.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Corpus, MessageRecord

EMOTIONS = ("anger", "anticipation", "disgust", "fear", "joy", "sadness", "surprise", "trust")
_SECTIONS = ("terms", "boosters", "negators", "emoticons")
_RUN_RE = re.compile(r"(\w)\1{2,}", re.UNICODE)
_WORD_RE = re.compile(r"\w+", re.UNICODE)


class LexiconError(ValueError):
    pass


@dataclass(frozen=True)
class SentimentScore:
    positive: int = 1
    negative: int = -1

    def __post_init__(self):
        if not (1 <= self.positive <= 5 and -5 <= self.negative <= -1):
            raise ValueError(f"invalid sentiment score ({self.positive}, {self.negative})")


class PolarityCategory(str, enum.Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    NEUTRAL = "Neutral"
    OVERLAP = "Overlap"


def categorize_polarity(score: SentimentScore) -> PolarityCategory:
    pos, neg = score.positive >= 2, score.negative <= -2
    if pos and neg:
        return PolarityCategory.OVERLAP
    if pos:
        return PolarityCategory.POSITIVE
    if neg:
        return PolarityCategory.NEGATIVE
    return PolarityCategory.NEUTRAL


def _check_strength(term: str, s: int):
    if not (2 <= abs(s) <= 5):
        raise LexiconError(f"strength of {term!r} must lie in [-5,-2] or [2,5], got {s}")


@dataclass(frozen=True)
class SentimentLexicon:
    entries: Mapping[str, int]
    boosters: Mapping[str, int] = field(default_factory=dict)
    negators: frozenset[str] = frozenset()
    emoticons: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        for term, s in self.entries.items():
            _check_strength(term, s)
        for emo, s in self.emoticons.items():
            _check_strength(emo, s)
        for b, v in self.boosters.items():
            if v not in (-1, 1):
                raise LexiconError(f"booster {b!r} must be +1 or -1")
        object.__setattr__(self, "entries", {k.casefold(): v for k, v in self.entries.items()})
        exact = {k: v for k, v in self.entries.items() if not k.endswith("*")}
        stems = sorted(((k[:-1], v) for k, v in self.entries.items() if k.endswith("*")),
                       key=lambda kv: -len(kv[0]))
        object.__setattr__(self, "_exact", exact)
        object.__setattr__(self, "_stems", tuple(stems))
        alts = [re.escape(e) for e in sorted(self.emoticons, key=len, reverse=True)]
        pattern = "|".join(alts + [r"\w+", r"[.!?]+"])
        object.__setattr__(self, "_token_re", re.compile(pattern, re.UNICODE))

    @classmethod
    def load(cls, path: str | Path) -> "SentimentLexicon":
        """Read a sectioned TSV: ``[terms]``, ``[boosters]``, ``[negators]``, ``[emoticons]``."""
        data = {s: {} for s in _SECTIONS}
        section = "terms"
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.rstrip("\n")
                if not line.strip() or line.lstrip().startswith("//"):
                    continue
                head = line.strip()
                if head.startswith("[") and head.endswith("]"):
                    section = head[1:-1].strip().lower()
                    if section not in _SECTIONS:
                        raise LexiconError(f"{path}:{lineno}: unknown section {head}")
                    continue
                parts = line.split("\t")
                term = parts[0].strip()
                if section == "negators":
                    data["negators"][term.casefold()] = True
                    continue
                if len(parts) < 2:
                    raise LexiconError(f"{path}:{lineno}: expected term<TAB>value")
                try:
                    value = int(parts[1])
                except ValueError:
                    raise LexiconError(f"{path}:{lineno}: non-integer value {parts[1]!r}") from None
                key = term if section == "emoticons" else term.casefold()
                data[section][key] = value
        return cls(data["terms"], data["boosters"], frozenset(data["negators"]), data["emoticons"])

    def tokens(self, text: str) -> list[str]:
        return self._token_re.findall(text)

    def lookup(self, word: str) -> tuple[int | None, bool]:
        """Strength of a word and whether it was emphasised by letter repetition."""
        w = word.casefold()
        s = self._match(w)
        if s is not None:
            return s, False
        if _RUN_RE.search(w):
            for reduced in (_RUN_RE.sub(r"\1\1", w), _RUN_RE.sub(r"\1", w)):
                s = self._match(reduced)
                if s is not None:
                    return s, True
        return None, False

    def _match(self, w: str) -> int | None:
        if w in self._exact:
            return self._exact[w]
        for stem, s in self._stems:
            if w.startswith(stem):
                return s
        return None


def score_polarity(text: str, lexicon: SentimentLexicon) -> SentimentScore:
    pos, neg = 1, -1
    sentence: list[str] = []
    for tok in lexicon.tokens(text) + ["."]:
        if tok[0] in ".!?":
            p, n = _score_sentence(sentence, lexicon)
            pos, neg = max(pos, p), min(neg, n)
            sentence = []
        else:
            sentence.append(tok)
    return SentimentScore(pos, neg)


def _score_sentence(tokens: Sequence[str], lex: SentimentLexicon) -> tuple[int, int]:
    pos, neg = 1, -1
    folded = [t.casefold() for t in tokens]
    for i, tok in enumerate(tokens):
        if tok in lex.emoticons:
            s = lex.emoticons[tok]
            pos, neg = max(pos, s), min(neg, s)
            continue
        w = folded[i]
        if w in lex.negators or w in lex.boosters:
            continue
        s, emphasised = lex.lookup(tok)
        if s is None:
            continue
        sign, mag = (1 if s > 0 else -1), abs(s)
        if i >= 1 and folded[i - 1] in lex.boosters:
            mag = min(5, max(2, mag + lex.boosters[folded[i - 1]]))
        if emphasised:
            mag = min(5, mag + 1)
        if any(folded[j] in lex.negators for j in range(max(0, i - 2), i)):
            if sign < 0:
                continue
            sign, mag = -1, max(2, mag - 1)
        s = sign * mag
        pos, neg = max(pos, s), min(neg, s)
    return pos, neg


# --------------------------------------------------------------------------- #
# emotions
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class EmotionVector:
    counts: tuple[int, ...] = (0,) * len(EMOTIONS)

    def __post_init__(self):
        if len(self.counts) != len(EMOTIONS) or any(c < 0 for c in self.counts):
            raise ValueError("emotion vector needs 8 non-negative counts")

    def __add__(self, other: "EmotionVector") -> "EmotionVector":
        return EmotionVector(tuple(a + b for a, b in zip(self.counts, other.counts)))

    def __getitem__(self, emotion: str) -> int:
        return self.counts[EMOTIONS.index(emotion)]

    def to_dict(self) -> dict[str, int]:
        return dict(zip(EMOTIONS, self.counts))


@dataclass(frozen=True)
class EmotionLexicon:
    entries: Mapping[str, frozenset[str]]
    polarity: Mapping[str, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self):
        for word, emos in self.entries.items():
            bad = set(emos) - set(EMOTIONS)
            if bad:
                raise LexiconError(f"{word!r}: unknown emotion label(s) {sorted(bad)}")

    @classmethod
    def load(cls, path: str | Path) -> "EmotionLexicon":
        """Word-level association file: ``word<TAB>affect<TAB>0|1`` per line."""
        entries: dict[str, set] = {}
        polarity: dict[str, set] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                parts = line.split()
                if not parts:
                    continue
                if len(parts) != 3:
                    raise LexiconError(f"{path}:{lineno}: expected 3 columns")
                word, affect, flag = parts
                if flag not in ("0", "1"):
                    raise LexiconError(f"{path}:{lineno}: flag must be 0 or 1")
                word = word.casefold()
                if affect in ("positive", "negative"):
                    if flag == "1":
                        polarity.setdefault(word, set()).add(affect)
                    continue
                if affect not in EMOTIONS:
                    raise LexiconError(f"{path}:{lineno}: unknown affect {affect!r}")
                if flag == "1":
                    entries.setdefault(word, set()).add(affect)
        return cls({w: frozenset(e) for w, e in entries.items()},
                   {w: frozenset(p) for w, p in polarity.items()})


def emotion_vector(text: str, lexicon: EmotionLexicon) -> EmotionVector:
    """Token-frequency emotion counts: each token adds 1 to every emotion it carries."""
    counts = dict.fromkeys(EMOTIONS, 0)
    for tok in _WORD_RE.findall(text):
        for e in lexicon.entries.get(tok.casefold(), ()):
            counts[e] += 1
    return EmotionVector(tuple(counts[e] for e in EMOTIONS))


def total_emotions(vectors: Iterable[EmotionVector]) -> EmotionVector:
    total = EmotionVector()
    for v in vectors:
        total = total + v
    return total


# --------------------------------------------------------------------------- #
# per-record scoring
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class Resources:
    """Per-language lexicons; languages without an entry are unsupported."""

    sentiment: Mapping[str, SentimentLexicon]
    emotion: Mapping[str, EmotionLexicon]

    @classmethod
    def bundled(cls) -> "Resources":
        root = resources.files("eventlens") / "data"
        sent, emo = {}, {}
        for lang in ("en", "de"):
            with resources.as_file(root / f"sentiment_{lang}.tsv") as p:
                sent[lang] = SentimentLexicon.load(p)
            with resources.as_file(root / f"emotion_{lang}.txt") as p:
                emo[lang] = EmotionLexicon.load(p)
        return cls(sent, emo)

    @classmethod
    def from_paths(cls, sentiment: Mapping[str, str], emotion: Mapping[str, str]) -> "Resources":
        return cls({k: SentimentLexicon.load(v) for k, v in sentiment.items()},
                   {k: EmotionLexicon.load(v) for k, v in emotion.items()})


@dataclass(frozen=True)
class RecordSentiment:
    key: str
    score: SentimentScore
    category: PolarityCategory
    emotions: EmotionVector
    unsupported_language: bool = False

    def to_dict(self) -> dict:
        return {"key": self.key, "positive": self.score.positive, "negative": self.score.negative,
                "category": self.category.value, "emotions": self.emotions.to_dict(),
                "unsupported_language": self.unsupported_language}


def score_record(record: MessageRecord, res: Resources) -> RecordSentiment:
    lang = record.language
    if lang not in res.sentiment:
        score = SentimentScore()
        return RecordSentiment(record.key, score, categorize_polarity(score), EmotionVector(), True)
    score = score_polarity(record.text, res.sentiment[lang])
    emo = emotion_vector(record.text, res.emotion[lang]) if lang in res.emotion else EmotionVector()
    return RecordSentiment(record.key, score, categorize_polarity(score), emo)


def score_corpus(corpus: Corpus, res: Resources) -> list[RecordSentiment]:
    return [score_record(r, res) for r in corpus.records]


def compile_patterns(patterns: Iterable[str]) -> list[re.Pattern]:
    """Case-insensitive matchers; plain strings match as whole words, ``re:`` prefixes are regexes."""
    out = []
    for p in patterns:
        if p.startswith("re:"):
            out.append(re.compile(p[3:], re.IGNORECASE))
        else:
            out.append(re.compile(r"(?<![\w@#])" + re.escape(p) + r"(?!\w)", re.IGNORECASE))
    if not out:
        raise ValueError("target pattern set must not be empty")
    return out


def mentions_target(text: str, matchers: Sequence[re.Pattern]) -> bool:
    return any(m.search(text) for m in matchers)


@dataclass(frozen=True)
class TargetedScore:
    key: str
    score: SentimentScore
    category: PolarityCategory
    ambiguous: bool


def sentiment_toward(corpus: Corpus, target: Iterable[str], res: Resources,
                     others: Iterable[Iterable[str]] = ()) -> list[TargetedScore]:
    """Score records that mention ``target``; flag those also mentioning another target."""
    mine = compile_patterns(target)
    rivals = [compile_patterns(o) for o in others]
    out = []
    for r in corpus.records:
        if not mentions_target(r.text, mine):
            continue
        rs = score_record(r, res)
        ambiguous = any(mentions_target(r.text, m) for m in rivals)
        out.append(TargetedScore(r.key, rs.score, rs.category, ambiguous))
    return out
