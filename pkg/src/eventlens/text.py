"""Shared text helpers: canonical text, hashtags, mentions, retweet prefix, language guess."""

from __future__ import annotations

import hashlib
import re
import unicodedata

HASHTAG_RE = re.compile(r"(?<![\w#])#(\w+)", re.UNICODE)
# platform username grammar: letters, digits, underscore, at most 15 chars
MENTION_RE = re.compile(r"(?<![A-Za-z0-9_@])@([A-Za-z0-9_]{1,15})(?![A-Za-z0-9_])")
RETWEET_RE = re.compile(r"^\s*RT\s+@", re.IGNORECASE)
RETWEET_HEAD_RE = re.compile(r"^\s*RT\s+@[A-Za-z0-9_]{1,15}:?\s*", re.IGNORECASE)
WORD_RE = re.compile(r"\w+", re.UNICODE)
_WS_RE = re.compile(r"\s+")

STOPWORDS = {
    "de": frozenset("""der die das und ist nicht ich du er sie es wir ihr ein eine einen dem den
        des zu mit auf für von im in ist sind war hat haben wird werden auch aber oder wie
        was wer noch nur schon so dass als bei nach aus um über vor wenn kein keine sich mein
        dein sein unser euer heute jetzt hier""".split()),
    "en": frozenset("""the a an and or but is are was were be been to of in on at for with
        from by this that these those it its he she they we you i not no yes as so if than
        then there here what who will would can could should have has had do does did just
        about today now""".split()),
}


def canonical_text(text: str) -> str:
    """NFC-normalised text with runs of whitespace collapsed and ends stripped."""
    return _WS_RE.sub(" ", unicodedata.normalize("NFC", text)).strip()


def text_hash(text: str) -> str:
    return hashlib.sha1(canonical_text(text).encode("utf-8")).hexdigest()


def is_retweet_text(text: str) -> bool:
    return bool(RETWEET_RE.match(text))


def strip_retweet_head(text: str) -> str:
    """Remove a leading ``RT @user:`` so a retweet shares the original's content key."""
    return RETWEET_HEAD_RE.sub("", text, count=1)


def content_key(text: str) -> str:
    return text_hash(strip_retweet_head(text))


def hashtags(text: str) -> list[str]:
    """Surface forms of hashtags, in order of appearance (with the leading '#')."""
    return ["#" + m for m in HASHTAG_RE.findall(text)]


def mentions(text: str) -> list[str]:
    """Case-folded mentioned usernames, in order of appearance."""
    return [m.casefold() for m in MENTION_RE.findall(text)]


def guess_language(text: str, threshold: float = 0.15) -> str:
    """Stop-word ratio language guess: 'de', 'en' or 'other'."""
    words = [w.casefold() for w in WORD_RE.findall(text)]
    if not words:
        return "other"
    ratios = {lang: sum(w in sw for w in words) / len(words) for lang, sw in STOPWORDS.items()}
    lang, best = max(sorted(ratios.items()), key=lambda kv: kv[1])
    return lang if best >= threshold else "other"
