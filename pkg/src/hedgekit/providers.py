"""Text -> sentiment score providers.

Two scorers are available: a deterministic lexicon scorer (the default; no
network) and a client for a remote scoring service speaking::

    POST /score   {"texts": ["...", ...]}   ->   {"scores": [0.72, ...]}

Remote scores are clamped into [0, 1] with a logged warning.  Responses can
be cached in a JSON-lines file keyed by the SHA-256 of the text bytes.
"""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import os
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import httpx

from .errors import (
    EmptyLexicon, HTTPError, InvalidConfig, MalformedResponse, ParseError,
    ProviderError, ProviderUnavailable, Timeout,
)
from .sentiment import SOURCES, SentimentObservation, SourceWeights

log = logging.getLogger(__name__)

PROVIDER_URL_ENV = "HEDGEKIT_PROVIDER_URL"

_TOKEN_SPLIT = re.compile(r"[^0-9a-zA-Z]+")

# Small built-in finance word list, used when no lexicon file is configured.
_DEFAULT_POSITIVE = """
gain gains gained profit profits profitable surge surges surged rise rises rising rose
rally rallies rallied beat beats strong stronger growth grow grows upgrade upgraded
bullish record boost boosted improve improved improves outperform outperformed
recovery rebound rebounded optimism optimistic expansion exceed exceeded exceeds
positive dividend upside robust momentum
""".split()
_DEFAULT_NEGATIVE = """
loss losses lost fall falls falling fell drop drops dropped decline declines declined
plunge plunged slump slumped miss missed weak weaker downgrade downgraded bearish
crash crashed risk risks default defaults lawsuit fraud recession layoffs layoff
negative downside volatile volatility concern concerns fear fears selloff bankruptcy
""".split()


class Lexicon(dict):
    """Token -> polarity (``"pos"`` or ``"neg"``); tokens are lowercase."""

    def __init__(self, entries: Mapping[str, str] | None = None):
        super().__init__()
        for token, polarity in (entries or {}).items():
            self.add(token, polarity)

    def add(self, token: str, polarity: str) -> None:
        token = token.strip().lower()
        polarity = {"+": "pos", "-": "neg", "positive": "pos", "negative": "neg"}.get(polarity, polarity)
        if polarity not in ("pos", "neg"):
            raise ValueError(f"polarity must be pos or neg, got {polarity!r}")
        if self.get(token, polarity) != polarity:
            raise ValueError(f"token {token!r} listed with both polarities")
        self[token] = polarity

    def inverted(self) -> "Lexicon":
        return Lexicon({t: ("neg" if p == "pos" else "pos") for t, p in self.items()})

    @classmethod
    def default(cls) -> "Lexicon":
        lex = cls()
        for w in _DEFAULT_POSITIVE:
            lex.add(w, "pos")
        for w in _DEFAULT_NEGATIVE:
            lex.add(w, "neg")
        return lex


def load_lexicon(path) -> Lexicon:
    lex = Lexicon()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["token", "polarity"]:
            raise ParseError("expected header token,polarity", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise ParseError(f"expected 2 fields, got {len(row)}", line=lineno)
            try:
                lex.add(row[0], row[1].strip())
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
    return lex


def tokenize(text: str) -> list[str]:
    return [t.lower() for t in _TOKEN_SPLIT.split(text) if t]


def lexicon_score(text: str, lexicon: Lexicon) -> float:
    """``0.5 + 0.5 * (p - n) / (p + n)`` over matched tokens; 0.5 if none match."""
    if not lexicon:
        raise EmptyLexicon("lexicon has no entries")
    pos = neg = 0
    for tok in tokenize(text):
        polarity = lexicon.get(tok)
        if polarity == "pos":
            pos += 1
        elif polarity == "neg":
            neg += 1
    if pos + neg == 0:
        return 0.5
    return 0.5 + 0.5 * (pos - neg) / (pos + neg)


@dataclass(frozen=True)
class TextBatch:
    day: int
    items: tuple  # (source, text) pairs

    def __post_init__(self):
        if not self.items:
            raise ValueError("a text batch needs at least one item")
        for source, _ in self.items:
            if source not in SOURCES:
                raise ValueError(f"unknown source {source!r}")


class ResponseCache:
    """Append-only JSON-lines cache of remote scores.

    Each line is ``{"key": sha256(text), "score": s}``.  With ``path=None``
    the cache lives in memory only.
    """

    def __init__(self, path=None):
        self.path = Path(path) if path else None
        self._data: dict[str, float] = {}
        self._lock = threading.Lock()
        if self.path and self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        rec = json.loads(line)
                        self._data[rec["key"]] = float(rec["score"])

    @staticmethod
    def key(text: str) -> str:
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def get(self, text: str):
        return self._data.get(self.key(text))

    def put(self, text: str, score: float) -> None:
        k = self.key(text)
        with self._lock:
            if k in self._data:
                return
            self._data[k] = score
            if self.path:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps({"key": k, "score": score}) + "\n")

    def __len__(self):
        return len(self._data)


def _clamp_scores(raw, n_expected):
    if not isinstance(raw, dict) or "scores" not in raw:
        raise MalformedResponse("response lacks a 'scores' field")
    scores = raw["scores"]
    if not isinstance(scores, list):
        raise MalformedResponse("'scores' is not a list")
    if len(scores) != n_expected:
        raise MalformedResponse(f"got {len(scores)} scores for {n_expected} texts")
    out = []
    for i, s in enumerate(scores):
        if isinstance(s, bool) or not isinstance(s, (int, float)) or not math.isfinite(s):
            raise MalformedResponse(f"score {i} is not a finite number: {s!r}")
        s = float(s)
        if s < 0.0 or s > 1.0:
            clamped = min(max(s, 0.0), 1.0)
            log.warning("remote score %r at index %d outside [0, 1]; clamped to %r", s, i, clamped)
            s = clamped
        out.append(s)
    return out


class RemoteScorer:
    """Client for the remote scoring endpoint.

    Texts are sent in chunks of ``batch_size``; up to ``max_in_flight``
    chunks are outstanding at once.  Timeouts, transport errors and 5xx/429
    responses are retried ``retries`` times with exponential backoff.
    """

    def __init__(self, endpoint: str, timeout_ms: int = 5000, retries: int = 2,
                 cache: ResponseCache | None = None, batch_size: int = 64,
                 max_in_flight: int = 4, backoff_s: float = 0.2):
        if not endpoint:
            raise InvalidConfig("remote provider needs an endpoint")
        self.endpoint = endpoint.rstrip("/")
        self.timeout_ms = timeout_ms
        self.retries = retries
        self.cache = cache
        self.batch_size = batch_size
        self.max_in_flight = max_in_flight
        self.backoff_s = backoff_s

    @property
    def url(self):
        return self.endpoint if self.endpoint.endswith("/score") else self.endpoint + "/score"

    def _post(self, client: httpx.Client, texts: list[str]) -> list[float]:
        attempt = 0
        while True:
            try:
                resp = client.post(self.url, json={"texts": texts})
                if resp.status_code >= 400:
                    raise HTTPError(resp.status_code, resp.text[:200])
                try:
                    payload = resp.json()
                except ValueError:
                    raise MalformedResponse("response body is not JSON") from None
                return _clamp_scores(payload, len(texts))
            except (httpx.TimeoutException, httpx.TransportError, HTTPError) as exc:
                retryable = not isinstance(exc, HTTPError) or exc.status >= 500 or exc.status == 429
                if not retryable or attempt >= self.retries:
                    if isinstance(exc, httpx.TimeoutException):
                        raise Timeout(f"no response from {self.url} within {self.timeout_ms} ms") from exc
                    if isinstance(exc, httpx.TransportError):
                        raise ProviderUnavailable(f"cannot reach {self.url}: {exc}") from exc
                    raise
                log.info("retrying %s after %s (attempt %d)", self.url, type(exc).__name__, attempt + 1)
                time.sleep(self.backoff_s * 2**attempt)
                attempt += 1

    def score(self, texts: Sequence[str]) -> list[float]:
        texts = list(texts)
        if not texts:
            raise ValueError("no texts to score")
        results: list[float | None] = [None] * len(texts)
        todo: dict[str, list[int]] = {}
        for i, text in enumerate(texts):
            cached = self.cache.get(text) if self.cache else None
            if cached is not None:
                results[i] = cached
            else:
                todo.setdefault(text, []).append(i)
        unique = list(todo)
        chunks = [unique[i : i + self.batch_size] for i in range(0, len(unique), self.batch_size)]
        if chunks:
            timeout = httpx.Timeout(self.timeout_ms / 1000.0)
            with httpx.Client(timeout=timeout) as client:
                if len(chunks) == 1 or self.max_in_flight <= 1:
                    scored = [self._post(client, c) for c in chunks]
                else:
                    with ThreadPoolExecutor(max_workers=self.max_in_flight) as pool:
                        scored = list(pool.map(lambda c: self._post(client, c), chunks))
            for chunk, scores in zip(chunks, scored):
                for text, s in zip(chunk, scores):
                    if self.cache is not None:
                        self.cache.put(text, s)
                    for i in todo[text]:
                        results[i] = s
        return results


def remote_score(texts: Sequence[str], endpoint: str, timeout: int = 5000, **kwargs) -> list[float]:
    """Score ``texts`` with the remote service; ``timeout`` is in milliseconds."""
    return RemoteScorer(endpoint, timeout_ms=timeout, **kwargs).score(texts)


@dataclass
class ProviderConfig:
    kind: str = "lexicon"
    endpoint: str | None = None
    timeout_ms: int = 5000
    retries: int = 2
    fallback: bool = True
    lexicon: str | None = None
    cache: str | None = None
    batch_size: int = 64
    max_in_flight: int = 4
    backoff_s: float = 0.2

    def __post_init__(self):
        if self.kind not in ("lexicon", "remote"):
            raise InvalidConfig(f"provider.kind must be lexicon or remote, got {self.kind!r}")
        if self.timeout_ms <= 0 or self.retries < 0:
            raise InvalidConfig("provider.timeout_ms must be > 0 and provider.retries >= 0")


class Scorer:
    """Configured scorer: remote with optional lexicon fallback, or lexicon only."""

    def __init__(self, config: ProviderConfig | None = None, lexicon: Lexicon | None = None):
        self.config = config or ProviderConfig()
        if lexicon is None:
            lexicon = load_lexicon(self.config.lexicon) if self.config.lexicon else Lexicon.default()
        self.lexicon = lexicon
        self.remote = None
        if self.config.kind == "remote":
            endpoint = os.environ.get(PROVIDER_URL_ENV) or self.config.endpoint
            self.remote = RemoteScorer(
                endpoint, timeout_ms=self.config.timeout_ms, retries=self.config.retries,
                cache=ResponseCache(self.config.cache), batch_size=self.config.batch_size,
                max_in_flight=self.config.max_in_flight, backoff_s=self.config.backoff_s,
            )

    def score(self, texts: Sequence[str]) -> list[float]:
        if self.remote is None:
            return [lexicon_score(t, self.lexicon) for t in texts]
        try:
            return self.remote.score(texts)
        except ProviderError as exc:
            if not self.config.fallback:
                raise ProviderUnavailable(f"remote scorer failed: {exc}") from exc
            log.warning("remote scorer failed (%s); falling back to the lexicon scorer", exc)
            return [lexicon_score(t, self.lexicon) for t in texts]


def score_batch(batch: TextBatch, scorer: Scorer, weights: SourceWeights | None = None) -> list[SentimentObservation]:
    """One observation per batch item, in input order."""
    weights = weights if weights is not None else SourceWeights()
    scores = scorer.score([text for _, text in batch.items])
    return [
        SentimentObservation(score=s, weight=weights[source], source=source, day=batch.day)
        for (source, _), s in zip(batch.items, scores)
    ]


def load_texts(path) -> list[TextBatch]:
    """Read a ``day,source,text`` CSV into per-day batches, ordered by day."""
    by_day: dict[int, list] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["day", "source", "text"]:
            raise ParseError("expected header day,source,text", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ParseError(f"expected 3 fields, got {len(row)}", line=lineno)
            try:
                day = int(row[0])
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
            source = row[1].strip()
            if source not in SOURCES:
                raise ParseError(f"unknown source {source!r}", line=lineno)
            by_day.setdefault(day, []).append((source, row[2]))
    return [TextBatch(day, tuple(items)) for day, items in sorted(by_day.items())]


def score_texts(batches: Sequence[TextBatch], scorer: Scorer, weights: SourceWeights | None = None) -> list[SentimentObservation]:
    """Score every batch with a single scorer call (one remote round per chunk)."""
    weights = weights if weights is not None else SourceWeights()
    flat = [(b.day, source, text) for b in batches for source, text in b.items]
    if not flat:
        return []
    scores = scorer.score([text for _, _, text in flat])
    return [
        SentimentObservation(score=s, weight=weights[source], source=source, day=day)
        for (day, source, _), s in zip(flat, scores)
    ]
