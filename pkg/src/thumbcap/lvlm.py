"""HTTP client for a vision-language caption endpoint, plus a file-backed mock.

Wire contract: POST {base_url}/generate with a JSON body {model, prompt,
max_tokens, temperature, image_url | image_b64}; the endpoint answers
{"text": "..."}. Transient failures (connection errors, 429, 5xx) are retried
with exponential backoff; a Retry-After header on 429 overrides the computed
delay. Exhausting attempts raises RateLimited when the last failure was a 429
and EndpointUnreachable otherwise.
"""
from __future__ import annotations

import base64
import logging
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, List, Optional, Sequence

import requests

from .errors import EndpointUnreachable, MalformedId, MalformedResponse, RateLimited
from .parsing import ParsedGeneration, parse_sections, to_caption_record
from .prompts import DEFAULT_TEMPLATE, PromptTemplate, render_prompt, render_tag_prompt
from .records import CaptionRecord, is_valid_youtube_id

log = logging.getLogger(__name__)

THUMBNAIL_URL_FORMAT = "https://img.youtube.com/vi/{youtube_id}/hqdefault.jpg"
WATCH_URL_FORMAT = "https://www.youtube.com/watch?v={youtube_id}"

_ID_IN_URL = re.compile(r"/vi/([A-Za-z0-9_-]{11})/")


def thumbnail_url(youtube_id: str) -> str:
    if not is_valid_youtube_id(youtube_id):
        raise MalformedId(f"not an 11-char video id: {youtube_id!r}")
    return THUMBNAIL_URL_FORMAT.format(youtube_id=youtube_id)


def watch_url(youtube_id: str) -> str:
    if not is_valid_youtube_id(youtube_id):
        raise MalformedId(f"not an 11-char video id: {youtube_id!r}")
    return WATCH_URL_FORMAT.format(youtube_id=youtube_id)


@dataclass(frozen=True)
class GenerationRequest:
    prompt: str
    model_id: str = "llava-v1.5-13b"
    image_url: Optional[str] = None
    image_payload: Optional[bytes] = None
    max_tokens: int = 512
    temperature: float = 0.2

    def __post_init__(self):
        have_url = self.image_url is not None
        have_payload = self.image_payload is not None
        if have_url == have_payload:
            raise ValueError("exactly one of image_url/image_payload is required")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")
        if not self.prompt.strip():
            raise ValueError("prompt must be non-empty")

    def body(self) -> dict:
        out = {
            "model": self.model_id,
            "prompt": self.prompt,
            "max_tokens": self.max_tokens,
            "temperature": self.temperature,
        }
        if self.image_url is not None:
            out["image_url"] = self.image_url
        else:
            out["image_b64"] = base64.b64encode(self.image_payload).decode("ascii")
        return out


def text_request(prompt: str, model_id: str = "gpt-3.5-turbo",
                 max_tokens: int = 512, temperature: float = 0.2) -> GenerationRequest:
    """Text-only request; the image slot carries an empty sentinel payload."""
    return GenerationRequest(prompt=prompt, model_id=model_id, image_payload=b"",
                             max_tokens=max_tokens, temperature=temperature)


@dataclass
class ClientConfig:
    base_url: str
    timeout: float = 60.0
    max_attempts: int = 4
    backoff_base: float = 0.5
    concurrency: int = 4

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        if self.concurrency < 1:
            raise ValueError("concurrency must be >= 1")
        self.base_url = self.base_url.rstrip("/")


class LVLMClient:
    """Blocking client with bounded retries. Safe for concurrent use."""

    def __init__(self, config: ClientConfig,
                 session: Optional[requests.Session] = None,
                 sleep: Callable[[float], None] = time.sleep):
        self.config = config
        self._session = session or requests.Session()
        self._sleep = sleep

    def generate(self, request: GenerationRequest) -> str:
        cfg = self.config
        url = f"{cfg.base_url}/generate"
        last_failure = "no attempt made"
        last_retry_after: Optional[float] = None
        last_was_429 = False
        for attempt in range(cfg.max_attempts):
            if attempt:
                delay = last_retry_after
                if delay is None:
                    delay = cfg.backoff_base * (2.0 ** (attempt - 1))
                if delay > 0:
                    self._sleep(delay)
            t0 = time.time()
            try:
                resp = self._session.post(url, json=request.body(), timeout=cfg.timeout)
            except requests.RequestException as exc:
                last_failure = f"connection error: {exc}"
                last_was_429 = False
                last_retry_after = None
                log.warning("attempt %d/%d failed: %s", attempt + 1, cfg.max_attempts, exc)
                continue
            elapsed = time.time() - t0
            log.info("POST %s -> %d in %.3fs", url, resp.status_code, elapsed)
            if resp.status_code == 200:
                return _extract_text(resp)
            if resp.status_code == 429:
                last_was_429 = True
                last_retry_after = _parse_retry_after(resp.headers.get("Retry-After"))
                last_failure = "HTTP 429"
                continue
            if 500 <= resp.status_code < 600:
                last_was_429 = False
                last_retry_after = None
                last_failure = f"HTTP {resp.status_code}"
                continue
            # non-retryable status: report the body for diagnosis
            raise MalformedResponse(
                f"HTTP {resp.status_code} from endpoint: {resp.text[:200]}")
        if last_was_429:
            raise RateLimited(last_retry_after)
        raise EndpointUnreachable(
            f"gave up after {cfg.max_attempts} attempts ({last_failure})")

    def generate_many(self, requests_: Sequence[GenerationRequest]) -> List[str]:
        """Run requests with bounded concurrency, results in input order."""
        if not requests_:
            return []
        with ThreadPoolExecutor(max_workers=self.config.concurrency) as pool:
            return list(pool.map(self.generate, requests_))


def _parse_retry_after(value: Optional[str]) -> Optional[float]:
    if value is None:
        return None
    try:
        parsed = float(value)
    except ValueError:
        return None
    return max(parsed, 0.0)


def _extract_text(resp) -> str:
    try:
        payload = resp.json()
    except ValueError as exc:
        raise MalformedResponse(f"response body is not JSON: {exc}") from exc
    if not isinstance(payload, dict) or not isinstance(payload.get("text"), str):
        raise MalformedResponse("response JSON lacks a string 'text' field")
    return payload["text"]


class MockClient:
    """Serves canned generations from a fixtures directory.

    The video id is recovered from the request's image URL; {id}.txt wins,
    default.txt is the fallback. Implements the same generate/generate_many
    surface as LVLMClient so callers cannot tell the difference.
    """

    def __init__(self, fixtures_dir):
        self.fixtures_dir = Path(fixtures_dir)
        if not self.fixtures_dir.is_dir():
            raise EndpointUnreachable(f"mock fixtures dir not found: {fixtures_dir}")

    def generate(self, request: GenerationRequest) -> str:
        names = ["default.txt"]
        if request.image_url:
            m = _ID_IN_URL.search(request.image_url)
            if m:
                names.insert(0, f"{m.group(1)}.txt")
        for name in names:
            path = self.fixtures_dir / name
            if path.is_file():
                return path.read_text(encoding="utf-8")
        raise EndpointUnreachable(
            f"mock has no fixture for {names[0]} and no default.txt")

    def generate_many(self, requests_: Sequence[GenerationRequest]) -> List[str]:
        return [self.generate(r) for r in requests_]


def caption_request(youtube_id: str, template: PromptTemplate = DEFAULT_TEMPLATE,
                    model_id: str = "llava-v1.5-13b") -> GenerationRequest:
    return GenerationRequest(prompt=render_prompt(template), model_id=model_id,
                             image_url=thumbnail_url(youtube_id))


def generate_caption_record(client, youtube_id: str, genre: str,
                            template: PromptTemplate = DEFAULT_TEMPLATE) -> CaptionRecord:
    """Thumbnail prompt -> endpoint -> parsed sections -> validated record."""
    raw = client.generate(caption_request(youtube_id, template))
    parsed = parse_sections(raw)
    return to_caption_record(parsed, youtube_id=youtube_id,
                             url=watch_url(youtube_id), genre=genre)


def generate_baseline_from_tags(tags: Sequence[str], client,
                                model_id: str = "gpt-3.5-turbo") -> str:
    """Text-only baseline: caption from a tag list, same client contract."""
    return client.generate(text_request(render_tag_prompt(tags), model_id=model_id))
