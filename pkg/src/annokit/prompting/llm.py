"""Completion-API client with bounded retries, plus completion tag parsing.

The API contract is the common "prompt in, text out" POST shape with
bearer-token auth; endpoint and model name live entirely in config.
"""

from __future__ import annotations

import json
import os
import re
import time
from dataclasses import dataclass

import httpx

from .fewshot import PromptError


class ContextLengthExceeded(PromptError):
    pass


class ApiError(PromptError):
    def __init__(self, status: int, detail: str = ""):
        super().__init__(f"completion API returned {status}: {detail[:200]}")
        self.status = status


class ApiTimeout(PromptError):
    pass


@dataclass
class ApiConfig:
    endpoint: str
    model: str
    max_tokens: int = 256
    temperature: float = 0.0
    context_char_limit: int = 12000
    api_key_env: str = "ANNOKIT_API_KEY"
    max_attempts: int = 3
    backoff_s: float = 0.2
    timeout_s: float = 30.0


@dataclass
class PromptConfig:
    n_examples: int = 5
    strategy: str = "random"  # or "similar"
    seed: int = 0
    task_name: str = "tags"
    max_sentence_tokens: int | None = None
    api: ApiConfig | None = None


_RETRYABLE = {429, 500, 502, 503, 504}


class CompletionClient:
    """query(prompt) -> completion text, with retries and NDJSON audit logging."""

    def __init__(self, api: ApiConfig, transport: httpx.BaseTransport | None = None,
                 audit_path: str | None = None, sleep=time.sleep):
        self.api = api
        self.audit_path = audit_path
        self.last_retries = 0
        self._sleep = sleep
        self._client = httpx.Client(transport=transport, timeout=api.timeout_s)

    def close(self) -> None:
        self._client.close()

    def query(self, prompt: str) -> str:
        if len(prompt) > self.api.context_char_limit:
            raise ContextLengthExceeded(
                f"prompt is {len(prompt)} chars, limit {self.api.context_char_limit}"
            )
        headers = {}
        key = os.environ.get(self.api.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        body = {
            "model": self.api.model,
            "prompt": prompt,
            "max_tokens": self.api.max_tokens,
            "temperature": self.api.temperature,
        }
        self.last_retries = 0
        last_error: PromptError | None = None
        for attempt in range(self.api.max_attempts):
            if attempt:
                self._sleep(self.api.backoff_s * 2 ** (attempt - 1))
                self.last_retries += 1
            try:
                response = self._client.post(self.api.endpoint, json=body, headers=headers)
            except httpx.TimeoutException as e:
                last_error = ApiTimeout(str(e))
                continue
            if response.status_code in _RETRYABLE:
                last_error = ApiError(response.status_code, response.text)
                continue
            if response.status_code != 200:
                raise ApiError(response.status_code, response.text)
            completion = self._extract_text(response)
            self._audit(prompt, completion, response.status_code)
            return completion
        assert last_error is not None
        raise last_error

    @staticmethod
    def _extract_text(response: httpx.Response) -> str:
        obj = response.json()
        choices = obj.get("choices")
        if isinstance(choices, list) and choices:
            return choices[0].get("text", "")
        return obj.get("text", "")

    def _audit(self, prompt: str, completion: str, status: int) -> None:
        if not self.audit_path:
            return
        record = {
            "ts_ms": int(time.time() * 1000),
            "model": self.api.model,
            "status": status,
            "retries": self.last_retries,
            "prompt_chars": len(prompt),
            "prompt": prompt,
            "completion": completion,
        }
        with open(self.audit_path, "a", encoding="utf-8") as f:
            f.write(json.dumps(record, ensure_ascii=False) + "\n")


_QUOTED_RUN = re.compile(r"``\s*(.*?)\s*''|\"(.*?)\"|`(.*?)`", re.DOTALL)


def parse_tags(completion: str, expected_len: int) -> tuple[list[str], bool]:
    """Tag sequence of exactly expected_len, plus a length-mismatch flag.

    Takes the first quoted/backticked token run when present, otherwise the
    whitespace-split completion; truncates or right-pads with "O". Unknown
    tags pass through for the evaluator to score as wrong.
    """
    match = _QUOTED_RUN.search(completion)
    if match:
        text = next(g for g in match.groups() if g is not None)
    else:
        text = completion
    tags = text.split()
    mismatch = len(tags) != expected_len
    if len(tags) > expected_len:
        tags = tags[:expected_len]
    else:
        tags = tags + ["O"] * (expected_len - len(tags))
    return tags, mismatch
