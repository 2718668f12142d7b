"""Chat-completion backends (live endpoint + scripted mock) and prompt templates.

The mock backend replays a stage-tagged playbook, which makes every
pipeline run fully deterministic and testable offline. The live backend
speaks the common JSON chat-completions convention.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import requests

from .errors import (
    AuthFailure,
    BackendUnavailable,
    PlaybookExhausted,
    UnboundPlaceholder,
    UnknownTemplate,
)

STAGE_TAGS = (
    "perception_teacher",
    "perception_student",
    "generation",
    "reflection_critic",
    "reflection_refiner",
    "judge",
)

# Deterministic-leaning defaults: analysis and judging stages at 0,
# generative stages slightly warmer.
DEFAULT_TEMPERATURES = {
    "perception_teacher": 0.0,
    "perception_student": 0.0,
    "generation": 0.3,
    "reflection_critic": 0.0,
    "reflection_refiner": 0.3,
    "judge": 0.0,
}

DEFAULT_MAX_TOKENS = 2048

ENV_LLM_BASE_URL = "MOLLY_LLM_BASE_URL"
ENV_LLM_API_KEY = "MOLLY_LLM_API_KEY"
ENV_LLM_MODEL = "MOLLY_LLM_MODEL"

_TEMPLATE_DIR = Path(__file__).parent / "templates"
_PLACEHOLDER_RE = re.compile(r"\{([A-Za-z_][A-Za-z0-9_]*)\}")

ROLES = ("system", "user", "assistant")


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")
        if not self.content:
            raise ValueError("message content must be non-empty")


@dataclass(frozen=True)
class CompletionRequest:
    messages: tuple[ChatMessage, ...]
    stage_tag: str
    temperature: float | None = None
    max_tokens: int = DEFAULT_MAX_TOKENS

    def __post_init__(self) -> None:
        if self.stage_tag not in STAGE_TAGS:
            raise ValueError(f"unknown stage tag {self.stage_tag!r}")
        system_count = sum(1 for m in self.messages if m.role == "system")
        if system_count != 1 or not self.messages or self.messages[0].role != "system":
            raise ValueError("messages must start with exactly one system message")
        if self.temperature is not None and self.temperature < 0:
            raise ValueError("temperature must be >= 0")

    @property
    def effective_temperature(self) -> float:
        if self.temperature is not None:
            return self.temperature
        return DEFAULT_TEMPERATURES[self.stage_tag]

    def digest(self) -> str:
        canonical = json.dumps(
            {
                "stage_tag": self.stage_tag,
                "temperature": self.effective_temperature,
                "max_tokens": self.max_tokens,
                "messages": [[m.role, m.content] for m in self.messages],
            },
            ensure_ascii=False,
            sort_keys=True,
        )
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class CallRecord:
    stage_tag: str
    digest: str
    response: str

    def to_dict(self) -> dict:
        return {"stage_tag": self.stage_tag, "digest": self.digest, "response": self.response}


def simple_request(stage_tag: str, system: str, user: str, **kwargs) -> CompletionRequest:
    return CompletionRequest(
        messages=(ChatMessage("system", system), ChatMessage("user", user)),
        stage_tag=stage_tag,
        **kwargs,
    )


def render_prompt(
    template_name: str,
    variables: dict[str, str],
    templates_dir: str | Path | None = None,
) -> str:
    """Substitute {name} placeholders; an unbound placeholder is an error.

    Templates are re-read on every call so edits take effect immediately
    during development.
    """
    directory = Path(templates_dir) if templates_dir is not None else _TEMPLATE_DIR
    path = directory / f"{template_name}.txt"
    if not path.is_file():
        raise UnknownTemplate(template_name)
    template = path.read_text(encoding="utf-8")
    if template.endswith("\n"):
        template = template[:-1]

    def _substitute(match: re.Match) -> str:
        name = match.group(1)
        if name not in variables:
            raise UnboundPlaceholder(name)
        return str(variables[name])

    return _PLACEHOLDER_RE.sub(_substitute, template)


class Playbook:
    """Ordered canned responses keyed by stage tag."""

    def __init__(self, records: list[tuple[str, str]]):
        self._queues: dict[str, deque[str]] = {}
        for stage_tag, response in records:
            if stage_tag not in STAGE_TAGS:
                raise ValueError(f"unknown stage tag {stage_tag!r} in playbook")
            self._queues.setdefault(stage_tag, deque()).append(response)

    @classmethod
    def from_file(cls, path: str | Path) -> "Playbook":
        records: list[tuple[str, str]] = []
        with open(path, encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                records.append((record["stage_tag"], record["response"]))
        return cls(records)

    def next_response(self, stage_tag: str) -> str:
        queue = self._queues.get(stage_tag)
        if not queue:
            raise PlaybookExhausted(stage_tag)
        return queue.popleft()

    def remaining(self, stage_tag: str) -> int:
        return len(self._queues.get(stage_tag, ()))


class MockBackend:
    """Deterministic backend: complete() pops the next scripted response."""

    def __init__(self, playbook: Playbook):
        self.playbook = playbook
        self.call_log: list[CallRecord] = []
        self._lock = threading.Lock()

    def complete(self, request: CompletionRequest) -> str:
        with self._lock:
            response = self.playbook.next_response(request.stage_tag)
            self.call_log.append(CallRecord(request.stage_tag, request.digest(), response))
        return response


class LiveBackend:
    """Client for a chat-completions endpoint, with bounded retries."""

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: str | None = None,
        timeout: float = 60.0,
        max_attempts: int = 3,
        sleeper: Callable[[float], None] = time.sleep,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = api_key
        self.timeout = timeout
        self.max_attempts = max_attempts
        self._sleep = sleeper
        self.call_log: list[CallRecord] = []
        self._lock = threading.Lock()

    @classmethod
    def from_env(cls, env: dict | None = None, model: str | None = None) -> "LiveBackend":
        env = env if env is not None else dict(os.environ)
        base_url = env.get(ENV_LLM_BASE_URL)
        if not base_url:
            raise BackendUnavailable(f"{ENV_LLM_BASE_URL} is not set")
        model = model or env.get(ENV_LLM_MODEL)
        if not model:
            raise BackendUnavailable(f"{ENV_LLM_MODEL} is not set and no model was given")
        return cls(base_url, model, api_key=env.get(ENV_LLM_API_KEY))

    def complete(self, request: CompletionRequest) -> str:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = {
            "model": self.model,
            "messages": [{"role": m.role, "content": m.content} for m in request.messages],
            "temperature": request.effective_temperature,
            "max_tokens": request.max_tokens,
        }
        last_error = "no attempt made"
        for attempt in range(self.max_attempts):
            try:
                response = requests.post(
                    f"{self.base_url}/chat/completions",
                    json=payload,
                    headers=headers,
                    timeout=self.timeout,
                )
            except requests.RequestException as exc:
                last_error = str(exc)
            else:
                if response.status_code in (401, 403):
                    raise AuthFailure(response.status_code, response.text[:200])
                if response.status_code >= 500:
                    last_error = f"server error {response.status_code}"
                elif response.status_code >= 400:
                    raise BackendUnavailable(
                        f"request rejected ({response.status_code}): {response.text[:200]}"
                    )
                else:
                    text = response.json()["choices"][0]["message"]["content"]
                    with self._lock:
                        self.call_log.append(CallRecord(request.stage_tag, request.digest(), text))
                    return text
            if attempt + 1 < self.max_attempts:
                self._sleep(0.5 * 2**attempt)
        raise BackendUnavailable(last_error)
