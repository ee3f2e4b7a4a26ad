"""Oracles answer preference queries; transcripts record and replay them.

An elicitation procedure only ever sees the `Oracle` interface, so the same
procedure runs unchanged against a simulated agent, a noise-wrapped simulated
agent, a recorded transcript, or a live human session. Every answered query
is appended to the oracle's transcript in order.
"""

from __future__ import annotations

import datetime as _dt
import queue
import random
import threading
from dataclasses import dataclass
from typing import Callable, Iterable

from .config import gamble_from_json, gamble_to_json
from .domain import Agent, Gamble, Labeled, Money, Outcome, SampleSpace
from .engine import Preference, compare
from .errors import (
    AnswerTimeoutError,
    QueryMismatchError,
    ReplayDivergenceError,
    SessionClosedError,
)


@dataclass(frozen=True)
class PreferenceQuery:
    """One two-alternative choice put to the answering agent."""

    id: int
    left: Gamble
    right: Gamble
    human_text: str = ""

    def payload(self) -> dict:
        return {
            "query_id": self.id,
            "left": gamble_to_json(self.left),
            "right": gamble_to_json(self.right),
            "human_text": self.human_text,
        }


@dataclass(frozen=True)
class TranscriptEntry:
    query: PreferenceQuery
    answer: Preference
    asked_at: str


def wall_clock() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat()


class LogicalClock:
    """Deterministic stand-in for the wall clock: epoch plus a tick counter.

    Used by seeded batch runs so that emitted transcripts are byte-identical
    across repetitions of the same configuration.
    """

    def __init__(self):
        self._tick = 0

    def __call__(self) -> str:
        t = _dt.datetime(1970, 1, 1, tzinfo=_dt.timezone.utc) + _dt.timedelta(
            seconds=self._tick
        )
        self._tick += 1
        return t.isoformat()


class Transcript:
    """Ordered, replayable record of queries and answers."""

    def __init__(
        self,
        metadata: dict | None = None,
        clock: Callable[[], str] | None = None,
        on_record: Callable[[TranscriptEntry], None] | None = None,
    ):
        self.entries: list[TranscriptEntry] = []
        self.metadata: dict = dict(metadata or {})
        self._clock = clock or wall_clock
        self.on_record = on_record

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def append(
        self, query: PreferenceQuery, answer: Preference, asked_at: str | None = None
    ) -> TranscriptEntry:
        entry = TranscriptEntry(query, answer, asked_at or self._clock())
        self.entries.append(entry)
        if self.on_record is not None:
            self.on_record(entry)
        return entry

    def to_jsonl(self) -> str:
        from .config import canonical_json

        return "".join(
            canonical_json(
                {
                    "id": e.query.id,
                    "left": gamble_to_json(e.query.left),
                    "right": gamble_to_json(e.query.right),
                    "answer": e.answer.value,
                    "t": e.asked_at,
                }
            )
            + "\n"
            for e in self.entries
        )

    @classmethod
    def from_jsonl(cls, text: str) -> "Transcript":
        tr = cls()
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            import json

            rec = json.loads(line)
            q = PreferenceQuery(
                int(rec["id"]),
                gamble_from_json(rec["left"]),
                gamble_from_json(rec["right"]),
            )
            tr.entries.append(TranscriptEntry(q, Preference(rec["answer"]), rec["t"]))
        return tr

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_jsonl())

    @classmethod
    def load(cls, path: str) -> "Transcript":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_jsonl(fh.read())


@dataclass(frozen=True)
class OracleStats:
    query_count: int
    repeats_used: int


# ---------------------------------------------------------------------------
# Rendering events and gambles for humans
# ---------------------------------------------------------------------------

def format_money(amount: float) -> str:
    return f"-${abs(amount):,.2f}" if amount < 0 else f"${amount:,.2f}"


def _format_outcome(o: Outcome) -> str:
    if isinstance(o, Money):
        return format_money(o.amount)
    assert isinstance(o, Labeled)
    return o.name


def _index_ranges(indices: list[int]) -> list[str]:
    parts: list[str] = []
    start = prev = indices[0]
    for i in indices[1:] + [None]:  # type: ignore[list-item]
        if i is not None and i == prev + 1:
            prev = i
            continue
        parts.append(str(start + 1) if start == prev else f"{start + 1}-{prev + 1}")
        if i is not None:
            start = prev = i
    return parts


def describe_event(space: SampleSpace, indices: list[int]) -> str:
    n = space.n_atoms
    if not indices:
        return "never"
    if len(indices) == n:
        return "no matter what"
    ranges = _index_ranges(indices)
    noun = "ticket" if len(indices) == 1 else "tickets"
    return f"{noun} {', '.join(ranges)} (of {n})"


def describe_gamble(space: SampleSpace, g: Gamble) -> str:
    if len(g.branches) == 1:
        return f"{_format_outcome(g.branches[0][1])} for sure"
    parts = []
    for event, outcome in g.branches:
        idx = event.sorted_indices()
        if not idx:
            continue
        if len(idx) == space.n_atoms:
            parts.append(f"{_format_outcome(outcome)} no matter what")
        else:
            parts.append(f"{_format_outcome(outcome)} if {describe_event(space, idx)} wins")
    return "; ".join(parts)


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------

class Oracle:
    """Serial question-answering interface with transcript recording.

    One oracle serves one procedure at a time; query ids are assigned
    sequentially by `new_query` and must be asked in order.
    """

    kind = "base"
    #: Live oracles render queries for humans; simulated ones skip the cost.
    renders_text = False

    def __init__(self, space: SampleSpace, transcript: Transcript | None = None):
        self.space = space
        self.transcript = transcript if transcript is not None else Transcript()
        self._repeats_used = 0

    @property
    def stats(self) -> OracleStats:
        return OracleStats(len(self.transcript), self._repeats_used)

    def new_query(self, left: Gamble, right: Gamble) -> PreferenceQuery:
        text = ""
        if self.renders_text:
            text = (
                f"(A) {describe_gamble(self.space, left)}   "
                f"(B) {describe_gamble(self.space, right)}"
            )
        return PreferenceQuery(len(self.transcript), left, right, text)

    def ask(self, q: PreferenceQuery) -> Preference:
        if q.id != len(self.transcript):
            raise QueryMismatchError(
                f"query id {q.id} out of order; expected {len(self.transcript)}"
            )
        answer, asked_at = self._answer(q)
        self.transcript.append(q, answer, asked_at)
        return answer

    def query(self, left: Gamble, right: Gamble) -> Preference:
        """Build the next query and ask it."""
        return self.ask(self.new_query(left, right))

    def _answer(self, q: PreferenceQuery) -> tuple[Preference, str | None]:
        raise NotImplementedError  # pragma: no cover


class SimulatedOracle(Oracle):
    """Answers from a known agent by exact risk-weighted comparison."""

    kind = "simulated"

    def __init__(
        self,
        agent: Agent,
        space: SampleSpace,
        tol: float = 1e-9,
        transcript: Transcript | None = None,
    ):
        super().__init__(space, transcript)
        self.agent = agent
        self.tol = tol

    def _answer(self, q: PreferenceQuery) -> tuple[Preference, str | None]:
        return compare(self.agent, q.left, q.right, self.tol, validate=False), None


class NoisyOracle(SimulatedOracle):
    """Simulated agent whose strict answers flip with probability `flip_prob`.

    Each strict query is answered 2*repeats + 1 times and resolved by
    majority; an indifferent answer is taken as-is (there is nothing to
    flip). `repeats_used` counts the extra elementary answers consumed.
    """

    kind = "noisy"

    def __init__(
        self,
        agent: Agent,
        space: SampleSpace,
        flip_prob: float,
        repeats: int = 2,
        seed: int = 0,
        tol: float = 1e-9,
        transcript: Transcript | None = None,
    ):
        super().__init__(agent, space, tol, transcript)
        if not 0.0 <= flip_prob < 0.5:
            raise ValueError("flip probability must be in [0, 0.5)")
        if repeats < 0:
            raise ValueError("repeats must be non-negative")
        self.flip_prob = flip_prob
        self.repeats = repeats
        self.rng = random.Random(seed)

    def _answer(self, q: PreferenceQuery) -> tuple[Preference, str | None]:
        truth, _ = super()._answer(q)
        if truth is Preference.INDIFFERENT or self.flip_prob == 0.0:
            return truth, None
        votes = 2 * self.repeats + 1
        self._repeats_used += votes - 1
        wrong = sum(self.rng.random() < self.flip_prob for _ in range(votes))
        return (truth.flipped() if wrong > votes // 2 else truth), None


class ReplayOracle(Oracle):
    """Feeds recorded answers back, checking each query against the record."""

    kind = "replay"

    def __init__(
        self,
        space: SampleSpace,
        recorded: Transcript,
        transcript: Transcript | None = None,
    ):
        super().__init__(space, transcript)
        self.recorded = recorded

    def _answer(self, q: PreferenceQuery) -> tuple[Preference, str | None]:
        step = len(self.transcript)
        if step >= len(self.recorded):
            raise ReplayDivergenceError(step, "recorded transcript exhausted")
        rec = self.recorded.entries[step]
        if rec.query.id != q.id:
            raise ReplayDivergenceError(
                step, f"query id {q.id} != recorded {rec.query.id}"
            )
        if rec.query.left != q.left or rec.query.right != q.right:
            raise ReplayDivergenceError(step, "query gambles differ from the record")
        return rec.answer, rec.asked_at


class SessionOracle(Oracle):
    """Blocks each `ask` until a human answer is submitted from outside.

    Used by the session service: the procedure runs in its own thread, the
    service thread calls `submit`. Optionally primed with already-recorded
    answers so an interrupted session resumes at its pending query.
    """

    kind = "session"
    renders_text = True

    def __init__(
        self,
        space: SampleSpace,
        transcript: Transcript | None = None,
        timeout: float | None = None,
        prefed: Iterable[tuple[Preference, str]] = (),
    ):
        super().__init__(space, transcript)
        self.timeout = timeout
        self._prefed = list(prefed)
        self._answers: queue.Queue[Preference] = queue.Queue()
        self._lock = threading.Lock()
        self._pending: PreferenceQuery | None = None
        self._closed = False
        self.on_pending: Callable[[PreferenceQuery], None] | None = None

    @property
    def pending(self) -> PreferenceQuery | None:
        with self._lock:
            return self._pending

    @property
    def replaying(self) -> bool:
        return bool(self._prefed)

    def submit(self, query_id: int, answer: Preference) -> None:
        with self._lock:
            if self._pending is None or self._pending.id != query_id:
                pending = "none" if self._pending is None else self._pending.id
                raise QueryMismatchError(
                    f"answer names query {query_id}, pending query is {pending}"
                )
            self._pending = None
        self._answers.put(answer)

    def close(self) -> None:
        self._closed = True
        self._answers.put(None)  # type: ignore[arg-type]

    def _answer(self, q: PreferenceQuery) -> tuple[Preference, str | None]:
        if self._prefed:
            answer, asked_at = self._prefed.pop(0)
            return answer, asked_at
        if self._closed:
            raise SessionClosedError("session closed")
        with self._lock:
            self._pending = q
        if self.on_pending is not None:
            self.on_pending(q)
        try:
            answer = self._answers.get(timeout=self.timeout)
        except queue.Empty:
            with self._lock:
                self._pending = None
            raise AnswerTimeoutError(
                f"no answer to query {q.id} within {self.timeout}s"
            ) from None
        if answer is None or self._closed:
            raise SessionClosedError("session closed while awaiting an answer")
        return answer, None
