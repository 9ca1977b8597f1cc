"""Line-oriented event log over the simulator's logical clock."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Event:
    time: int
    category: str
    subject: str
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.time} {self.category} {self.subject} {self.detail}".rstrip()


class EventLog:
    def __init__(self, env):
        self.env = env
        self.events: list[Event] = []

    def emit(self, category: str, subject, detail: str = "") -> Event:
        subject = str(subject) if subject not in (None, "") else "-"
        event = Event(int(self.env.now), category, subject.replace(" ", "_"), detail)
        self.events.append(event)
        return event

    def select(self, category=None, subject=None, contains=None) -> list[Event]:
        out = []
        for e in self.events:
            if category is not None and e.category != category:
                continue
            if subject is not None and e.subject != str(subject):
                continue
            if contains is not None and contains not in e.detail:
                continue
            out.append(e)
        return out

    def index(self, event: Event) -> int:
        return next(i for i, e in enumerate(self.events) if e is event)

    def text(self) -> str:
        return "".join(f"{e}\n" for e in self.events)

    def __len__(self) -> int:
        return len(self.events)
