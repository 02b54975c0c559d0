"""Keyword-based curation of a motion library.

A clip is retained iff its free-text description matches at least one
include keyword and no exclude keyword. Matching is case-insensitive
substring matching, so "walk" matches "walking" (and "box" matches
"boxing" — the lists are applied literally).
"""

from __future__ import annotations

from dataclasses import dataclass, field

# Default keyword lists. Note "strech" is intentional.
INCLUDE_KEYWORDS = [
    "walk", "navigate", "basketball", "dance", "punch", "fight", "push",
    "pull", "throw", "catch", "crawl", "wave", "high five", "hug", "drink",
    "wash", "signal", "balance", "strech", "leg", "bend", "squat", "traffic",
    "high-five", "low-five",
]

EXCLUDE_KEYWORDS = [
    "ladder", "suitcase", "uneven", "terrain", "stair", "stairway",
    "stairwell", "clean", "box", "climb", "backflip", "handstand", "sit",
    "hang",
]


@dataclass
class CurationDecision:
    clip_id: str
    included: bool
    matched_include: list[str]
    matched_exclude: list[str]

    def to_dict(self) -> dict:
        return {
            "clip_id": self.clip_id,
            "included": self.included,
            "matched_include": self.matched_include,
            "matched_exclude": self.matched_exclude,
        }


@dataclass
class MotionLibrary:
    """Read-only mapping of clip id to clip (raw or retargeted) plus curation report."""

    clips: dict[str, object] = field(default_factory=dict)
    report: dict[str, CurationDecision] = field(default_factory=dict)

    def __post_init__(self):
        for clip_id, clip in self.clips.items():
            if clip.meta.id != clip_id:
                raise ValueError(f"clip keyed {clip_id!r} carries meta id {clip.meta.id!r}")

    def __len__(self) -> int:
        return len(self.clips)

    def ids(self) -> list[str]:
        return list(self.clips)

    @staticmethod
    def from_clips(clips) -> "MotionLibrary":
        lib = MotionLibrary()
        for clip in clips:
            if clip.meta.id in lib.clips:
                raise ValueError(f"duplicate clip id {clip.meta.id!r}")
            lib.clips[clip.meta.id] = clip
        return lib


def match_keywords(description: str, keywords: list[str]) -> list[str]:
    text = description.lower()
    return [kw for kw in keywords if kw in text]


def decide(clip_id: str, description: str, include: list[str], exclude: list[str]) -> CurationDecision:
    inc = match_keywords(description, include)
    exc = match_keywords(description, exclude)
    return CurationDecision(clip_id, included=bool(inc) and not exc, matched_include=inc, matched_exclude=exc)


def curate(
    library: MotionLibrary,
    include: list[str] | None = None,
    exclude: list[str] | None = None,
) -> MotionLibrary:
    """Filter ``library`` by description keywords; the report covers every input clip."""
    include = INCLUDE_KEYWORDS if include is None else [kw.lower() for kw in include]
    exclude = EXCLUDE_KEYWORDS if exclude is None else [kw.lower() for kw in exclude]
    out = MotionLibrary()
    for clip_id, clip in library.clips.items():
        decision = decide(clip_id, clip.meta.description, include, exclude)
        out.report[clip_id] = decision
        if decision.included:
            out.clips[clip_id] = clip
    return out
