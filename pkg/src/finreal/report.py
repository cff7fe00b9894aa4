"""Check reports shared by validators, lemma suites and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class CheckResult:
    tag: str
    ok: bool
    witness: tuple | None = None
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        extra = ""
        if not self.ok and self.witness is not None:
            extra = f" witness={self.witness!r}"
        if self.detail:
            extra += f" ({self.detail})"
        return f"{status} {self.tag}{extra}"


@dataclass(frozen=True)
class Report:
    results: tuple[CheckResult, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def lines(self) -> list[str]:
        return [r.line() for r in self.results]

    def failures(self) -> tuple[CheckResult, ...]:
        return tuple(r for r in self.results if not r.ok)

    def __add__(self, other: "Report") -> "Report":
        return Report(self.results + other.results)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [
                {
                    "tag": r.tag,
                    "ok": r.ok,
                    "witness": repr(r.witness) if r.witness is not None else None,
                    "detail": r.detail,
                }
                for r in self.results
            ],
        }


def check(tag: str, ok: bool, witness=None, detail: str = "") -> CheckResult:
    return CheckResult(tag, bool(ok), witness if not ok else None, detail)
