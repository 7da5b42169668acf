"""Suite configuration in a flat ``key = value`` text format.

Numbers that feed exact arithmetic are kept as decimal strings so they never
pass through a binary float.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .errors import ConfigInvalid
from .nilgroup import MAX_CLASS, MAX_DIM, MAX_RANK, witt_count
from .torus import parse_number

SUITES = ("algebra", "hallpetresco", "example41", "occupancy", "all")


@dataclass(frozen=True)
class SuiteConfig:
    suite: str = "all"
    seed: int = 20240601
    max_rank: int = 3
    max_class: int = 4
    hp_samples: int = 200
    dark_samples: int = 100
    bch_samples: int = 50
    truncation: int = 4
    nmax: int = 100
    occupancy_n: int = 1_000_000
    grid: int = 100
    alpha: str = "0.41421356237309504880"
    a: str = "0.86602540378443864676"
    dependent_a: str = "0.41421356237309504880"
    independent_min: str = "0.99"
    dependent_max: str = "0.1"
    out: str = "report.json"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.suite not in SUITES:
            raise ConfigInvalid(f"unknown suite {self.suite!r}; expected one of {', '.join(SUITES)}")
        if not 1 <= self.max_rank <= MAX_RANK:
            raise ConfigInvalid(f"max_rank must be in 1..{MAX_RANK}")
        if not 1 <= self.max_class <= MAX_CLASS:
            raise ConfigInvalid(f"max_class must be in 1..{MAX_CLASS}")
        if not 1 <= self.truncation <= 8:
            raise ConfigInvalid("truncation must be in 1..8")
        for name in ("hp_samples", "dark_samples", "bch_samples", "nmax"):
            if getattr(self, name) < 0:
                raise ConfigInvalid(f"{name} must be non-negative")
        if self.occupancy_n < 1:
            raise ConfigInvalid("occupancy_n must be at least 1")
        if self.grid < 2:
            raise ConfigInvalid("grid must be at least 2")
        for name in ("alpha", "a", "dependent_a", "independent_min", "dependent_max"):
            try:
                parse_number(getattr(self, name))
            except (ValueError, ZeroDivisionError) as exc:
                raise ConfigInvalid(f"{name}: {exc}") from None

    def free_shapes(self) -> list[tuple[int, int]]:
        """``(rank, class)`` pairs within the caps whose Hall basis fits ``MAX_DIM``."""
        out = []
        for r in range(min(2, self.max_rank), self.max_rank + 1):
            for s in range(min(2, self.max_class), self.max_class + 1):
                if sum(witt_count(r, k) for k in range(1, s + 1)) <= MAX_DIM:
                    out.append((r, s))
        return out

    def with_(self, **changes) -> SuiteConfig:
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_text(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in self.to_dict().items())

    @classmethod
    def from_text(cls, text: str) -> SuiteConfig:
        types = {f.name: f.type for f in fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigInvalid(f"line {lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in types:
                raise ConfigInvalid(f"line {lineno}: unknown key {key!r}")
            if types[key] == "int":
                try:
                    values[key] = int(value.replace("_", ""))
                except ValueError:
                    raise ConfigInvalid(f"line {lineno}: {key} must be an integer") from None
            else:
                values[key] = value
        return cls(**values)

    @classmethod
    def load(cls, path) -> SuiteConfig:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigInvalid(f"cannot read {path}: {exc}") from None
        return cls.from_text(text)

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())
