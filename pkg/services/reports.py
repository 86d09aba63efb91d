"""
Run reports - what every command prints, as text or JSON
"""

import json
import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

from models.optimizer import OptimizationResult

logger = logging.getLogger(__name__)

VARIABLE_FIELDS = ("wall_time",)


@dataclass
class RunReport:
    command: str
    inputs_digest: str = ""
    seed: Optional[int] = None
    value: Optional[float] = None
    values: Dict[str, Any] = field(default_factory=dict)
    bound_kind: Optional[str] = None
    probe: Optional[List[List[float]]] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    lines: List[str] = field(default_factory=list)
    passed: bool = True
    wall_time: float = 0.0

    @classmethod
    def from_optimization(cls, command: str, result: OptimizationResult, **kwargs) -> "RunReport":
        report = cls(
            command=command,
            value=result.value,
            bound_kind=result.bound_kind,
            probe=result.probe.to_list() if result.probe is not None else None,
            diagnostics=result.diagnostics(),
            **kwargs,
        )
        if result.prior is not None:
            report.values["prior"] = list(result.prior)
        return report

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls(**json.loads(text))

    def stable_dict(self) -> dict:
        """Report contents that must repeat exactly for the same command and seed"""
        return {k: v for k, v in self.to_dict().items() if k not in VARIABLE_FIELDS}

    def to_text(self) -> str:
        out = []
        if self.value is not None:
            suffix = f" ({self.bound_kind} bound)" if self.bound_kind in ("lower", "upper") else ""
            out.append(f"{self.value:.6f}{suffix}")
        for key, value in self.values.items():
            out.append(f"{key}: {_format_value(value)}")
        out.extend(self.lines)
        if self.diagnostics:
            summary = ", ".join(
                f"{k}={v}" for k, v in self.diagnostics.items() if not isinstance(v, (list, dict))
            )
            if summary:
                out.append(f"diagnostics: {summary}")
        if self.seed is not None:
            out.append(f"seed: {self.seed}")
        out.append(f"wall time: {self.wall_time:.3f}s")
        return "\n".join(out)


def _format_value(value) -> str:
    if isinstance(value, float):
        return f"{value:.6f}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_format_value(v) for v in value) + "]"
    return str(value)
