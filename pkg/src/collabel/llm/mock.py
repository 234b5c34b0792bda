"""Deterministic stand-in for a chat endpoint, with optional fault injection.

The mock answers from a (document line -> true label) key, so a
fault-free run round-trips perfectly. Faults reproduce the failure
shapes real chatbots exhibit: spurious or dropped label lines, unknown
college names, and interspersed blank lines.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..records import CollegeMapping
from .endpoint import ChatExchange
from .prompts import PromptTemplate, render_preamble
from .sampling import SampleBatch

FAULT_KINDS = ("extra_labels", "drop_labels", "unknown_label", "blank_lines")

_EPOCH = "1970-01-01T00:00:00+00:00"


@dataclass(frozen=True)
class MockFault:
    """One deliberate defect, fired on the Nth submission (1-based)."""

    kind: str
    at_submission: int = 1
    count: int = 2
    label: str = "Hogwarts"

    def __post_init__(self):
        if self.kind not in FAULT_KINDS:
            raise ValueError(f"fault kind must be one of {FAULT_KINDS}, got {self.kind!r}")
        if self.at_submission < 1 or self.count < 1:
            raise ValueError("at_submission and count must be >= 1")


class MockChatEndpoint:
    """Answers prompts it can attribute to a known document set."""

    def __init__(
        self,
        template: PromptTemplate,
        mapping: CollegeMapping,
        answer_key: dict[str, str],
        model: str = "mock",
        faults: tuple[MockFault, ...] = (),
    ):
        self.template = template
        self.mapping = mapping
        self.answer_key = dict(answer_key)
        self.model = model
        self.faults = tuple(faults)
        self.submissions = 0

    @classmethod
    def for_batches(
        cls,
        template: PromptTemplate,
        mapping: CollegeMapping,
        batches: list[SampleBatch],
        model: str = "mock",
        faults: tuple[MockFault, ...] = (),
    ) -> "MockChatEndpoint":
        key = {
            doc.text.rendered: doc.true_label for batch in batches for doc in batch.documents
        }
        return cls(template, mapping, key, model=model, faults=faults)

    def submit(self, prompt: str) -> ChatExchange:
        self.submissions += 1
        preamble = render_preamble(self.template, self.mapping)
        if not prompt.startswith(preamble):
            raise ValueError("prompt does not carry the expected preamble")
        doc_lines = [line for line in prompt[len(preamble):].splitlines() if line.strip()]
        lines = [self._answer_line(line) for line in doc_lines]
        for fault in self.faults:
            if fault.at_submission == self.submissions:
                lines = self._apply_fault(fault, lines, doc_lines)
        return ChatExchange(
            request_text=prompt,
            raw_response="\n".join(lines) + "\n",
            endpoint="mock",
            latency_s=0.0,
            timestamp=_EPOCH,
            retries=0,
        )

    def _rendered(self, doc_line: str) -> str:
        if self.template.variant == "bracketed":
            if not (doc_line.startswith("{") and doc_line.endswith("}")):
                raise ValueError(f"malformed bracketed document line: {doc_line!r}")
            return doc_line[1:-1]
        return doc_line

    def _answer_line(self, doc_line: str) -> str:
        rendered = self._rendered(doc_line)
        try:
            label = self.answer_key[rendered]
        except KeyError:
            raise ValueError(f"document not in answer key: {rendered!r}") from None
        if self.template.variant == "bracketed":
            return "{" + rendered + "} - " + label
        return label

    def _apply_fault(self, fault: MockFault, lines: list[str], doc_lines: list[str]) -> list[str]:
        lines = list(lines)
        if fault.kind == "extra_labels":
            filler = self.mapping.colleges[0]
            for _ in range(fault.count):
                if self.template.variant == "bracketed":
                    lines.append("{spurious line} - " + filler)
                else:
                    lines.append(filler)
        elif fault.kind == "drop_labels":
            del lines[len(lines) - fault.count:]
        elif fault.kind == "unknown_label":
            rendered = self._rendered(doc_lines[-1])
            if self.template.variant == "bracketed":
                lines[-1] = "{" + rendered + "} - " + fault.label
            else:
                lines[-1] = fault.label
        elif fault.kind == "blank_lines":
            for i in range(fault.count):
                lines.insert(1 + i, "")
        return lines


_SPEC_RE = re.compile(r"^(?P<kind>[a-z]+)(?:=(?P<count>\d+))?(?:@(?P<sub>\d+))?$")

_SPEC_KINDS = {
    "extra": "extra_labels",
    "drop": "drop_labels",
    "unknown": "unknown_label",
    "blanks": "blank_lines",
}


def parse_mock_spec(spec: str) -> tuple[MockFault, ...]:
    """Faults encoded in an endpoint string such as ``mock:extra=2@1``.

    Grammar after the ``mock:`` prefix: ``perfect`` or comma-separated
    ``kind[=count][@submission]`` with kind in extra/drop/unknown/blanks.
    """
    if not spec.startswith("mock:"):
        raise ValueError(f"not a mock endpoint spec: {spec!r}")
    rest = spec[len("mock:"):]
    if rest == "perfect":
        return ()
    faults = []
    for part in rest.split(","):
        m = _SPEC_RE.match(part.strip())
        if not m or m.group("kind") not in _SPEC_KINDS:
            raise ValueError(f"bad mock fault {part!r} in {spec!r}")
        faults.append(
            MockFault(
                kind=_SPEC_KINDS[m.group("kind")],
                count=int(m.group("count") or 1),
                at_submission=int(m.group("sub") or 1),
            )
        )
    return tuple(faults)
