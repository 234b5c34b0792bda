"""Prompt construction for the two zero-shot protocol variants.

plain: documents are bare comma-separated term lines and the endpoint
answers with one college name per line. bracketed: each document line
is wrapped in braces, and the endpoint echoes the line followed by
" - " and the college, which survives miscounting better in parsing.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..records import CollegeMapping
from .sampling import SampleBatch

VARIANTS = ("plain", "bracketed")

PLAIN_INSTRUCTION = (
    "You are a cataloger assigning metadata terms to documents. You will be "
    "provided an array containing lists of terms separated by commas, each line "
    "representing a list_of_terms or document to classify. Pick the college that "
    "seems most appropriate based on the terms in the list. Output a list of "
    "'labels' corresponding to the name of the college for each line.\n"
    "Choose from these colleges:"
)

BRACKETED_INSTRUCTION = (
    "You are a cataloger assigning metadata terms to documents. You will be "
    "provided a text, where each line represents a list of terms separated by "
    "commas, and each list of terms represents the document to classify. Each "
    "line is also delimited by brackets, starting with '{' and ending with '}'.\n"
    "Example:\n"
    "{term_1, term_2, ..., term_n}\n"
    "...\n"
    "{term_1, term_2, ..., term_m}\n"
    "Select the college that seems most appropriate based on the terms in the "
    "list. Output a plain text with a list of labels corresponding to the name "
    "of the college for each line. Print out the line that represents the "
    "original document ({term_1,...}) and next to it its corresponding label "
    "(college) separated by the token '-'. Make sure to remove leading and "
    "trailing whitespaces. Choose from these colleges (use department "
    "information only to choose college not as label):"
)


@dataclass(frozen=True)
class PromptTemplate:
    """Instruction text plus the rendered college list for one variant."""

    variant: str
    instruction: str
    college_list: tuple[str, ...] = ()

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")

    @classmethod
    def from_mapping(
        cls, variant: str, mapping: CollegeMapping, instruction: str | None = None
    ) -> "PromptTemplate":
        if instruction is None:
            instruction = PLAIN_INSTRUCTION if variant == "plain" else BRACKETED_INSTRUCTION
        return cls(variant=variant, instruction=instruction, college_list=college_lines(mapping))


def college_lines(mapping: CollegeMapping) -> tuple[str, ...]:
    """One line per college, departments attached, in mapping order."""
    return tuple(
        f"- {college}: {', '.join(departments)}"
        for college, departments in mapping.entries.items()
    )


def document_line(template: PromptTemplate, rendered: str) -> str:
    if template.variant == "bracketed":
        return "{" + rendered + "}"
    return rendered


def render_preamble(template: PromptTemplate, mapping: CollegeMapping) -> str:
    """Instruction plus college list plus a blank separator line."""
    return "\n".join([template.instruction, *college_lines(mapping), ""]) + "\n"


def render_prompt(template: PromptTemplate, batch: SampleBatch, mapping: CollegeMapping) -> str:
    """Full prompt text: preamble then one line per document in batch order.

    Pure function of its arguments; the output ends with a newline.
    """
    if not batch.documents:
        raise ValueError("batch has no documents")
    doc_lines = [document_line(template, doc.text.rendered) for doc in batch.documents]
    return render_preamble(template, mapping) + "\n".join(doc_lines) + "\n"
