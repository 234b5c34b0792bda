"""Zero-shot chat-endpoint classification harness."""

from .endpoint import ChatExchange, EndpointConfig, RemoteEndpoint, classify_remote
from .experiment import BatchFailure, run_experiment
from .mock import MockChatEndpoint, MockFault, parse_mock_spec
from .parsing import ParsedLabels, label_lookup, load_aliases, parse_labels
from .prompts import (
    BRACKETED_INSTRUCTION,
    PLAIN_INSTRUCTION,
    PromptTemplate,
    college_lines,
    render_preamble,
    render_prompt,
)
from .sampling import SampleBatch, SampledDocument, draw_samples

__all__ = [
    "ChatExchange",
    "EndpointConfig",
    "RemoteEndpoint",
    "classify_remote",
    "BatchFailure",
    "run_experiment",
    "MockChatEndpoint",
    "MockFault",
    "parse_mock_spec",
    "ParsedLabels",
    "parse_labels",
    "label_lookup",
    "load_aliases",
    "PromptTemplate",
    "PLAIN_INSTRUCTION",
    "BRACKETED_INSTRUCTION",
    "college_lines",
    "render_preamble",
    "render_prompt",
    "SampleBatch",
    "SampledDocument",
    "draw_samples",
]
