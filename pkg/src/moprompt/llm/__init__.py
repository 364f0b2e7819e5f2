from .mock import ConstantProvider, LabelOracle, MockGenerator, mock_provider
from .operators import (
    EmptyOffspringError,
    OperatorError,
    OperatorTransportError,
    Prompt,
    clean_reply,
    crossover_request,
    ga_llm,
    generate_initial_population,
    mutate_only,
    mutation_request,
    seed_request,
)
from .providers import (
    ChatRequest,
    CompletionProvider,
    EmptyReplyError,
    ProviderClient,
    ProviderError,
    RateLimitError,
    RetryPolicy,
    Transcript,
    TransportError,
)
