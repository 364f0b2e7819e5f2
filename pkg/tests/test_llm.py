import json
import random
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from moprompt.dataset import LabeledSample
from moprompt.llm import templates
from moprompt.llm.http import HTTPChatProvider, MissingAPIKeyError
from moprompt.llm.mock import (
    PHRASE_BANK,
    SYNONYMS,
    ConstantProvider,
    LabelOracle,
    MockGenerator,
    splice_halves,
    substitute_synonym,
)
from moprompt.llm.operators import (
    EmptyOffspringError,
    OperatorTransportError,
    Prompt,
    clean_reply,
    crossover_request,
    ga_llm,
    generate_initial_population,
    mutate_only,
    mutation_request,
)
from moprompt.llm.providers import (
    ChatRequest,
    EmptyReplyError,
    ProviderClient,
    ProviderError,
    RateLimitError,
    RetryPolicy,
    Transcript,
    TransportError,
)


class Scripted:
    """Replays a list of replies; exceptions in the list are raised."""

    provider_id = "scripted"

    def __init__(self, script):
        self.script = list(script)
        self.requests = []

    def complete(self, request):
        self.requests.append(request)
        item = self.script.pop(0)
        if isinstance(item, Exception):
            raise item
        return item


def no_sleep_client(provider, attempts=3):
    delays = []
    return ProviderClient(provider, RetryPolicy(attempts=attempts, base_delay=1.0, sleep=delays.append)), delays


A = Prompt("Classifique a resenha.", id="a")
B = Prompt("Diga se o texto é bom ou ruim.", id="b")


# templates

def test_fill_substitutes_once_without_escaping():
    out = templates.fill(templates.USER_MUTATION, prompt='diga "{prompt}" {x}')
    assert 'diga "{prompt}" {x}' in out
    assert out.count("{prompt}") == 1


def test_crossover_message_layout():
    req = crossover_request(A, B)
    assert req.system == templates.SYSTEM
    assert req.user.startswith('Prompt A: "Classifique a resenha."\nPrompt B: "Diga se o texto é bom ou ruim."\n')
    assert templates.CROSSOVER_MARKER in req.user


def test_mutation_message_layout():
    req = mutation_request(A)
    assert 'com precisão: "Classifique a resenha." A variação' in req.user
    assert [m["role"] for m in req.messages()] == ["system", "user"]


def test_request_digest_depends_on_content():
    assert mutation_request(A).digest() != mutation_request(B).digest()
    assert mutation_request(A).digest() == mutation_request(A).digest()


# prompts

def test_prompt_validation():
    with pytest.raises(ValueError):
        Prompt(" padded ")
    with pytest.raises(ValueError):
        Prompt("")
    with pytest.raises(ValueError):
        Prompt("x", operator_tag="ga_llm", parents=("a",))
    with pytest.raises(ValueError):
        Prompt("x", operator_tag="magic")


def test_prompt_roundtrip():
    p = Prompt("x y", id="g1-0", generation=1, parents=("a", "b"), operator_tag="ga_llm")
    assert Prompt.from_dict(p.to_dict()) == p


@pytest.mark.parametrize("raw,clean", [
    ('"Classifique."', "Classifique."),
    ("  «Diga.»  ", "Diga."),
    ("'positivo' ou 'negativo'", "'positivo' ou 'negativo'"),
    ('"\'Diga\'"', "Diga"),
    ("sem aspas", "sem aspas"),
    ('""', ""),
])
def test_clean_reply(raw, clean):
    assert clean_reply(raw) == clean


# operators

def test_ga_llm_two_calls_and_lineage():
    prov = Scripted(['"cruzado"', "mutado"])
    child = ga_llm(A, B, prov, id="g1-0", generation=1)
    assert child.text == "mutado" and child.parents == ("a", "b")
    assert child.operator_tag == "ga_llm" and child.id == "g1-0"
    assert len(prov.requests) == 2
    # the mutation sees the cleaned crossover text
    assert 'com precisão: "cruzado"' in prov.requests[1].user


def test_ga_llm_empty_reply():
    with pytest.raises(EmptyOffspringError) as err:
        ga_llm(A, B, Scripted(["   "]))
    assert err.value.parent_ids == ("a", "b")


def test_ga_llm_retries_transient_errors():
    prov = Scripted([TransportError("down"), "cruzado", RateLimitError("slow"), "mutado"])
    client, delays = no_sleep_client(prov)
    assert ga_llm(A, B, client).text == "mutado"
    assert client.calls == 2 and client.attempts == 4 and client.retries == 2
    assert delays == [1.0, 1.0]


def test_ga_llm_gives_up_after_retries():
    prov = Scripted([TransportError("down")] * 3)
    client, delays = no_sleep_client(prov)
    with pytest.raises(OperatorTransportError):
        ga_llm(A, B, client)
    assert delays == [1.0, 2.0] and client.failures == 1


def test_non_retryable_error_is_not_retried():
    prov = Scripted([ProviderError("401 unauthorized")])
    client, delays = no_sleep_client(prov)
    with pytest.raises(OperatorTransportError):
        ga_llm(A, B, client)
    assert delays == [] and client.attempts == 1


def test_client_rejects_blank_reply():
    client, _ = no_sleep_client(ConstantProvider("  "))
    with pytest.raises(EmptyReplyError):
        client.complete(mutation_request(A))


def test_mutate_only_single_call():
    prov = Scripted(["outra"])
    child = mutate_only(A, B, prov, id="c")
    assert child.text == "outra" and child.parents == ("a", "b") and len(prov.requests) == 1


def test_initial_population_deduplicates():
    prov = Scripted(["um", "um", "dois", "três"])
    seeds = generate_initial_population(3, prov)
    assert [s.text for s in seeds] == ["um", "dois", "três"]
    assert [s.id for s in seeds] == ["g0-0", "g0-1", "g0-2"]
    assert all(s.operator_tag == "seed" for s in seeds)


def test_transcript_records_each_attempt(tmp_path):
    path = tmp_path / "t.jsonl"
    prov = Scripted([TransportError("x"), "ok"])
    client = ProviderClient(prov, RetryPolicy(sleep=lambda s: None), Transcript(path))
    client.complete(mutation_request(A))
    lines = [json.loads(x) for x in path.read_text().splitlines()]
    assert len(lines) == 2
    assert "error" in lines[0] and lines[1]["reply"] == "ok"
    assert {"timestamp", "provider", "request_hash", "latency_ms"} <= set(lines[1])


def test_client_in_flight_cap():
    active, peak, lock = [0], [0], threading.Lock()
    gate = threading.Event()

    class Slow:
        provider_id = "slow"

        def complete(self, request):
            with lock:
                active[0] += 1
                peak[0] = max(peak[0], active[0])
            gate.wait(0.05)
            with lock:
                active[0] -= 1
            return "ok"

    client = ProviderClient(Slow(), max_in_flight=2)
    threads = [threading.Thread(target=client.complete, args=(mutation_request(A),)) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert peak[0] <= 2 and client.calls == 8


# mocks

def test_splice_halves():
    assert splice_halves("a b c d", "1 2 3 4 5 6") == "a b 4 5 6"
    assert splice_halves("a b c", "1 2 3") == "a b 2 3"


def test_substitute_synonym_preserves_case_and_punct():
    rng = random.Random(0)
    for _ in range(50):
        out = substitute_synonym("Classifique a resenha.", rng)
        assert out and out[0].isupper() and out.endswith(".")


def test_substitute_synonym_without_table_words():
    assert substitute_synonym("xyz qwe", random.Random(0)) == "xyz qwe"


def test_synonym_table_is_lowercase():
    assert all(k == k.lower() for k in SYNONYMS)


def test_mock_generator_deterministic():
    def replies(seed):
        gen = MockGenerator(seed)
        seeds = generate_initial_population(5, gen)
        child = ga_llm(seeds[0], seeds[1], gen)
        return [s.text for s in seeds] + [child.text]

    assert replies(4) == replies(4)
    assert all(t in PHRASE_BANK for t in replies(4)[:5])


def test_mock_generator_crossover_then_mutation():
    gen = MockGenerator(0)
    out = gen.complete(crossover_request(A, B))
    assert out == splice_halves(A.text, B.text)
    assert gen.call_index == 1


def test_label_oracle_perfect_and_partial():
    samples = [LabeledSample(f"review {i}", "positive" if i % 2 else "negative") for i in range(10)]
    perfect = LabelOracle(samples)
    half = LabelOracle(samples, accuracy_fn=lambda instr: 0.5)

    def ask(oracle, s):
        return oracle.complete(ChatRequest("", f"Instr\n\nTexto: {s.text}\nSentimento:"))

    gold = {"positive": "positivo", "negative": "negativo"}
    assert all(ask(perfect, s) == gold[s.label] for s in samples)
    assert sum(ask(half, s) == gold[s.label] for s in samples) == 5
    assert perfect.complete(ChatRequest("", "I\n\nTexto: unknown\nSentimento:")) == "não sei"


# http provider against a local server

class _Handler(BaseHTTPRequestHandler):
    responses = []
    seen = []

    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        type(self).seen.append((dict(self.headers), body))
        status, payload = type(self).responses.pop(0)
        raw = payload if isinstance(payload, bytes) else json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(raw)))
        self.end_headers()
        self.wfile.write(raw)

    def log_message(self, *args):
        pass


@pytest.fixture
def server():
    _Handler.responses, _Handler.seen = [], []
    srv = HTTPServer(("127.0.0.1", 0), _Handler)
    t = threading.Thread(target=srv.serve_forever, daemon=True)
    t.start()
    yield f"http://127.0.0.1:{srv.server_port}/v1/chat/completions", _Handler
    srv.shutdown()


def _ok(text):
    return 200, {"choices": [{"message": {"role": "assistant", "content": text}}]}


def test_http_provider_roundtrip(server, monkeypatch):
    url, handler = server
    monkeypatch.setenv("TEST_KEY", "sekret")
    handler.responses = [_ok("Classifique.")]
    prov = HTTPChatProvider(url, "m1", api_key_env="TEST_KEY", timeout=5)
    assert prov.complete(mutation_request(A, temperature=0.3, max_output_tokens=50)) == "Classifique."
    headers, body = handler.seen[0]
    assert headers["Authorization"] == "Bearer sekret"
    assert body["model"] == "m1" and body["temperature"] == 0.3 and body["max_tokens"] == 50
    assert body["messages"][0]["role"] == "system"


@pytest.mark.parametrize("status,exc", [
    (429, RateLimitError), (503, TransportError), (400, ProviderError),
])
def test_http_provider_error_mapping(server, status, exc):
    url, handler = server
    handler.responses = [(status, {"error": "x"})]
    prov = HTTPChatProvider(url, "m", api_key_env=None, timeout=5)
    with pytest.raises(exc) as err:
        prov.complete(mutation_request(A))
    assert err.value.retryable == (status in (429, 503))


def test_http_provider_malformed_and_empty(server):
    url, handler = server
    handler.responses = [(200, b"not json"), (200, {"choices": []}), _ok("")]
    prov = HTTPChatProvider(url, "m", api_key_env=None, timeout=5)
    with pytest.raises(TransportError):
        prov.complete(mutation_request(A))
    with pytest.raises(TransportError):
        prov.complete(mutation_request(A))
    with pytest.raises(EmptyReplyError):
        prov.complete(mutation_request(A))


def test_http_provider_retried_through_client(server):
    url, handler = server
    handler.responses = [(503, {}), _ok("ok")]
    client, delays = no_sleep_client(HTTPChatProvider(url, "m", api_key_env=None, timeout=5))
    assert client.complete(mutation_request(A)) == "ok" and delays == [1.0]


def test_http_provider_unreachable():
    prov = HTTPChatProvider("http://127.0.0.1:9/x", "m", api_key_env=None, timeout=1)
    with pytest.raises(TransportError):
        prov.complete(mutation_request(A))


def test_http_provider_missing_key(monkeypatch):
    monkeypatch.delenv("NOPE_KEY", raising=False)
    with pytest.raises(MissingAPIKeyError):
        HTTPChatProvider("http://x", "m", api_key_env="NOPE_KEY")
