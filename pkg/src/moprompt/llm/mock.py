"""Deterministic offline providers.

``MockGenerator`` stands in for the generator model: seed requests draw from a
fixed Portuguese phrase bank, crossover splices word halves, mutation applies a
synonym substitution. ``LabelOracle`` stands in for the evaluator model: it
knows the gold labels and answers correctly for a chosen fraction of samples.
Both are pure functions of (seed, call sequence) and of their inputs.
"""
from __future__ import annotations

import hashlib
import random
import re
import threading

from . import templates
from .providers import ChatRequest

__all__ = ["MockGenerator", "mock_provider", "LabelOracle", "ConstantProvider",
           "PHRASE_BANK", "SYNONYMS", "splice_halves", "substitute_synonym"]

PHRASE_BANK = (
    "Classifique o sentimento desta resenha como positivo ou negativo.",
    "Diga se o texto é bom ou ruim.",
    "Leia o texto com atenção e responda se a opinião do autor sobre o filme é positiva ou negativa, justificando mentalmente.",
    "Determine se a opinião apresentada é positiva ou negativa.",
    "Avalie cuidadosamente a resenha a seguir e indique se o sentimento geral expressado pelo crítico é positivo ou negativo.",
    "Responda com uma palavra: o comentário é favorável ou desfavorável?",
    "Identifique o tom do texto.",
    "Você é um especialista em cinema; leia a crítica abaixo e decida se ela elogia ou critica o filme.",
    "Classifique a resenha.",
    "Analise o texto e diga se o autor gostou ou não do filme que assistiu.",
    "Indique se a avaliação do espectador é positiva ou negativa.",
    "Classifique este comentário em uma de duas categorias: positivo ou negativo.",
    "Após ler atentamente toda a resenha do filme, determine de forma objetiva se o sentimento predominante é positivo ou negativo.",
    "O texto expressa aprovação ou desaprovação?",
    "Sentimento do texto: positivo ou negativo?",
    "Decida se a crítica realmente recomenda o filme ao público em geral ou se desaconselha a sua exibição.",
    "Julgue a polaridade da opinião.",
    "Rotule a resenha como positiva ou negativa.",
    "Verifique se o comentário abaixo demonstra satisfação ou insatisfação com a obra.",
    "Por favor, classifique claramente o sentimento da opinião como positivo ou negativo, sem explicações adicionais.",
    "Qual é a polaridade deste texto?",
    "Determine se o autor da resenha aprova o filme.",
    "Considere o vocabulário, o tom e o contexto da resenha para determinar se a avaliação é positiva ou negativa.",
    "Responda apenas positivo ou negativo.",
    "Identifique se o sentimento expressado a seguir é positivo ou negativo.",
    "Marque o texto como elogio ou reclamação.",
    "Classifique a opinião do espectador sobre o filme.",
    "Leia e decida: o crítico gostou?",
    "Diga qual é a emoção principal transmitida pelo texto, considerando expressões de alegria, raiva ou decepção.",
    "Avalie a resenha e responda se ela é positiva ou negativa.",
)

# Word -> replacement options. "" deletes the word.
SYNONYMS = {
    "classifique": ("determine", "avalie", "identifique", "classifique com atenção"),
    "determine": ("classifique", "identifique", "determine com precisão"),
    "identifique": ("classifique", "determine", "reconheça com cuidado"),
    "avalie": ("classifique", "analise", "avalie detalhadamente"),
    "indique": ("classifique", "diga", "aponte"),
    "diga": ("indique", "classifique", "informe"),
    "decida": ("determine", "classifique", "avalie"),
    "analise": ("avalie", "examine"),
    "sentimento": ("tom", "sentimento geral expresso", "teor emocional"),
    "tom": ("sentimento", "clima"),
    "opinião": ("avaliação", "visão", "opinião expressa pelo autor"),
    "avaliação": ("opinião", "análise"),
    "resenha": ("crítica", "análise", "resenha cinematográfica"),
    "crítica": ("resenha", "análise"),
    "comentário": ("texto", "resenha", "comentário do espectador"),
    "texto": ("comentário", "trecho", "texto a seguir"),
    "filme": ("longa", "filme em questão"),
    "positivo": ("favorável", "positivo (favorável)"),
    "positiva": ("favorável", "positiva (favorável)"),
    "negativo": ("desfavorável", "negativo (desfavorável)"),
    "negativa": ("desfavorável", "negativa (desfavorável)"),
    "favorável": ("positivo",),
    "desfavorável": ("negativo",),
    "bom": ("positivo",),
    "ruim": ("negativo",),
    "cuidadosamente": ("",),
    "atentamente": ("",),
    "claramente": ("",),
    "realmente": ("",),
    "seguinte": ("",),
    "apresentada": ("",),
    "abaixo": ("",),
    "geral": ("",),
    "expressado": ("", "expresso"),
    "predominante": ("", "principal"),
    "apenas": ("", "somente"),
    "desta": ("da", ""),
    "deste": ("do", ""),
    "este": ("",),
    "esta": ("",),
    "o": ("",),
    "a": ("",),
    "sendo": ("",),
    "como": ("", "como sendo"),
}

_PUNCT = ".,:;!?'\"()"
_CROSSOVER_RE = re.compile(r'^Prompt A: "(.*)"\nPrompt B: "(.*)"\nRealize uma combinação', re.DOTALL)
_MUTATION_RE = re.compile(r'com precisão: "(.*)" A variação pode incluir', re.DOTALL)


def splice_halves(a: str, b: str) -> str:
    """First half of ``a``'s words (rounded up) then second half of ``b``'s
    (rounded up). A 4-word and a 6-word prompt give 2 + 3 = 5 words."""
    wa, wb = a.split(), b.split()
    return " ".join(wa[: (len(wa) + 1) // 2] + wb[len(wb) // 2:])


def _split_punct(word: str):
    core = word.strip(_PUNCT)
    if not core:
        return word, "", ""
    start = word.index(core)
    return word[:start], core, word[start + len(core):]


def substitute_synonym(text: str, rng: random.Random) -> str:
    """Replace one table word (picked by ``rng``) with one of its synonyms."""
    words = text.split()
    slots = [i for i, w in enumerate(words) if _split_punct(w)[1].lower() in SYNONYMS]
    if not slots:
        return text
    i = slots[rng.randrange(len(slots))]
    lead, core, trail = _split_punct(words[i])
    repl = rng.choice(SYNONYMS[core.lower()])
    if repl and core[0].isupper():
        repl = repl[0].upper() + repl[1:]
    if repl:
        words[i] = lead + repl + trail
    else:
        del words[i]
        if trail and i > 0:
            words[i - 1] += trail
        if i == 0 and words:
            words[0] = words[0][0].upper() + words[0][1:]
    out = " ".join(words).strip()
    return out or text


class MockGenerator:
    """Seeded stand-in for the generator model.

    Each call ``k`` draws from ``random.Random(f"{seed}:{k}")``; calls are
    serialized so the index sequence is well defined. ``transcript`` keeps
    ``(request, reply)`` pairs for inspection.
    """

    def __init__(self, seed: int = 0, provider_id: str = "mock-generator"):
        self.seed = seed
        self.provider_id = provider_id
        self.call_index = 0
        self.transcript: list[tuple[ChatRequest, str]] = []
        self._lock = threading.Lock()

    def complete(self, request: ChatRequest) -> str:
        with self._lock:
            self.call_index += 1
            rng = random.Random(f"{self.seed}:{self.call_index}")
            reply = self._respond(request.user, rng)
            self.transcript.append((request, reply))
            return reply

    def __getstate__(self):
        state = self.__dict__.copy()
        del state["_lock"]
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._lock = threading.Lock()

    def _respond(self, user: str, rng: random.Random) -> str:
        if templates.CROSSOVER_MARKER in user:
            m = _CROSSOVER_RE.search(user)
            if m:
                return splice_halves(m.group(1), m.group(2))
        if templates.MUTATION_MARKER in user:
            m = _MUTATION_RE.search(user)
            if m:
                return substitute_synonym(m.group(1), rng)
        return rng.choice(PHRASE_BANK)


def mock_provider(seed: int = 0) -> MockGenerator:
    return MockGenerator(seed)


class LabelOracle:
    """Evaluator stand-in that knows the gold labels of ``samples``.

    With ``accuracy_fn=None`` it always answers correctly. Otherwise, for an
    instruction scoring ``a`` it answers the ``round(a * N)`` lowest-ranked
    samples correctly and flips the rest; ranks come from a hash of the review
    text, so the outcome depends only on (instruction, review).
    """

    def __init__(self, samples, accuracy_fn=None, provider_id="label-oracle"):
        self.provider_id = provider_id
        self.accuracy_fn = accuracy_fn
        self._gold = {s.text: s.label for s in samples}
        ordered = sorted(self._gold, key=lambda t: hashlib.sha256(t.encode("utf-8")).digest())
        self._rank = {t: i for i, t in enumerate(ordered)}

    def complete(self, request: ChatRequest) -> str:
        instruction, _, _ = request.user.partition("\n\nTexto: ")
        head, sep, _ = request.user.rpartition("\nSentimento:")
        review = head.rpartition("Texto: ")[2] if sep else ""
        gold = self._gold.get(review)
        if gold is None:
            return "não sei"
        correct = True
        if self.accuracy_fn is not None:
            k = round(self.accuracy_fn(instruction) * len(self._gold))
            correct = self._rank[review] < k
        label = gold if correct else ("negative" if gold == "positive" else "positive")
        return "positivo" if label == "positive" else "negativo"


class ConstantProvider:
    """Replies with the same text to every request."""

    def __init__(self, reply: str, provider_id: str = "constant"):
        self.reply = reply
        self.provider_id = provider_id

    def complete(self, request: ChatRequest) -> str:
        return self.reply
