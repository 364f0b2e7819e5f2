"""Generator-model message templates (Portuguese, sentiment task).

Slots are ``{prompt_a}``, ``{prompt_b}`` and ``{prompt}``. Substitution is a
single pass with no escaping, so prompt text may itself contain quotes or
braces.
"""
import re

SYSTEM = (
    "Você é um otimizador de prompts para classificação de sentimentos (positivo ou negativo). "
    "Seu papel é melhorar instruções para modelos de linguagem, gerando prompts curtos, "
    "diretos e eficazes. Gere apenas o prompt, sem explicações ou comentários adicionais:"
)

USER_CROSSOVER = (
    'Prompt A: "{prompt_a}"\n'
    'Prompt B: "{prompt_b}"\n'
    "Realize uma combinação dos dois prompts, como em uma operação de crossover, "
    "mantendo clareza, coerência e o propósito original."
)

USER_MUTATION = (
    "Assim como uma mutação que introduz variedade, gere uma variação deste prompt "
    'mantendo seu objetivo de classificar sentimentos com precisão: "{prompt}" '
    "A variação pode incluir reformulação, troca de termos ou reorganização sintática."
)

# seed wording is our own; kept short and in the same register as the others
USER_SEED = (
    "Gere uma nova instrução curta e direta para a seguinte tarefa: {task}"
)

DEFAULT_TASK = (
    "classificar o sentimento de uma resenha de filme em português como positivo ou negativo."
)

_SLOT = re.compile(r"\{(prompt_a|prompt_b|prompt|task)\}")


def fill(template: str, **slots: str) -> str:
    """Substitute ``{name}`` slots in one pass; unknown slots are left alone."""
    return _SLOT.sub(lambda m: slots[m.group(1)] if m.group(1) in slots else m.group(0), template)


# Markers the mock generator uses to tell request kinds apart.
CROSSOVER_MARKER = "Realize uma combinação dos dois prompts"
MUTATION_MARKER = "gere uma variação deste prompt"
