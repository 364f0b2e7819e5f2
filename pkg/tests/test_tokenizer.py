import pytest
from hypothesis import given
from hypothesis import strategies as st

from moprompt.tokenizer import count_tokens, tokenize

from conftest import read_golden, read_golden_tokens

GOLDEN = read_golden()
GOLDEN_TOKENS = read_golden_tokens()


def test_golden_corpus_has_fifty_sentences():
    assert len(GOLDEN) == 50


@pytest.mark.parametrize("text,count", GOLDEN, ids=[f"s{i:02d}" for i in range(len(GOLDEN))])
def test_golden_counts(text, count):
    assert count_tokens(text) == count


@pytest.mark.parametrize("row", GOLDEN_TOKENS, ids=[f"t{i:02d}" for i in range(len(GOLDEN_TOKENS))])
def test_golden_token_sequences(row):
    assert tokenize(row["text"]) == row["tokens"]


@pytest.mark.parametrize("text,expected", [
    ("positivo ou negativo", 3),
    ("", 0),
    ("   \n\t ", 0),
    ("Classifique este sentimento como positivo ou negativo.", 8),
    ("Determine se a opinião apresentada é positiva ou negativa.", 10),
])
def test_known_counts(text, expected):
    assert count_tokens(text) == expected


def test_only_final_period_is_split():
    assert tokenize("Sr. Silva gostou. Muito.") == ["Sr.", "Silva", "gostou.", "Muito", "."]


def test_quotes_and_parens():
    toks = tokenize('Diga "sim" (ou não)?')
    assert toks == ["Diga", "``", "sim", "''", "(", "ou", "não", ")", "?"]


def test_single_quotes_split():
    assert tokenize("é 'positivo' ou") == ["é", "'positivo", "'", "ou"]


@given(st.text(max_size=200))
def test_count_is_length_of_tokens(text):
    toks = tokenize(text)
    assert count_tokens(text) == len(toks)
    assert all(t and not any(c.isspace() for c in t) for t in toks)


@given(st.lists(st.sampled_from(["filme", "bom", "resenha", "positivo", "negativo", "ou"]),
                min_size=1, max_size=20))
def test_plain_words_count_once_each(words):
    assert count_tokens(" ".join(words)) == len(words)


def test_agrees_with_nltk_when_available():
    nltk_tb = pytest.importorskip("nltk.tokenize.treebank")
    tok = nltk_tb.TreebankWordTokenizer()
    for text, _ in GOLDEN:
        assert tokenize(text) == tok.tokenize(text)


try:
    from nltk.tokenize.treebank import TreebankWordTokenizer as _NLTK
except ImportError:  # optional oracle
    _NLTK = None


@pytest.mark.skipif(_NLTK is None, reason="nltk not installed")
@given(st.lists(st.sampled_from(list("aéç oO.,;:!?'\"()[]{}<>-–&%$#@ \n") + ["--", "n't", "'s", "..."]),
                max_size=40).map("".join))
def test_random_text_agrees_with_nltk(text):
    assert tokenize(text) == _NLTK().tokenize(text)
