"""Input checks for the estimator API."""
from __future__ import annotations

import numpy as np

from .dataset import normalize_label


def check_texts(X, name: str = "X") -> list[str]:
    """Return ``X`` as a list of non-empty strings.

    Accepts any 1-D sequence (list, tuple, array, Series) or an ``(n, 1)``
    array. Raises ``ValueError`` or ``TypeError`` on anything else.
    """
    if isinstance(X, str):
        raise TypeError(f"{name} must be a sequence of strings, not a single string")
    arr = np.asarray(X, dtype=object)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    out = []
    for i, x in enumerate(arr):
        if not isinstance(x, str):
            raise TypeError(f"{name}[{i}] is {type(x).__name__}, expected str")
        if not x.strip():
            raise ValueError(f"{name}[{i}] is blank")
        out.append(x)
    return out


def check_text_data(X, y) -> tuple[list[str], list[str]]:
    """Validate texts and labels together; labels come back normalized to
    ``"positive"`` / ``"negative"``."""
    texts = check_texts(X)
    labels_raw = np.asarray(y, dtype=object).ravel()
    if len(labels_raw) != len(texts):
        raise ValueError(f"X and y have different lengths: {len(texts)} != {len(labels_raw)}")
    labels = [normalize_label(v) for v in labels_raw]
    missing = {"positive", "negative"} - set(labels)
    if missing:
        raise ValueError(f"y lacks class(es) {sorted(missing)}; both classes are needed")
    return texts, labels
