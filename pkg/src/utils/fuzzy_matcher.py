"""
Fuzzy matching utilities for efgrid
"""

from typing import List, Sequence, Tuple

from rapidfuzz import fuzz, process

from src.config.settings import FUZZY_MATCH_THRESHOLD, FUZZY_MAX_SUGGESTIONS


def suggest_names(input_name: str, known_names: Sequence[str],
                  threshold: float = FUZZY_MATCH_THRESHOLD,
                  limit: int = FUZZY_MAX_SUGGESTIONS) -> List[Tuple[str, float]]:
    """
    Find the known names closest to a name that was not found.

    Args:
        input_name: The potentially misspelled name
        known_names: Candidate canonical names
        threshold: Minimum similarity score to consider a match
        limit: Maximum number of suggestions

    Returns:
        List of (name, score), best first, ties by name
    """
    if not input_name or not known_names:
        return []

    matches = process.extract(input_name, known_names, scorer=fuzz.ratio,
                              score_cutoff=threshold, limit=None)
    ranked = sorted(((name, score) for name, score, _ in matches), key=lambda item: (-item[1], item[0]))
    return ranked[:limit]


def format_suggestion(input_name: str, known_names: Sequence[str]) -> str:
    """' (did you mean ...?)' or an empty string"""
    suggestions = suggest_names(input_name, known_names)
    if not suggestions:
        return ""
    names = ", ".join(f"'{name}'" for name, _ in suggestions)
    return f" (did you mean {names}?)"
