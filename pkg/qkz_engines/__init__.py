"""Hypergeometric solutions of the rational qKZ system and their KZ limits."""


def version() -> str:
    return "__VERSION__"
