"""Deterministic seed derivation for parallel Monte-Carlo trials.

Child seeds are derived from a root seed with a splitmix64 step, so trial i
always sees the same noise realization regardless of worker count or
scheduling order.
"""

_MASK64 = (1 << 64) - 1


def splitmix64(state: int) -> int:
    """One splitmix64 output for the given 64-bit state."""
    z = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(root_seed: int, *indices: int) -> int:
    """Derive a child seed from a root seed and one or more trial indices."""
    state = root_seed & _MASK64
    for idx in indices:
        state = splitmix64((state ^ (idx & _MASK64)) & _MASK64)
        state = splitmix64(state)
    return state
