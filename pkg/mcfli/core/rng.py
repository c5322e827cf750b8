import numpy as np


def child_seed(master: int, *indices: int) -> int:
    """Deterministic seed for the sub-stream ``indices`` of ``master``.

    Independent of the order in which sub-streams are requested, so trials
    can run in any order or thread.
    """
    sequence = np.random.SeedSequence(int(master), spawn_key=tuple(int(i) for i in indices))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)
