"""
可复现的随机数发生器
Author: ICO
Date: 2024-03-06"""

import numpy as np

SEED_MASK = (1 << 64) - 1


class Rng:
    """基于计数器 (Philox) 的随机数发生器，相同种子产生相同序列

    Parameters
    ----------
    `seed` : int
        64 位种子
    """

    def __init__(self, seed: int, _sequence: np.random.SeedSequence | None = None):
        self.seed = int(seed) & SEED_MASK
        self._sequence = _sequence if _sequence is not None else np.random.SeedSequence(self.seed)
        self._generator = np.random.Generator(np.random.Philox(self._sequence))

    # end alternate constructor
    @property
    def generator(self) -> np.random.Generator:
        return self._generator

    def spawn(self, n: int) -> list["Rng"]:
        """派生 n 个相互独立的子发生器 (派生次数计入状态)"""
        return [Rng(self.seed, _sequence=child) for child in self._sequence.spawn(n)]

    # end def
    def uniform(self, low=0.0, high=1.0, size=None):
        return self._generator.uniform(low, high, size)

    def random(self, size=None):
        return self._generator.random(size)

    def normal(self, loc=0.0, scale=1.0, size=None):
        return self._generator.normal(loc, scale, size)

    def integers(self, low, high=None, size=None):
        return self._generator.integers(low, high, size)

    def chisquare(self, df, size=None):
        return self._generator.chisquare(df, size)

    def lognormal(self, mean=0.0, sigma=1.0, size=None):
        return self._generator.lognormal(mean, sigma, size)

    def permutation(self, n):
        return self._generator.permutation(n)

    def get_state(self) -> dict:
        """可 JSON 序列化的状态"""
        state = self._generator.bit_generator.state
        return {
            "seed": self.seed,
            "spawn_key": list(self._sequence.spawn_key),
            "children_spawned": int(self._sequence.n_children_spawned),
            "bit_generator": _to_builtin(state),
        }

    # end def
    @classmethod
    def from_state(cls, state: dict) -> "Rng":
        sequence = np.random.SeedSequence(
            int(state["seed"]),
            spawn_key=tuple(state.get("spawn_key", ())),
            n_children_spawned=int(state.get("children_spawned", 0)),
        )
        rng = cls(int(state["seed"]), _sequence=sequence)
        rng._generator.bit_generator.state = _from_builtin(state["bit_generator"])
        return rng

    # end def


# end class
def _to_builtin(value):
    if isinstance(value, dict):
        return {k: _to_builtin(v) for k, v in value.items()}
    if isinstance(value, np.ndarray):
        return {"__array__": value.tolist(), "dtype": str(value.dtype)}
    if isinstance(value, np.integer):
        return int(value)
    return value


# end def
def _from_builtin(value):
    if isinstance(value, dict):
        if "__array__" in value:
            return np.array(value["__array__"], dtype=value["dtype"])
        return {k: _from_builtin(v) for k, v in value.items()}
    return value


# end def
