"""
Portable seeded random streams: xoshiro256** seeded through SplitMix64.

Streams are defined bit for bit so a (seed, trial) pair yields the same
task set in any implementation of the generator.
"""
import math

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK64


def splitmix64(state):
    """
    One SplitMix64 step.

    :state     64-bit state
    :return    (next state, output)
    """
    state = (state + GOLDEN_GAMMA) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


class Xoshiro256(object):
    """
    xoshiro256** generator.

    :seed    Integer seed, reduced to 64 bits and expanded with SplitMix64
    """

    def __init__(self, seed):
        state, words = seed & MASK64, []
        for _ in range(4):
            state, word = splitmix64(state)
            words.append(word)
        self.state = words

    @classmethod
    def for_trial(cls, seed, trial):
        """Stream of one trial: seeded with the (trial + 1)-th SplitMix64 output of `seed`."""
        state = (seed + trial * GOLDEN_GAMMA) & MASK64
        return cls(splitmix64(state)[1])

    def next_u64(self):
        s = self.state
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self):
        """Uniform float in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, low, high):
        return low + (high - low) * self.random()

    def randint(self, low, high):
        """Uniform integer in [low, high], both inclusive."""
        return low + int(math.floor(self.random() * (high - low + 1)))
