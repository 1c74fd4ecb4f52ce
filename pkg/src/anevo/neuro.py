"""Fixed-topology feedforward networks decoded from flat weight vectors.

Flattening order (the "canonical" order every operator relies on): layers in
order; inside a layer, one row per destination neuron holding its incoming
weights followed by that neuron's bias. A layer with ``fan_in`` inputs and
``fan_out`` neurons therefore occupies ``(fan_in + 1) * fan_out`` consecutive
entries and reshapes to a ``(fan_out, fan_in + 1)`` matrix.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class HiddenActivation(str, enum.Enum):
    SIGMOID = "sigmoid"
    TANH = "tanh"
    RELU = "relu"


class OutputActivation(str, enum.Enum):
    SIGMOID = "sigmoid"
    SOFTMAX = "softmax"
    IDENTITY = "identity"


@dataclass(frozen=True)
class Topology:
    input_size: int
    hidden_sizes: tuple[int, ...]
    output_size: int
    hidden_activation: HiddenActivation = HiddenActivation.SIGMOID
    output_activation: OutputActivation = OutputActivation.SIGMOID

    def __post_init__(self):
        object.__setattr__(self, "hidden_sizes", tuple(int(h) for h in self.hidden_sizes))
        object.__setattr__(self, "hidden_activation", HiddenActivation(self.hidden_activation))
        object.__setattr__(self, "output_activation", OutputActivation(self.output_activation))
        for size in self.layer_sizes:
            if size < 1:
                raise ValueError(f"layer sizes must be >= 1, got {self.layer_sizes}")

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.input_size, *self.hidden_sizes, self.output_size)

    @property
    def layer_shapes(self) -> list[tuple[int, int]]:
        """``(fan_out, fan_in + 1)`` for every weight layer."""
        sizes = self.layer_sizes
        return [(sizes[i + 1], sizes[i] + 1) for i in range(len(sizes) - 1)]

    def layer_slices(self) -> list[slice]:
        """Slices of the flat genome holding each layer's block (biases included)."""
        out, start = [], 0
        for rows, cols in self.layer_shapes:
            out.append(slice(start, start + rows * cols))
            start += rows * cols
        return out

    def header(self) -> str:
        return ",".join(str(s) for s in self.layer_sizes)


def total_weights(topology: Topology) -> int:
    return sum(rows * cols for rows, cols in topology.layer_shapes)


class Genome:
    """Immutable flat weight vector bound to a :class:`Topology`."""

    __slots__ = ("_weights", "_topology")

    def __init__(self, weights: Sequence[float] | np.ndarray, topology: Topology):
        w = np.array(weights, dtype=np.float64, copy=True).reshape(-1)
        expected = total_weights(topology)
        if w.size != expected:
            raise ValueError(
                f"genome has {w.size} weights, topology {topology.header()} needs {expected}"
            )
        w.flags.writeable = False
        self._weights = w
        self._topology = topology

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def topology(self) -> Topology:
        return self._topology

    def __len__(self) -> int:
        return self._weights.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, Genome):
            return NotImplemented
        return self._topology == other._topology and np.array_equal(self._weights, other._weights)

    def __hash__(self):
        return hash((self._topology, self._weights.tobytes()))

    def __repr__(self):
        return f"Genome(topology={self._topology.header()}, n={self._weights.size})"

    def layers(self) -> list[np.ndarray]:
        """Per-layer ``(fan_out, fan_in + 1)`` views; the last column is the bias."""
        return [
            self._weights[s].reshape(shape)
            for s, shape in zip(self._topology.layer_slices(), self._topology.layer_shapes)
        ]


def flatten(layers: Sequence[np.ndarray]) -> np.ndarray:
    return np.concatenate([np.asarray(m, dtype=np.float64).reshape(-1) for m in layers])


def unflatten(weights: np.ndarray, topology: Topology) -> list[np.ndarray]:
    return Genome(weights, topology).layers()


# -- initialization ---------------------------------------------------------


@dataclass(frozen=True)
class Uniform:
    lo: float = -1.0
    hi: float = 1.0

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"uniform init needs lo < hi, got ({self.lo}, {self.hi})")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size=n)

    def __str__(self):
        return f"uniform({self.lo!r}, {self.hi!r})"


@dataclass(frozen=True)
class Gaussian:
    mean: float = 0.0
    sd: float = 1.0

    def __post_init__(self):
        if not self.sd > 0:
            raise ValueError(f"gaussian init needs sd > 0, got {self.sd}")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.normal(self.mean, self.sd, size=n)

    def __str__(self):
        return f"gaussian({self.mean!r}, {self.sd!r})"


InitScheme = Uniform | Gaussian


def init_genome(topology: Topology, scheme: InitScheme, rng: np.random.Generator) -> Genome:
    return Genome(scheme.sample(rng, total_weights(topology)), topology)


# -- inference --------------------------------------------------------------


def sigmoid(z: np.ndarray) -> np.ndarray:
    # Piecewise form avoids exp overflow for large |z|.
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    e = np.exp(z[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - np.max(z))
    return e / np.sum(e)


_HIDDEN = {
    HiddenActivation.SIGMOID: sigmoid,
    HiddenActivation.TANH: np.tanh,
    HiddenActivation.RELU: lambda z: np.maximum(z, 0.0),
}

_OUTPUT = {
    OutputActivation.SIGMOID: sigmoid,
    OutputActivation.SOFTMAX: softmax,
    OutputActivation.IDENTITY: lambda z: z,
}


def forward(genome: Genome, x: Sequence[float] | np.ndarray, topology: Topology | None = None) -> np.ndarray:
    """Evaluate the network on one input vector. Pure; never mutates the genome."""
    topology = topology or genome.topology
    if topology != genome.topology:
        raise ValueError("genome was built for a different topology")
    a = np.asarray(x, dtype=np.float64).reshape(-1)
    if a.size != topology.input_size:
        raise ValueError(f"expected {topology.input_size} inputs, got {a.size}")
    layers = genome.layers()
    hidden = _HIDDEN[topology.hidden_activation]
    for i, m in enumerate(layers):
        z = m[:, :-1] @ a + m[:, -1]
        a = _OUTPUT[topology.output_activation](z) if i == len(layers) - 1 else hidden(z)
    return a


def argmax_action(output: Sequence[float] | np.ndarray) -> int:
    """Index of the largest output; ties go to the lowest index."""
    return int(np.argmax(np.asarray(output)))


# -- serialization ----------------------------------------------------------


def dump_genome(genome: Genome) -> str:
    lines = [f"topology: {genome.topology.header()}"]
    lines.extend(repr(float(w)) for w in genome.weights)
    return "\n".join(lines) + "\n"


def load_genome(text: str, topology: Topology | None = None) -> Genome:
    """Parse :func:`dump_genome` output.

    Without ``topology`` the sizes come from the header and activations take
    their defaults; with it, the header must agree.
    """
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("topology:"):
        raise ValueError("missing 'topology:' header")
    sizes = [int(s) for s in lines[0].split(":", 1)[1].split(",")]
    if len(sizes) < 2:
        raise ValueError(f"bad topology header {lines[0]!r}")
    if topology is None:
        topology = Topology(sizes[0], tuple(sizes[1:-1]), sizes[-1])
    elif list(topology.layer_sizes) != sizes:
        raise ValueError(f"header {sizes} does not match topology {topology.header()}")
    return Genome([float(v) for v in lines[1:]], topology)
