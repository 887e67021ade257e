"""Minimal differentiable feedforward engine.

Dense layers with identity/relu/tanh activations, exact reverse-mode
gradients, and three stochastic gradient optimizers. Double precision
throughout; interval statistics downstream are sensitive to cancellation.

Thread contract: ``forward(record=False)`` touches no shared state and may
run concurrently; a network being trained has a single writer.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .backend import kernels as K
from .errors import ConfigError, DataError, UsageError

ACTIVATION_CODES = {"identity": K.ACT_IDENTITY, "relu": K.ACT_RELU, "tanh": K.ACT_TANH}
_CODE_NAMES = {code: name for name, code in ACTIVATION_CODES.items()}

_MAGIC = b"NNPI"
_FORMAT_VERSION = 1


@dataclass
class DenseLayer:
    weights: np.ndarray  # (out, in)
    biases: np.ndarray  # (out,)
    activation: str = "identity"

    def __post_init__(self):
        self.weights = np.ascontiguousarray(self.weights, dtype=np.float64)
        self.biases = np.ascontiguousarray(self.biases, dtype=np.float64)
        if self.weights.ndim != 2 or self.biases.ndim != 1:
            raise ConfigError("dense layer expects 2-d weights and 1-d biases")
        if self.weights.shape[0] != self.biases.shape[0]:
            raise ConfigError(
                f"bias width {self.biases.shape[0]} does not match "
                f"weight rows {self.weights.shape[0]}"
            )
        if self.activation not in ACTIVATION_CODES:
            raise ConfigError(
                f"unknown activation {self.activation!r}; "
                f"expected one of {sorted(ACTIVATION_CODES)}"
            )

    @property
    def in_width(self) -> int:
        return self.weights.shape[1]

    @property
    def out_width(self) -> int:
        return self.weights.shape[0]


class Network:
    """Ordered dense layers; forward returns an (n, output_arity) matrix."""

    def __init__(self, layers: list[DenseLayer]):
        if not layers:
            raise ConfigError("network needs at least one layer")
        for i in range(len(layers) - 1):
            if layers[i].out_width != layers[i + 1].in_width:
                raise ConfigError(
                    f"layer {i} outputs width {layers[i].out_width} but layer "
                    f"{i + 1} expects width {layers[i + 1].in_width}"
                )
        self.layers = layers
        self._tape = None

    @property
    def input_dim(self) -> int:
        return self.layers[0].in_width

    @property
    def output_arity(self) -> int:
        return self.layers[-1].out_width

    @classmethod
    def create(
        cls,
        input_dim: int,
        hidden: tuple[int, ...],
        output_arity: int,
        activation: str = "tanh",
        rng: np.random.Generator | None = None,
        output_activation: str = "identity",
    ) -> "Network":
        """Fresh network with uniform +-sqrt(6/(fan_in+fan_out)) weights."""
        if rng is None:
            rng = np.random.default_rng()
        widths = [int(input_dim), *[int(h) for h in hidden], int(output_arity)]
        if any(w < 1 for w in widths):
            raise ConfigError(f"layer widths must be >= 1, got {widths}")
        layers = []
        for i in range(len(widths) - 1):
            fan_in, fan_out = widths[i], widths[i + 1]
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            weights = rng.uniform(-limit, limit, size=(fan_out, fan_in))
            act = activation if i < len(widths) - 2 else output_activation
            layers.append(DenseLayer(weights, np.zeros(fan_out), act))
        return cls(layers)

    def forward(self, inputs: np.ndarray, record: bool = False) -> np.ndarray:
        x = np.ascontiguousarray(inputs, dtype=np.float64)
        if x.ndim != 2:
            raise UsageError(f"inputs must be 2-d (n, features), got shape {x.shape}")
        if x.shape[1] != self.input_dim:
            raise ConfigError(
                f"layer 0 expects input width {self.input_dim}, "
                f"got {x.shape[1]}"
            )
        tape = [] if record else None
        for layer in self.layers:
            z, a = K.dense_forward(
                x, layer.weights, layer.biases, ACTIVATION_CODES[layer.activation]
            )
            if record:
                tape.append((x, z, a))
            x = a
        if record:
            self._tape = tape
        return x

    def backward(self, d_outputs: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
        """Gradients of a scalar loss w.r.t. every weight and bias.

        Requires a preceding ``forward(..., record=True)``; ``d_outputs``
        is the loss gradient w.r.t. the recorded forward's outputs.
        Returns one (d_weights, d_biases) pair per layer, in layer order.
        """
        if self._tape is None:
            raise UsageError(
                "backward() requires a recorded forward pass; call "
                "forward(inputs, record=True) first"
            )
        d_act = np.ascontiguousarray(d_outputs, dtype=np.float64)
        if d_act.shape != self._tape[-1][2].shape:
            raise UsageError(
                f"output gradient shape {d_act.shape} does not match recorded "
                f"outputs {self._tape[-1][2].shape}"
            )
        grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(self.layers)
        for i in range(len(self.layers) - 1, -1, -1):
            layer = self.layers[i]
            x, z, a = self._tape[i]
            d_w, d_b, d_act = K.dense_backward(
                d_act, z, a, x, layer.weights, ACTIVATION_CODES[layer.activation]
            )
            grads[i] = (d_w, d_b)
        return grads

    def copy(self) -> "Network":
        return Network(
            [
                DenseLayer(l.weights.copy(), l.biases.copy(), l.activation)
                for l in self.layers
            ]
        )

    def n_parameters(self) -> int:
        return sum(l.weights.size + l.biases.size for l in self.layers)


class Optimizer:
    """sgd, sgd_momentum (v <- beta*v + g), or adam with bias correction."""

    KINDS = ("sgd", "sgd_momentum", "adam")

    def __init__(
        self,
        kind: str,
        learning_rate: float,
        momentum_beta: float = 0.9,
        adam_beta1: float = 0.9,
        adam_beta2: float = 0.999,
        adam_eps: float = 1e-8,
    ):
        if kind not in self.KINDS:
            raise ConfigError(f"unknown optimizer {kind!r}; expected {self.KINDS}")
        if learning_rate < 0:
            raise ConfigError("learning_rate must be >= 0")
        self.kind = kind
        self.learning_rate = float(learning_rate)
        self.momentum_beta = float(momentum_beta)
        self.adam_beta1 = float(adam_beta1)
        self.adam_beta2 = float(adam_beta2)
        self.adam_eps = float(adam_eps)
        self._slots = None
        self._t = 0

    def _init_slots(self, net: Network, per_param: int):
        self._slots = [
            tuple(
                (np.zeros(l.weights.size), np.zeros(l.biases.size))
                for _ in range(per_param)
            )
            for l in net.layers
        ]

    def step(self, net: Network, grads: list[tuple[np.ndarray, np.ndarray]]) -> None:
        if len(grads) != len(net.layers):
            raise UsageError(
                f"got gradients for {len(grads)} layers, network has "
                f"{len(net.layers)}"
            )
        for layer, (d_w, d_b) in zip(net.layers, grads):
            if d_w.shape != layer.weights.shape or d_b.shape != layer.biases.shape:
                raise UsageError(
                    f"gradient shapes {d_w.shape}/{d_b.shape} do not match "
                    f"parameters {layer.weights.shape}/{layer.biases.shape}"
                )
        lr = self.learning_rate
        if self.kind == "sgd":
            for layer, (d_w, d_b) in zip(net.layers, grads):
                K.sgd_update(layer.weights.ravel(), d_w.ravel(), lr)
                K.sgd_update(layer.biases, d_b, lr)
            return
        if self.kind == "sgd_momentum":
            if self._slots is None:
                self._init_slots(net, 1)
            for layer, (d_w, d_b), slots in zip(net.layers, grads, self._slots):
                ((v_w, v_b),) = slots
                K.momentum_update(
                    layer.weights.ravel(), v_w, d_w.ravel(), lr, self.momentum_beta
                )
                K.momentum_update(layer.biases, v_b, d_b, lr, self.momentum_beta)
            return
        if self._slots is None:
            self._init_slots(net, 2)
        self._t += 1
        for layer, (d_w, d_b), slots in zip(net.layers, grads, self._slots):
            (m_w, m_b), (v_w, v_b) = slots
            K.adam_update(
                layer.weights.ravel(), m_w, v_w, d_w.ravel(), lr,
                self.adam_beta1, self.adam_beta2, self.adam_eps, self._t,
            )
            K.adam_update(
                layer.biases, m_b, v_b, d_b, lr,
                self.adam_beta1, self.adam_beta2, self.adam_eps, self._t,
            )


def save_network(net: Network, path) -> None:
    """Flat binary parameter file.

    Layout, all little-endian: magic "NNPI", format version (u32), layer
    count (u32), then per layer in-width/out-width/activation tag (u32
    each) followed by row-major (out, in) weights and biases as IEEE-754
    doubles. Self-describing: the network is reconstructible from the
    file alone.
    """
    parts = [_MAGIC, struct.pack("<II", _FORMAT_VERSION, len(net.layers))]
    for layer in net.layers:
        parts.append(
            struct.pack(
                "<III",
                layer.in_width,
                layer.out_width,
                ACTIVATION_CODES[layer.activation],
            )
        )
        parts.append(np.ascontiguousarray(layer.weights, "<f8").tobytes())
        parts.append(np.ascontiguousarray(layer.biases, "<f8").tobytes())
    with open(path, "wb") as fh:
        fh.write(b"".join(parts))


def load_network(path) -> Network:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != _MAGIC:
        raise DataError(f"{path}: not a network parameter file (bad magic)")
    version, n_layers = struct.unpack_from("<II", blob, 4)
    if version != _FORMAT_VERSION:
        raise DataError(f"{path}: unsupported format version {version}")
    offset = 12
    layers = []
    for i in range(n_layers):
        try:
            in_w, out_w, act_code = struct.unpack_from("<III", blob, offset)
            offset += 12
            w_bytes = out_w * in_w * 8
            weights = np.frombuffer(blob, "<f8", out_w * in_w, offset).reshape(
                out_w, in_w
            )
            offset += w_bytes
            biases = np.frombuffer(blob, "<f8", out_w, offset)
            offset += out_w * 8
        except (struct.error, ValueError) as exc:
            raise DataError(f"{path}: truncated at layer {i}: {exc}") from exc
        if act_code not in _CODE_NAMES:
            raise DataError(f"{path}: layer {i} has unknown activation tag {act_code}")
        layers.append(DenseLayer(weights.copy(), biases.copy(), _CODE_NAMES[act_code]))
    if offset != len(blob):
        raise DataError(f"{path}: {len(blob) - offset} trailing bytes")
    return Network(layers)
