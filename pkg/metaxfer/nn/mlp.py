"""
Dense feed-forward meta-learner: two ReLU hidden layers and a softmax output, in float64.
"""
import json
from collections import namedtuple

import numpy as np


__all__ = ['MlpModel', 'ModelError', 'ShapeMismatch', 'ForwardCache', 'he_init', 'he_layer', 'forward',
           'softmax', 'cross_entropy', 'backward', 'evaluate', 'predict', 'serialize_model', 'deserialize_model',
           'save_model', 'load_model', 'PROB_FLOOR']

PROB_FLOOR = 1e-12
N_LAYERS = 3

ForwardCache = namedtuple('ForwardCache', ['X', 'Z1', 'A1', 'Z2', 'A2', 'logits'])


class ModelError(Exception):
    """Base class for model errors"""


class ShapeMismatch(ModelError):
    """Raised when layer or input shapes disagree"""


class MlpModel(object):
    """ Layers [(W1, b1), (W2, b2), (Wout, bout)] with W of shape (out, in).

    Parameters
    ----------
    layers : list of 3 (W, b) pairs
    freeze_mask : 3 booleans, True = the layer is not trainable
    """
    def __init__(self, layers, freeze_mask=(False, False, False)):
        if len(layers) != N_LAYERS:
            raise ShapeMismatch('expected %d layers, got %d' % (N_LAYERS, len(layers)))
        self.layers = [(np.array(W, dtype=np.float64), np.array(b, dtype=np.float64)) for W, b in layers]
        self.freeze_mask = tuple(bool(f) for f in freeze_mask)
        if len(self.freeze_mask) != N_LAYERS:
            raise ShapeMismatch('freeze mask needs %d entries' % N_LAYERS)

        fan_in = self.layers[0][0].shape[1] if self.layers[0][0].ndim == 2 else -1
        for idx, (W, b) in enumerate(self.layers):
            if W.ndim != 2 or b.shape != (W.shape[0],):
                raise ShapeMismatch('layer %d: W %s and b %s do not match' % (idx, W.shape, b.shape))
            if W.shape[1] != fan_in:
                raise ShapeMismatch('layer %d expects %d inputs, previous layer gives %d' % (idx, W.shape[1], fan_in))
            if not (np.isfinite(W).all() and np.isfinite(b).all()):
                raise ModelError('layer %d holds non-finite weights' % idx)
            fan_in = W.shape[0]

    @property
    def sizes(self):
        """(d_in, h1, h2, C)"""
        return (self.layers[0][0].shape[1],) + tuple(W.shape[0] for W, _ in self.layers)

    @property
    def hidden_sizes(self):
        return self.sizes[1:3]

    def __repr__(self):
        frozen = ''.join('F' if f else 'T' for f in self.freeze_mask)
        return '%s(sizes=%s, trainable=%s)' % (self.__class__.__name__, self.sizes, frozen)

    def copy(self):
        return MlpModel([(W.copy(), b.copy()) for W, b in self.layers], self.freeze_mask)

    def parameters(self):
        return [p for layer in self.layers for p in layer]

    def with_freeze_mask(self, freeze_mask):
        model = self.copy()
        model.freeze_mask = tuple(bool(f) for f in freeze_mask)
        return model

    def equals(self, other):
        """bit-exact comparison of every weight and the freeze mask"""
        return self.freeze_mask == other.freeze_mask and self.sizes == other.sizes and all(
            np.array_equal(a, b) for a, b in zip(self.parameters(), other.parameters()))


def he_layer(fan_out, fan_in, rng):
    """Weights ~ Normal(0, 2 / fan_in), zero biases."""
    W = rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_out, fan_in))
    return W, np.zeros(fan_out)


def he_init(sizes, rng):
    """ :param sizes: (d_in, h1, h2, C)
        :param rng: numpy Generator or seed
    """
    if len(sizes) != N_LAYERS + 1 or min(sizes) < 1:
        raise ShapeMismatch('sizes must be 4 positive integers, got %s' % (sizes,))
    rng = np.random.default_rng(rng)
    return MlpModel([he_layer(sizes[i + 1], sizes[i], rng) for i in range(N_LAYERS)])


def softmax(logits):
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def forward(model, X):
    """ :return: (probabilities n x C, ForwardCache) """
    X = np.asarray(X, dtype=np.float64)
    (W1, b1), (W2, b2), (W3, b3) = model.layers
    if X.ndim != 2 or X.shape[1] != W1.shape[1]:
        raise ShapeMismatch('model expects %d inputs, got shape %s' % (W1.shape[1], X.shape))
    Z1 = X @ W1.T + b1
    A1 = np.maximum(Z1, 0.0)
    Z2 = A1 @ W2.T + b2
    A2 = np.maximum(Z2, 0.0)
    logits = A2 @ W3.T + b3
    return softmax(logits), ForwardCache(X, Z1, A1, Z2, A2, logits)


def cross_entropy(probabilities, y):
    """mean of -ln p[true class], p floored at 1e-12"""
    y = np.asarray(y, dtype=np.int64)
    p = probabilities[np.arange(len(y)), y]
    return float(-np.log(np.maximum(p, PROB_FLOOR)).mean())


def backward(model, cache, y, probabilities=None):
    """ Gradients of the mean cross-entropy, as [(dW1, db1), (dW2, db2), (dWout, dbout)].

    Frozen layers get zero gradients.
    """
    y = np.asarray(y, dtype=np.int64)
    if probabilities is None:
        probabilities = softmax(cache.logits)
    n = len(y)
    (_, _), (W2, _), (W3, _) = model.layers

    dlogits = probabilities.copy()
    dlogits[np.arange(n), y] -= 1.0
    dlogits /= n
    dW3 = dlogits.T @ cache.A2
    db3 = dlogits.sum(axis=0)

    dZ2 = (dlogits @ W3) * (cache.Z2 > 0)
    dW2 = dZ2.T @ cache.A1
    db2 = dZ2.sum(axis=0)

    dZ1 = (dZ2 @ W2) * (cache.Z1 > 0)
    dW1 = dZ1.T @ cache.X
    db1 = dZ1.sum(axis=0)

    grads = [(dW1, db1), (dW2, db2), (dW3, db3)]
    return [(np.zeros_like(dW), np.zeros_like(db)) if frozen else (dW, db)
            for (dW, db), frozen in zip(grads, model.freeze_mask)]


def predict(model, X):
    """argmax class per row, ties to the smallest index"""
    probabilities, _ = forward(model, X)
    return probabilities.argmax(axis=1)


def evaluate(model, X, y):
    """ :return: (accuracy, mean cross-entropy) """
    y = np.asarray(y, dtype=np.int64)
    probabilities, _ = forward(model, X)
    accuracy = float((probabilities.argmax(axis=1) == y).mean())
    return accuracy, cross_entropy(probabilities, y)


def serialize_model(model, config=None):
    """ JSON artifact {sizes, freeze_mask, layers: [{W, b}], config_echo}. Floats keep their repr, so weights
    round-trip bit-exactly.
    """
    doc = {'sizes': list(model.sizes),
           'freeze_mask': list(model.freeze_mask),
           'layers': [{'W': W.tolist(), 'b': b.tolist()} for W, b in model.layers],
           'config_echo': config.to_dict() if config is not None else None}
    return json.dumps(doc, sort_keys=True)


def deserialize_model(text):
    doc = json.loads(text)
    layers = [(np.array(layer['W'], dtype=np.float64), np.array(layer['b'], dtype=np.float64))
              for layer in doc['layers']]
    model = MlpModel(layers, doc['freeze_mask'])
    if list(model.sizes) != list(doc['sizes']):
        raise ShapeMismatch('artifact sizes %s do not match its layers %s' % (doc['sizes'], model.sizes))
    return model


def save_model(model, path, config=None):
    with open(path, 'w', encoding='utf-8') as f:
        f.write(serialize_model(model, config))
    return path


def load_model(path):
    with open(path, 'r', encoding='utf-8') as f:
        return deserialize_model(f.read())
