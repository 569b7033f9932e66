"""
Adam optimizer and the minibatch training loop of the meta-learner.
"""
import numpy as np
import pandas as pd

from metaxfer.nn.mlp import backward, cross_entropy, forward
import metaxfer.util.log as log


__all__ = ['TrainConfig', 'AdamState', 'adam_step', 'train', 'save_history']

logger = log.get_logger(__name__)


class TrainConfig(object):
    """ Optimizer and loop settings.

    Parameters
    ----------
    learning_rate : float > 0, default 1e-3
    epochs : int >= 1, default 200
    batch_size : int >= 1, default 32 (the last partial batch is kept)
    beta1, beta2, epsilon : Adam constants
    seed : non-negative int driving the per-epoch shuffles
    """
    FIELDS = ('learning_rate', 'epochs', 'batch_size', 'beta1', 'beta2', 'epsilon', 'seed')

    def __init__(self, learning_rate=1e-3, epochs=200, batch_size=32, beta1=0.9, beta2=0.999, epsilon=1e-8,
                 seed=0):
        self.learning_rate = float(learning_rate)
        self.epochs = int(epochs)
        self.batch_size = int(batch_size)
        self.beta1 = float(beta1)
        self.beta2 = float(beta2)
        self.epsilon = float(epsilon)
        self.seed = int(seed)

        if not self.learning_rate > 0:
            raise ValueError('learning_rate must be > 0')
        if self.epochs < 1:
            raise ValueError('epochs must be >= 1')
        if self.batch_size < 1:
            raise ValueError('batch_size must be >= 1')
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError('beta1 and beta2 must be in [0, 1)')
        if not self.epsilon > 0:
            raise ValueError('epsilon must be > 0')
        if self.seed < 0:
            raise ValueError('seed must be non-negative')

    def __repr__(self):
        args = ', '.join('%s=%r' % (f, getattr(self, f)) for f in self.FIELDS)
        return '%s(%s)' % (self.__class__.__name__, args)

    def __eq__(self, other):
        return isinstance(other, TrainConfig) and self.to_dict() == other.to_dict()

    def replace(self, **kwargs):
        values = self.to_dict()
        values.update(kwargs)
        return TrainConfig(**values)

    def to_dict(self):
        return {f: getattr(self, f) for f in self.FIELDS}

    @classmethod
    def from_dict(cls, data):
        return cls(**{f: data[f] for f in cls.FIELDS if f in data})


class AdamState(object):
    """First / second moment accumulators shaped like the model parameters, and the step count t."""

    def __init__(self, m, v, t=0):
        self.m = m
        self.v = v
        self.t = t

    @classmethod
    def zeros_like(cls, model):
        return cls([np.zeros_like(p) for p in model.parameters()],
                   [np.zeros_like(p) for p in model.parameters()])


def adam_step(model, grads, state, config):
    """ One bias-corrected Adam update, applied in place to the unfrozen layers of model.

    Frozen layers and their accumulators are left untouched.

    :return: (model, state)
    """
    state.t += 1
    bc1 = 1.0 - config.beta1 ** state.t
    bc2 = 1.0 - config.beta2 ** state.t

    for idx, frozen in enumerate(model.freeze_mask):
        if frozen:
            continue
        for k, (param, g) in enumerate(zip(model.layers[idx], grads[idx])):
            slot = 2 * idx + k
            m, v = state.m[slot], state.v[slot]
            m *= config.beta1
            m += (1.0 - config.beta1) * g
            v *= config.beta2
            v += (1.0 - config.beta2) * (g * g)
            param -= config.learning_rate * (m / bc1) / (np.sqrt(v / bc2) + config.epsilon)
    return model, state


def train(model, X, y, config):
    """ Minibatch Adam on a copy of model. Epoch e shuffles with a generator seeded by (config.seed, e).

    :return: (trained model, per-epoch loss on the whole training set)
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if len(X) != len(y) or len(y) == 0:
        raise ValueError('need a non-empty training set with one label per row')

    model = model.copy()
    state = AdamState.zeros_like(model)
    n = len(y)
    history = []
    for epoch in range(config.epochs):
        order = np.random.default_rng([config.seed, epoch]).permutation(n)
        for start in range(0, n, config.batch_size):
            rows = order[start:start + config.batch_size]
            probabilities, cache = forward(model, X[rows])
            grads = backward(model, cache, y[rows], probabilities)
            adam_step(model, grads, state, config)
        probabilities, _ = forward(model, X)
        history.append(cross_entropy(probabilities, y))
        if logger.isEnabledFor(log.logging.DEBUG) and (epoch + 1) % 50 == 0:
            logger.debug('epoch %d: train loss %.6f' % (epoch + 1, history[-1]))
    return model, history


def save_history(history, path):
    """ (epoch, loss) CSV """
    frame = pd.DataFrame({'epoch': np.arange(1, len(history) + 1), 'loss': history})
    frame.to_csv(path, index=False)
    return path
