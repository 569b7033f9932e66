"""
Model surgery for meta-level transfer: keep the source hidden layers, draw a fresh output layer for the target
classes and freeze 0, 1 or 2 hidden layers.
"""
import numpy as np

from metaxfer.nn.mlp import MlpModel, ShapeMismatch, he_layer
import metaxfer.util.log as log


__all__ = ['TransferConfig', 'transplant', 'freeze_mask_for', 'FREEZE_LEVELS', 'FREEZE_LABELS']

logger = log.get_logger(__name__)

FREEZE_LEVELS = (0, 1, 2)
FREEZE_LABELS = {0: '0HL', 1: '1HL', 2: '2HL'}


def freeze_mask_for(frozen_hidden_layers):
    """0 -> nothing frozen (warm start), 1 -> first hidden layer, 2 -> both hidden layers. Output stays trainable."""
    if frozen_hidden_layers not in FREEZE_LEVELS:
        raise ValueError('frozen_hidden_layers must be one of %s, got %r' % (FREEZE_LEVELS, frozen_hidden_layers))
    return tuple(idx < frozen_hidden_layers for idx in range(3))


class TransferConfig(object):
    """
    Parameters
    ----------
    source_model : MlpModel trained on the source scenario
    frozen_hidden_layers : 0, 1 or 2
    seed : seed of the output layer re-initialization
    """
    def __init__(self, source_model, frozen_hidden_layers, seed=0):
        freeze_mask_for(frozen_hidden_layers)
        self.source_model = source_model
        self.frozen_hidden_layers = frozen_hidden_layers
        self.seed = seed

    @property
    def label(self):
        return FREEZE_LABELS[self.frozen_hidden_layers]

    def __repr__(self):
        return '%s(%s, source=%r, seed=%s)' % (self.__class__.__name__, self.label, self.source_model, self.seed)


def transplant(source, target_c, cfg, target_input_dim=None, hidden_sizes=None):
    """ Build the target model from a source model. The source is never modified.

    Parameters
    ----------
    source : MlpModel
    target_c : number of target classes
    cfg : TransferConfig
    target_input_dim : expected K of the target, checked when given
    hidden_sizes : expected (h1, h2) of the target architecture, checked when given

    Returns
    -------
    MlpModel with copied hidden layers, a He-initialized (target_c x h2) output layer and the cfg freeze mask
    """
    d_in, h1, h2, _ = source.sizes
    if target_input_dim is not None and target_input_dim != d_in:
        raise ShapeMismatch('source expects %d inputs, target provides %d' % (d_in, target_input_dim))
    if hidden_sizes is not None and tuple(hidden_sizes) != (h1, h2):
        raise ShapeMismatch('source hidden sizes %s differ from target %s' % ((h1, h2), tuple(hidden_sizes)))
    if target_c < 2:
        raise ShapeMismatch('target needs at least 2 classes, got %d' % target_c)

    rng = np.random.default_rng(cfg.seed)
    hidden = [(W.copy(), b.copy()) for W, b in source.layers[:2]]
    model = MlpModel(hidden + [he_layer(target_c, h2, rng)], freeze_mask_for(cfg.frozen_hidden_layers))
    logger.debug('transplanted %r -> %r' % (source, model))
    return model
