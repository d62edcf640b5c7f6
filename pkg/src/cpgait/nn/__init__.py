from .activations import (
    ALPHA_DROP_VALUE,
    SELU_ALPHA,
    SELU_LAMBDA,
    alpha_dropout,
    alpha_dropout_affine,
    selu,
    selu_grad,
    softmax,
)
from .adam import AdamState, adam_step
from .checkpoint import load_checkpoint, save_checkpoint
from .layers import conv1d_backward, conv1d_forward, conv_output_length
from .network import (
    ForwardCache,
    ModelConfig,
    ModelParams,
    forward,
    grad_logit_wrt_last_conv,
    init_params,
    logits_from_last_conv,
    loss_and_gradients,
    predict,
    predict_batch,
)
from .training import TrainConfig, TrainHistory, train

__all__ = [
    "ALPHA_DROP_VALUE",
    "SELU_ALPHA",
    "SELU_LAMBDA",
    "AdamState",
    "ForwardCache",
    "ModelConfig",
    "ModelParams",
    "TrainConfig",
    "TrainHistory",
    "adam_step",
    "alpha_dropout",
    "alpha_dropout_affine",
    "conv1d_backward",
    "conv1d_forward",
    "conv_output_length",
    "forward",
    "grad_logit_wrt_last_conv",
    "init_params",
    "load_checkpoint",
    "logits_from_last_conv",
    "loss_and_gradients",
    "predict",
    "predict_batch",
    "save_checkpoint",
    "selu",
    "selu_grad",
    "softmax",
    "train",
]
