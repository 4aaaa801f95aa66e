"""Set-function decomposition, convex surrogates and cutting-plane training."""

from ._core import (
    Decomposition,
    LinearModel,
    SetFunction,
    b_surrogate,
    check_structure,
    decompose,
    dice_as_setfn,
    dice_gain_curves,
    dice_loss,
    evaluate,
    hinge_sum,
    loss_setfn,
    lovasz_hinge,
    mistake_set,
    slack_rescale_exact,
    slack_rescale_greedy,
    synth_generate,
    train,
    verify_decomposition,
)

__all__ = [
    "Decomposition",
    "LinearModel",
    "SetFunction",
    "b_surrogate",
    "check_structure",
    "decompose",
    "dice_as_setfn",
    "dice_gain_curves",
    "dice_loss",
    "evaluate",
    "hinge_sum",
    "loss_setfn",
    "lovasz_hinge",
    "mistake_set",
    "slack_rescale_exact",
    "slack_rescale_greedy",
    "synth_generate",
    "train",
    "verify_decomposition",
]
