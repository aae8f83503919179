from .networks import (
    Constellation,
    DecoderNet,
    EncoderNet,
    enumerate_constellation,
    feature_map,
    feature_map_np,
    frozen_constellation,
    labels_pm1,
    nn_demodulate,
    nn_modulate,
    power_normalize,
)
from .losses import (
    PROB_EPS,
    bce_loss,
    gmi_loss,
    gmi_objective,
    gmi_samples_np,
    llr_from_prob,
    metric_q,
)
from .checkpoint import ModelCheckpoint, load_checkpoint, save_checkpoint
from .training import TrainConfig, stage1_checkpoint, train_two_stage

__all__ = [
    "Constellation", "DecoderNet", "EncoderNet", "enumerate_constellation",
    "feature_map", "feature_map_np", "frozen_constellation", "labels_pm1",
    "nn_demodulate", "nn_modulate", "power_normalize",
    "PROB_EPS", "bce_loss", "gmi_loss", "gmi_objective", "gmi_samples_np",
    "llr_from_prob", "metric_q",
    "ModelCheckpoint", "load_checkpoint", "save_checkpoint",
    "TrainConfig", "stage1_checkpoint", "train_two_stage",
]
