from .checkpoint import Checkpoint, checkpoint_exists, load_checkpoint, save_checkpoint
from .forecaster import forecast, point_forecast, quantiles
from .optimizer import AdamWState, adamw_step, check_gradients, clip_grad_norm
from .schedule import wsd_lr
from .trainConfig import TrainConfig
from .trainer import TrainResult, batch_loss, heldout_loss, heldout_nll, normalize, train
