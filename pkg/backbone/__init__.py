from .attention import AttentionMasks, attention_block, multi_head_attention
from .flops import attention_flops
from .layers import patch_embed, rmsnorm, rope_apply, rope_angles, rope_rotate, swiglu_ffn
from .modelConfig import ModelConfig
from .transformer import block_kinds, count_parameters, forward, init_params, parameter_shapes
