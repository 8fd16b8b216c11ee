"""Skeleton-to-image encoding: formats, encoder, masks, objectives and stats."""

from ._s2i import (
    FormatError,
    ParseError,
    S2IError,
    S2IValueError,
    channel_stats,
    cross_entropy,
    decode,
    denormalize,
    diffmae_loss,
    encode,
    formats,
    forward_diffuse,
    joint_order,
    load_sequence,
    mae_loss,
    make_mask,
    normalize,
    part_sizes,
    patchify,
    schedule,
    unpatchify,
)

__all__ = [
    "FormatError",
    "ParseError",
    "S2IError",
    "S2IValueError",
    "channel_stats",
    "cross_entropy",
    "decode",
    "denormalize",
    "diffmae_loss",
    "encode",
    "formats",
    "forward_diffuse",
    "joint_order",
    "load_sequence",
    "mae_loss",
    "make_mask",
    "normalize",
    "part_sizes",
    "patchify",
    "schedule",
    "unpatchify",
]
