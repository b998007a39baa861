"""Succinct ordinal trees on balanced parentheses with range min-max trees."""
from .bitmap import CompressedDynBitmap, decode_offset, encode_offset
from .bits import ChunkStats, ParenBitVector, chunk_stats, combine_stats, scan_chunk
from .dynamic import DynamicRmm, attach, detach
from .errors import BalanceError, ContractError, NoParentError, RmmError
from .oracle import NaiveTree, gen_balanced, naive_primitive, naive_tree_op
from .partial_sums import CodeSequence, DeltaCodec, FixedCodec, GammaCodec
from .rmq import Pm1Array
from .static import StaticRmm, StaticRmmConfig
from .tree import OrdinalTree

__all__ = [
    "BalanceError", "ChunkStats", "CodeSequence", "CompressedDynBitmap", "ContractError",
    "DeltaCodec", "DynamicRmm", "FixedCodec", "GammaCodec", "NaiveTree", "NoParentError",
    "OrdinalTree", "ParenBitVector", "Pm1Array", "RmmError", "StaticRmm", "StaticRmmConfig",
    "attach", "chunk_stats", "combine_stats", "decode_offset", "detach", "encode_offset",
    "gen_balanced", "naive_primitive", "naive_tree_op", "scan_chunk",
]
__version__ = "0.1.0"
