"""combicodec: lossless compression of combinatorial objects.

Encodes sequences, multisets, permutations, truncated permutations,
combinations, and their adaptively-modelled variants to within 2 bits of
their Shannon information content, using arithmetic coding over exactly
computed conditional distributions.
"""

from .codecs import (
    MODEL_NAMES,
    CodingContext,
    EncodedBlob,
    decode,
    encode,
    ic_adaptive_multiset,
    ic_adaptive_sequence,
    ic_combination,
    ic_multiset,
    ic_permutation,
    ic_sequence,
    ic_trunc_permutation,
    ic_uniform_multiset,
    information_content,
    join,
    model_probability,
    split_sequence,
)
from .coder import DEFAULT_FREQ_BITS, Decoder, Encoder, FrequencyTable, discretize
from .errors import (
    BudgetError,
    CodingError,
    CombicodecError,
    ContainerError,
    ValidationError,
)
from .models import Alphabet, DirichletParams, Multiset, SourceDistribution

__version__ = "0.1.0"

__all__ = [
    "MODEL_NAMES",
    "CodingContext",
    "EncodedBlob",
    "Alphabet",
    "DirichletParams",
    "Multiset",
    "SourceDistribution",
    "FrequencyTable",
    "Encoder",
    "Decoder",
    "discretize",
    "DEFAULT_FREQ_BITS",
    "encode",
    "decode",
    "split_sequence",
    "join",
    "model_probability",
    "information_content",
    "ic_sequence",
    "ic_multiset",
    "ic_permutation",
    "ic_trunc_permutation",
    "ic_combination",
    "ic_uniform_multiset",
    "ic_adaptive_sequence",
    "ic_adaptive_multiset",
    "CombicodecError",
    "ValidationError",
    "CodingError",
    "ContainerError",
    "BudgetError",
]
