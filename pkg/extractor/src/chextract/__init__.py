"""chextract: pretrained-ResNet feature extraction to .chfeat exchange files.

This package only runs the network and serializes raw feature rows; all
statistics (PCA, similarity) belong to the analysis side that ingests the
files.  Per image it emits:

  * low:  channel-mean of the 56x56x64 max-pool feature map, flattened to
          3136 values (channel-max via a flag),
  * high: the 512-value global-average-pool output.
"""

from .extract import LOW_DIM, HIGH_DIM, extract_features, read_chfeat_rows
from .model import load_backbone, save_random_weights

__version__ = "0.1.0"
__all__ = [
    "LOW_DIM",
    "HIGH_DIM",
    "extract_features",
    "read_chfeat_rows",
    "load_backbone",
    "save_random_weights",
]
