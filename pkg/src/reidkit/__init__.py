"""reidkit: desk-scale machinery for long-term person re-id experiments.

Subpackages:
    corpus    embedding/metadata ingestion, validation, synthesis, and
              transfer-protocol (KS/CCD) manifest composition
    metrics   distances, protocol masks, templating, CMC/mAP, TAR@FAR
    mining    P-K sampling, hardest-negative triplet loss, Adam, training
    imageops  PPM rasters, patch occlusion, augmentations, vector codecs
    report    benchmark sweeps, signed ablation deltas, occlusion curves
    cli       the `reidkit` command
"""

from . import corpus, imageops, metrics, mining, report
from .errors import ReidkitError

__version__ = "0.1.0"

__all__ = ["ReidkitError", "corpus", "imageops", "metrics", "mining", "report", "__version__"]
