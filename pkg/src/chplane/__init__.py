"""chplane: complexity-entropy mapping and stylistic diversity of image corpora.

The package turns a directory of images plus a CSV manifest into:

  * per-image normalized permutation entropy H and statistical complexity C
    (ordinal patterns of 2x2 pixel windows by default),
  * two independent similarity measures between images: cosine similarity
    of PCA-reduced network features and Jaccard similarity of matched SIFT
    keypoints,
  * per-bin density/diversity maps of the C-H plane, yearly trajectories
    with confidence ellipses, year-classification baselines, and
    regressions of similarity on C-H statistics with ARMA errors.

See the `chplane` command-line tool for the batch pipeline and the demos/
directory for narrative walkthroughs of each capability.
"""

from .errors import ChplaneError
from .image_io import CorpusRecord, ImageMatrix, decode_image, load_image, load_manifest, to_grayscale
from .ordinal import (
    BoundaryCurves,
    CHPoint,
    EmbeddingParams,
    OrdinalDistribution,
    ch_point,
    complexity_bounds,
    js_divergence,
    max_js_divergence,
    normalized_entropy,
    ordinal_patterns,
    statistical_complexity,
)
from .sift import (
    DescriptorSet,
    Keypoint,
    MatchSet,
    detect_and_describe,
    jaccard_similarity,
    match_descriptors,
)
from .similarity import (
    PCAModel,
    SimilaritySummary,
    build_embeddings,
    cosine_similarity,
    fit_pca,
    mean_pairwise_similarity,
    required_sample_size,
    subsample,
)
from .atlas import (
    BinGrid,
    EllipseParams,
    GridSpec,
    YearlyStats,
    bin_diversity,
    bin_points,
    confidence_ellipse,
    dummy_classify_cv,
    knn_classify_cv,
    trajectory,
    yearly_stats,
)
from .econometrics import (
    AdfResult,
    RegressionFit,
    RegressionSpec,
    adf_test,
    fit_arma_regression,
    kalman_loglik,
    simulate_arma,
)
from .features import EmbeddingTable, RawFeatures, read_chemb, read_chfeat, write_chemb, write_chfeat

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
