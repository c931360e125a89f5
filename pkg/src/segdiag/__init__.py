"""Attribute-aided fine-grained evaluation and diagnosis of word segmenters."""

__version__ = "0.1.0"

from .attributes import (  # noqa: E402
    ATTRIBUTES,
    AttributeExtractor,
    AttributeVector,
    TrainingStats,
    attribute_vector,
    build_training_stats,
    merge_training,
    psi_char,
    psi_word,
)
from .baseline import FMMSegmenter, MatchDict, segment_fmm  # noqa: E402
from .bucketing import (  # noqa: E402
    BucketResult,
    BucketSpec,
    PerformanceTensor,
    QuantileBucketizer,
    bucket_f1,
    build_tensor,
    corpus_f1,
    make_buckets,
)
from .corpus import (  # noqa: E402
    Corpus,
    Sentence,
    Span,
    derive_labels,
    extract_spans,
    parse_segmented_file,
)
from .crossdata import (  # noqa: E402
    CrossTensor,
    PsiMatrix,
    build_cross_tensor,
    distance_edges,
    psi,
    psi_u_correlation,
)
from .diagnosis import aided_diagnose, self_diagnose  # noqa: E402
from .exceptions import SegdiagError, ValidationError  # noqa: E402
from .measures import alpha_mu, alpha_rho, model_wise, spearman  # noqa: E402
from .selection import SelectionPlan, select_order  # noqa: E402
from .stats import FriedmanResult, chi2_sf, friedman  # noqa: E402
