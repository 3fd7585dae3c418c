"""Hard and soft agreement rates for user-elicitation studies.

The hard rate scores exact-match groupings of proposals; the soft rate
scores pairwise similarity of binary description vectors and reduces to
the hard rate when vectors one-hot encode group membership.  The package
adds a Monte-Carlo null model for the soft rate, study file formats with
report generation, a CLI, and an annotation-capture HTTP service.
"""

from .metrics import (
    DEFAULT_SIMILARITY,
    DescriptionVector,
    DimensionMismatchError,
    EquivalenceGrouping,
    RateValue,
    SimilarityKind,
    agreement_rate,
    cosine_similarity,
    jaccard_similarity,
    one_hot_embed,
    overall_soft_agreement,
    percent_agreeing,
    soft_agreement_rate,
)
from .nullsim import (
    NullDistribution,
    NullModelParams,
    cdf,
    cdf_exact,
    histogram_csv,
    sample_null_sar,
    simulate,
    summarize,
)
from .studyio import (
    AgreementReport,
    ColumnSummary,
    Descriptor,
    DescriptorTaxonomy,
    Proposal,
    Referent,
    ReportRow,
    StudyDataset,
    ValidationError,
    build_report,
    bundled_taxonomy,
    load_dataset,
    load_report,
    load_taxonomy,
    parse_dataset,
    parse_report,
    parse_taxonomy,
    save_dataset,
    save_report,
    save_taxonomy,
    write_dataset,
    write_report,
    write_taxonomy,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_SIMILARITY",
    "DescriptionVector",
    "DimensionMismatchError",
    "EquivalenceGrouping",
    "RateValue",
    "SimilarityKind",
    "agreement_rate",
    "cosine_similarity",
    "jaccard_similarity",
    "one_hot_embed",
    "overall_soft_agreement",
    "percent_agreeing",
    "soft_agreement_rate",
    "NullDistribution",
    "NullModelParams",
    "cdf",
    "cdf_exact",
    "histogram_csv",
    "sample_null_sar",
    "simulate",
    "summarize",
    "AgreementReport",
    "ColumnSummary",
    "Descriptor",
    "DescriptorTaxonomy",
    "Proposal",
    "Referent",
    "ReportRow",
    "StudyDataset",
    "ValidationError",
    "build_report",
    "bundled_taxonomy",
    "load_dataset",
    "load_report",
    "load_taxonomy",
    "parse_dataset",
    "parse_report",
    "parse_taxonomy",
    "save_dataset",
    "save_report",
    "save_taxonomy",
    "write_dataset",
    "write_report",
    "write_taxonomy",
    "__version__",
]
