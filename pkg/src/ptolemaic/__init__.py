"""Pivot-based similarity search with triangular and Ptolemaic filtering.

The short version: precompute distances from every object to a few pivots;
at query time, cheap lower bounds derived from those distances rule out most
objects before any real distance evaluation.  Besides the classic
``|d(q,p) - d(o,p)|`` triangle bound, this package implements the stronger
pivot-pair bound ``(d(q,p)*d(o,s) - d(q,s)*d(o,p)) / d(p,s)``, valid for
distances satisfying Ptolemy's inequality (Euclidean, quadratic-form, and
square roots of arbitrary metrics), plus the measurement harness that
quantifies how much extra filtering it buys.
"""

from .bounds import (
    DistanceInterval,
    all_pairs,
    consecutive_pairs,
    pto_interval,
    pto_lower,
    shell_lower,
    tri_interval,
    tri_lower,
)
from .data import DataSet, format_dataset, parse_dataset
from .datagen import (
    GenSpec,
    clustered_vectors,
    generate,
    histogram_matrix,
    load_strings,
    random_sets,
    random_words,
    synthetic_histograms,
    uniform_vectors,
)
from .distances import (
    AngularDistance,
    Distance,
    HammingSetDistance,
    JaccardSetDistance,
    LevenshteinDistance,
    LpDistance,
    NotPositiveDefiniteError,
    QFMatrix,
    QuadraticFormDistance,
    SqrtDistance,
    euclidean,
    make_distance,
    qf_matrix_from_bin_distances,
    spd_cholesky,
    sqrt_metric,
)
from .experiments import (
    BenchConfig,
    RegionBreakdown,
    bench_filtering,
    bound_accuracy_grid,
    radius_for_k,
    region_breakdown,
    relative_power,
)
from .index import (
    FilterMode,
    PivotTable,
    QueryStats,
    build,
    linear_scan,
    lower_bound,
    range_query,
)
from .pivots import (
    PivotSet,
    estimate_max_distance,
    estimate_max_distance_sweep,
    random_select,
    sss_select,
)
from .ptolemaicity import (
    PtoReport,
    exhaustive_rate,
    ptolemaic_check,
    ptolemaicity_rate,
    sample_quadruples,
)

__version__ = "0.1.0"
