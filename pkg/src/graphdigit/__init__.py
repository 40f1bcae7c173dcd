"""graphdigit: digitize hand-drawn vitals symbols on flowsheet graph rasters."""

from .backend import backend_name
from .config import RunConfig
from .errors import (
    CannotImputeError,
    DegenerateSampleError,
    FormatError,
    GraphDigitError,
    ParameterError,
    RasterParseError,
    ValidationError,
)
from .evaluation import (
    DetectionCounts,
    ErrorSummary,
    FTestResult,
    PrecisionRecallF1,
    TTestResult,
    detection_confusion,
    dice_coefficient,
    error_summary_from_pairs,
    f_test_variances,
    f_upper_p,
    impute_false_negatives,
    paired_t_test,
    precision_recall_f1,
    regression_metrics,
    student_t_upper_p,
    true_positive_errors,
)
from .extraction import ExtractionConfig, annotations_to_masks, extract_bp, extract_heart_rate
from .geometry import (
    DIASTOLIC_BP,
    HEART_RATE,
    SYMBOLS,
    SYSTOLIC_BP,
    BinaryMask,
    GraphGeometry,
    GrayImage,
    TimeSeries,
    binarize,
    crop_padded,
    iround,
    pixel_to_value,
    value_to_pixel,
    zero_pad,
)
from .morphology import (
    LabeledRegions,
    Region,
    label_components,
    opening_disk,
    region_props,
    remove_small_objects,
)
from .report import build_report
from .synth import (
    RenderStyle,
    SurgeryRecord,
    generate_dataset,
    random_record,
    regenerate_dataset,
    render_flowsheet,
)
from .templates import (
    Match,
    Template,
    builtin_template_pack,
    builtin_templates,
    find_matches,
    load_template_pack,
    save_template_pack,
    tm_extract,
    zncc_map,
)

__version__ = "0.1.0"
