from src.analyze.imaging import (
    ImagingGrid,
    IndicatorMap,
    export_map,
    half_max_width,
    indicator_map,
    normalize_map,
    theory_map,
)
from src.analyze.peaks import Localization, Peak, PeakList, extract_peaks, localization_error
from src.analyze.theory import (
    SeriesParams,
    collapsed_kernel,
    profile_e,
    profile_e1,
    profile_e2,
    quadrature_kernel,
    structure_kernel,
)
