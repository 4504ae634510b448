from src.ingest.fresnel import (
    PRESETS,
    ColumnMap,
    CoverageReport,
    MultistaticRecords,
    extract_bistatic,
    parse_fresnel,
    scattered_records,
)
