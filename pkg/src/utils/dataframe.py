import io
from typing import Dict, Iterable, List, Optional, Tuple

import pandas as pd

from src.models.errors import DataIOError
from src.utils.file import write_text
from src.utils.logger import get_logger

logger = get_logger(__name__)


def split_comment_header(text: str, prefix: str = "#") -> Tuple[List[str], str]:
    """
    Separate leading comment lines from the CSV body.

    Returns:
        tuple[list[str], str]: comment lines without the prefix, and the remaining text
    """
    comments = []
    lines = text.splitlines(keepends=True)
    body_start = 0
    for index, line in enumerate(lines):
        if line.startswith(prefix):
            comments.append(line[len(prefix):].strip())
            body_start = index + 1
        else:
            break
    return comments, "".join(lines[body_start:])


def parse_comment_meta(comments: Iterable[str]) -> Dict[str, str]:
    """Turn ``key: value`` comment lines into a dictionary."""
    meta = {}
    for line in comments:
        if ":" in line:
            key, value = line.split(":", 1)
            meta[key.strip()] = value.strip()
    return meta


def read_csv_text_as_dataframe(text: str, source: str = "<memory>") -> pd.DataFrame:
    """
    Parse CSV text with round-trip float precision.

    :param text: CSV content without comment lines
    :param source: Name used in error messages
    """
    try:
        return pd.read_csv(io.StringIO(text), float_precision="round_trip")
    except Exception as e:
        raise DataIOError(source, f"Failed to read CSV from {source}: {str(e)}") from e


def dataframe_to_csv_text(df: pd.DataFrame, meta: Optional[Dict[str, object]] = None) -> str:
    """
    Render a DataFrame as CSV: UTF-8, LF endings, shortest round-trip floats,
    optionally preceded by ``# key: value`` comment lines.
    """
    buffer = io.StringIO()
    for key, value in (meta or {}).items():
        buffer.write(f"# {key}: {value}\n")
    df.to_csv(buffer, index=False, lineterminator="\n", float_format=None)
    return buffer.getvalue()


def write_dataframe_as_csv(df: pd.DataFrame, file_path: str, meta: Optional[Dict[str, object]] = None):
    """
    Write a pandas DataFrame to a CSV file, locally or in S3.

    :param df: Pandas DataFrame
    :param file_path: Local file path or S3 path (s3://bucket/key)
    :param meta: Optional metadata echoed as comment lines
    """
    write_text(file_path, dataframe_to_csv_text(df, meta), content_type="text/csv")
    logger.info(f"CSV file saved to {file_path} ({len(df)} rows)")
