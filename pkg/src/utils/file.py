import json
import os
from typing import Any, Dict, Tuple

import boto3
import yaml
from tenacity import retry, retry_if_not_exception_type, stop_after_attempt, wait_exponential

from src.models.errors import ConfigError, DataIOError
from src.utils.logger import get_logger

logger = get_logger(__name__)
_s3_client = None


def s3_client():
    global _s3_client
    if _s3_client is None:
        _s3_client = boto3.client("s3")
    return _s3_client


def is_s3(path: str) -> bool:
    return str(path).startswith("s3://")


def get_bucket_and_key(url: str) -> Tuple[str, str]:
    """
    Extracts the bucket and key from an S3 path

    Args:
        url (str): The S3 file path

    Returns:
        tuple[str, str]: The bucket and key
    """
    stripped = url[5:] if url.startswith("s3://") else url
    if "/" not in stripped:
        return stripped, ""
    bucket, key = stripped.split("/", 1)
    return bucket, key


def join_path(directory: str, filename: str) -> str:
    """Join a local directory or an S3 prefix with a file name."""
    if not directory:
        return filename
    if is_s3(directory):
        return f"{directory.rstrip('/')}/{filename}"
    return os.path.join(directory, filename)


def log_retry_attempt(retry_state):
    """
    Logging function to provide detailed information about retry attempts.

    :param retry_state (RetryCallState): The current state of the retry attempt
    """
    logger.info(
        f"Retry attempt {retry_state.attempt_number}. "
        f"Last exception: {retry_state.outcome.exception()}"
    )


s3_retry = retry(
    stop=stop_after_attempt(3),
    wait=wait_exponential(multiplier=2, min=2),
    retry=retry_if_not_exception_type(DataIOError),
    before_sleep=log_retry_attempt,
    reraise=True,
)


@s3_retry
def _s3_get(path: str) -> bytes:
    bucket, key = get_bucket_and_key(path)
    obj = s3_client().get_object(Bucket=bucket, Key=key)
    return obj["Body"].read()


@s3_retry
def _s3_put(path: str, body: bytes, content_type: str):
    bucket, key = get_bucket_and_key(path)
    s3_client().put_object(Bucket=bucket, Key=key, Body=body, ContentType=content_type)


def read_bytes(path: str) -> bytes:
    """
    Read a whole file from local disk or S3.

    :param path: Local file path or S3 path (s3://bucket/key)
    """
    try:
        if is_s3(path):
            return _s3_get(path)
        with open(path, "rb") as handle:
            return handle.read()
    except Exception as e:
        raise DataIOError(path, f"Failed to read {path}: {str(e)}") from e


def read_text(path: str, encoding: str = "utf-8") -> str:
    raw = read_bytes(path)
    try:
        return raw.decode(encoding)
    except UnicodeDecodeError as e:
        raise DataIOError(path, f"Failed to decode {path} as {encoding}: {str(e)}") from e


def ensure_target_dir(target_file: str):
    """
    Ensures the target directory exists for local paths.
    S3 does not require directory creation.

    :param target_file: Local file path or S3 path (s3://bucket/key)
    """
    if not is_s3(target_file):
        target_dir = os.path.dirname(target_file)
        if target_dir:
            os.makedirs(target_dir, exist_ok=True)


def write_bytes(path: str, payload: bytes, content_type: str = "application/octet-stream"):
    """
    Write bytes to a local path or S3, creating local parent directories.

    :param path: Local file path or S3 path (s3://bucket/key)
    :param payload: Raw content
    :param content_type: MIME type recorded on the S3 object
    """
    try:
        if is_s3(path):
            _s3_put(path, payload, content_type)
        else:
            ensure_target_dir(path)
            with open(path, "wb") as handle:
                handle.write(payload)
        logger.info(f"Wrote {len(payload)} bytes to {path}")
    except Exception as e:
        raise DataIOError(path, f"Failed to write {path}: {str(e)}") from e


def write_text(path: str, text: str, content_type: str = "text/plain"):
    write_bytes(path, text.encode("utf-8"), content_type)


def load_config_file(config_path: str) -> Dict[str, Any]:
    """
    Read a YAML or JSON configuration document from local disk or S3.

    :param config_path: Path of the configuration file
    """
    text = read_text(config_path)
    try:
        config = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError("", f"Failed to parse {config_path}: {str(e)}") from e
    return config if config is not None else {}


def dumps_json(payload: Any) -> str:
    """Canonical JSON text: sorted keys, fixed indent, trailing newline."""
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_as_json(payload: Any, filepath: str):
    write_text(filepath, dumps_json(payload), content_type="application/json")
