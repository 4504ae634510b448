import logging

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(levelname)s - [%(filename)s] [%(name)s] - %(message)s",
)


def get_logger(name):
    """
    Returns the shared pipeline logger for a module

    Args:
        name: Dotted module name, usually ``__name__``

    Returns:
        logging.Logger: The logger instance
    """
    return logging.getLogger(name)


def set_level(level: str):
    """
    Adjust verbosity of every pipeline logger at once (used by ``--log-level``).

    :param level: Standard level name such as "DEBUG" or "WARNING"
    """
    logging.getLogger().setLevel(level.upper())
