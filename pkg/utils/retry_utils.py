"""
Retry Utilities for numeric refinement

Newton refinement of a root candidate can stall when the full step
overshoots. Each retry restarts from the same candidate with half the
damping of the previous attempt; the last failure is re-raised so the
caller can record the candidate as suspect.
"""

import logging
from typing import Any, Callable

from tenacity import (
    Retrying,
    before_sleep_log,
    retry_if_exception_type,
    stop_after_attempt,
)

from .exceptions import RefinementError

logger = logging.getLogger(__name__)


def create_refinement_retrying(max_attempts: int = 3) -> Retrying:
    """
    Create a tenacity controller that retries only on RefinementError.

    Args:
        max_attempts: Total number of attempts, the first one included

    Returns:
        Configured Retrying object (no wait between attempts)
    """
    return Retrying(
        stop=stop_after_attempt(max_attempts),
        retry=retry_if_exception_type(RefinementError),
        before_sleep=before_sleep_log(logger, logging.DEBUG),
        reraise=True
    )


def retry_refinement(
    func: Callable[..., Any],
    *args,
    max_attempts: int = 3,
    initial_damping: float = 1.0,
    **kwargs
) -> Any:
    """
    Run a damped refinement, halving the damping factor on every retry.

    ``func`` must accept a ``damping`` keyword argument and raise
    RefinementError when it fails to converge.

    Args:
        func: Refinement routine
        *args: Positional arguments for ``func``
        max_attempts: Total number of attempts
        initial_damping: Damping factor of the first attempt
        **kwargs: Keyword arguments for ``func``

    Returns:
        Whatever ``func`` returns on the first successful attempt

    Raises:
        RefinementError: If every attempt failed

    Example:
        >>> root = retry_refinement(newton_polish, fn, x0, target, max_attempts=3)
    """
    for attempt in create_refinement_retrying(max_attempts):
        with attempt:
            number = attempt.retry_state.attempt_number
            damping = initial_damping * 0.5 ** (number - 1)
            if number > 1:
                logger.debug(f"Refinement attempt {number} with damping {damping:g}")
            return func(*args, damping=damping, **kwargs)
