"""Adversarial expansion and reduction of test suites for verifiable code generation tasks."""

__version__ = "0.1.0"

from .values import InputMap, ParamSignature, Value, ValueType  # noqa: E402
from .suite import Task, TestSuite, load_suite, load_task, load_tasks, save_suite  # noqa: E402

__all__ = [
    "InputMap",
    "ParamSignature",
    "Task",
    "TestSuite",
    "Value",
    "ValueType",
    "__version__",
    "load_suite",
    "load_task",
    "load_tasks",
    "save_suite",
]
