"""
RDQ Lab - rule-driven deep Q-learning on deterministic gridworlds.

An agent learns safety rules from its own failures, encoded in a
qualitative spatial language, and uses them both to filter its actions
and to distil a safe teacher policy into its Q-network.
"""

from rdq_lab.constants import APP_NAME, APP_VERSION

__version__ = APP_VERSION
__app_name__ = APP_NAME

__all__ = [
    "APP_NAME",
    "APP_VERSION",
    "__version__",
    "__app_name__",
]
