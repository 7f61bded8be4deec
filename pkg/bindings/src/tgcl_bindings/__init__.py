"""Session bindings: drive tgcl curricula from an external training loop."""
from .session import (BindingError, ExternalSession, PairPlan, ProtocolError,
                      SessionConfig, SessionPlan, session_create, session_delays,
                      session_plan, session_record, session_report)

__version__ = "0.1.0"

__all__ = [
    "BindingError", "ExternalSession", "PairPlan", "ProtocolError",
    "SessionConfig", "SessionPlan", "session_create", "session_delays",
    "session_plan", "session_record", "session_report", "__version__",
]
