"""Exception types raised by the runtime and its front end."""


class PyssError(Exception):
    """Base class for every error raised by pyss."""


class ArityMismatch(PyssError, TypeError):
    def __init__(self, expected, got):
        super().__init__(f"function takes {expected} argument(s) but {got} access mode(s) were given")
        self.expected = expected
        self.got = got


class InvalidParameterKind(PyssError, TypeError):
    pass


class NotInitialized(PyssError, RuntimeError):
    pass


class AlreadyInitialized(PyssError, RuntimeError):
    pass


class InvalidThreadCount(PyssError, ValueError):
    pass


class SubmitFromWorker(PyssError, RuntimeError):
    pass


class ModeChangeWhileRunning(PyssError, RuntimeError):
    pass


class DuplicateInstanceId(PyssError, ValueError):
    pass


class InvalidTransition(PyssError, RuntimeError):
    pass


class MalformedEventLog(PyssError, ValueError):
    pass


class TasksFailed(PyssError):
    """Raised by a barrier when one or more task bodies raised.

    ``failures`` maps instance id to the exception the body raised;
    ``cancelled`` lists the ids of downstream tasks that were never run.
    """

    def __init__(self, failures, cancelled):
        self.failures = dict(failures)
        self.cancelled = sorted(cancelled)
        ids = ", ".join(str(i) for i in sorted(self.failures))
        super().__init__(
            f"{len(self.failures)} task(s) failed ({ids}); {len(self.cancelled)} cancelled"
        )
