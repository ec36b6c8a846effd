"""Exception taxonomy for the annotation store."""


class StoreError(Exception):
    pass


class PermissionDenied(StoreError):
    pass


class ValidationFailed(StoreError):
    def __init__(self, violations):
        super().__init__(f"{len(violations)} validation violation(s)")
        self.violations = list(violations)


class UnknownTask(StoreError):
    pass


class UnknownUser(StoreError):
    pass


class RoleMismatch(StoreError):
    pass


class NotAssigned(StoreError):
    pass


class LeaseConflict(StoreError):
    """Another annotator holds an unexpired lease, or the submission is stale."""

