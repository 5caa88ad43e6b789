class AnalysisError(Exception):
    """Base error; `module` names the component that raised it."""

    module = "core"

    def __init__(self, message: str, module: str | None = None):
        super().__init__(message)
        if module is not None:
            self.module = module

    def qualified(self) -> str:
        return f"[{self.module}] {self}"


class InputError(AnalysisError):
    module = "cli"


class PresentationError(AnalysisError):
    module = "presentations"


class BackendError(AnalysisError):
    module = "hol_solver"


class RefusedInput(AnalysisError):
    module = "hol_solver"


class ClosureViolation(AnalysisError):
    module = "hol_solver"


class NotApplicable(AnalysisError):
    module = "lie_analysis"


class InconsistencyError(AnalysisError):
    module = "endo_cones"


class UndecidedError(AnalysisError):
    module = "nondegeneracy"
