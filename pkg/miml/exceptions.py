class MimlError(Exception): ...


class InvalidArgument(MimlError, ValueError): ...


class UndefinedMetric(MimlError): ...


class TrainingFailure(MimlError): ...


class ModelFormatError(MimlError): ...


class DatasetValidationError(MimlError):
    def __init__(self, message: str, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class DatasetFormatError(DatasetValidationError): ...
