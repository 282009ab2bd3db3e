"""Exception types shared across the package."""


class ActiveRulesError(Exception):
    """Base class for all package errors."""


class SchemaError(ActiveRulesError):
    """Malformed schema document or invalid attribute declaration."""


class DatasetError(ActiveRulesError):
    """Malformed dataset file or a row violating the schema."""


class ValidationError(ActiveRulesError):
    """An instance or condition does not fit the input space."""


class OracleError(ActiveRulesError):
    """The target classifier could not produce a label."""


class StaleActionError(ActiveRulesError):
    """An action was applied to a decision set it was not generated for."""


class RegionExhaustedError(ActiveRulesError):
    """No novel synthetic instance exists inside the requested rule region."""
