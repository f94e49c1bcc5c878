"""Exception types shared across the package."""


class FieldError(ValueError):
    """Invalid field parameters or an operation mixing incompatible fields."""


class BudgetExceededError(RuntimeError):
    """A computation would exceed its configured size budget."""


class NumericalPrecisionError(ArithmeticError):
    """A floating-point spectrum could not be rounded back to an exact integer."""


class InvariantViolation(AssertionError):
    """Two independent routes to the same exact quantity disagreed."""


class PolynomialParseError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        pointer = ""
        if text:
            pointer = "\n  " + text + "\n  " + " " * position + "^"
        super().__init__(f"{message} at position {position}{pointer}")
