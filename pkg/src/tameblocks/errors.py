"""Exception hierarchy. ``exit_code`` maps onto the CLI contract."""


class TameBlocksError(Exception):
    exit_code = 1


class InvalidInput(TameBlocksError, ValueError):
    exit_code = 2


class BudgetError(TameBlocksError):
    exit_code = 3


class NotPrime(InvalidInput):
    pass


class NotSquare(InvalidInput):
    pass


class ShapeMismatch(InvalidInput):
    pass


class DegreeMismatch(InvalidInput):
    pass


class NotMember(InvalidInput):
    pass


class NotNormal(InvalidInput):
    pass


class RecipeInvalid(InvalidInput):
    pass


class NotSemidihedral(TameBlocksError):
    pass


class NotSylow(InvalidInput):
    pass


class Unrecognized(TameBlocksError):
    def __init__(self, msg, ledger=None):
        super().__init__(msg)
        self.ledger = ledger or []


class TooLarge(BudgetError):
    pass


class BudgetExceeded(BudgetError):
    pass


class Stalled(TameBlocksError):
    pass


class Inconclusive(TameBlocksError):
    pass


class NonUnique(TameBlocksError):
    pass


class DataCorrupt(TameBlocksError):
    pass
