class InvlabError(Exception):
    """Base class; ``hint`` is a one-line remedy shown by the CLI."""

    hint = ""


class FamilyError(InvlabError, ValueError):
    hint = "use one of binary|ordered|unordered|cyclic or a JSON file with rational weight strings"


class NotAdmissibleError(InvlabError, ValueError):
    hint = "the family needs a root of t*phi'(t) = phi(t) inside the radius of convergence"


class BudgetError(InvlabError, ValueError):
    hint = "lower n, or use the float backend where one is offered"


class RejectionCapError(InvlabError, RuntimeError):
    hint = "check that n = 1 mod d for this family"
