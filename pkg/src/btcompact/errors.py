class PreconditionError(ValueError):
    """An operation was called outside its domain.

    The first argument names the violated invariant; the CLI reports it
    verbatim and exits with status 3.
    """
