"""Exception types shared across the package."""


class ConvergenceError(RuntimeError):
    """A numerical routine failed: SVD did not converge, a Gram matrix was
    singular, or SGD training diverged.

    Data and parameter problems raise ValueError instead; this class is
    reserved for failures of the numerics themselves.
    """
