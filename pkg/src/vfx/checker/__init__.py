"""Independent certificate checker.

Nothing here may import the verifier's builder or arithmetic engine; the
checker rebuilds the SEP and re-decides every leaf with its own code.
"""

from .replay import Accepted, Rejected, check_proof

__all__ = ["Accepted", "Rejected", "check_proof"]
