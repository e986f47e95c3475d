"""Kernel backend selection: compiled extension if importable, else pure Python."""

try:
    from carnotcert import _ckernels as _impl

    BACKEND = "cython"
except ImportError:  # extension not built
    from carnotcert import _pykernels as _impl

    BACKEND = "python"

rank_int = _impl.rank_int
step2_bracket = _impl.step2_bracket
pfaffian_table = _impl.pfaffian_table

__all__ = ["BACKEND", "rank_int", "step2_bracket", "pfaffian_table"]
