"""Hot fitness kernels with two interchangeable backends.

The GA evaluates thousands of candidate action sequences per decision;
that per-sequence rollout dominates simulator runtime, so it is isolated
here behind one function.  Two implementations exist:

* ``numba`` -- @njit-compiled loops (default when numba imports cleanly);
* ``numpy`` -- a pure-numpy fallback, identical semantics, slower.

Select explicitly with the environment variable ``UAVSEARCH_BACKEND`` set
to ``numba`` or ``numpy`` (anything else, including unset, means "numba if
available").  Both backends are deterministic; they may differ from each
other in the last floating-point bits because summation order differs.
``benchmarks/backend_bench.py`` measures the gap.

Table layout shared by both backends, for a jump value ``j``:

* ``inc_x``, ``inc_y``: (8j,) int64; entry ``n + 4j - 1`` holds the cell
  increment for ring slot ``n`` in (-4j, 4j].
* ``offs_x``, ``offs_y``, ``offs_ptr``: flattened footprint offsets per
  slot; slot ``idx`` owns ``offs_*[offs_ptr[idx]:offs_ptr[idx+1]]``.
* ``pw``: (cells_x, cells_y) probability layer pre-masked by the found
  latch; ``chi``: the uncertainty layer; ``denied``: uint8 blocked-cell
  mask; ``pow_half[k] = 0.5**k`` for in-horizon decay.
* ``cov``/``touched``: caller-owned scratch (zeroed int32 flat map and an
  index buffer); the kernel restores ``cov`` to zero before returning.
"""

import os

BACKEND_ENV = "UAVSEARCH_BACKEND"


def _select():
    choice = os.environ.get(BACKEND_ENV, "auto").strip().lower() or "auto"
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(
            f"{BACKEND_ENV} must be 'numba' or 'numpy' (or unset), got {choice!r}"
        )
    if choice in ("auto", "numba"):
        try:
            from . import _numba_impl

            return _numba_impl, "numba"
        except ImportError:
            if choice == "numba":
                raise
    from . import _numpy_impl

    return _numpy_impl, "numpy"


_impl, _backend_name = _select()

evaluate_sequences = _impl.evaluate_sequences

# The vectorized kinematic rollout is cheap enough that the numpy version
# serves every backend (used for relay fitness, which reads no map layers).
from ._numpy_impl import rollout_cells  # noqa: E402


def backend_name() -> str:
    return _backend_name


def warmup() -> None:
    """Force JIT compilation on a tiny problem so timing loops and first
    decisions do not pay the compile cost."""
    import numpy as np

    pop = np.zeros((2, 2), dtype=np.int8)
    inc_x = np.ones(8, dtype=np.int64)
    inc_y = np.zeros(8, dtype=np.int64)
    offs = np.zeros(1, dtype=np.int64)
    offs_ptr = np.zeros(9, dtype=np.int64)
    offs_ptr[1:] = 1
    layer = np.zeros((8, 8), dtype=np.float64)
    denied = np.zeros((8, 8), dtype=np.uint8)
    peers = np.zeros((1, 2), dtype=np.float64)
    pow_half = np.array([1.0, 0.5, 0.25])
    cov = np.zeros(64, dtype=np.int32)
    touched = np.zeros(64, dtype=np.int64)
    evaluate_sequences(
        pop, 4, 4, 0, 1, inc_x, inc_y, offs, offs, offs_ptr, layer, layer,
        denied, peers, 10.0, 6e-3, 200.0, 1.0, 0.0, 4.0, 1.0, 1.0, 1.0,
        pow_half, cov, touched,
    )
