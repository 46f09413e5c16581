"""Process-wide numerical constants. Treat as read-only after import."""

# Jacobi eigensolver: stop when ||offdiag||_F <= JACOBI_REL_TOL * ||M||_F.
JACOBI_REL_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100

# Divided differences fall back to f'(midpoint) when
# |a - b| <= DEGENERACY_REL * max(1, |a|, |b|).
DEGENERACY_REL = 1e-8

# Central finite-difference step used by every derivative oracle.
FD_STEP = 1e-5

# Inequality slack is TOL_SCALE * max(1, |lhs|, |rhs|).
TOL_SCALE = 1e-9

# Below this |q - 1| the q-deformed functions switch to exact log/exp.
Q_ONE_CUTOFF = 1e-12

Q_MIN = 1.0
Q_MAX = 3.0

# Isometry families: reject Gram matrices with a worse condition number.
MAX_GRAM_CONDITION = 1e8
MAX_FAMILY_RETRIES = 16
MAX_FAMILY_SIZE = 8

MAX_DIM = 64
