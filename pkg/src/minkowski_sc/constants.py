"""Constants used across the minkowski-sc package."""

# Norm configuration
DEFAULT_NORM = "lp:4"
MIN_P = 2.0
SINGULAR_DETERMINANT = 1e-12
ALPHA0_RESOLUTION = 4096
ALPHA0_MIN_RESOLUTION = 64
ROOT_XTOL = 1e-15
ROOT_RTOL = 8.881784197001252e-16
LINE_SIGN_TOLERANCE = 1e-12

# Bisector configuration
BISECTION_TOLERANCE = 1e-12
NEWTON_STEPS = 3
CHORD_BRACKET = 2.5
TRACE_SAMPLES = 41
TRACE_MARGIN = 1e-6
RESIDUAL_TOLERANCE = 1e-9
APRIORI_KAPPA = 0.5
KAPPA_DIRECTION_GRID = 256
KAPPA_T_GRID = 256
KAPPA_MIN_GRID = 256
KAPPA_REFINE_CANDIDATES = 4
KAPPA_U_CLIP = 1.0 - 1e-9
DEVIATION_RADII = (10.0, 30.0, 100.0, 300.0, 1000.0)

# Convex geometry
HULL_TOLERANCE = 1e-12
MEAN_WIDTH_QUADRATURE = 16384
MEAN_WIDTH_MIN_QUADRATURE = 360

# Curves
SC_TOLERANCE = 1e-12
COSINE_TOLERANCE = 1e-9
DEFAULT_SEED = 42
DEFAULT_CURVE_POINTS = 60
GREEDY_STEP = 0.1
GREEDY_BATCH = 64
GREEDY_HALVE_AFTER = 200
GREEDY_MAX_REJECTIONS = 10_000
GD_STEP = 0.05
GD_BLOWUP = 1e12

# Certificate
TAIL_RELATIVE_TOLERANCE = 1e-9
SLACK_TOLERANCE = 1e-9
CERTIFICATE_TOLERANCE = 1e-12
PAIR_STRIDE = 1

# File formats
CURVE_COLUMNS = ["t", "x", "y"]
TRACE_COLUMNS = ["t", "zx", "zy", "residual"]
FLOAT_FORMAT = "{:.17g}"
SVG_SIZE = 600
SVG_DECIMALS = 6
