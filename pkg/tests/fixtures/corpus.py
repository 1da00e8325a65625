#!/usr/bin/env python3
"""
Series corpus for the monomialization and parametrization tests

Every entry is the text of a `.gps` file in canonical term order, so the
fixtures also exercise the parser. Radii default to 1.
"""

# =============================================================================
# MONOMIALIZATION CORPUS
# =============================================================================

X1_MINUS_X2 = """\
# X1 - X2
gps 2 0
-1 : 0 1
1 : 1 0
"""

X1_POW_3_2_PLUS_X2 = """\
gps 2 0
1 : 0 1
1 : 3/2 0
"""

X1_MINUS_X2_SQUARED = """\
gps 2 0
1 : 0 2
-2 : 1 1
1 : 2 0
"""

X1SQ_X2_PLUS_X1_X2CUBE = """\
gps 2 0
1 : 1 3
1 : 2 1
"""

ROOT_DIFFERENCE = """\
# X1^(1/2) - X2^(1/3)
gps 2 0
-1 : 0 1/3
1 : 1/2 0
"""

Y1SQ_PLUS_Y2SQ = """\
gps 0 2
1 : 0 2
1 : 2 0
"""

X1_PLUS_Y1SQ = """\
gps 1 1
1 : 0 2
1 : 1 0
"""

X1_Y1_MINUS_X2 = """\
gps 2 1
-1 : 0 1 0
1 : 1 0 1
"""

CUSP = """\
# X1^2 - X2^3
gps 2 0
-1 : 0 3
1 : 2 0
"""

X1_PLUS_X2_PLUS_X3 = """\
gps 3 0
1 : 0 0 1
1 : 0 1 0
1 : 1 0 0
"""

Y1_MINUS_X1 = """\
gps 1 1
1 : 0 1
-1 : 1 0
"""

CONE = """\
# X1 X2 - X3^2
gps 3 0
-1 : 0 0 2
1 : 1 1 0
"""

CORPUS = {
    'x1-x2': X1_MINUS_X2,
    'x1^(3/2)+x2': X1_POW_3_2_PLUS_X2,
    '(x1-x2)^2': X1_MINUS_X2_SQUARED,
    'x1^2x2+x1x2^3': X1SQ_X2_PLUS_X1_X2CUBE,
    'x1^(1/2)-x2^(1/3)': ROOT_DIFFERENCE,
    'y1^2+y2^2': Y1SQ_PLUS_Y2SQ,
    'x1+y1^2': X1_PLUS_Y1SQ,
    'x1y1-x2': X1_Y1_MINUS_X2,
    'x1^2-x2^3': CUSP,
    'x1+x2+x3': X1_PLUS_X2_PLUS_X3,
    'y1-x1': Y1_MINUS_X1,
    'x1x2-x3^2': CONE,
}


# =============================================================================
# BASIC SETS
# =============================================================================

# {x2 = 0, x1 - x2 > 0} on the unit square
AXIS_EQUATION = """\
gps 2 0
1 : 0 1
"""

AXIS_INEQUALITY = X1_MINUS_X2

# {x1^(1/2) - x2^(1/3) > 0}: the equation is the zero series
ZERO_EQUATION = """\
gps 2 0
"""

ROOT_INEQUALITY = ROOT_DIFFERENCE

# {y1 = 0, x1 > 0} with one generalized and one standard variable
STANDARD_EQUATION = """\
gps 1 1
1 : 0 1
"""

STANDARD_INEQUALITY = """\
gps 1 1
1 : 1 0
"""

BASIC_SETS = {
    'axis': (AXIS_EQUATION, [AXIS_INEQUALITY]),
    'root': (ZERO_EQUATION, [ROOT_INEQUALITY]),
    'standard': (STANDARD_EQUATION, [STANDARD_INEQUALITY]),
}


# =============================================================================
# MALFORMED FILES
# =============================================================================

DUPLICATE_EXPONENT = """\
gps 2 0
2 : 0 1
1 : 1 0
3 : 1 0
"""

FRACTIONAL_STANDARD_EXPONENT = """\
gps 1 1
1 : 1/2 1/2
"""

BAD_RATIONAL = """\
gps 1 0
1/0 : 1
"""

BAD_HEADER = """\
gsp 1 0
1 : 1
"""

WRONG_ARITY = """\
gps 2 0
1 : 1
"""

OUT_OF_ORDER = """\
gps 2 0
1 : 1 0
-1 : 0 1
"""

UNREDUCED_RATIONAL = """\
gps 1 0
2/4 : 1
"""
