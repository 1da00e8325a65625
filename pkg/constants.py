#!/usr/bin/env python3
"""
Numeric defaults and tolerances for qmono

This module centralizes the guards, sampling budgets and thresholds
shared by the engine, the geometry checks and the vlab laboratory.
"""

# =============================================================================
# Tool
# =============================================================================

TOOL_NAME = "qmono"
VERSION = "1.0.0"


# =============================================================================
# Engine guards
# =============================================================================

# Maximum branch length for (star_)monomialize
DEFAULT_MAX_DEPTH = 64

# Guard used by the acceptance corpus
CORPUS_MAX_DEPTH = 32

# Denominator bound for rational lower bounds of irrational radii
RADIUS_DENOMINATOR = 10 ** 12


# =============================================================================
# Sampling
# =============================================================================

DEFAULT_SEED = 0
SEED_LIMIT = 2 ** 64

# Interior samples per chart for sign constancy
SIGN_SAMPLES = 1000

# Uniform target samples for the covering check
COVERING_SAMPLES = 10_000

# Required covered fraction
COVERING_THRESHOLD = 0.99

# Interior samples are drawn from [lo, hi] * radius on positive selectors
INTERIOR_LOW = 1.0 / 16
INTERIOR_HIGH = 1.0 - 1.0 / 1024


# =============================================================================
# Tolerances
# =============================================================================

DEFAULT_TOL = 1e-9

# A sample counts against a nonzero sign only when |value| exceeds this
SIGN_MARGIN = 1e-12

# |value| bound accepted for sign 0
ZERO_MARGIN = 1e-9

# Singular values below this (relative to the largest) are zero
SVD_THRESHOLD = 1e-8

# Relative error accepted between closed-form and finite-difference Jacobians
JACOBIAN_RTOL = 1e-6

# Central-difference steps
FD_STEP_GEOMETRY = 1e-6
FD_STEP_VLAB = 1e-5

# Evaluation commutation: |a - b| <= EVAL_RTOL * (1 + |b|)
EVAL_RTOL = 1e-9


# =============================================================================
# Fiber cutting solver
# =============================================================================

FIBER_TOL = 1e-6
NEWTON_MAX_ITER = 60
NEWTON_RESIDUAL = 1e-13
NEWTON_SEEDS = 20

# Sampled image values per fiber-cut verification
FIBER_SAMPLES = 100


# =============================================================================
# vlab
# =============================================================================

DEFAULT_GRID = 16

# Random (x, ε) points per gradient check
GRADCHECK_SAMPLES = 50

# Gradient-check points keep this distance from marked points and each other
GRADCHECK_SEPARATION = 0.1

# Random draws allowed when placing unmarked points
PLACEMENT_ATTEMPTS = 10_000

# Minimal distance from breakpoints for sampled points
BREAKPOINT_CLEARANCE = 1e-3
