"""Continuation of pre-image curves."""
from .curves import (
    CIRCLE, LIFT, RAY, REAL_AXIS, CurveComponent, CurveKind, Endpoint, StepControl,
)
from .continuation import branch_continue, correct, distance_to_curve, polish_critical, trace
from ..geometry import Window
