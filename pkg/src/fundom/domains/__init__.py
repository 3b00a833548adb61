"""Fundamental domains of Gamma and zeta: atlas construction, verification, location."""
from .faces import Chord, clip_polyline, face_between, make_chord, nest_chain, refine_on_edge
from .gamma_atlas import gamma_domains
from .model import (
    Atlas,
    BoundaryPiece,
    FundamentalDomain,
    ImageArc,
    RealInterval,
    SlitSpec,
    Strip,
    mirror_domain,
)
from .verify import Inverter, VerifyReport, domain_verify, slit_distance_max
from .zeta_atlas import CCurve, ZetaTrace, strip_curves, strip_subdivide, zeta_domains, zeta_strips, zeta_window

__all__ = [
    "Atlas", "BoundaryPiece", "Chord", "FundamentalDomain", "ImageArc", "Inverter", "RealInterval",
    "SlitSpec", "Strip", "VerifyReport", "clip_polyline", "domain_verify", "face_between",
    "gamma_domains", "make_chord", "mirror_domain", "nest_chain", "refine_on_edge", "slit_distance_max",
    "CCurve", "ZetaTrace", "strip_curves", "strip_subdivide", "zeta_domains", "zeta_strips", "zeta_window",
]
