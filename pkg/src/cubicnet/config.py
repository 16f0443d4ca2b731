"""Centralized numerical tolerances and limits."""
from dataclasses import dataclass, replace, asdict


@dataclass(frozen=True)
class Tolerances:
    # branch continuation
    branch_margin: float = 0.5
    # polygon Gauss-Bonnet audit
    polygon_audit: float = 1e-6
    # polynomial root polishing / multiplicity test
    root_tol: float = 1e-12
    multiple_zero_rel: float = 1e-7
    # singularity exclusion radius, relative to the characteristic scale
    eps_sing: float = 1e-6
    # launch radius from a zero, in units of eps_sing
    launch_factor: float = 10.0
    # per-step local error target (relative to max(scale, |x - center|))
    step_tol: float = 1e-10
    max_subdivisions: int = 60
    max_steps: int = 20000
    # hit tolerance, relative to the flat scale of the differential
    hit_tol: float = 1e-7
    # escape radius relative to the characteristic scale
    escape_factor: float = 20.0
    # joint deduplication radius relative to the characteristic scale
    eps_joint: float = 1e-6
    # quadrature
    quad_rel: float = 1e-12
    quad_max_refine: int = 30
    # angle equality for wall membership
    wall_angle: float = 1e-7
    # classification of corner angles (multiples of pi/3)
    core_angle: float = 1e-3
    # phases closer than this are merged into one special phase
    phase_merge: float = 1e-6
    # saddle shooting
    shoot_window: float = 0.05
    shoot_tol: float = 1e-10

    def override(self, **kw):
        for k, v in kw.items():
            if not hasattr(self, k):
                raise KeyError(k)
            if v is not None and v <= 0:
                raise ValueError(f"tolerance {k} must be positive")
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def as_dict(self):
        return asdict(self)


DEFAULT = Tolerances()
