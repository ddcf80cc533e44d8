"""Model registry: parameter construction from CLI options and sample-to-columns conversion."""

import cmath
import logging
from dataclasses import dataclass, fields
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from ...dataio import vector_header
from ...models import (
    BCParams,
    BSParams,
    MobiusMarginalParams,
    SenGuptaParams,
    ShiehJohnsonParams,
    ShiftedParams,
    Sign,
    VMCopulaParams,
)
from ...stats.bc import bc_sample
from ...stats.bs import bs_sample, rotation2
from ...stats.circular_fits import VM_COPULA_PRESETS, vm_copula_sample
from ...stats.extended import circle_angles, cylinder_sample, mobius_marginal_sample, plane_sample, shifted_sample
from ...stats.mathcore import RngStream
from ..core.exceptions import UsageError

logger = logging.getLogger(__name__)

SAMPLE_STREAM = 1

Columns = Tuple[List[str], List[np.ndarray]]


def build_q(dim: int, q_angle: float = 0.0, det: str = "1", q_file: Optional[str] = None) -> np.ndarray:
    """Q from a file, else a planar rotation/reflection for d = 2, else the identity."""
    if q_file:
        q = np.loadtxt(q_file, delimiter=",", ndmin=2)
        if q.shape != (dim, dim):
            raise UsageError(f"Q in {q_file} has shape {q.shape}, expected ({dim}, {dim})")
        return q
    if dim == 2:
        return rotation2(q_angle, int(det))
    if q_angle:
        raise UsageError("--q-angle applies to d = 2 only; pass --q-file for d > 2")
    return np.eye(dim)


def _require(options: dict, model: str, *names: str):
    missing = [n for n in names if options.get(n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise UsageError(f"model {model} needs {flags}")


def _psi(options: dict) -> complex:
    return cmath.rect(options.get("psi_abs") or 0.0, options.get("psi_arg") or 0.0)


def _bs(options, model):
    _require(options, model, "rho")
    return BSParams(options["rho"], build_q(options["dim"], options["q_angle"], options["det"], options.get("q_file")))


def _shifted(options, model):
    _require(options, model, "rho", "xi")
    q = build_q(options["dim"], options["q_angle"], options["det"], options.get("q_file"))
    return ShiftedParams(options["rho"], q, np.asarray(options["xi"], dtype=float))


def _bc(sign: Sign):
    def build(options, model):
        _require(options, model, "psi_abs")
        return BCParams(_psi(options), sign)
    return build


def _mobius(options, model):
    _require(options, model, "psi_abs")
    return MobiusMarginalParams(
        _psi(options),
        cmath.rect(options["alpha1_abs"], options["alpha1_arg"]),
        cmath.rect(options["alpha2_abs"], options["alpha2_arg"]),
    )


def _vm_copula(options, model):
    preset = options.get("preset")
    if preset:
        try:
            return VM_COPULA_PRESETS[preset]
        except KeyError:
            raise UsageError(f"unknown preset {preset!r}; choose from {', '.join(VM_COPULA_PRESETS)}")
    _require(options, model, "mu1", "mu2", "kappa1", "kappa2", "psi_abs")
    return VMCopulaParams(options["mu1"], options["mu2"], options["kappa1"], options["kappa2"], _psi(options))


def _sengupta(options, model):
    _require(options, model, "m_entries")
    if len(options["m_entries"]) != 8:
        raise UsageError("--m needs 8 comma-separated entries")
    return SenGuptaParams.from_free(options["m_entries"])


def _shieh_johnson(options, model):
    _require(options, model, "mu1", "mu2", "mu3", "kappa1", "kappa2", "kappa3")
    return ShiehJohnsonParams(
        options["mu1"], options["mu2"], options["mu3"], options["kappa1"], options["kappa2"], options["kappa3"]
    )


def _angles(s) -> Columns:
    return ["theta_u", "theta_v"], [circle_angles(s.z_u), circle_angles(s.z_v)]


def _vectors(s) -> Columns:
    return vector_header(s.d), [s.u[:, i] for i in range(s.d)] + [s.v[:, i] for i in range(s.d)]


def _draw_vm_copula(p, n, rng) -> Columns:
    theta_u, theta_v = vm_copula_sample(p, n, rng)
    return ["theta_u", "theta_v"], [theta_u, theta_v]


def _draw_plane(p, n, rng) -> Columns:
    xy = plane_sample(p.psi, n, rng)
    return ["x", "y"], [xy[:, 0], xy[:, 1]]


def _draw_cylinder(p, n, rng) -> Columns:
    s = cylinder_sample(p.psi, n, rng)
    return ["theta", "x"], [circle_angles(s.z_theta), s.x]


@dataclass(frozen=True)
class ModelEntry:
    build: Callable[[dict, str], object]
    draw: Optional[Callable[[object, int, RngStream], Columns]] = None
    angular: bool = False


MODELS: Dict[str, ModelEntry] = {
    "bs": ModelEntry(_bs, lambda p, n, rng: _vectors(bs_sample(p, n, rng))),
    "bc+": ModelEntry(_bc(Sign.PLUS), lambda p, n, rng: _angles(bc_sample(p, n, rng)), angular=True),
    "bc-": ModelEntry(_bc(Sign.MINUS), lambda p, n, rng: _angles(bc_sample(p, n, rng)), angular=True),
    "shifted": ModelEntry(_shifted, lambda p, n, rng: _vectors(shifted_sample(p, n, rng))),
    "mobius-marginal": ModelEntry(_mobius, lambda p, n, rng: _angles(mobius_marginal_sample(p, n, rng)), angular=True),
    "vm-copula": ModelEntry(_vm_copula, _draw_vm_copula, angular=True),
    "plane": ModelEntry(_bc(Sign.MINUS), _draw_plane),
    "cylinder": ModelEntry(_bc(Sign.PLUS), _draw_cylinder),
    "sengupta": ModelEntry(_sengupta, angular=True),
    "shieh-johnson": ModelEntry(_shieh_johnson, angular=True),
}

SAMPLER_NAMES = tuple(name for name, entry in MODELS.items() if entry.draw is not None)
ANGULAR_NAMES = tuple(name for name, entry in MODELS.items() if entry.angular)


def build_params(model: str, options: dict):
    """Parameter object for ``model`` from the shared CLI options."""
    try:
        entry = MODELS[model]
    except KeyError:
        raise UsageError(f"unknown model {model!r}; choose from {', '.join(MODELS)}")
    return entry.build(options, model)


def draw_sample(model: str, params, n: int, seed: int) -> Columns:
    """n draws as (header, columns); stream (seed, 1) so equal seeds give equal files."""
    entry = MODELS[model]
    if entry.draw is None:
        raise UsageError(f"no sampler for model {model!r}; choose from {', '.join(SAMPLER_NAMES)}")
    if n < 1:
        raise UsageError("--n must be >= 1")
    header, columns = entry.draw(params, n, RngStream(seed, SAMPLE_STREAM))
    logger.info(f"drew {n} {model} samples")
    return header, columns


def describe_params(params) -> dict:
    """JSON-friendly view of a parameter dataclass; complex values as modulus and argument."""
    out = {}
    for f in fields(params):
        value = getattr(params, f.name)
        if isinstance(value, complex):
            out[f.name] = {"abs": abs(value), "arg": cmath.phase(value)}
        elif isinstance(value, np.ndarray):
            out[f.name] = value.tolist()
        elif isinstance(value, Enum):
            out[f.name] = value.value
        else:
            out[f.name] = value
    return out
