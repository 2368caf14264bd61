"""Killing vector fields of Euclidean 3-space and their Lorentz force.

Every field handled here is affine, V(p) = omega x p + b: a rotation about a
coordinate axis (omega = e_axis, b = 0) or a uniform translation field
(omega = 0, b = s e_axis).  The magnetic field F_V = i_V dvol then acts on
velocities through Phi(w) = V x w.
"""

from dataclasses import dataclass

import numpy as np

AXES = ("x", "y", "z")
_AXIS_INDEX = {"x": 0, "y": 1, "z": 2}

# Cyclic relabelling that brings a given axis to z; cyclic permutations keep
# the orientation, so cross products are preserved.
_TO_CANONICAL = {"x": (1, 2, 0), "y": (2, 0, 1), "z": (0, 1, 2)}


@dataclass(frozen=True)
class KillingField:
    """Rotation about, or translation along, a coordinate axis.

    ``KillingField.rotation("z")`` is V = -y d/dx + x d/dy;
    ``KillingField.translation("z", s)`` is s d/dz.
    """

    kind: str
    axis: str = "z"
    strength: float = 1.0

    def __post_init__(self):
        if self.kind not in ("rotation", "translation"):
            raise ValueError(f"unknown field kind {self.kind!r}")
        if self.axis not in _AXIS_INDEX:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        if self.kind == "rotation" and self.strength != 1.0:
            raise ValueError("rotational fields have fixed unit strength")

    @classmethod
    def rotation(cls, axis="z"):
        return cls("rotation", axis)

    @classmethod
    def translation(cls, axis="z", strength=1.0):
        return cls("translation", axis, float(strength))

    @property
    def is_rotation(self):
        return self.kind == "rotation"

    @property
    def omega(self):
        """Angular part of V(p) = omega x p + b."""
        out = np.zeros(3)
        if self.is_rotation:
            out[_AXIS_INDEX[self.axis]] = 1.0
        return out

    @property
    def offset(self):
        """Constant part b of V(p) = omega x p + b."""
        out = np.zeros(3)
        if not self.is_rotation:
            out[_AXIS_INDEX[self.axis]] = self.strength
        return out

    def __call__(self, p):
        return eval_field(self, p)

    def jacobian(self, p=None):
        """dV/dp, constant for these affine fields: the matrix of omega x (.)."""
        w = self.omega
        return np.array([[0.0, -w[2], w[1]],
                         [w[2], 0.0, -w[0]],
                         [-w[1], w[0], 0.0]])

    @property
    def label(self):
        """CLI spelling, e.g. ``rot-z`` or ``trans-x``."""
        return f"{'rot' if self.is_rotation else 'trans'}-{self.axis}"

    @classmethod
    def from_label(cls, label, strength=1.0):
        kind, _, axis = label.partition("-")
        if kind == "rot":
            return cls.rotation(axis)
        if kind == "trans":
            return cls.translation(axis, strength)
        raise ValueError(f"unknown field label {label!r}")


@dataclass(frozen=True)
class State6:
    """Point and velocity of a curve at one instant."""

    pos: tuple
    vel: tuple

    def __post_init__(self):
        object.__setattr__(self, "pos", tuple(float(v) for v in self.pos))
        object.__setattr__(self, "vel", tuple(float(v) for v in self.vel))
        if len(self.pos) != 3 or len(self.vel) != 3:
            raise ValueError("State6 needs 3 position and 3 velocity components")

    @classmethod
    def from_sequence(cls, values):
        values = list(values)
        if len(values) != 6:
            raise ValueError(f"expected 6 values x0,y0,z0,u0,v0,w0, got {len(values)}")
        return cls(values[:3], values[3:])

    def as_array(self):
        return np.array(self.pos + self.vel)

    @property
    def speed(self):
        return float(np.linalg.norm(self.vel))

    def normalized(self):
        """Copy with unit velocity."""
        v = np.asarray(self.vel)
        return State6(self.pos, v / np.linalg.norm(v))

    def permuted(self, axis):
        """Coordinates relabelled so that ``axis`` becomes z."""
        return State6(to_canonical(self.pos, axis), to_canonical(self.vel, axis))


def to_canonical(v, axis):
    """Relabel components of ``v`` (last dimension) so that ``axis`` becomes z."""
    v = np.asarray(v, dtype=float)
    return v[..., list(_TO_CANONICAL[axis])]


def from_canonical(v, axis):
    """Inverse of :func:`to_canonical`."""
    v = np.asarray(v, dtype=float)
    inv = np.argsort(_TO_CANONICAL[axis])
    return v[..., inv]


def cross(a, b):
    """Right-handed cross product; broadcasts over leading dimensions."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.stack([a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1],
                     a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2],
                     a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]], axis=-1)


def eval_field(f, p):
    """V(p) for a :class:`KillingField` (broadcasts over points)."""
    p = np.asarray(p, dtype=float)
    return cross(np.broadcast_to(f.omega, p.shape), p) + f.offset


def lorentz_force(f, p, w):
    """Phi(w) = V(p) x w."""
    return cross(eval_field(f, p), w)


def magnetic_rhs(f, state):
    """Right-hand side of the first-order system for gamma'' = V x gamma'.

    ``state`` is a 6-vector (or array of them) position-then-velocity; the
    result is (velocity, acceleration) in the same layout.
    """
    state = np.asarray(state, dtype=float)
    pos = state[..., :3]
    vel = state[..., 3:]
    return np.concatenate([vel, lorentz_force(f, pos, vel)], axis=-1)


def _complex_step_jacobian(field, p, h=1e-30):
    p = np.asarray(p, dtype=float)
    cols = []
    for i in range(3):
        dp = np.zeros(3, dtype=complex)
        dp[i] = 1j * h
        cols.append(np.imag(np.asarray(field(p + dp), dtype=complex)) / h)
    return np.stack(cols, axis=-1)


def verify_killing(field, sample_points, sample_vectors):
    """Largest |<grad_Y V, Z> + <grad_Z V, Y>| over the samples.

    ``field`` is a :class:`KillingField` (exact Jacobian) or any callable
    analytic in p, whose Jacobian is then taken by complex-step
    differentiation; that is exact to rounding for polynomial fields.
    Every pair (Y, Z) drawn from ``sample_vectors`` is tested at every point.
    """
    vecs = np.asarray(sample_vectors, dtype=float).reshape(-1, 3)
    worst = 0.0
    for p in sample_points:
        if hasattr(field, "jacobian"):
            jac = field.jacobian(p)
        else:
            jac = _complex_step_jacobian(field, p)
        worst = max(worst, float(np.abs(vecs @ (jac + jac.T) @ vecs.T).max()))
    return worst
