"""The six-parameter matrix (A, B, C, D : p, q) that drives every transform."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .exceptions import DegenerateBError, InvalidMatrixError, MatrixParseError

UNIMODULAR_TOL = 1e-12
FIELDS = ("A", "B", "C", "D", "p", "q")


@dataclass(frozen=True)
class ParameterMatrix:
    """Unimodular parameter set ``(A, B, C, D : p, q)``.

    ``A, B, C, D`` form a 2x2 block with ``AD - BC = 1``; ``p`` is a frequency
    offset and ``q`` a time offset. Instances are immutable.
    """

    A: float
    B: float
    C: float
    D: float
    p: float = 0.0
    q: float = 0.0

    def __post_init__(self):
        for name in FIELDS:
            object.__setattr__(self, name, float(getattr(self, name)))

    def as_tuple(self):
        return (self.A, self.B, self.C, self.D, self.p, self.q)

    @property
    def determinant(self):
        return self.A * self.D - self.B * self.C

    def is_valid(self):
        return not validate(self).violations

    def require_valid(self, allow_b_zero=False):
        report = validate(self, allow_b_zero=allow_b_zero)
        if report.violations:
            cls = DegenerateBError if report.b_zero and not allow_b_zero else InvalidMatrixError
            raise cls("; ".join(report.violations))
        return self

    def to_dict(self):
        return {name: getattr(self, name) for name in FIELDS}

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data):
        missing = [name for name in FIELDS if name not in data]
        # p and q default to zero only when both are absent (pure LCT input)
        if missing and set(missing) != {"p", "q"}:
            raise MatrixParseError(f"matrix is missing field(s): {', '.join(missing)}")
        try:
            values = {name: float(data.get(name, 0.0)) for name in FIELDS}
        except (TypeError, ValueError) as exc:
            raise MatrixParseError(f"non-numeric matrix entry: {exc}") from None
        return cls(**values)

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MatrixParseError(f"matrix JSON does not parse: {exc}") from None
        if not isinstance(data, dict):
            raise MatrixParseError("matrix JSON must be an object")
        return cls.from_dict(data)

    def __str__(self):
        return "({:g},{:g},{:g},{:g}:{:g},{:g})".format(*self.as_tuple())


@dataclass(frozen=True)
class ValidationReport:
    matrix: ParameterMatrix
    violations: list = field(default_factory=list)
    b_zero: bool = False

    @property
    def valid(self):
        return not self.violations

    def __bool__(self):
        return self.valid


def validate(m, allow_b_zero=False):
    """Check the structural invariants of ``m``.

    Returns a :class:`ValidationReport`; its ``violations`` list is empty
    exactly when the matrix is usable.
    """
    violations = []
    for name in FIELDS:
        if not math.isfinite(getattr(m, name)):
            violations.append(f"{name} is not finite")
    det = m.determinant
    if not abs(det - 1.0) <= UNIMODULAR_TOL:
        violations.append(f"unimodularity violated: AD - BC = {det:.15g}")
    b_zero = m.B == 0.0
    if b_zero and not allow_b_zero:
        violations.append("B = 0 is only admitted by the chirp-multiplication branch")
    return ValidationReport(m, violations, b_zero)


def inverse(m):
    """Inverse parameter set ``(D, -B, -C, A : Bq - Dp, Cp - Aq)``."""
    m.require_valid(allow_b_zero=True)
    return ParameterMatrix(
        m.D, -m.B, -m.C, m.A, m.B * m.q - m.D * m.p, m.C * m.p - m.A * m.q
    )


def fourier():
    return ParameterMatrix(0.0, 1.0, -1.0, 0.0, 0.0, 0.0)


def fractional(theta, sin_tol=1e-12):
    theta = math.fmod(theta, 2 * math.pi)
    if theta < 0:
        theta += 2 * math.pi
    s, c = math.sin(theta), math.cos(theta)
    if abs(s) <= sin_tol:
        raise DegenerateBError(f"fractional angle {theta:g} gives sin(theta) = 0, i.e. B = 0")
    return ParameterMatrix(c, s, -s, c, 0.0, 0.0)


def lct(A, B, C, D):
    return ParameterMatrix(A, B, C, D, 0.0, 0.0).require_valid()


def fresnel(z):
    if z == 0:
        raise DegenerateBError("Fresnel distance z = 0 gives B = 0")
    return ParameterMatrix(1.0, z, 0.0, 1.0, 0.0, 0.0)


PRESETS = {
    "fourier": fourier,
    "fractional": fractional,
    "lct": lct,
    "fresnel": fresnel,
}


def preset(name, *args):
    """Named specializations.

    >>> preset("fourier")
    ParameterMatrix(A=0.0, B=1.0, C=-1.0, D=0.0, p=0.0, q=0.0)
    """
    try:
        factory = PRESETS[name]
    except KeyError:
        raise MatrixParseError(
            f"unknown preset {name!r}; choose from {sorted(PRESETS)}"
        ) from None
    return factory(*args)


def parse_preset(spec):
    """Parse CLI-style preset strings such as ``fractional(pi/4)`` or ``fresnel(2)``."""
    spec = spec.strip()
    if "(" not in spec:
        return preset(spec)
    name, _, rest = spec.partition("(")
    if not rest.endswith(")"):
        raise MatrixParseError(f"malformed preset {spec!r}")
    args = [_parse_number(tok) for tok in rest[:-1].split(",") if tok.strip()]
    return preset(name.strip(), *args)


def parse_tuple(spec):
    """Parse ``(A,B,C,D:p,q)`` notation."""
    text = spec.strip().strip("()")
    head, sep, tail = text.partition(":")
    parts = [tok for tok in head.split(",") if tok.strip()]
    tail_parts = [tok for tok in tail.split(",") if tok.strip()] if sep else []
    if len(parts) != 4 or len(tail_parts) not in (0, 2):
        raise MatrixParseError(f"expected (A,B,C,D:p,q), got {spec!r}")
    values = [_parse_number(tok) for tok in parts + tail_parts]
    return ParameterMatrix(*values)


def _parse_number(token):
    token = token.strip()
    allowed = {"pi": math.pi, "sqrt": math.sqrt, "e": math.e}
    try:
        return float(token)
    except ValueError:
        pass
    if not set(token) <= set("0123456789.+-*/() piesqrt"):
        raise MatrixParseError(f"cannot parse number {token!r}")
    try:
        return float(eval(token, {"__builtins__": {}}, allowed))  # noqa: S307 - charset restricted above
    except Exception:
        raise MatrixParseError(f"cannot parse number {token!r}") from None
