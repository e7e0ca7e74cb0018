"""Weight profiles for generalised Morrey spaces.

A weight profile is a positive function phi on (0, infinity).  The Morrey
quasi-norm weighs local L_p averages over a dyadic cube of side length t by
phi(t), so the admissible class for integrability exponent p consists of the
profiles with

* phi nondecreasing, and
* phi(t) * t**(-d/p) nonincreasing.

Equivalently ``1 <= phi(r)/phi(t) <= (r/t)**(d/p)`` whenever ``t <= r``.  All
profiles here are normalised so that phi(1) = 1; the normalising divisor is
kept explicit so that repeated normalisation is byte-identical.

Membership in the admissible class is decided in closed form for the analytic
families (the log-perturbed families reduce to a single critical point) and
checked on a dyadic grid as a cross-check.  Tabulated profiles interpolate
linearly in log-log coordinates, which makes the class conditions decidable
exactly from the knots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import DomainError, ExtrapolationError, NoProfileError, TableFormatError

_E = math.e

#: Default audit grid: t = 2**k for k in [-40, 40].
DEFAULT_GRID = tuple(2.0 ** k for k in range(-40, 41))

_GRID_SLACK = 1e-12


@dataclass(frozen=True)
class PhiSpec:
    """Immutable description of a weight profile.

    ``denom`` is the normalising divisor: evaluation returns the raw family
    value divided by ``denom``.  Freshly constructed profiles have
    ``denom = 1.0`` and are generally not normalised.
    """

    kind: str
    d: int
    u: float = None
    v: float = None
    a: float = None
    lshift: float = None
    c: float = None
    ts: tuple = ()
    vals: tuple = ()
    denom: float = 1.0


@dataclass(frozen=True)
class PowerLogProfile:
    """Power-log asymptotics of a profile at both ends.

    Near zero ``phi(t) ~ t**a_zero * (1 + |log t|)**b_zero`` and near
    infinity ``phi(t) ~ t**a_inf * (log t)**b_inf``, in each case up to a
    positive constant factor.
    """

    a_zero: float
    b_zero: float
    a_inf: float
    b_inf: float


def _positive(name, x):
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError("%s must be a positive finite number, got %r" % (name, x))
    return x


def _check_dim(d):
    if not isinstance(d, int) or d < 1:
        raise DomainError("dimension must be a positive integer, got %r" % (d,))
    return d


def power(u, d=1):
    """phi(t) = t**(d/u)."""
    return PhiSpec(kind="power", d=_check_dim(d), u=_positive("u", u))


def twopower(u, v, d=1):
    """phi(t) = t**(d/u) for t <= 1 and t**(d/v) for t > 1."""
    return PhiSpec(kind="twopower", d=_check_dim(d), u=_positive("u", u), v=_positive("v", v))


def capped(u, d=1):
    """phi(t) = min(t**(d/u), 1)."""
    return PhiSpec(kind="capped", d=_check_dim(d), u=_positive("u", u))


def floorone(v, d=1):
    """phi(t) = max(t**(d/v), 1)."""
    return PhiSpec(kind="floorone", d=_check_dim(d), v=_positive("v", v))


def powerlog(u, a, lshift=_E, d=1):
    """phi(t) = t**(d/u) * log(lshift + t)**a, with lshift >= e."""
    lshift = float(lshift)
    if not math.isfinite(lshift) or lshift < _E:
        raise DomainError("log shift must be >= e, got %r" % (lshift,))
    return PhiSpec(kind="powerlog", d=_check_dim(d), u=_positive("u", u), a=float(a), lshift=lshift)


def cappedlog(u, a, d=1):
    """phi(t) = t**(d/u) * (1 + |log t|)**a for t < 1 and 1 for t >= 1."""
    return PhiSpec(kind="cappedlog", d=_check_dim(d), u=_positive("u", u), a=float(a))


def const(c, d=1):
    """phi(t) = c."""
    return PhiSpec(kind="const", d=_check_dim(d), c=_positive("c", c))


def tabulated(ts, vals, d=1):
    """Profile sampled at knots, interpolated linearly in log-log scale.

    The knot abscissae must be strictly increasing and all values positive.
    Evaluation outside the sampled interval raises ExtrapolationError.
    """
    ts = tuple(float(t) for t in ts)
    vals = tuple(float(x) for x in vals)
    if len(ts) != len(vals):
        raise DomainError("knot and value counts differ (%d vs %d)" % (len(ts), len(vals)))
    if len(ts) < 2:
        raise DomainError("a tabulated profile needs at least two knots")
    for t in ts:
        _positive("knot", t)
    for x in vals:
        _positive("value", x)
    for lo, hi in zip(ts, ts[1:]):
        if not lo < hi:
            raise DomainError("knot abscissae must be strictly increasing")
    return PhiSpec(kind="table", d=_check_dim(d), ts=ts, vals=vals)


def _base_eval(spec, t):
    d = spec.d
    kind = spec.kind
    if kind == "power":
        return t ** (d / spec.u)
    if kind == "twopower":
        return t ** (d / spec.u) if t <= 1.0 else t ** (d / spec.v)
    if kind == "capped":
        return min(t ** (d / spec.u), 1.0)
    if kind == "floorone":
        return max(t ** (d / spec.v), 1.0)
    if kind == "powerlog":
        return t ** (d / spec.u) * math.log(spec.lshift + t) ** spec.a
    if kind == "cappedlog":
        if t >= 1.0:
            return 1.0
        return t ** (d / spec.u) * (1.0 - math.log(t)) ** spec.a
    if kind == "const":
        return spec.c
    if kind == "table":
        return _table_eval(spec, t)
    raise DomainError("unknown profile kind %r" % (kind,))


def _table_eval(spec, t):
    ts, vals = spec.ts, spec.vals
    if t < ts[0] or t > ts[-1]:
        raise ExtrapolationError(
            "t=%g outside the sampled interval [%g, %g]" % (t, ts[0], ts[-1])
        )
    # binary search for the segment
    lo, hi = 0, len(ts) - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ts[mid] <= t:
            lo = mid
        else:
            hi = mid
    if t == ts[lo]:
        return vals[lo]
    if t == ts[hi]:
        return vals[hi]
    w = (math.log(t) - math.log(ts[lo])) / (math.log(ts[hi]) - math.log(ts[lo]))
    return math.exp((1.0 - w) * math.log(vals[lo]) + w * math.log(vals[hi]))


def eval_phi(spec, t):
    """Evaluate the profile at t > 0."""
    t = float(t)
    if not math.isfinite(t) or t <= 0.0:
        raise DomainError("profiles are defined for finite t > 0, got %r" % (t,))
    return _base_eval(spec, t) / spec.denom


def normalize(spec):
    """Return the profile rescaled so that phi(1) = 1.

    The divisor is the raw family value at t = 1, so normalising twice
    returns an identical object.
    """
    return replace(spec, denom=_base_eval(spec, 1.0))


# ---------------------------------------------------------------------------
# admissibility


@dataclass(frozen=True)
class GpReport:
    """Outcome of the admissibility check for a given p.

    ``exact`` records whether a closed-form decision was available; when it
    is False the verdict is the grid verdict.  ``failures`` lists offending
    grid pairs as (t_low, t_high, condition) triples.
    """

    member: bool
    exact: bool
    grid_member: bool
    failures: tuple = ()


def _grid_check(spec, p, grid):
    dp = spec.d / p
    failures = []
    pts = []
    for t in grid:
        try:
            pts.append((t, eval_phi(spec, t)))
        except ExtrapolationError:
            continue
    for (t0, f0), (t1, f1) in zip(pts, pts[1:]):
        if f0 > f1 * (1.0 + _GRID_SLACK):
            failures.append((t0, t1, "nondecreasing"))
        h0 = f0 * t0 ** (-dp)
        h1 = f1 * t1 ** (-dp)
        if h1 > h0 * (1.0 + _GRID_SLACK):
            failures.append((t0, t1, "t^(-d/p)-damped nonincreasing"))
    return not failures, tuple(failures)


def _powerlog_nondecreasing(u, a, lshift, d):
    # sign of the derivative is the sign of g(t) = (d/u) log(L+t) + a t/(L+t)
    if a >= 0.0:
        return True
    t0 = lshift * (abs(a) * u / d - 1.0)
    if t0 <= 0.0:
        return True
    g = (d / u) * math.log(lshift + t0) + a * t0 / (lshift + t0)
    return g >= 0.0


def _powerlog_damped_nonincreasing(u, a, lshift, d, p):
    # phi(t) t**(-d/p) = t**beta log(L+t)**a with beta = d/u - d/p; the
    # condition is H(t) = beta (L+t) log(L+t) + a t <= 0 for all t > 0
    beta = d / u - d / p
    if beta > 0.0:
        return False
    if beta == 0.0:
        return a <= 0.0
    if a <= 0.0:
        return True
    hprime0 = beta * (math.log(lshift) + 1.0) + a
    if hprime0 <= 0.0:
        return True
    tstar = math.exp(a / abs(beta) - 1.0) - lshift
    if tstar <= 0.0:
        return True
    h = -lshift * (a + beta) - beta * tstar
    return h <= 0.0


def _exact_gp(spec, p):
    """Closed-form admissibility where the family allows it, else None."""
    d = spec.d
    kind = spec.kind
    if kind == "power":
        return p <= spec.u
    if kind == "twopower":
        return p <= min(spec.u, spec.v)
    if kind == "capped":
        return p <= spec.u
    if kind == "floorone":
        return p <= spec.v
    if kind == "const":
        return True
    if kind == "powerlog":
        return _powerlog_nondecreasing(spec.u, spec.a, spec.lshift, d) and \
            _powerlog_damped_nonincreasing(spec.u, spec.a, spec.lshift, d, p)
    if kind == "cappedlog":
        # nondecreasing on (0,1) needs a <= d/u; the damped condition on the
        # same interval needs d/p >= d/u + max(0, -a)
        return spec.a <= d / spec.u and d / p >= d / spec.u + max(0.0, -spec.a)
    if kind == "table":
        # both class conditions restrict to pure powers between knots, so the
        # knot comparisons decide the interpolant exactly
        ok, _ = _grid_check(spec, p, spec.ts)
        return ok
    return None


def check_class_gp(spec, p, grid=None):
    """Decide admissibility of the profile for exponent p.

    Returns a GpReport.  Closed-form decisions are cross-checked against the
    grid; a tabulated profile is checked on its own knots, where the log-log
    interpolant makes the comparison exact.
    """
    p = _positive("p", p)
    if grid is None:
        grid = spec.ts if spec.kind == "table" else DEFAULT_GRID
    grid_ok, failures = _grid_check(spec, p, grid)
    exact = _exact_gp(spec, p)
    if exact is None:
        return GpReport(member=grid_ok, exact=False, grid_member=grid_ok, failures=failures)
    return GpReport(member=exact, exact=True, grid_member=grid_ok, failures=failures)


def check_nontrivial(spec, p):
    """True when the weighted space contains more than the zero function.

    The criterion is sup_t phi(t) * min(t**(-d/p), 1) < infinity, read off
    from the asymptotics: near zero the profile must stay bounded, near
    infinity it must not outgrow t**(d/p).  Tabulated profiles are sampled on
    a compact interval and are always nontrivial.
    """
    p = _positive("p", p)
    if spec.kind == "table":
        return True
    prof = asymptotic_profile(spec)
    dp = spec.d / p
    ok_zero = prof.a_zero > 0.0 or (prof.a_zero == 0.0 and prof.b_zero <= 0.0)
    ok_inf = prof.a_inf < dp or (prof.a_inf == dp and prof.b_inf <= 0.0)
    return ok_zero and ok_inf


def asymptotic_profile(spec):
    """Power-log asymptotics at both ends, as a PowerLogProfile.

    Raises NoProfileError for tabulated profiles, whose tails are not
    extrapolated.
    """
    d = spec.d
    kind = spec.kind
    if kind == "power":
        e = d / spec.u
        return PowerLogProfile(e, 0.0, e, 0.0)
    if kind == "twopower":
        return PowerLogProfile(d / spec.u, 0.0, d / spec.v, 0.0)
    if kind == "capped":
        return PowerLogProfile(d / spec.u, 0.0, 0.0, 0.0)
    if kind == "floorone":
        return PowerLogProfile(0.0, 0.0, d / spec.v, 0.0)
    if kind == "powerlog":
        # log(L + t) tends to the constant log L near zero, so the log factor
        # only shows up in the infinity-side exponent
        e = d / spec.u
        return PowerLogProfile(e, 0.0, e, spec.a)
    if kind == "cappedlog":
        return PowerLogProfile(d / spec.u, spec.a, 0.0, 0.0)
    if kind == "const":
        return PowerLogProfile(0.0, 0.0, 0.0, 0.0)
    raise NoProfileError("a %r profile has no power-log asymptotics" % (kind,))


# ---------------------------------------------------------------------------
# grammar

_FLOAT_KINDS = {
    "power": ("u",),
    "twopower": ("u", "v"),
    "capped": ("u",),
    "floorone": ("v",),
    "cappedlog": ("u", "a"),
    "const": ("c",),
}


def parse_phi(text, d=1):
    """Parse a profile expression such as ``twopower(1, 2)``.

    Supported forms: power(u), twopower(u, v), capped(u), floorone(v),
    powerlog(u, a[, L]), cappedlog(u, a), const(c), table(path).  The log
    shift L defaults to e.
    """
    text = text.strip()
    lparen = text.find("(")
    if lparen < 0 or not text.endswith(")"):
        raise DomainError("cannot parse profile expression %r" % (text,))
    name = text[:lparen].strip().lower()
    body = text[lparen + 1:-1]
    args = [piece.strip() for piece in body.split(",")] if body.strip() else []

    if name == "table":
        if len(args) != 1:
            raise DomainError("table(...) takes exactly one path argument")
        path = args[0].strip("\"'")
        return load_table(path, d=d)

    try:
        values = [float(piece) for piece in args]
    except ValueError:
        raise DomainError("non-numeric argument in profile expression %r" % (text,))

    if name == "powerlog":
        if len(values) == 2:
            return powerlog(values[0], values[1], d=d)
        if len(values) == 3:
            return powerlog(values[0], values[1], values[2], d=d)
        raise DomainError("powerlog takes two or three arguments, got %d" % len(values))

    if name in _FLOAT_KINDS:
        names = _FLOAT_KINDS[name]
        if len(values) != len(names):
            raise DomainError(
                "%s takes %d argument(s), got %d" % (name, len(names), len(values))
            )
        maker = globals()[name]
        return maker(*values, d=d)

    raise DomainError("unknown profile family %r" % (name,))


def _fmt(x):
    return repr(float(x))


def format_phi(spec):
    """Canonical text form of the profile, parseable by parse_phi."""
    kind = spec.kind
    if kind == "power":
        return "power(%s)" % _fmt(spec.u)
    if kind == "twopower":
        return "twopower(%s,%s)" % (_fmt(spec.u), _fmt(spec.v))
    if kind == "capped":
        return "capped(%s)" % _fmt(spec.u)
    if kind == "floorone":
        return "floorone(%s)" % _fmt(spec.v)
    if kind == "powerlog":
        return "powerlog(%s,%s,%s)" % (_fmt(spec.u), _fmt(spec.a), _fmt(spec.lshift))
    if kind == "cappedlog":
        return "cappedlog(%s,%s)" % (_fmt(spec.u), _fmt(spec.a))
    if kind == "const":
        return "const(%s)" % _fmt(spec.c)
    if kind == "table":
        return "table(<%d knots on [%g, %g]>)" % (len(spec.ts), spec.ts[0], spec.ts[-1])
    raise DomainError("unknown profile kind %r" % (kind,))


def load_table(path, d=1):
    """Read a two-column CSV of (t, phi) knots into a tabulated profile.

    Content problems (and an unreadable file) raise TableFormatError so
    callers can tell a bad data file from a bad expression.
    """
    ts = []
    vals = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                parts = [piece.strip() for piece in line.split(",")]
                if len(parts) != 2:
                    raise TableFormatError(
                        "%s:%d: expected two comma-separated columns" % (path, lineno)
                    )
                if not ts and not _is_number(parts[0]):
                    continue  # header row
                try:
                    ts.append(float(parts[0]))
                    vals.append(float(parts[1]))
                except ValueError:
                    raise TableFormatError("%s:%d: non-numeric knot" % (path, lineno))
    except OSError as exc:
        raise TableFormatError("cannot read table %r: %s" % (path, exc))
    try:
        return tabulated(ts, vals, d=d)
    except TableFormatError:
        raise
    except DomainError as exc:
        raise TableFormatError("%s: %s" % (path, exc))


def _is_number(text):
    try:
        float(text)
        return True
    except ValueError:
        return False
