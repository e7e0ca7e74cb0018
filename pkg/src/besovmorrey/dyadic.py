"""Dyadic cubes, sparse coefficient sequences and their quasi-norms.

A coefficient sequence assigns a real number to finitely many dyadic cells
(j, m), j >= 0, m in Z^d.  Its quasi-norm for parameters (s, p, q, phi)
composes two layers:

* per level j, a Morrey-type supremum over all coarser dyadic cubes
  Q_{nu,k}, nu <= j, of

      phi(2**-nu) * 2**((nu-j)d/p) * (sum over cells of level j inside
      Q_{nu,k} of |value|**p)**(1/p),

* across levels, the weighted ell_q norm of 2**(j s) times those suprema.

The per-level supremum is resolved exactly by merging cell groups upward one
level at a time: group sums stabilise once each coordinate orthant of the
support has collapsed into a single cube (dyadic cubes never cross a
coordinate hyperplane), and from that point on the prefactor
phi(t) * t**(-d/p) is nonincreasing in the side length, so no later level can
win.  Cubes finer than j see at most one cell and are dominated by the nu = j
candidates since phi is nondecreasing.  Both monotonicity facts are exactly
the admissibility of phi, which SpaceParams validates on construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegeneratePhiError, DomainError
from .morrey import DyadicStepFunction, morrey_norm
from .phi import (
    PhiSpec,
    check_class_gp,
    check_nontrivial,
    eval_phi,
    format_phi,
    normalize,
    parse_phi,
)

INF = float("inf")


@dataclass(frozen=True)
class DyadicCube:
    """The cube 2**-nu * ([0,1)**d + k), with k a tuple of integers."""

    nu: int
    k: tuple

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(int(c) for c in self.k))

    @property
    def d(self):
        return len(self.k)

    @property
    def side(self):
        return 2.0 ** (-self.nu)

    def contains(self, other):
        return cube_contains(self, other)


def cube_contains(outer, inner):
    """Whether the first cube contains the second.

    Containment between dyadic cubes is a floor-shift comparison of the
    integer corners; arithmetic right shift implements the floor also for
    negative indices.
    """
    if outer.d != inner.d:
        raise DomainError("cubes of different dimensions")
    if inner.nu < outer.nu:
        return False
    shift = inner.nu - outer.nu
    return all((c >> shift) == o for c, o in zip(inner.k, outer.k))


def _orthant(m):
    return tuple(c < 0 for c in m)


class DyadicSequence:
    """Finitely supported map from dyadic cells (j, m) to reals.

    Zero values are dropped on construction and levels j are required to be
    nonnegative.  Instances are treated as immutable; the combinators return
    new sequences.
    """

    def __init__(self, d, entries=None):
        if not isinstance(d, int) or d < 1:
            raise DomainError("dimension must be a positive integer")
        self.d = d
        by_level = {}
        if entries:
            items = entries.items() if hasattr(entries, "items") else entries
            for (j, m), val in items:
                j = int(j)
                if j < 0:
                    raise DomainError("levels are nonnegative, got j=%d" % j)
                key = tuple(int(c) for c in (m if isinstance(m, tuple) else (m,)))
                if len(key) != d:
                    raise DomainError("cell index %r does not have %d coordinates" % (m, d))
                val = float(val)
                if val != 0.0:
                    by_level.setdefault(j, {})[key] = val
        self._by_level = by_level

    def levels(self):
        return sorted(self._by_level)

    def level(self, j):
        return dict(self._by_level.get(j, {}))

    def entries(self):
        for j in self.levels():
            row = self._by_level[j]
            for m in sorted(row):
                yield (j, m), row[m]

    def scaled(self, factor):
        factor = float(factor)
        return DyadicSequence(
            self.d, {key: factor * val for key, val in self.entries()}
        )

    def plus(self, other):
        if other.d != self.d:
            raise DomainError("cannot add sequences of different dimensions")
        merged = {key: val for key, val in self.entries()}
        for key, val in other.entries():
            merged[key] = merged.get(key, 0.0) + val
        return DyadicSequence(self.d, merged)

    def __len__(self):
        return sum(len(row) for row in self._by_level.values())

    def __eq__(self, other):
        return (
            isinstance(other, DyadicSequence)
            and self.d == other.d
            and self._by_level == other._by_level
        )

    def __repr__(self):
        return "DyadicSequence(d=%d, %d entries on levels %r)" % (
            self.d,
            len(self),
            self.levels(),
        )


def _parse_scalar(text):
    text = text.strip().lower()
    if text in ("inf", "infinity", "+inf"):
        return INF
    try:
        return float(text)
    except ValueError:
        raise DomainError("expected a number or inf, got %r" % (text,))


@dataclass(frozen=True)
class SpaceParams:
    """Parameters (s, p, q, phi, d) of one sequence space.

    The profile is normalised to phi(1) = 1 on construction, must be
    admissible for p and must give a nontrivial space.  q = inf is allowed.
    """

    s: float
    p: float
    q: float
    phi: PhiSpec
    d: int

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 1:
            raise DomainError("dimension must be a positive integer")
        object.__setattr__(self, "s", float(self.s))
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "q", float(self.q))
        if not math.isfinite(self.s):
            raise DomainError("smoothness s must be finite")
        if not (self.p > 0 and math.isfinite(self.p)):
            raise DomainError("p must be a positive finite number")
        if not self.q > 0:
            raise DomainError("q must be positive (inf allowed)")
        if self.phi.d != self.d:
            raise DomainError(
                "profile dimension %d does not match space dimension %d"
                % (self.phi.d, self.d)
            )
        phin = normalize(self.phi)
        report = check_class_gp(phin, self.p)
        if not report.member:
            raise DomainError(
                "profile %s is not admissible for p=%g" % (format_phi(self.phi), self.p)
            )
        if not check_nontrivial(phin, self.p):
            raise DegeneratePhiError(
                "profile %s gives the trivial space for p=%g"
                % (format_phi(self.phi), self.p)
            )
        object.__setattr__(self, "phi", phin)

    @property
    def sigma_p(self):
        return self.d * (1.0 / min(1.0, self.p) - 1.0)


def parse_space_params(text, d=None):
    """Parse an inline block like ``s=1,p=2,q=inf,phi=twopower(1,2),d=1``.

    Commas inside parentheses belong to the profile expression.  A ``d``
    passed by the caller fills in when the block omits it.
    """
    fields = {}
    depth = 0
    piece = []
    pieces = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise DomainError("unbalanced parentheses in %r" % (text,))
        if ch == "," and depth == 0:
            pieces.append("".join(piece))
            piece = []
        else:
            piece.append(ch)
    if depth != 0:
        raise DomainError("unbalanced parentheses in %r" % (text,))
    pieces.append("".join(piece))
    for item in pieces:
        if not item.strip():
            continue
        if "=" not in item:
            raise DomainError("expected key=value, got %r" % (item.strip(),))
        key, _, value = item.partition("=")
        fields[key.strip().lower()] = value.strip()

    if "d" in fields:
        dim = int(_parse_scalar(fields["d"]))
    elif d is not None:
        dim = int(d)
    else:
        raise DomainError("no dimension given in %r" % (text,))
    missing = [key for key in ("s", "p", "q", "phi") if key not in fields]
    if missing:
        raise DomainError("missing %s in space block %r" % (", ".join(missing), text))
    phi = parse_phi(fields["phi"], d=dim)
    return SpaceParams(
        s=_parse_scalar(fields["s"]),
        p=_parse_scalar(fields["p"]),
        q=_parse_scalar(fields["q"]),
        phi=phi,
        d=dim,
    )


def format_space_params(params):
    qtext = "inf" if params.q == INF else repr(params.q)
    return "s=%r,p=%r,q=%s,phi=%s,d=%d" % (
        params.s,
        params.p,
        qtext,
        format_phi(params.phi),
        params.d,
    )


# ---------------------------------------------------------------------------
# quasi-norms


def lq_norm(values, q):
    """ell_q norm of an iterable, with the supremum convention at q = inf."""
    if q == INF:
        best = 0.0
        for x in values:
            x = abs(x)
            if x > best:
                best = x
        return best
    if q <= 0:
        raise DomainError("q must be positive")
    total = 0.0
    for x in values:
        total += abs(x) ** q
    return total ** (1.0 / q)


def level_quantity(seq, j, params):
    """Per-level Morrey supremum of the level-j slice of the sequence."""
    lam = seq._by_level.get(j)
    if not lam:
        return 0.0
    p = params.p
    dp = params.d / p
    phi = params.phi
    groups = {}
    for m, val in lam.items():
        groups[m] = groups.get(m, 0.0) + abs(val) ** p
    pattern_count = len({_orthant(m) for m in lam})

    best = 0.0
    nu = j
    while True:
        heaviest = max(groups.values())
        candidate = eval_phi(phi, 2.0 ** (-nu)) * 2.0 ** ((nu - j) * dp) * heaviest ** (1.0 / p)
        if candidate > best:
            best = candidate
        if len(groups) == pattern_count:
            break
        merged = {}
        for k, weight in groups.items():
            parent = tuple(c >> 1 for c in k)
            merged[parent] = merged.get(parent, 0.0) + weight
        groups = merged
        nu -= 1
    return best


def n_norm(seq, params):
    """Quasi-norm of the sequence in the space described by params."""
    if seq.d != params.d:
        raise DomainError("sequence dimension %d does not match space dimension %d" % (seq.d, params.d))
    terms = (2.0 ** (j * params.s) * level_quantity(seq, j, params) for j in seq.levels())
    return lq_norm(terms, params.q)


def n_norm_via_morrey(seq, params):
    """Same quasi-norm computed through Morrey norms of per-level step
    functions.  Used as an independent cross-check of n_norm."""
    if seq.d != params.d:
        raise DomainError("sequence dimension %d does not match space dimension %d" % (seq.d, params.d))
    terms = []
    for j in seq.levels():
        f = DyadicStepFunction(d=params.d, level=j, values=seq.level(j))
        terms.append(2.0 ** (j * params.s) * morrey_norm(f, params.phi, params.p))
    return lq_norm(terms, params.q)


def b_infty_norm(seq, s, q):
    """Besov-type quasi-norm with the inner exponent at infinity:
    ell_q over j of 2**(j s) * sup_m |value|."""
    terms = []
    for j in seq.levels():
        row = seq._by_level[j]
        terms.append(2.0 ** (j * s) * max(abs(v) for v in row.values()))
    return lq_norm(terms, q)


def tilde_norm(coeffs, params):
    """Norm of a full wavelet coefficient set: the Morrey norm of the
    level-0 scaling part plus the sequence quasi-norm of each detail
    orientation."""
    f = DyadicStepFunction(d=params.d, level=0, values=coeffs.scaling_values())
    total = morrey_norm(f, params.phi, params.p)
    details = coeffs.detail_sequences()
    for gender in sorted(details):
        total += n_norm(details[gender], params)
    return total


# ---------------------------------------------------------------------------
# serialization


def save_csv(seq, path, header_lines=()):
    """Write the sequence as CSV: comment header, then j, m_1..m_d, value."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        write_csv(seq, fh, header_lines=header_lines)


def write_csv(seq, fh, header_lines=()):
    for line in header_lines:
        fh.write("# %s\n" % line)
    fh.write("# d=%d\n" % seq.d)
    cols = ["j"] + ["m_%d" % (i + 1) for i in range(seq.d)] + ["value"]
    fh.write(",".join(cols) + "\n")
    for (j, m), val in seq.entries():
        fh.write("%d,%s,%s\n" % (j, ",".join(str(c) for c in m), repr(val)))


def load_csv(path):
    """Read a sequence written by save_csv.  The dimension comes from the
    ``# d=...`` comment, or failing that from the column count."""
    with open(path, "r", encoding="utf-8") as fh:
        return read_csv(fh, where=path)


def read_csv(fh, where="<stream>"):
    d = None
    entries = {}
    saw_rows = False
    for lineno, raw in enumerate(fh, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("d="):
                try:
                    d = int(body[2:].split()[0])
                except ValueError:
                    raise DomainError("%s:%d: bad dimension comment" % (where, lineno))
            continue
        parts = [piece.strip() for piece in line.split(",")]
        if not _looks_numeric(parts[0]):
            if not saw_rows:
                continue  # column header
            raise DomainError("%s:%d: malformed row %r" % (where, lineno, line))
        if len(parts) < 3:
            raise DomainError("%s:%d: expected j, m_1..m_d, value" % (where, lineno))
        if d is None:
            d = len(parts) - 2
        if len(parts) != d + 2:
            raise DomainError(
                "%s:%d: expected %d columns for d=%d" % (where, lineno, d + 2, d)
            )
        try:
            j = int(parts[0])
            m = tuple(int(piece) for piece in parts[1:-1])
            val = float(parts[-1])
        except ValueError:
            raise DomainError("%s:%d: malformed row %r" % (where, lineno, line))
        key = (j, m)
        entries[key] = entries.get(key, 0.0) + val
        saw_rows = True
    if d is None:
        raise DomainError("%s: no rows and no dimension comment" % (where,))
    return DyadicSequence(d, entries)


def _looks_numeric(text):
    try:
        int(text)
        return True
    except ValueError:
        return False
