"""Extremal sequences certifying failed embeddings.

Each failure mode of the embedding conditions has a family of witness
sequences whose target/source quasi-norm ratio grows without bound:

* a full block of equal coefficients at one level inside one coarse cube
  (the large-cube ratio itself, when no local integrability is lost),
* a greedily spread set of unit coefficients saturating the capacity of a
  coarse cube (the large-cube ratio damped by rho, when p1 < p2),
* per-level blocks weighted to have unit source norm (the cross-level
  sequence, certifying a failing summability condition).

The greedy spreading keeps every intermediate cube's share of cells within
one unit of the even split, which is what makes the source norm of the
capacity witnesses uniformly bounded.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .dyadic import DyadicSequence, n_norm
from .embedding import alpha_sequence, decide, ratio_R
from .errors import CapacityError, DomainError, WitnessSelectionError
from .phi import eval_phi

#: Refuse to materialise witnesses with more cells than this.
MAX_CELLS = 1 << 22

_CEIL_DUST = 1e-9


def _check_block(d, j0, nu0):
    if d < 1:
        raise DomainError("dimension must be >= 1")
    if j0 < 0:
        raise DomainError("witness level j0 must be >= 0")
    if nu0 > j0:
        raise DomainError("need nu0 <= j0 so the coarse cube contains level-j0 cells")


def simple_witness(j0, nu0, phi1):
    """Equal coefficients 1/phi1(2**-nu0) on every level-j0 cell inside
    Q_{nu0, 0}.

    Its source quasi-norm is exactly 2**(j0 s1), and its norm in any other
    admissible space with profile phi2 is exactly
    2**(j0 s2) * phi2(2**-nu0) / phi1(2**-nu0).
    """
    d = phi1.d
    _check_block(d, j0, nu0)
    span = j0 - nu0
    count = 1 << (span * d)
    if count > MAX_CELLS:
        raise DomainError("witness block of 2^%d cells is too large" % (span * d))
    value = 1.0 / eval_phi(phi1, 2.0 ** (-nu0))
    entries = {}
    for m in itertools.product(range(1 << span), repeat=d):
        entries[(j0, m)] = value
    return DyadicSequence(d, entries)


@dataclass(frozen=True)
class GreedyDistribution:
    """Placement of ``total`` unit cells at level j0 inside Q_{nu0, 0}."""

    d: int
    j0: int
    nu0: int
    total: int
    cells: tuple


def greedy_distribution(d, j0, nu0, total):
    """Spread ``total`` cells of level j0 over the coarse cube Q_{nu0, 0}.

    The load splits over the 2**d children a ceiling-share at a time, in
    lexicographic child order; once a node's load fits a single split
    (at most 2**d), each child receives at most one cell, placed at its
    minimal corner.  Consequences, tested exhaustively: every dyadic cube
    between the two levels holds at most ceil(parent/2**d) of its parent's
    cells, hence at most 2**(d(nu0-nu)) * total + 2 cells overall.
    """
    _check_block(d, j0, nu0)
    capacity_bits = (j0 - nu0) * d
    if total < 0:
        raise DomainError("cannot place a negative number of cells")
    if capacity_bits < 63 and total > (1 << capacity_bits):
        raise CapacityError(
            "%d cells do not fit the 2^%d cells of the block" % (total, capacity_bits)
        )
    if total > MAX_CELLS:
        raise DomainError("distribution of %d cells is too large" % total)

    cells = []
    children = list(itertools.product((0, 1), repeat=d))

    def fill(nu, corner, load):
        if load == 0:
            return
        if nu == j0:
            cells.append(corner)
            return
        span = j0 - nu
        if span * d < 63 and load == (1 << (span * d)):
            base = tuple(c << span for c in corner)
            for offset in itertools.product(range(1 << span), repeat=d):
                cells.append(tuple(b + o for b, o in zip(base, offset)))
            return
        share = -(-load // (1 << d))
        kids = [tuple(2 * c + e for c, e in zip(corner, bits)) for bits in children]
        if share == 1:
            for kid in kids[:load]:
                cells.append(tuple(c << (span - 1) for c in kid))
            return
        for i, kid in enumerate(kids):
            give = min(share, load - i * share)
            if give <= 0:
                break
            fill(nu + 1, kid, give)

    fill(nu0, (0,) * d, total)
    return GreedyDistribution(d=d, j0=j0, nu0=nu0, total=total, cells=tuple(sorted(cells)))


def capacity_witness(d, j0, nu0, phi1, p1):
    """Unit coefficients on greedily spread cells saturating the weighted
    capacity of Q_{nu0, 0}.

    The cell count is ceil(2**((j0-nu0)d) * phi1(2**-nu0)**-p1), chosen so
    the source quasi-norm stays bounded by a constant independent of nu0
    while the norm in a target space with profile phi2 grows at least like
    phi2(2**-nu0) / phi1(2**-nu0)**(p1/p2).
    """
    _check_block(d, j0, nu0)
    if phi1.d != d:
        raise DomainError("profile dimension %d does not match d=%d" % (phi1.d, d))
    if p1 <= 0:
        raise DomainError("p1 must be positive")
    weight = eval_phi(phi1, 2.0 ** (-nu0))
    raw = 2.0 ** ((j0 - nu0) * d) * weight ** (-p1)
    total = max(1, math.ceil(raw - _CEIL_DUST))
    capacity_bits = (j0 - nu0) * d
    if capacity_bits < 63 and total > (1 << capacity_bits):
        raise CapacityError(
            "capacity witness needs %d cells but the block only has 2^%d; "
            "the profile must be at least one on the coarse cube" % (total, capacity_bits)
        )
    dist = greedy_distribution(d, j0, nu0, total)
    return DyadicSequence(d, {(j0, m): 1.0 for m in dist.cells})


def select_witness_level(query, i, nu_min=-64):
    """Coarse level nu_i for the level-i witness: the largest nu <= i whose
    ratio R(nu) is within a factor two of the running maximum.

    Taking the largest admissible nu keeps the materialised witness small;
    any nu with R(nu) >= alpha_i / 2 certifies the same growth up to a
    factor 2.
    """
    if i < 0:
        raise DomainError("level index must be >= 0")
    phi1, phi2 = query.source.phi, query.target.phi
    rho = query.rho
    best = None
    for nu in range(nu_min, i + 1):
        r = ratio_R(phi1, phi2, rho, nu)
        if best is None or r > best:
            best = r
    threshold = best / 2.0
    for nu in range(i, nu_min - 1, -1):
        if ratio_R(phi1, phi2, rho, nu) >= threshold:
            return nu
    raise WitnessSelectionError("no level attains half the running maximum")


def beta_witness(i, nu_i, query, nu_min=-64):
    """Level-i witness with unit source norm up to a bounded factor.

    With rho = 1 it is a full block of equal coefficients inside Q_{nu_i,0};
    with rho < 1 the block is thinned to the weighted capacity by the greedy
    distribution.  Its target quasi-norm is at least
    2**(i(s2-s1)) * alpha_i * phi1(2**-i)**(rho-1) up to a bounded factor.
    """
    src, tgt = query.source, query.target
    d = src.d
    _check_block(d, i, nu_i)
    rho = query.rho
    phi1, phi2 = src.phi, tgt.phi
    alphas = alpha_sequence(phi1, phi2, rho, j_max=max(i, 0), nu_min=nu_min)
    alpha_i = alphas[i]
    span = i - nu_i
    if rho == 1.0:
        count_bits = span * d
        if count_bits > 62 or (1 << count_bits) > MAX_CELLS:
            raise DomainError("witness block of 2^%d cells is too large" % count_bits)
        value = 2.0 ** (-i * src.s) * alpha_i / eval_phi(phi2, 2.0 ** (-nu_i))
        entries = {}
        for m in itertools.product(range(1 << span), repeat=d):
            entries[(i, m)] = value
        return DyadicSequence(d, entries)
    f1_fine = eval_phi(phi1, 2.0 ** (-i))
    f1_coarse = eval_phi(phi1, 2.0 ** (-nu_i))
    raw = 2.0 ** (span * d) * (f1_fine / f1_coarse) ** src.p
    total = max(1, math.ceil(raw - _CEIL_DUST))
    dist = greedy_distribution(d, i, nu_i, total)
    value = (
        2.0 ** (-i * src.s)
        * alpha_i
        / eval_phi(phi2, 2.0 ** (-nu_i))
        * f1_coarse ** rho
        / f1_fine
    )
    return DyadicSequence(d, {(i, m): value for m in dist.cells})


def shift_family(mu, d):
    """Member mu of the separated family: a single unit coefficient at
    level 0, shifted mu cells along the first axis.

    Every member has source quasi-norm exactly one in any admissible space,
    while distinct members stay at least quasi-norm distance one apart, so
    the family rules out compactness of any holding embedding.
    """
    if mu < 0:
        raise DomainError("shift index must be >= 0")
    if d < 1:
        raise DomainError("dimension must be >= 1")
    m = (int(mu),) + (0,) * (d - 1)
    return DyadicSequence(d, {(0, m): 1.0})


@dataclass(frozen=True)
class DivergenceScan:
    family: str
    indices: tuple
    ratios: tuple
    outcome: str


def divergence_scan(query, depth=12, nu_min=-64):
    """Certify a failing embedding by an explicit sequence of witnesses.

    Picks the witness family matching the failing condition and reports the
    target/source quasi-norm ratios along the family index; for a genuine
    failure the ratios grow without bound.  Raises WitnessSelectionError
    when the verdict is not a failure.
    """
    if depth < 0:
        raise DomainError("depth must be >= 0")
    verdict = decide(query, nu_min=nu_min)
    if verdict.outcome != "fails":
        raise WitnessSelectionError(
            "nothing to certify: the embedding verdict is %r" % verdict.outcome
        )
    src, tgt = query.source, query.target
    d = src.d
    indices = tuple(range(depth + 1))
    ratios = []
    if verdict.cond0.status == "violated":
        if query.rho == 1.0:
            family = "simple"
            for i in indices:
                w = simple_witness(0, -i, src.phi)
                ratios.append(n_norm(w, tgt) / n_norm(w, src))
        else:
            family = "capacity"
            for i in indices:
                w = capacity_witness(d, 0, -i, src.phi, src.p)
                ratios.append(n_norm(w, tgt) / n_norm(w, src))
    else:
        family = "beta"
        for i in indices:
            nu_i = select_witness_level(query, i, nu_min=nu_min)
            w = beta_witness(i, nu_i, query, nu_min=nu_min)
            ratios.append(n_norm(w, tgt) / n_norm(w, src))
    return DivergenceScan(
        family=family, indices=indices, ratios=tuple(ratios), outcome=verdict.outcome
    )
