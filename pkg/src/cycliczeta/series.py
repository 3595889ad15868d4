"""Truncated evaluation of the complex-argument series attached to a shape.

Every sum here is a box truncation: each summation variable runs over
1..N.  Generic constrained sums are split into the weak orders of their
constraint system (the same split the exact decomposer uses) and each
totally ordered chain is evaluated by prefix/suffix cumulative sums.  A
term may couple two variables, either through the pole factor
a^p / (b^q (b - a)) or through a harmonic-range factor; coupled chains
cost O(N^2) and are evaluated in fixed-size chunks with a fixed reduction
order, so results are bit-reproducible.

The harmonic-form evaluators sum the extra variable analytically into a
harmonic-range factor and truncate only the outer variables, so at finite
N they differ from the direct path; the two agree in the limit.

Complex powers n^(-s) are computed as exp(-s log n) with the real log of a
positive integer; the sine/cosine are taken at |Im s| log n so that
conjugating every argument conjugates the result exactly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping, Sequence

import numpy as np

from .decompose import weak_orders
from .errors import BudgetError, DomainError, InternalInvariantError
from .model import (
    EXTRA,
    ComplexArgs,
    ConstraintSystem,
    VarId,
    build_constraints_S,
    build_constraints_S_i,
    build_constraints_S_ij,
    build_constraints_T_i,
    ez_inequalities,
    in_domain_EZ_absolute,
    in_domain_W,
    w_inequalities,
)

COUPLED_CUTOFF_CAP = 5000
CHAIN_CUTOFF_CAP = 20_000_000
_CHUNK = 256


# ---------------------------------------------------------------------------
# Term and plan types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PoleSpec:
    """Factor num^{num_exp} / (den^{den_exp} * (den - num)) joining two
    strictly separated variables."""

    num_var: VarId
    den_var: VarId
    num_exp: complex
    den_exp: complex

    def __post_init__(self):
        if self.num_var == self.den_var:
            raise ValueError("pole needs two distinct variables")


@dataclass(frozen=True)
class TermSpec:
    """Summand: product of v^{-e(v)} over the exponent map, times the
    optional pole factor."""

    exponents: Mapping[VarId, complex]
    pole: PoleSpec | None = None


@dataclass(frozen=True)
class TruncationPlan:
    """Box cutoff plus optional increasing refinement cutoffs."""

    cutoff: int
    refinements: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.cutoff < 1:
            raise ValueError("cutoff must be >= 1")
        if self.refinements is not None:
            refs = tuple(int(n) for n in self.refinements)
            if any(b <= a for a, b in zip(refs, refs[1:])) or any(n < 1 for n in refs):
                raise ValueError("refinements must be strictly increasing and >= 1")
            object.__setattr__(self, "refinements", refs)


@dataclass
class EvalReport:
    value: complex
    cutoff: int
    residual: float
    refinements: list[tuple[int, complex]] | None = None

    def to_json_obj(self) -> dict:
        obj = {
            "value": [self.value.real, self.value.imag],
            "cutoff": self.cutoff,
            "residual": self.residual,
        }
        if self.refinements is not None:
            obj["refinements"] = [[n, v.real, v.imag] for n, v in self.refinements]
        return obj


@dataclass
class TheoremReport:
    """Both sides of the split-series identity at one box truncation."""

    lhs: complex
    rhs: complex
    residual: float
    cutoff: int
    refinements: list[tuple[int, complex, complex, float]] | None = None

    def to_json_obj(self) -> dict:
        obj = {
            "lhs": [self.lhs.real, self.lhs.imag],
            "rhs": [self.rhs.real, self.rhs.imag],
            "residual": self.residual,
            "cutoff": self.cutoff,
        }
        if self.refinements is not None:
            obj["refinements"] = [
                [n, l.real, l.imag, r.real, r.imag, q]
                for n, l, r, q in self.refinements
            ]
        return obj


def _as_plan(plan) -> TruncationPlan:
    if isinstance(plan, TruncationPlan):
        return plan
    return TruncationPlan(int(plan))


# ---------------------------------------------------------------------------
# Powers and harmonic numbers
# ---------------------------------------------------------------------------


def _cpow(vals: np.ndarray, e: complex) -> np.ndarray:
    """vals**e for positive vals, conjugation-symmetric in e."""
    e = complex(e)
    if e == 0:
        return np.ones_like(np.asarray(vals, dtype=np.float64))
    if e.imag == 0.0:
        return np.asarray(vals, dtype=np.float64) ** e.real
    v = np.asarray(vals, dtype=np.float64)
    ln = np.log(v)
    mag = v**e.real
    aa = abs(e.imag) * ln
    sgn = 1.0 if e.imag > 0 else -1.0
    return mag * (np.cos(aa) + 1j * sgn * np.sin(aa))


def _pow_vec(n_max: int, s: complex) -> np.ndarray:
    """[1..n_max]^(-s)."""
    return _cpow(np.arange(1, n_max + 1, dtype=np.float64), -complex(s))


def harmonic_number(k: int) -> float:
    """H(k) = 1 + 1/2 + ... + 1/k, with H(0) = 0."""
    if k < 0:
        raise ValueError("harmonic index must be >= 0")
    return float(np.sum(1.0 / np.arange(1, k + 1))) if k else 0.0


def harmonic_range(a: int, b: int) -> float:
    """Sum of 1/k for a <= k <= b (0 for an empty range)."""
    if b < a:
        return 0.0
    return harmonic_number(b) - harmonic_number(a - 1)


def _harmonic_table(n_max: int) -> np.ndarray:
    """H(0..n_max) as a lookup vector."""
    return np.concatenate(
        ([0.0], np.cumsum(1.0 / np.arange(1, n_max + 1, dtype=np.float64)))
    )


# ---------------------------------------------------------------------------
# Chain evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Coupling:
    """A factor tying the values of two variables; fn(a_vals, b_vals) must
    broadcast. allow_tie=False marks factors that are singular on ties."""

    var_a: VarId
    var_b: VarId
    fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    allow_tie: bool = True


def _shift_prefix(c: np.ndarray) -> np.ndarray:
    out = np.empty_like(c)
    out[0] = 0
    np.cumsum(c[:-1], out=out[1:])
    return out


def _shift_suffix(c: np.ndarray) -> np.ndarray:
    out = np.empty_like(c)
    out[-1] = 0
    out[:-1] = np.cumsum(c[:0:-1])[::-1]
    return out


def _chain_plain(exps: Sequence[complex], n_max: int,
                 extra_weight: tuple[int, np.ndarray] | None = None) -> complex:
    """Sum over 1 <= x_1 < ... < x_t <= n_max of prod x_l^(-E_l), with an
    optional extra per-value weight on one level."""
    if n_max < 1:
        return 0j
    run = None
    for l, e in enumerate(exps):
        g = _pow_vec(n_max, e)
        if extra_weight is not None and extra_weight[0] == l:
            g = g * extra_weight[1]
        run = g if run is None else g * _shift_prefix(run)
    return complex(run.sum())


def _chain_coupled(exps: Sequence[complex], n_max: int, p: int, q: int,
                   members: list[tuple[complex, Callable]]) -> complex:
    """Coupled chain: levels p < q carry cell factors f(u, w) summed over
    admissible value pairs u < w, with prefix/middle/suffix chains attached."""
    t = len(exps)
    run = None
    for l in range(p):
        g = _pow_vec(n_max, exps[l])
        run = g if run is None else g * _shift_prefix(run)
    a_pref = _shift_prefix(run) if run is not None else np.ones(n_max)
    g_a = _pow_vec(n_max, exps[p]) * a_pref

    run = None
    for l in range(t - 1, q, -1):
        g = _pow_vec(n_max, exps[l])
        run = g if run is None else g * _shift_suffix(run)
    c_suf = _shift_suffix(run) if run is not None else np.ones(n_max)
    g_c = _pow_vec(n_max, exps[q]) * c_suf

    mids = [_pow_vec(n_max, exps[l]) for l in range(p + 1, q)]
    vals = np.arange(1, n_max + 1, dtype=np.float64)
    total = 0j
    for u0 in range(0, n_max, _CHUNK):
        u1 = min(u0 + _CHUNK, n_max)
        rows = u1 - u0
        uvals = vals[u0:u1, None]
        wvals = vals[None, :]
        wgtu = np.arange(n_max)[None, :] > np.arange(u0, u1)[:, None]
        b_mid = None
        if mids:
            for l, g in enumerate(mids):
                if l == 0:
                    cums = np.cumsum(g)
                    b_mid = cums[None, :] - cums[u0:u1, None]
                    ge = np.arange(n_max)[None, :] >= np.arange(u0, u1)[:, None]
                    b_mid = np.where(ge, b_mid, 0)
                else:
                    sh = np.concatenate(
                        [np.zeros((rows, 1), dtype=b_mid.dtype), b_mid[:, :-1]], axis=1
                    )
                    b_mid = np.cumsum(g[None, :] * sh, axis=1)
            b_mid = np.concatenate(
                [np.zeros((rows, 1), dtype=b_mid.dtype), b_mid[:, :-1]], axis=1
            )
        with np.errstate(all="ignore"):
            cells = None
            for coeff, fn in members:
                f = coeff * fn(uvals, wvals)
                cells = f if cells is None else cells + f
            block = g_a[u0:u1, None] * (g_c[None, :] * cells)
            if b_mid is not None:
                block = block * b_mid
        block = np.where(wgtu, block, 0)
        total += complex(block.sum())
    return total


def _eval_order(osp, exps: Mapping[VarId, complex], pieces, n_max: int) -> complex:
    levels = osp.levels
    level_of = {v: l for l, lvl in enumerate(levels) for v in lvl}
    level_exps = [sum((complex(exps.get(v, 0)) for v in lvl), 0j) for lvl in levels]

    plain_coeff = 0j
    diag: list[tuple[complex, int, Callable]] = []
    groups: dict[tuple[int, int], list[tuple[complex, Callable]]] = {}
    for coeff, cp in pieces:
        if cp is None:
            plain_coeff += coeff
            continue
        la, lb = level_of[cp.var_a], level_of[cp.var_b]
        if la == lb:
            if not cp.allow_tie:
                raise InternalInvariantError(
                    f"singular coupling between tied variables {cp.var_a}, {cp.var_b}"
                )
            diag.append((coeff, la, cp.fn))
        elif la < lb:
            groups.setdefault((la, lb), []).append((coeff, cp.fn))
        else:
            fn = cp.fn
            groups.setdefault((lb, la), []).append(
                (coeff, lambda u, w, _f=fn: _f(w, u))
            )

    total = 0j
    if plain_coeff != 0:
        total += plain_coeff * _chain_plain(level_exps, n_max)
    for coeff, l, fn in diag:
        x = np.arange(1, n_max + 1, dtype=np.float64)
        total += coeff * _chain_plain(level_exps, n_max, extra_weight=(l, fn(x, x)))
    for (p, q), members in sorted(groups.items()):
        total += _chain_coupled(level_exps, n_max, p, q, members)
    return total


def _eval_system(cs: ConstraintSystem, exps, pieces, n_max: int) -> complex:
    if n_max < 1:
        return 0j
    total = 0j
    for osp in weak_orders(cs):
        total += _eval_order(osp, exps, pieces, n_max)
    return total


def _check_budget(plan: TruncationPlan, coupled: bool, max_cutoff: int | None):
    cap = max_cutoff if max_cutoff is not None else (
        COUPLED_CUTOFF_CAP if coupled else CHAIN_CUTOFF_CAP
    )
    top = max(plan.cutoff, *(plan.refinements or (1,)))
    if top > cap:
        raise BudgetError(f"cutoff {top} exceeds the enumeration cap {cap}")


def _make_report(evalfn: Callable[[int], complex], plan: TruncationPlan) -> EvalReport:
    cache: dict[int, complex] = {}

    def ev(n: int) -> complex:
        if n not in cache:
            cache[n] = evalfn(n) if n >= 1 else 0j
        return cache[n]

    value = ev(plan.cutoff)
    refs = None
    if plan.refinements is not None:
        refs = [(n, ev(n)) for n in plan.refinements]
    residual = abs(value - ev(plan.cutoff // 2))
    return EvalReport(value=value, cutoff=plan.cutoff, residual=residual, refinements=refs)


# ---------------------------------------------------------------------------
# Generic constrained sums
# ---------------------------------------------------------------------------


def _pole_pieces(term: TermSpec):
    if term.pole is None:
        return [(1.0, None)]
    pole = term.pole

    def fn(a, b, _n=complex(pole.num_exp), _d=complex(pole.den_exp)):
        return _cpow(a, _n) * _cpow(b, -_d) / (b - a)

    return [(1.0, _Coupling(pole.num_var, pole.den_var, fn, allow_tie=False))]


def eval_constrained_sum(cs: ConstraintSystem, term: TermSpec, plan,
                         *, max_cutoff: int | None = None) -> EvalReport:
    """Box-truncated sum of the term over the lattice points of cs."""
    plan = _as_plan(plan)
    varset = set(cs.variables)
    for v in term.exponents:
        if v not in varset:
            raise ValueError(f"term variable {v} not in the constraint system")
    if term.pole is not None:
        for v in (term.pole.num_var, term.pole.den_var):
            if v not in varset:
                raise ValueError(f"pole variable {v} not in the constraint system")
    _check_budget(plan, term.pole is not None, max_cutoff)
    pieces = _pole_pieces(term)
    return _make_report(lambda n: _eval_system(cs, term.exponents, pieces, n), plan)


# ---------------------------------------------------------------------------
# Named series of the block model
# ---------------------------------------------------------------------------


def _require_w(s: ComplexArgs, enforce: bool):
    if in_domain_W(s):
        return
    bad = next(q for q in w_inequalities(s) if not q.ok)
    msg = f"arguments outside W: {bad.describe()}"
    if enforce:
        raise DomainError(msg)
    warnings.warn(msg, stacklevel=3)


def _block_exponents(s: ComplexArgs, extra: complex | None = None):
    exps: dict[VarId, complex] = {
        VarId.block(i, j): s[(i, j)] for (i, j) in s.shape.positions()
    }
    if extra is not None:
        exps[EXTRA] = extra
    return exps


def _tilde_pieces(s: ComplexArgs, i: int, j: int, variant) -> list:
    r_i = s.shape.r[i - 1]
    delta = 1 if j == r_i else 0
    x = VarId.block(i, j)

    def pole_fn(num_exp: complex, den_exp: complex):
        def fn(a, b, _n=complex(num_exp), _d=complex(den_exp)):
            return _cpow(a, _n) * _cpow(b, -_d) / (b - a)

        return fn

    c1 = _Coupling(x, EXTRA, pole_fn(delta, delta), allow_tie=False)
    c2 = _Coupling(x, EXTRA, pole_fn(s[(i, j)], s[(i, j)]), allow_tie=False)
    if variant in (1, "1"):
        return [(1.0, c1)]
    if variant in (2, "2"):
        return [(1.0, c2)]
    if variant == "diff":
        return [(1.0, c1), (-1.0, c2)]
    raise ValueError(f"unknown variant {variant!r}")


def eval_zeta_tilde(s: ComplexArgs, i: int, j: int, variant, plan,
                    *, enforce_domain: bool = True,
                    max_cutoff: int | None = None) -> EvalReport:
    """Direct box-truncated evaluation of the split series at position (i, j).

    variant 1 and 2 are the two halves; 'diff' is their termwise difference
    over the same index domain.
    """
    plan = _as_plan(plan)
    shape = s.shape
    if not (1 <= i <= shape.d and 1 <= j <= shape.r[i - 1]):
        raise ValueError(f"position ({i},{j}) out of range for shape {shape}")
    _require_w(s, enforce_domain)
    _check_budget(plan, True, max_cutoff)
    cs = build_constraints_S_ij(shape, i, j)
    exps = _block_exponents(s, extra=0)
    pieces = _tilde_pieces(s, i, j, variant)
    return _make_report(lambda n: _eval_system(cs, exps, pieces, n), plan)


def _tilde_harmonic_setup(s: ComplexArgs, i: int, j: int, variant):
    """Outer system and harmonic coupling for the closed-form path."""
    shape = s.shape
    r_i = shape.r[i - 1]
    if variant in (1, "1"):
        if j < r_i:
            cs = build_constraints_S(shape)
            va, vb = VarId.block(i, j), VarId.block(i, j + 1)

            def make(hn):
                def fn(a, b):
                    gap = np.clip((b - a - 1).astype(np.int64), 0, hn.size - 1)
                    return hn[gap]

                return fn

        else:
            cs = build_constraints_T_i(shape, i)
            prev = shape.wrap_block(i - 1)
            va = VarId.block(prev, 1)
            vb = VarId.block(i, r_i)

            def make(hn):
                def fn(a, b):
                    ai = a.astype(np.int64)
                    bi = b.astype(np.int64)
                    hi = np.maximum(bi, ai - 1)
                    lo = np.maximum(ai - bi - 1, 0)
                    return hn[np.clip(hi, 0, hn.size - 1)] - hn[np.clip(lo, 0, hn.size - 1)]

                return fn

    elif variant in (2, "2"):
        if j == 1:
            nxt = shape.wrap_block(i + 1)
            cs = build_constraints_T_i(shape, nxt)
            va = VarId.block(i, 1)
            vb = VarId.block(nxt, shape.r[nxt - 1])

            def make(hn):
                def fn(a, b):
                    ai = a.astype(np.int64)
                    bi = b.astype(np.int64)
                    lo = np.maximum(ai - bi - 1, 0)
                    return hn[np.clip(ai - 1, 0, hn.size - 1)] - hn[np.clip(lo, 0, hn.size - 1)]

                return fn

        else:
            cs = build_constraints_S(shape)
            va, vb = VarId.block(i, j - 1), VarId.block(i, j)

            def make(hn):
                def fn(a, b):
                    gap = np.clip((b - a - 1).astype(np.int64), 0, hn.size - 1)
                    return hn[gap]

                return fn

    else:
        raise ValueError(f"harmonic path supports variants 1 and 2, not {variant!r}")
    return cs, va, vb, make


def eval_zeta_tilde_harmonic(s: ComplexArgs, i: int, j: int, variant, plan,
                             *, enforce_domain: bool = True,
                             max_cutoff: int | None = None) -> EvalReport:
    """Closed-form path: the extra variable is summed analytically into a
    harmonic-range factor; only the outer chain is truncated at N."""
    plan = _as_plan(plan)
    shape = s.shape
    if not (1 <= i <= shape.d and 1 <= j <= shape.r[i - 1]):
        raise ValueError(f"position ({i},{j}) out of range for shape {shape}")
    _require_w(s, enforce_domain)
    _check_budget(plan, True, max_cutoff)
    cs, va, vb, make = _tilde_harmonic_setup(s, i, j, variant)
    exps = _block_exponents(s)

    def evalfn(n: int) -> complex:
        hn = _harmonic_table(n)
        pieces = [(1.0, _Coupling(va, vb, make(hn)))]
        return _eval_system(cs, exps, pieces, n)

    return _make_report(evalfn, plan)


def eval_zeta_C_i(s: ComplexArgs, i: int, plan, *, enforce_domain: bool = True,
                  max_cutoff: int | None = None) -> EvalReport:
    """Truncated window series over S_i (extra variable with exponent 1)."""
    plan = _as_plan(plan)
    if not (1 <= i <= s.shape.d):
        raise ValueError(f"block {i} out of range for shape {s.shape}")
    _require_w(s, enforce_domain)
    _check_budget(plan, False, max_cutoff)
    cs = build_constraints_S_i(s.shape, i)
    exps = _block_exponents(s, extra=1)
    return _make_report(lambda n: _eval_system(cs, exps, [(1.0, None)], n), plan)


def eval_zeta_C(s: ComplexArgs, plan, *, enforce_domain: bool = True,
                max_cutoff: int | None = None) -> EvalReport:
    """Truncated series over the cyclic domain S (block variables only)."""
    plan = _as_plan(plan)
    _require_w(s, enforce_domain)
    _check_budget(plan, False, max_cutoff)
    cs = build_constraints_S(s.shape)
    exps = _block_exponents(s)
    return _make_report(lambda n: _eval_system(cs, exps, [(1.0, None)], n), plan)


def eval_theorem_residual(s: ComplexArgs, plan, *, enforce_domain: bool = True,
                          max_cutoff: int | None = None) -> TheoremReport:
    """Both sides of the main identity at matched box truncations.

    lhs sums the termwise differences over every position; rhs sums the
    window series over every block.
    """
    plan = _as_plan(plan)
    shape = s.shape
    _require_w(s, enforce_domain)
    _check_budget(plan, True, max_cutoff)
    tilde = []
    for i in range(1, shape.d + 1):
        for j in range(1, shape.r[i - 1] + 1):
            tilde.append(
                (build_constraints_S_ij(shape, i, j), _tilde_pieces(s, i, j, "diff"))
            )
    cees = [build_constraints_S_i(shape, i) for i in range(1, shape.d + 1)]
    exps_t = _block_exponents(s, extra=0)
    exps_c = _block_exponents(s, extra=1)

    def sides(n: int) -> tuple[complex, complex]:
        lhs = 0j
        for cs, pieces in tilde:
            lhs += _eval_system(cs, exps_t, pieces, n)
        rhs = 0j
        for cs in cees:
            rhs += _eval_system(cs, exps_c, [(1.0, None)], n)
        return lhs, rhs

    lhs, rhs = sides(plan.cutoff)
    refs = None
    if plan.refinements is not None:
        refs = []
        for n in plan.refinements:
            if n == plan.cutoff:
                ln, rn = lhs, rhs
            else:
                ln, rn = sides(n)
            refs.append((n, ln, rn, abs(ln - rn)))
    return TheoremReport(
        lhs=lhs, rhs=rhs, residual=abs(lhs - rhs), cutoff=plan.cutoff, refinements=refs
    )


# ---------------------------------------------------------------------------
# Plain nested series, double series, and the product identity
# ---------------------------------------------------------------------------


def eval_mzf(s: Sequence[complex], plan, *, enforce_domain: bool = True,
             max_cutoff: int | None = None) -> EvalReport:
    """Truncated nested series on a strict chain, via prefix-sum recursion."""
    vals = [complex(v) for v in s]
    if not vals:
        raise ValueError("empty argument list")
    plan = _as_plan(plan)
    if not in_domain_EZ_absolute(vals):
        bad = next(q for q in ez_inequalities(vals) if not q.ok)
        msg = f"arguments outside the absolute-convergence domain: {bad.describe()}"
        if enforce_domain:
            raise DomainError(msg)
        warnings.warn(msg, stacklevel=2)
    _check_budget(plan, False, max_cutoff)
    return _make_report(lambda n: _chain_plain(vals, n), plan)


def mzv_partial_sum(parts: Sequence[int], n_max: int) -> float:
    """Box-truncated value of an admissible integer symbol."""
    return _mzv_partial_cached(tuple(int(p) for p in parts), int(n_max))


@lru_cache(maxsize=4096)
def _mzv_partial_cached(parts: tuple[int, ...], n_max: int) -> float:
    return complex(_chain_plain([complex(p) for p in parts], n_max)).real


def combo_partial_sum(combo, n_max: int) -> float:
    """Box-truncated value of an integer-coefficient symbol combination."""
    total = 0.0
    for comp, coeff in combo.items():
        total += coeff * mzv_partial_sum(comp.parts, n_max)
    return total


def eval_mordell_tornheim(s1: complex, s2: complex, s3: complex, plan,
                          *, max_cutoff: int | None = None) -> EvalReport:
    """Truncated double series sum_{m,n<=N} m^{-s1} n^{-s2} (m+n)^{-s3}."""
    plan = _as_plan(plan)
    s1, s2, s3 = complex(s1), complex(s2), complex(s3)
    if not (
        (s1 + s3).real > 1 and (s2 + s3).real > 1 and (s1 + s2 + s3).real > 2
    ):
        warnings.warn(
            "double series may not converge absolutely for these exponents",
            stacklevel=2,
        )
    _check_budget(plan, True, max_cutoff)

    def evalfn(n: int) -> complex:
        pn = _pow_vec(n, s2)
        vals = np.arange(1, n + 1, dtype=np.float64)
        total = 0j
        for m0 in range(0, n, _CHUNK):
            m1 = min(m0 + _CHUNK, n)
            pm = _pow_vec(n, s1)[m0:m1]
            mn = vals[m0:m1, None] + vals[None, :]
            block = pm[:, None] * (pn[None, :] * _cpow(mn, -s3))
            total += complex(block.sum())
        return total

    return _make_report(evalfn, plan)


def harmonic_relation_check(s1: complex, s2: complex, n_max: int) -> float:
    """Defect of the product identity for two single series at one matched
    box truncation (the four pieces tile the box exactly, so this measures
    floating rounding at any N)."""
    s1, s2 = complex(s1), complex(s2)
    z1 = _chain_plain([s1], n_max)
    z2 = _chain_plain([s2], n_max)
    z12 = _chain_plain([s1, s2], n_max)
    z21 = _chain_plain([s2, s1], n_max)
    zd = _chain_plain([s1 + s2], n_max)
    return abs(z1 * z2 - z12 - z21 - zd)
