"""A small dense linear-programming engine.

:func:`solve` handles standard-form problems ``min c·x  s.t.  A x = b, x >= 0``
with a two-phase tableau simplex.  Degenerate pivots follow Bland's rule,
so it cannot cycle.  Redundant equality rows are dropped by Gaussian elimination
before phase 1.

:func:`min_tv_fit` builds the program behind every simulator search: find a
stochastic (or otherwise linearly constrained) matrix ``S`` minimising the
channel total-variation distance between ``M(S)`` and a target kernel.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .finstoch import STOCHASTIC, Morphism, ShapeError, WireList, as_wirelist

OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"

PIVOT_TOL = 1e-10
REL_PIVOT = 1e-9
FEAS_TOL = 1e-9
PERTURB = 1e-7


@dataclass(frozen=True, eq=False)
class LpProblem:
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    names: tuple[str, ...] = ()

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).reshape(-1)
        A = np.asarray(self.A, dtype=float)
        if A.ndim == 1 and A.size == 0:
            A = A.reshape(0, c.size)
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if A.ndim != 2 or A.shape[1] != c.size or A.shape[0] != b.size:
            raise ShapeError(f"LP dimensions disagree: c {c.shape}, A {A.shape}, b {b.shape}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
            raise ValueError("LP data must be finite")
        if self.names and len(self.names) != c.size:
            raise ShapeError("one name per variable")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def n_vars(self) -> int:
        return self.c.size


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: str
    x: np.ndarray | None
    objective_value: float
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _independent_rows(A: np.ndarray, b: np.ndarray, tol: float = PIVOT_TOL):
    """Indices of a maximal independent row set; ``None`` if the system is inconsistent."""
    m, n = A.shape
    if m == 0:
        return []
    M = np.hstack([A, b[:, None]]).astype(float)
    scale = max(1.0, float(np.abs(M).max()))
    order = np.arange(m)
    r = 0
    for col in range(n):
        if r == m:
            break
        piv = r + int(np.argmax(np.abs(M[r:, col])))
        if abs(M[piv, col]) <= tol * scale:
            continue
        if piv != r:
            M[[r, piv]] = M[[piv, r]]
            order[[r, piv]] = order[[piv, r]]
        below = M[r + 1:, col] / M[r, col]
        M[r + 1:] -= np.outer(below, M[r])
        r += 1
    if r < m and np.any(np.abs(M[r:, n]) > 1e-8 * scale):
        return None
    return sorted(order[:r].tolist())


class _Tableau:
    """Rows ``B^{-1} [A | b]`` for the current basis ``B``.

    ``A0`` keeps the original rows.  The tableau is rebuilt from them every
    ``REFACTOR`` pivots and whenever optimality is about to be declared, so
    round-off cannot accumulate.
    """

    REFACTOR = 100

    def __init__(self, A, b, basis):
        self.A0 = np.hstack([A, b[:, None]])
        self.b0 = b.copy()
        self.T = self.A0.copy()
        self.basis = list(basis)
        self.iterations = 0

    def restrict(self, rows, ncols):
        """Keep the given rows and the first ``ncols`` variable columns."""
        self.A0 = np.hstack([self.A0[rows, :ncols], self.A0[rows, -1:]])
        self.b0 = self.b0[rows]
        self.T = np.hstack([self.T[rows, :ncols], self.T[rows, -1:]])
        self.basis = [self.basis[i] for i in rows]

    def refactor(self):
        B = self.A0[:, self.basis]
        try:
            if B.shape[0] == B.shape[1]:
                T = np.linalg.solve(B, self.A0)
            else:
                T = np.linalg.lstsq(B, self.A0, rcond=None)[0]
        except np.linalg.LinAlgError:
            return
        if np.all(np.isfinite(T)):
            rhs = T[:, -1]
            rhs[np.abs(rhs) < 1e-12] = 0.0
            self.T = T

    def perturb(self, rng: np.random.Generator, scale: float = PERTURB):
        """Lift every basic value by a small random amount.

        This moves the right-hand side to ``b + B δ`` with ``δ > 0``, so the
        current basis stays feasible while ties in the ratio test (the
        source of degenerate pivots) disappear.
        """
        m = len(self.basis)
        if not m:
            return
        delta = scale * rng.uniform(1.0, 2.0, m)
        self.A0[:, -1] = self.A0[:, -1] + self.A0[:, self.basis] @ delta
        self.refactor()

    def unperturb(self):
        self.A0[:, -1] = self.b0
        self.refactor()

    def pivot(self, row: int, col: int) -> np.ndarray:
        """Pivot on ``(row, col)`` and return the normalized pivot row."""
        T = self.T
        T[row] /= T[row, col]
        prow = T[row]
        colv = T[:, col].copy()
        colv[row] = 0.0
        nz = np.nonzero(colv)[0]
        if 4 * nz.size > T.shape[0]:
            np.subtract(T, colv[:, None] * prow, out=T)
        elif nz.size:
            T[nz] -= colv[nz, None] * prow
        self.basis[row] = col
        self.iterations += 1
        return prow

    def _reduced(self, cost):
        return cost - cost[self.basis] @ self.T[:, :-1]

    def _after_pivot(self, red, cost, col, prow):
        if self.iterations % self.REFACTOR == 0:
            self.refactor()
            return self._reduced(cost)
        return red - red[col] * prow[:-1]

    def run(self, cost: np.ndarray, allowed: np.ndarray, max_iter: int) -> str:
        """Primal simplex: minimise ``cost·x`` over columns where ``allowed``.

        The entering column is the most negative reduced cost, except right
        after a degenerate pivot, where Bland's rule (lowest index) picks
        both the entering and the leaving variable.  Any cycle consists of
        degenerate pivots only, so it would run entirely under Bland's
        rule, which cannot cycle.
        """
        m = self.T.shape[0]
        B = self.basis
        fresh = False
        bland = False
        red = self._reduced(cost)
        for _ in range(max_iter):
            cand = np.nonzero((red < -FEAS_TOL) & allowed)[0]
            if cand.size == 0:
                if fresh:
                    return OPTIMAL
                self.refactor()
                red = self._reduced(cost)
                fresh = True
                continue
            fresh = False
            if bland:
                col = int(cand[0])
            else:
                sub = self.T[:, cand]
                norms = 1.0 + np.einsum("ij,ij->j", sub, sub)
                col = int(cand[np.argmin(red[cand] / np.sqrt(norms))])
            colv = self.T[:, col]
            pos = colv > max(PIVOT_TOL, REL_PIVOT * np.abs(colv).max(initial=0.0))
            if not np.any(pos):
                return UNBOUNDED
            rhs = np.clip(self.T[:, -1], 0.0, None)
            ratios = np.full(m, np.inf)
            ratios[pos] = rhs[pos] / colv[pos]
            best = ratios.min()
            ties = np.nonzero(ratios <= best + 1e-12 * max(1.0, abs(best)))[0]
            if bland:
                row = int(min(ties, key=lambda i: B[i]))
            else:
                row = int(ties[np.argmax(colv[ties])])
            bland = best <= 1e-12
            prow = self.pivot(row, col)
            red = self._after_pivot(red, cost, col, prow)
        raise RuntimeError("simplex iteration limit reached")

    def dual(self, cost: np.ndarray, allowed: np.ndarray, max_iter: int) -> str:
        """Dual simplex from a dual-feasible basis until the basic values are nonnegative.

        Returns ``INFEASIBLE`` when a negative row has no usable entry.
        """
        red = self._reduced(cost)
        for _ in range(max_iter):
            rhs = self.T[:, -1]
            row = int(np.argmin(rhs)) if rhs.size else 0
            if not rhs.size or rhs[row] >= -FEAS_TOL:
                return OPTIMAL
            r = self.T[row, :-1]
            cand = np.nonzero((r < -max(PIVOT_TOL, REL_PIVOT * np.abs(r).max())) & allowed)[0]
            if cand.size == 0:
                return INFEASIBLE
            ratios = np.clip(red[cand], 0.0, None) / -r[cand]
            best = ratios.min()
            ties = cand[ratios <= best + 1e-12 * max(1.0, best)]
            col = int(ties[np.argmax(-r[ties])])
            prow = self.pivot(row, col)
            red = self._after_pivot(red, cost, col, prow)
        raise RuntimeError("dual simplex iteration limit reached")

    def optimize(self, cost: np.ndarray, allowed: np.ndarray, max_iter: int, rng) -> str:
        """Solve on a perturbed right-hand side, then restore it and clean up."""
        self.perturb(rng)
        status = self.run(cost, allowed, max_iter)
        if status == UNBOUNDED:
            self.unperturb()
            return status
        self.unperturb()
        if self.dual(cost, allowed, max_iter) == INFEASIBLE:
            return INFEASIBLE
        return self.run(cost, allowed, max_iter)


def solve(p: LpProblem, max_iter: int = 200000) -> LpSolution:
    A, b, c = p.A.copy(), p.b.copy(), p.c
    m, n = A.shape
    rows = _independent_rows(A, b)
    if rows is None:
        return LpSolution(INFEASIBLE, None, float("nan"))
    A, b = A[rows], b[rows]
    m = A.shape[0]
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1
    rng = np.random.default_rng(0)

    # phase 1: rows that already own a positive unit column start with it
    # in the basis; every other row gets an artificial variable
    crash = _unit_columns(A)
    bare = [i for i in range(m) if i not in crash]
    art = np.zeros((m, len(bare)))
    art[bare, np.arange(len(bare))] = 1.0
    basis = [crash.get(i, -1) for i in range(m)]
    for k, i in enumerate(bare):
        basis[i] = n + k
    tab = _Tableau(np.hstack([A, art]), b, basis)
    tab.refactor()
    cost1 = np.concatenate([np.zeros(n), np.ones(len(bare))])
    if bare:
        status = tab.optimize(cost1, np.ones(n + len(bare), dtype=bool), max_iter, rng)
        infeas = tab.T[:, -1] @ cost1[tab.basis]
        if status != OPTIMAL or infeas > FEAS_TOL * max(1.0, float(np.abs(b).max(initial=0.0))):
            return LpSolution(INFEASIBLE, None, float("nan"), tab.iterations)

    # drive remaining artificials out of the basis
    keep = []
    for i in range(m):
        if tab.basis[i] >= n:
            cols = np.nonzero(np.abs(tab.T[i, :n]) > PIVOT_TOL)[0]
            if cols.size:
                tab.pivot(i, int(cols[np.argmax(np.abs(tab.T[i, cols]))]))
                keep.append(i)
        else:
            keep.append(i)
    tab.restrict(keep, n)
    tab.refactor()

    status = tab.optimize(c, np.ones(n, dtype=bool), max_iter, rng)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, None, float("-inf"), tab.iterations)
    if status == INFEASIBLE:
        return LpSolution(INFEASIBLE, None, float("nan"), tab.iterations)
    x = np.zeros(n)
    x[tab.basis] = tab.T[:, -1]
    x = _refine(A[keep], b[keep], tab.basis, x)
    x[np.abs(x) < 1e-13] = 0.0
    return LpSolution(OPTIMAL, x, float(c @ x), tab.iterations)


def _unit_columns(A: np.ndarray) -> dict[int, int]:
    """Map row -> a column whose only nonzero entry is positive and in that row."""
    nz = A != 0
    single = np.nonzero(nz.sum(axis=0) == 1)[0]
    out: dict[int, int] = {}
    for j in single:
        i = int(np.argmax(nz[:, j]))
        if A[i, j] > 0 and i not in out:
            out[i] = int(j)
    return out


def _refine(A: np.ndarray, b: np.ndarray, basis: list[int], x: np.ndarray) -> np.ndarray:
    """Recompute the basic variables from the original rows.

    Long pivot sequences let round-off build up in the tableau; solving
    ``A_B x_B = b`` once at the end removes it.  The tableau values are kept
    if the refined point is not (numerically) feasible.
    """
    if not basis:
        return x
    xb, *_ = np.linalg.lstsq(A[:, basis], b, rcond=None)
    if np.any(xb < -1e-9):
        return x
    y = np.zeros_like(x)
    y[basis] = np.clip(xb, 0.0, None)
    if np.abs(A @ y - b).max(initial=0.0) > np.abs(A @ x - b).max(initial=0.0):
        return x
    return y


def check_solution(p: LpProblem, s: LpSolution, tol: float = 1e-8) -> bool:
    """Re-substitute an optimal solution into its constraints."""
    if not s.optimal:
        return True
    return bool(np.all(np.abs(p.A @ s.x - p.b) <= tol) and np.all(s.x >= -1e-10))


# --------------------------------------------------------------------------
# total-variation fitting


@dataclass(frozen=True, eq=False)
class AffineMap:
    """``vec(view) = M @ vec(S) + offset``, both vectors row-major."""

    M: np.ndarray
    offset: np.ndarray | None = None


def _affine_from_callable(fn: Callable[[Morphism], Morphism], dom: WireList, cod: WireList):
    """Read off an affine map by evaluating on the zero and basis matrices."""
    nvar = cod.total_size * dom.total_size
    zero = fn(Morphism(dom, cod, np.zeros((cod.total_size, dom.total_size)), "nonneg"))
    base = zero.as_float().matrix.reshape(-1)
    cols = []
    for k in range(nvar):
        e = np.zeros(nvar)
        e[k] = 1.0
        v = fn(Morphism(dom, cod, e.reshape(cod.total_size, dom.total_size), "nonneg"))
        cols.append(v.as_float().matrix.reshape(-1) - base)
    return np.array(cols).T.reshape(base.size, nvar), base, zero


@dataclass(frozen=True, eq=False)
class TvFit:
    simulator: Morphism
    residual: float
    lp_value: float
    status: str
    view: np.ndarray


def column_stochastic_rows(n_out: int, n_in: int):
    A = np.zeros((n_in, n_out * n_in))
    for j in range(n_in):
        A[j, j::n_in] = 1.0
    return A, np.ones(n_in)


def min_tv_fit(map_builder, target: Morphism, sim_shape, *,
               constraints: tuple[np.ndarray, np.ndarray] | None = None,
               normalized: bool | None = None) -> tuple[Morphism, float]:
    """Best simulator and its channel TV residual; see :func:`fit_tv` for details."""
    fit = fit_tv(map_builder, target, sim_shape, constraints=constraints, normalized=normalized)
    return fit.simulator, fit.residual


def fit_tv(map_builder, target: Morphism, sim_shape, *,
           constraints: tuple[np.ndarray, np.ndarray] | None = None,
           normalized: bool | None = None) -> TvFit:
    """Minimise ``max_col ½‖M(S) - target‖₁`` over matrices ``S``.

    ``map_builder`` is an :class:`AffineMap`, a plain coefficient matrix, or
    a callable taking the simulator Morphism.  ``constraints`` replaces the
    default column-stochastic equalities on ``S`` (it must imply them when
    the result is meant to be stochastic).  With ``normalized`` every
    feasible ``M(S)`` has unit column sums, which allows a smaller program
    that only bounds the positive part of ``target - M(S)``.
    """
    dom, cod = as_wirelist(sim_shape[0]), as_wirelist(sim_shape[1])
    n_out, n_in = cod.total_size, dom.total_size
    nvar = n_out * n_in
    T = target.as_float().matrix
    rows_v, cols_v = T.shape

    if callable(map_builder) and not isinstance(map_builder, (np.ndarray, AffineMap)):
        M, off, _ = _affine_from_callable(map_builder, dom, cod)
    elif isinstance(map_builder, AffineMap):
        M = np.asarray(map_builder.M, dtype=float)
        off = np.zeros(M.shape[0]) if map_builder.offset is None else np.asarray(map_builder.offset, float)
    else:
        M = np.asarray(map_builder, dtype=float)
        off = np.zeros(M.shape[0])
    if M.shape != (rows_v * cols_v, nvar):
        raise ShapeError(f"affine map has shape {M.shape}, expected {(rows_v * cols_v, nvar)}")

    if constraints is None:
        Ac, bc = column_stochastic_rows(n_out, n_in)
    else:
        Ac, bc = np.asarray(constraints[0], float), np.asarray(constraints[1], float)
        if Ac.shape[1] != nvar:
            raise ShapeError("constraint matrix has the wrong number of columns")
    if normalized is None:
        normalized = constraints is None and _preserves_normalization(M, off, rows_v, cols_v, n_out, n_in)

    t_vec = T.reshape(-1)
    d_vec = t_vec - off  # target minus constant part
    entry_col = np.tile(np.arange(cols_v), rows_v)
    nz_M = np.any(np.abs(M) > 0, axis=1)

    if normalized:
        keep = np.nonzero(t_vec > 0)[0]
        const_col = np.zeros(cols_v)
    else:
        keep = np.nonzero(nz_M)[0]
        const_col = np.zeros(cols_v)
        for e in np.nonzero(~nz_M)[0]:
            const_col[entry_col[e]] += abs(d_vec[e])
    nu = keep.size
    n_slack_abs = nu if normalized else 2 * nu
    # variable layout: S (nvar) | u (nu) | t | abs slacks | column slacks
    n_total = nvar + nu + 1 + n_slack_abs + cols_v
    iu, it, isl, icol = nvar, nvar + nu, nvar + nu + 1, nvar + nu + 1 + n_slack_abs
    rows, rhs = [], []

    def new_row():
        return np.zeros(n_total)

    for k, e in enumerate(keep):
        # u_e >= d_e - (M x)_e
        r = new_row()
        r[:nvar] = M[e]
        r[iu + k] = 1.0
        r[isl + k] = -1.0
        rows.append(r)
        rhs.append(d_vec[e])
        if not normalized:
            # u_e >= (M x)_e - d_e
            r = new_row()
            r[:nvar] = -M[e]
            r[iu + k] = 1.0
            r[isl + nu + k] = -1.0
            rows.append(r)
            rhs.append(-d_vec[e])
    half = 1.0 if normalized else 0.5
    for j in range(cols_v):
        r = new_row()
        for k, e in enumerate(keep):
            if entry_col[e] == j:
                r[iu + k] = half
        r[it] = -1.0
        r[icol + j] = 1.0
        rows.append(r)
        rhs.append(-half * const_col[j])
    for r0, b0 in zip(Ac, bc):
        r = new_row()
        r[:nvar] = r0
        rows.append(r)
        rhs.append(b0)
    c = np.zeros(n_total)
    c[it] = 1.0
    sol = solve(LpProblem(c, np.array(rows), np.array(rhs)))
    if not sol.optimal:
        raise ValueError(f"simulator program is {sol.status}")

    x = np.clip(sol.x[:nvar], 0.0, None)
    S = x.reshape(n_out, n_in)
    view = (M @ x + off).reshape(rows_v, cols_v)
    residual = 0.5 * float(np.abs(view - T).sum(axis=0).max()) if cols_v else 0.0
    flavor = STOCHASTIC if np.all(np.abs(S.sum(axis=0) - 1.0) <= 1e-9) else "nonneg"
    return TvFit(Morphism(dom, cod, S, flavor), residual, sol.objective_value, sol.status, view)


def _preserves_normalization(M, off, rows_v, cols_v, n_out, n_in) -> bool:
    """True when every column-stochastic S gives a column-stochastic view."""
    # column sums of the view are affine in S; they must equal 1 on all of the
    # stochastic polytope, i.e. on each of its vertices' affine hull.
    colsum = M.reshape(rows_v, cols_v, -1).sum(axis=0)  # (cols_v, nvar)
    offsum = off.reshape(rows_v, cols_v).sum(axis=0)
    base = np.zeros(n_out * n_in)
    for j in range(n_in):
        base[j] = 1.0  # row 0 of every column set to 1
    if np.any(np.abs(colsum @ base + offsum - 1.0) > 1e-9):
        return False
    # moving mass within a column (e_{i,j} - e_{0,j}) must not change any column sum
    for j in range(n_in):
        for i in range(1, n_out):
            d = np.zeros(n_out * n_in)
            d[i * n_in + j] = 1.0
            d[j] = -1.0
            if np.any(np.abs(colsum @ d) > 1e-9):
                return False
    return True


@dataclass(frozen=True, eq=False)
class Block:
    """One unknown matrix and the view it induces: ``vec(view) = M @ x + offset``.

    ``A x = b`` are the unknown's own equality constraints.
    """

    M: np.ndarray
    A: np.ndarray
    b: np.ndarray
    offset: np.ndarray | None = None


def min_max_pairwise_tv(blocks: Sequence[Block], pairs: Sequence[tuple[int, int]], shape: tuple[int, int],
                        columns: Sequence[int] | None = None):
    """Jointly choose every block's unknown to minimise the largest channel TV
    between the views of the listed pairs, over the selected view columns.

    Returns ``(value, [x_0, x_1, ...], status)``.
    """
    rows_v, cols_v = shape
    cols = list(range(cols_v)) if columns is None else list(columns)
    sizes = [blk.M.shape[1] for blk in blocks]
    starts = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    nx = int(starts[-1])
    entries = [r * cols_v + j for r in range(rows_v) for j in cols]
    n_pairs = len(pairs)
    nu = n_pairs * len(entries)
    n_total = nx + nu + 1 + 2 * nu + n_pairs * len(cols)
    iu, it, isl = nx, nx + nu, nx + nu + 1
    icol = isl + 2 * nu
    rows, rhs = [], []
    offs = [np.zeros(blk.M.shape[0]) if blk.offset is None else np.asarray(blk.offset, float) for blk in blocks]
    col_pos = {j: k for k, j in enumerate(cols)}
    for p, (x, y) in enumerate(pairs):
        for k, e in enumerate(entries):
            u = iu + p * len(entries) + k
            for sign, slack in ((1.0, isl + p * len(entries) + k), (-1.0, isl + nu + p * len(entries) + k)):
                # u >= sign * (E_x - E_y)
                r = np.zeros(n_total)
                r[starts[x]:starts[x + 1]] -= sign * blocks[x].M[e]
                r[starts[y]:starts[y + 1]] += sign * blocks[y].M[e]
                r[u] = 1.0
                r[slack] = -1.0
                rows.append(r)
                rhs.append(sign * (offs[x][e] - offs[y][e]))
        for j in cols:
            r = np.zeros(n_total)
            for k, e in enumerate(entries):
                if e % cols_v == j:
                    r[iu + p * len(entries) + k] = 0.5
            r[it] = -1.0
            r[icol + p * len(cols) + col_pos[j]] = 1.0
            rows.append(r)
            rhs.append(0.0)
    for i, blk in enumerate(blocks):
        for r0, b0 in zip(np.asarray(blk.A, float), np.asarray(blk.b, float)):
            r = np.zeros(n_total)
            r[starts[i]:starts[i + 1]] = r0
            rows.append(r)
            rhs.append(b0)
    c = np.zeros(n_total)
    c[it] = 1.0
    sol = solve(LpProblem(c, np.array(rows), np.array(rhs)))
    if not sol.optimal:
        return float("nan"), None, sol.status
    xs = [np.clip(sol.x[starts[i]:starts[i + 1]], 0.0, None) for i in range(len(blocks))]
    return sol.objective_value, xs, sol.status


def views_agree_feasible(blocks: Sequence[Block], pairs: Sequence[tuple[int, int]], shape: tuple[int, int],
                         columns: Sequence[int] | None = None) -> str:
    """Status of the exact system ``view_x == view_y`` for every pair (no slack)."""
    rows_v, cols_v = shape
    cols = list(range(cols_v)) if columns is None else list(columns)
    sizes = [blk.M.shape[1] for blk in blocks]
    starts = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    nx = int(starts[-1])
    offs = [np.zeros(blk.M.shape[0]) if blk.offset is None else np.asarray(blk.offset, float) for blk in blocks]
    rows, rhs = [], []
    for x, y in pairs:
        for rr in range(rows_v):
            for j in cols:
                e = rr * cols_v + j
                r = np.zeros(nx)
                r[starts[x]:starts[x + 1]] = blocks[x].M[e]
                r[starts[y]:starts[y + 1]] -= blocks[y].M[e]
                rows.append(r)
                rhs.append(offs[y][e] - offs[x][e])
    for i, blk in enumerate(blocks):
        for r0, b0 in zip(np.asarray(blk.A, float), np.asarray(blk.b, float)):
            r = np.zeros(nx)
            r[starts[i]:starts[i + 1]] = r0
            rows.append(r)
            rhs.append(b0)
    return solve(LpProblem(np.zeros(nx), np.array(rows), np.array(rhs))).status
