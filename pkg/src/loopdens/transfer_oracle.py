"""Independent exact oracle: a link-pattern transfer matrix for the dense
loop model on a cylinder, plus a numeric six-vertex cross-check.

States are planar matchings of the L strand positions cut by a horizontal
line, augmented with one seam-crossing parity bit per chord (seam between
positions L-1 and 0).  A loop is non-contractible exactly when it closes with
odd total seam parity.

One lattice row (L sites, each carrying one of the two unit-weight tiles)
acts on these states as follows: reading the tile string around the row, each
descent joins two adjacent strands from below (a cap), each ascent emits a
fresh chord upward (a cup), and every remaining strand shifts one position
sideways.  Caps, cups and shifts through the wrap bond toggle seam parity.
Summing the 2^L tile strings with loop fugacities w (contractible) and v
(non-contractible) gives the row transfer operator; its Perron eigenvalue at
w = v = 1 is 2^L and the densities are first-order eigenvalue perturbations,
evaluated in exact rational arithmetic.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .closed_form import (
    DensityRecord,
    METHOD_TRANSFER_ORACLE,
    make_record,
    nu_nc_exact,
)

CONTRACTIBLE = "contractible"
NON_CONTRACTIBLE = "non_contractible"


class DegeneratePerronError(ArithmeticError):
    """The eigenvalue 2^L did not come with one-dimensional eigenspaces."""


@dataclass(frozen=True)
class LinkState:
    """Planar matching of L boundary points with per-chord seam parities.

    match[i] is the partner of point i (fixed-point-free involution), and
    parity[i] = parity[match[i]] counts the chord's seam crossings mod 2.
    """

    match: tuple
    parity: tuple

    def __post_init__(self):
        L = len(self.match)
        for i, j in enumerate(self.match):
            if not (0 <= j < L) or j == i or self.match[j] != i:
                raise ValueError(f"match {self.match} is not a fixed-point-free involution")
            if self.parity[i] != self.parity[j]:
                raise ValueError("chord parities must agree at both endpoints")

    @property
    def size(self) -> int:
        return len(self.match)

    @classmethod
    def nested(cls, L: int) -> "LinkState":
        """Fully nested pattern: i paired with L-1-i, no seam crossings."""
        return cls(tuple(L - 1 - i for i in range(L)), (0,) * L)

    def total_parity(self) -> int:
        """XOR of chord parities (each chord counted once)."""
        t = 0
        for i, j in enumerate(self.match):
            if i < j:
                t ^= self.parity[i]
        return t


def _close_or_rewire(match, par, i, j, cap_parity):
    """Join points i, j of the current (bottom) boundary by a cap.

    Returns the closed-loop kind or None.  Positions i, j are consumed
    (marked -1); a rewire joins the former partners with composed parity.
    """
    if match[i] == j:
        kind = NON_CONTRACTIBLE if (par[i] ^ cap_parity) else CONTRACTIBLE
        match[i] = match[j] = -1
        return kind
    a, b = match[i], match[j]
    new_par = par[i] ^ par[j] ^ cap_parity
    match[a], match[b] = b, a
    par[a] = par[b] = new_par
    match[i] = match[j] = -1
    return None


def apply_generator(state: LinkState, i: int):
    """Temperley-Lieb generator at position i (joins i and (i+1) mod L).

    The wrap generator (i = L-1) straddles the seam, so both the cap it closes
    with and the fresh cup it emits cross the seam once.  Returns
    (new state, closed-loop kind or None).
    """
    L = state.size
    if not (0 <= i < L):
        raise ValueError(f"generator index {i} out of range for L = {L}")
    j = (i + 1) % L
    wrap = 1 if i == L - 1 else 0
    match = list(state.match)
    par = list(state.parity)
    closed = _close_or_rewire(match, par, i, j, wrap)
    match[i], match[j] = j, i
    par[i] = par[j] = wrap
    return LinkState(tuple(match), tuple(par)), closed


def enumerate_states(L: int) -> list[LinkState]:
    """Reachability closure of the nested pattern under all generators."""
    if L % 2 or not (2 <= L <= 12):
        raise ValueError(f"L must be even with 2 <= L <= 12, got {L}")
    start = LinkState.nested(L)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for s in frontier:
            for i in range(L):
                t, _ = apply_generator(s, i)
                if t not in seen:
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt
    return sorted(seen, key=lambda s: (s.match, s.parity))


def _row_diagrams(L: int):
    """All 2^L single-row tile diagrams as (caps, shifts, cups).

    Tile 0 routes a strand up-right, tile 1 up-left.  For the tile string t,
    the bond between sites i and i+1 carries a cap when (t_i, t_{i+1}) = (0, 1)
    and a cup when (1, 0); bond L-1 is the wrap bond (seam parity 1).
    """
    diagrams = []
    for mask in range(2 ** L):
        t = [(mask >> i) & 1 for i in range(L)]
        caps, cups = [], []
        capped = [False] * L
        for i in range(L):
            j = (i + 1) % L
            wrap = 1 if i == L - 1 else 0
            if t[i] == 0 and t[j] == 1:
                caps.append((i, j, wrap))
                capped[i] = capped[j] = True
            elif t[i] == 1 and t[j] == 0:
                cups.append((i, j, wrap))
        shifts = {}
        for p in range(L):
            if capped[p]:
                continue
            if t[p] == 0:
                shifts[p] = ((p + 1) % L, 1 if p == L - 1 else 0)
            else:
                shifts[p] = ((p - 1) % L, 1 if p == 0 else 0)
        diagrams.append((caps, shifts, cups))
    return diagrams


def _apply_diagram(state: LinkState, caps, shifts, cups):
    """Apply one row diagram; returns (new state, #contractible, #non-contractible)."""
    L = state.size
    match = list(state.match)
    par = list(state.parity)
    n_c = n_nc = 0
    for i, j, cap_parity in caps:
        kind = _close_or_rewire(match, par, i, j, cap_parity)
        if kind == CONTRACTIBLE:
            n_c += 1
        elif kind == NON_CONTRACTIBLE:
            n_nc += 1
    out_match = [-1] * L
    out_par = [0] * L
    for p in range(L):
        q = match[p]
        if q == -1 or q < p:
            continue
        np_, t1 = shifts[p]
        nq, t2 = shifts[q]
        out_match[np_], out_match[nq] = nq, np_
        out_par[np_] = out_par[nq] = par[p] ^ t1 ^ t2
    for i, j, cup_parity in cups:
        out_match[i], out_match[j] = j, i
        out_par[i] = out_par[j] = cup_parity
    return LinkState(tuple(out_match), tuple(out_par)), n_c, n_nc


@dataclass(frozen=True)
class TransferMatrix:
    """Row transfer operator with loop-closure bookkeeping.

    fugacity[out][in] maps (#contractible, #non-contractible) closed during
    the transition to its count; counts[out][in], d_w[out][in], d_v[out][in]
    are the value and the two fugacity derivatives at w = v = 1.
    """

    L: int
    states: tuple
    fugacity: tuple
    counts: tuple
    d_w: tuple
    d_v: tuple


@lru_cache(maxsize=None)
def row_transfer_matrix(L: int) -> TransferMatrix:
    """Build the exact row transfer operator on the link-pattern basis."""
    if L % 2 or not (2 <= L <= 8):
        raise ValueError(f"L must be even with 2 <= L <= 8, got {L}")
    states = enumerate_states(L)
    index = {s: k for k, s in enumerate(states)}
    n = len(states)
    fug = [[{} for _ in range(n)] for _ in range(n)]
    m0 = [[0] * n for _ in range(n)]
    mw = [[0] * n for _ in range(n)]
    mv = [[0] * n for _ in range(n)]
    diagrams = _row_diagrams(L)
    for col, s in enumerate(states):
        for caps, shifts, cups in diagrams:
            out, n_c, n_nc = _apply_diagram(s, caps, shifts, cups)
            row = index[out]
            key = (n_c, n_nc)
            fug[row][col][key] = fug[row][col].get(key, 0) + 1
            m0[row][col] += 1
            mw[row][col] += n_c
            mv[row][col] += n_nc
    freeze = lambda mat: tuple(tuple(r) for r in mat)
    return TransferMatrix(
        L=L,
        states=tuple(states),
        fugacity=tuple(tuple(dict(c) for c in r) for r in fug),
        counts=freeze(m0),
        d_w=freeze(mw),
        d_v=freeze(mv),
    )


def _kernel(mat):
    """Kernel basis of an exact rational square matrix (Gauss elimination)."""
    n = len(mat)
    a = [[Fraction(x) for x in row] for row in mat]
    piv_cols = []
    r = 0
    for c in range(n):
        pr = next((rr for rr in range(r, n) if a[rr][c] != 0), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        pv = a[r][c]
        a[r] = [x / pv for x in a[r]]
        for rr in range(n):
            if rr != r and a[rr][c] != 0:
                f = a[rr][c]
                a[rr] = [x - f * y for x, y in zip(a[rr], a[r])]
        piv_cols.append(c)
        r += 1
        if r == n:
            break
    free_cols = [c for c in range(n) if c not in piv_cols]
    vecs = []
    for fc in free_cols:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for i, pc in enumerate(piv_cols):
            v[pc] = -a[i][fc]
        vecs.append(v)
    return vecs


def perron_eigenvectors(tm: TransferMatrix):
    """Exact left and right eigenvectors for the eigenvalue 2^L.

    Raises DegeneratePerronError unless both eigenspaces are one-dimensional.
    """
    lam = Fraction(2 ** tm.L)
    n = len(tm.states)
    shifted = [[Fraction(tm.counts[i][j]) - (lam if i == j else 0) for j in range(n)] for i in range(n)]
    right = _kernel(shifted)
    left = _kernel([list(row) for row in zip(*shifted)])
    if len(right) != 1 or len(left) != 1:
        raise DegeneratePerronError(
            f"L={tm.L}: eigenvalue {lam} has right/left multiplicity "
            f"{len(right)}/{len(left)}"
        )
    return left[0], right[0]


def oracle_densities(L: int) -> DensityRecord:
    """Exact loop densities from first-order Perron-eigenvalue perturbation.

    nu_c = (1/L) (l . dD/dw . r) / (Lambda l . r) at w = v = 1, and the same
    with dD/dv for nu_nc, everything over exact rationals.
    """
    tm = row_transfer_matrix(L)
    left, right = perron_eigenvectors(tm)
    lam = Fraction(2 ** L)
    n = len(tm.states)
    overlap = sum(left[i] * right[i] for i in range(n))
    if overlap == 0:
        raise DegeneratePerronError(f"L={L}: left/right eigenvector overlap vanished")

    def bilinear(mat):
        return sum(left[i] * mat[i][j] * right[j] for i in range(n) for j in range(n))

    nu_c = bilinear(tm.d_w) / (lam * overlap * L)
    nu_nc = bilinear(tm.d_v) / (lam * overlap * L)
    return make_record(L // 2, nu_c, nu_nc, METHOD_TRANSFER_ORACLE)


def matrix_json(L: int) -> dict:
    """JSON-ready dump of the transfer operator for inspection."""
    tm = row_transfer_matrix(L)
    entries = []
    for i in range(len(tm.states)):
        for j in range(len(tm.states)):
            if not tm.fugacity[i][j]:
                continue
            entries.append(
                {
                    "from": j,
                    "to": i,
                    "weights": [
                        {"contractible": k[0], "non_contractible": k[1], "count": c}
                        for k, c in sorted(tm.fugacity[i][j].items())
                    ],
                }
            )
    return {
        "L": L,
        "states": [
            {"match": list(s.match), "parity": list(s.parity)} for s in tm.states
        ],
        "perron_eigenvalue": 2 ** L,
        "entries": entries,
    }


# -- six-vertex numeric cross-check -------------------------------------------


@dataclass(frozen=True)
class SixVertexWeights:
    """Twisted six-vertex vertex weights on a circumference-L cylinder."""

    a1: complex
    a2: complex
    b1: complex
    b2: complex
    c1: complex
    c2: complex
    z: complex
    phi: float
    q: complex

    @classmethod
    def at(cls, L: int, phi: float, z: complex = 1.0) -> "SixVertexWeights":
        q = cmath.exp(1j * math.pi / 3)
        tw = cmath.exp(1j * phi / L)
        sq = cmath.exp(1j * math.pi / 6)  # q^(1/2)
        return cls(
            a1=z * tw,
            a2=z / tw,
            b1=1 / tw,
            b2=tw,
            c1=z * sq + 1 / sq,
            c2=sq + z / sq,
            z=z,
            phi=phi,
            q=q,
        )


def _vertex_tensor(w: SixVertexWeights) -> np.ndarray:
    """W[v_in, h_in, v_out, h_out]; bits: up/right arrows = 1."""
    W = np.zeros((2, 2, 2, 2), dtype=complex)
    W[1, 1, 1, 1] = w.a1
    W[0, 0, 0, 0] = w.a2
    W[1, 0, 1, 0] = w.b1
    W[0, 1, 0, 1] = w.b2
    W[1, 1, 0, 0] = w.c1
    W[0, 0, 1, 1] = w.c2
    return W


def sixvertex_transfer(L: int, phi: float, z: complex = 1.0) -> np.ndarray:
    """Dense 2^L x 2^L row transfer matrix (trace over the horizontal line)."""
    W = _vertex_tensor(SixVertexWeights.at(L, phi, z))
    dim = 2 ** L
    T = np.zeros((dim, dim), dtype=complex)
    # per (v_in, v_out), the 2x2 horizontal transfer block
    blocks = [[W[a, :, b, :] for b in range(2)] for a in range(2)]
    for alpha in range(dim):
        abits = [(alpha >> i) & 1 for i in range(L)]
        for beta in range(dim):
            bbits = [(beta >> i) & 1 for i in range(L)]
            prod = np.eye(2, dtype=complex)
            for i in range(L):
                prod = prod @ blocks[abits[i]][bbits[i]]
            T[beta, alpha] = prod[0, 0] + prod[1, 1]
    return T


def _lambda_max(L: int, phi: float) -> float:
    eig = np.linalg.eigvals(sixvertex_transfer(L, phi))
    return float(np.max(np.abs(eig)))


@dataclass(frozen=True)
class SixVertexReport:
    L: int
    delta_phi: float
    lambda_max: float
    lambda_rel_error: float
    phi_symmetry_error: float
    nu_nc_fd: float
    nu_nc_exact: float
    nu_nc_error: float

    @property
    def ok(self) -> bool:
        return self.lambda_rel_error < 1e-9 and self.phi_symmetry_error < 1e-9


def sixvertex_check(L: int, delta_phi: float = 1e-4) -> SixVertexReport:
    """Check Lambda_max = 2^L at the stochastic point and recover nu_nc from
    a central finite difference of ln Lambda_max in the twist angle:
    nu_nc = -(1/(2 sqrt(3) N)) d ln Lambda / d phi at phi = pi/3.
    """
    if L % 2 or not (2 <= L <= 8):
        raise ValueError(f"L must be even with 2 <= L <= 8, got {L}")
    if not (1e-6 <= delta_phi <= 1e-3):
        raise ValueError(f"delta_phi must lie in [1e-6, 1e-3], got {delta_phi}")
    phi0 = math.pi / 3
    lam0 = _lambda_max(L, phi0)
    lam_sym = _lambda_max(L, -phi0)
    dln = (math.log(_lambda_max(L, phi0 + delta_phi)) - math.log(_lambda_max(L, phi0 - delta_phi))) / (
        2 * delta_phi
    )
    N = L // 2
    nu_fd = -dln / (2 * math.sqrt(3.0) * N)
    nu_exact = float(nu_nc_exact(N))
    return SixVertexReport(
        L=L,
        delta_phi=delta_phi,
        lambda_max=lam0,
        lambda_rel_error=abs(lam0 - 2 ** L) / 2 ** L,
        phi_symmetry_error=abs(lam0 - lam_sym) / 2 ** L,
        nu_nc_fd=nu_fd,
        nu_nc_exact=nu_exact,
        nu_nc_error=abs(nu_fd - nu_exact),
    )
