"""Deformation retracts onto homology and homotopy transfer.

`build_retract` splits each degree as A = H (+) B (+) C with B = im d and
Z = ker d = H (+) B, then sets the contracting homotopy to -(d|_C)^{-1} on B
and zero elsewhere.  That sign makes incl o proj - id = d h + h d hold on the
nose, and the splitting gives the side conditions h i = 0, p h = 0, h h = 0
for free.

`transfer_structure` pushes a multicomplex structure across a retract using
the sum-over-compositions formulas: the transferred operator of weight n is
the sum over all compositions (i_1, ..., i_k) of n of
p delta_{i_1} h delta_{i_2} h ... h delta_{i_k} i, and similarly for the
morphism components extending incl and proj.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexes import (
    InfinityMorphism,
    Multicomplex,
    invert_infinity,
    product,
    stack_maps,
)
from .errors import NotSquareZero, SpaceMismatch
from .exactla import Matrix, Subspace, complement, kernel_image, solve
from .graded import (
    GradedMap,
    GradedVectorSpace,
    compose,
    lincomb,
    max_component_index,
)


@dataclass
class DeformationRetract:
    big: GradedVectorSpace
    small: GradedVectorSpace
    proj: GradedMap      # big -> small, degree 0
    incl: GradedMap      # small -> big, degree 0
    homotopy: GradedMap  # big -> big, degree +1
    d_big: GradedMap
    d_small: GradedMap

    def identity_defects(self):
        """Exact defects of every retract identity; all zero iff valid."""
        ip = compose(self.incl, self.proj)
        ident = GradedMap.identity(self.big)
        dh = compose(self.d_big, self.homotopy)
        hd = compose(self.homotopy, self.d_big)
        return {
            "proj_chain": compose(self.d_small, self.proj).sub(compose(self.proj, self.d_big)),
            "incl_chain": compose(self.d_big, self.incl).sub(compose(self.incl, self.d_small)),
            "retract_identity": ip.sub(ident).sub(dh).sub(hd),
            "projection": compose(self.proj, self.incl).sub(GradedMap.identity(self.small)),
            "side_h_incl": compose(self.homotopy, self.incl),
            "side_proj_h": compose(self.proj, self.homotopy),
            "side_h_h": compose(self.homotopy, self.homotopy),
        }

    def is_valid(self) -> bool:
        return all(v.is_zero for v in self.identity_defects().values())


def _assemble_retract(space, d, parts):
    """Build (retract, kbasis) from a per-degree splitting.

    parts maps degree k to (h_basis, b_sub, c_basis): independent columns
    spanning a complement of im d in ker d, the image subspace, and a
    complement of ker d in A_k.
    """
    proj_blocks, incl_blocks, h_blocks = {}, {}, {}
    small_dims = {}
    kbasis = {}
    inverses = {}
    for k in space.degrees:
        h_b, b_sub, c_b = parts[k]
        small_dims[k] = h_b.cols
        frame = h_b.hstack(b_sub.basis).hstack(c_b)
        inv = solve(frame, Matrix.identity(space.dim(k)))
        if inv is None:
            raise NotSquareZero("splitting failed to span a degree, found no frame inverse")
        inverses[k] = inv
        if h_b.cols:
            incl_blocks[k] = h_b
            proj_blocks[k] = inv.select_rows(range(h_b.cols))
        kbasis[k] = b_sub.basis.hstack(c_b)
    for k in space.degrees:
        h_b, b_sub, c_b = parts[k]
        if not b_sub.dim:
            continue
        c_above = parts.get(k + 1)
        if c_above is None or not c_above[2].cols:
            raise NotSquareZero("image in degree %d has no preimage complement" % k)
        dm = d.block(k + 1).mul(c_above[2])
        coords = solve(dm, b_sub.basis)
        if coords is None:
            raise NotSquareZero("homotopy solve failed in degree %d" % k)
        lift = c_above[2].mul(coords).neg()
        b_rows = inverses[k].select_rows(range(h_b.cols, h_b.cols + b_sub.dim))
        h_blocks[k] = lift.mul(b_rows)
    small = GradedVectorSpace(small_dims)
    retract = DeformationRetract(
        big=space,
        small=small,
        proj=GradedMap(space, small, 0, proj_blocks),
        incl=GradedMap(small, space, 0, incl_blocks),
        homotopy=GradedMap(space, space, 1, h_blocks),
        d_big=d,
        d_small=GradedMap.zero(small, small, -1),
    )
    return retract, kbasis


def _splitting(space, d, twist=None):
    """Per-degree splitting data; `twist` perturbs the complement choices."""
    kernels, images = {}, {}
    for k in space.degrees:
        ker, _ = kernel_image(d.block(k))
        _, img = kernel_image(d.block(k + 1))
        kernels[k], images[k] = ker, img
    parts = {}
    for k in space.degrees:
        z, b = kernels[k], images[k]
        h_sub = complement(b, z)
        c_sub = complement(z, Subspace.full(space.dim(k)))
        h_b, c_b = h_sub.basis, c_sub.basis
        if twist is not None:
            phi, psi = twist(k, b.dim, h_b.cols, z.dim, c_b.cols)
            if h_b.cols and b.dim:
                h_b = h_b.add(b.basis.mul(phi))
            if c_b.cols and z.dim:
                c_b = c_b.add(z.basis.mul(psi))
        parts[k] = (h_b, b, c_b)
    return parts


def build_retract(space: GradedVectorSpace, d: GradedMap):
    """Deterministic deformation retract of (space, d) onto its homology.

    Returns (retract, kbasis) where kbasis[k] spans the complement
    K = im d (+) C of the homology representatives in degree k.
    """
    if d.degree != -1:
        raise NotSquareZero("differential must have degree -1")
    if not compose(d, d).is_zero:
        raise NotSquareZero("d squared is nonzero")
    return _assemble_retract(space, d, _splitting(space, d))


def alternative_retract(space: GradedVectorSpace, d: GradedMap, rng):
    """A randomized deformation retract: the complements H of im d in ker d
    and C of ker d are perturbed by random graphs, then the homotopy is
    rebuilt, so all side conditions are re-derived rather than assumed."""
    if not compose(d, d).is_zero:
        raise NotSquareZero("d squared is nonzero")

    def twist(k, bdim, hdim, zdim, cdim):
        phi = Matrix(bdim, hdim, [(r, c, rng.randint(-2, 2))
                                  for r in range(bdim) for c in range(hdim)])
        psi = Matrix(zdim, cdim, [(r, c, rng.randint(-2, 2))
                                  for r in range(zdim) for c in range(cdim)])
        return phi, psi

    retract, _ = _assemble_retract(space, d, _splitting(space, d, twist))
    return retract


def _chain_sums(m: Multicomplex, h: GradedMap, rightmost: GradedMap, nmax: int):
    """S_n = sum over compositions of n of delta_{i_1} h ... h delta_{i_k} r.

    Computed by the recursion S_n = sum_j delta_j T_{n-j} with T_0 = r and
    T_m = h S_m, which visits every composition exactly once.
    """
    source = rightmost.source
    big = m.space
    sums = {}
    tails = {0: rightmost}
    for n in range(1, nmax + 1):
        terms = []
        for j in range(1, n + 1):
            dj = m.delta(j)
            if dj.is_zero:
                continue
            terms.append((1, compose(dj, tails[n - j])))
        sums[n] = lincomb(terms, degree=2 * n - 1 + rightmost.degree,
                          source=source, target=big)
        tails[n] = compose(h, sums[n])
    return sums


@dataclass
class TransferOutput:
    transferred: Multicomplex
    i_inf: InfinityMorphism
    p_inf: InfinityMorphism
    kspace: GradedVectorSpace
    kbasis: dict
    d_k: GradedMap
    q_comps: list


def _kernel_contraction(r, kspace, kbasis, d_k) -> GradedMap:
    """Contraction s of the acyclic complex (K, d_K): d s + s d = -id.

    For retracts with the side conditions the homotopy restricts to K and
    already contracts it; otherwise fall back to rebuilding a retract of
    (K, d_K) onto its (empty) homology.
    """
    blocks = {}
    restricts = True
    for k in kspace.degrees:
        hk = r.homotopy.block(k).mul(kbasis[k])
        if hk.is_zero():
            continue
        coords = solve(kbasis[k + 1], hk) if kspace.dim(k + 1) else None
        if coords is None:
            restricts = False
            break
        blocks[k] = coords
    if restricts:
        s = GradedMap(kspace, kspace, 1, blocks)
        defect = compose(d_k, s).add(compose(s, d_k)).add(GradedMap.identity(kspace))
        if defect.is_zero:
            return s
    fallback, _ = build_retract(kspace, d_k)
    if not fallback.small.is_zero:
        raise NotSquareZero("complement of the homology representatives is not acyclic")
    return fallback.homotopy


def _kernel_complement_data(r: DeformationRetract):
    """Basis of K = ker proj per degree, the coordinate map q: A -> K, and
    the restricted differential d_K."""
    kbasis = {}
    kdims = {}
    for k in r.big.degrees:
        ker, _ = kernel_image(r.proj.block(k))
        kbasis[k] = ker.basis
        kdims[k] = ker.dim
    kspace = GradedVectorSpace(kdims)
    q_blocks = {}
    for k in r.big.degrees:
        if not kspace.dim(k):
            continue
        frame = r.incl.block(k).hstack(kbasis[k])
        inv = solve(frame, Matrix.identity(r.big.dim(k)))
        if inv is None:
            raise SpaceMismatch("retract projection does not split the space")
        q_blocks[k] = inv.select_rows(range(r.small.dim(k), r.big.dim(k)))
    q0 = GradedMap(r.big, kspace, 0, q_blocks)
    dk_blocks = {}
    for k in r.big.degrees:
        if not kspace.dim(k):
            continue
        dm = r.d_big.block(k).mul(kbasis[k])
        if not kspace.dim(k - 1):
            if not dm.is_zero():
                raise NotSquareZero("kernel of proj is not a subcomplex")
            continue
        coords = solve(kbasis[k - 1], dm)
        if coords is None:
            raise NotSquareZero("kernel of proj is not a subcomplex")
        dk_blocks[k] = coords
    d_k = GradedMap(kspace, kspace, -1, dk_blocks)
    return kspace, kbasis, q0, d_k


def transfer_structure(r: DeformationRetract, m: Multicomplex) -> TransferOutput:
    """Transferred multicomplex on the small space plus the extending
    infinity-quasi-isomorphisms. Higher operators past the grading bound are
    recomputed once and asserted zero rather than assumed."""
    if m.space != r.big:
        raise SpaceMismatch("multicomplex lives on a different space than the retract")
    if m.delta(0) != r.d_big:
        raise SpaceMismatch("retract differential disagrees with delta_0")
    small, big = r.small, r.big
    n_delta = max(max_component_index(small, small, 2, -1), 0)
    n_i = max(max_component_index(small, big, 2, 0), 0)
    n_p = max(max_component_index(big, small, 2, 0), 0)
    nmax = max(n_delta + 1, n_i, n_p, m.order)
    s_chain = _chain_sums(m, r.homotopy, r.incl, nmax)
    u_chain = _chain_sums(m, r.homotopy, r.homotopy, nmax)
    deltas = [r.d_small]
    for n in range(1, n_delta + 1):
        deltas.append(compose(r.proj, s_chain[n]))
    overflow = compose(r.proj, s_chain[n_delta + 1])
    if not overflow.is_zero:
        raise NotSquareZero("transferred operator beyond the grading bound is nonzero")
    i_comps = [r.incl] + [compose(r.homotopy, s_chain[n]) for n in range(1, n_i + 1)]
    p_comps = [r.proj] + [compose(r.proj, u_chain[n]) for n in range(1, n_p + 1)]
    transferred = Multicomplex(small, deltas)
    kspace, kbasis, q0, d_k = _kernel_complement_data(r)
    n_q = max(max_component_index(big, kspace, 2, 0), 0)
    s_k = _kernel_contraction(r, kspace, kbasis, d_k) if not kspace.is_zero else None
    # the extension of q solves its intertwining relations weight by weight:
    # q_n = -s (q delta_n + sum_{0<k<n} q_k delta_{n-k}), using the
    # contraction s of the acyclic complement
    q_comps = [q0]
    for n in range(1, n_q + 1):
        terms = [(1, compose(q_comps[k], m.delta(n - k))) for k in range(n)]
        defect = lincomb(terms, degree=2 * n - 1, source=big, target=kspace)
        q_comps.append(compose(s_k, defect).neg())
    return TransferOutput(
        transferred=transferred,
        i_inf=InfinityMorphism(transferred, m, i_comps),
        p_inf=InfinityMorphism(m, transferred, p_comps),
        kspace=kspace,
        kbasis=kbasis,
        d_k=d_k,
        q_comps=q_comps,
    )


@dataclass
class HodgeData:
    ok: bool
    witness: object  # least violating n, or None
    transfer: TransferOutput

    def __bool__(self):
        return self.ok


def check_hodge_data(r: DeformationRetract, m: Multicomplex) -> HodgeData:
    """True iff every transferred operator of weight >= 1 vanishes."""
    out = transfer_structure(r, m)
    for n in range(1, out.transferred.order + 1):
        if not out.transferred.delta(n).is_zero:
            return HodgeData(ok=False, witness=n, transfer=out)
    return HodgeData(ok=True, witness=None, transfer=out)


@dataclass
class MinimalModel:
    minimal: Multicomplex
    trivial: Multicomplex
    iso: InfinityMorphism       # from the input to minimal (+) trivial
    iso_inv: InfinityMorphism
    retract: DeformationRetract
    transfer: TransferOutput


def minimal_model(m: Multicomplex) -> MinimalModel:
    """Split m, up to infinity-isomorphism, into a minimal multicomplex on
    its homology and an acyclic trivial complement.

    The isomorphism stacks the transferred projection components with the
    recursive extension of the complement projection; its degree-0 part
    proj + q is bijective, so a two-sided inverse exists.
    """
    retract, _ = build_retract(m.space, m.delta(0))
    out = transfer_structure(retract, m)
    minimal = out.transferred
    trivial = Multicomplex(out.kspace, [out.d_k])
    prod = product(minimal, trivial)
    nmax = max(out.p_inf.order, len(out.q_comps) - 1)
    comps = []
    for n in range(nmax + 1):
        pn = out.p_inf.comp(n)
        qn = out.q_comps[n] if n < len(out.q_comps) else \
            GradedMap.zero(m.space, out.kspace, 2 * n)
        comps.append(stack_maps(pn, qn, prod.multicomplex.space, minimal.space))
    iso = InfinityMorphism(m, prod.multicomplex, comps)
    iso_inv = invert_infinity(iso)
    return MinimalModel(minimal=minimal, trivial=trivial, iso=iso,
                        iso_inv=iso_inv, retract=retract, transfer=out)
