//! The doubled space `W^(box,k)`, the doubling map, the unipotent group `N_bullet`
//! with its character, and the classification of maximal isotropic subspaces.

use serde::Serialize;

use super::groups::{build_group, FormedSpace, MatrixGroup};
use super::matrix::{affine_span, contained_in, fq, intersect, solve_affine, FqMatrix};
use super::GeometryError;
use crate::field::GaloisField;
use crate::roots::Family;

/// `W^(box,k) = W_1+ + ... + W_k+ + W_k- + ... + W_1-` with form `sum <x_i, x_i'> - <y_i, y_i'>`.
///
/// Coordinates are laid out in that order: block `i - 1` is `W_i+`, block `2k - i` is `W_i-`.
#[derive(Clone, Debug)]
pub struct DoubledSpace {
    pub base: FormedSpace,
    pub k: usize,
    pub space: FormedSpace,
}

impl DoubledSpace {
    pub fn new(base: FormedSpace, k: usize) -> Result<Self, GeometryError> {
        if k == 0 {
            return Err(GeometryError::ShapeMismatch("k must be positive".into()));
        }
        let f = &base.field;
        let neg = base.form.neg(f);
        let blocks: Vec<&FqMatrix> = (0..2 * k).map(|b| if b < k { &base.form } else { &neg }).collect();
        let space = FormedSpace::new(f.clone(), FqMatrix::block_diag(&blocks), base.epsilon)?;
        Ok(DoubledSpace { base, k, space })
    }

    pub fn field(&self) -> &GaloisField {
        &self.base.field
    }

    pub fn dim(&self) -> usize {
        self.space.dim
    }

    pub fn plus_block(&self, i: usize) -> usize {
        i - 1
    }

    pub fn minus_block(&self, i: usize) -> usize {
        2 * self.k - i
    }

    fn embed(&self, i: usize, x: &[u16], sign: i64) -> Vec<u16> {
        let n = self.base.dim;
        let f = self.field();
        let mut v = vec![0; self.dim()];
        let (p, m) = (self.plus_block(i) * n, self.minus_block(i) * n);
        for j in 0..n {
            v[p + j] = x[j];
            v[m + j] = f.fmul(x[j], fq(f, sign));
        }
        v
    }

    /// `x^Delta = (x, x)` in `W_i+ + W_i-`.
    pub fn delta(&self, i: usize, x: &[u16]) -> Vec<u16> {
        self.embed(i, x, 1)
    }

    /// `x^nabla = (x, -x)` in `W_i+ + W_i-`.
    pub fn nabla(&self, i: usize, x: &[u16]) -> Vec<u16> {
        self.embed(i, x, -1)
    }

    fn span_of(&self, blocks: impl Iterator<Item = usize>, sign: i64) -> FqMatrix {
        let n = self.base.dim;
        let mut rows = Vec::new();
        for i in blocks {
            for j in 0..n {
                let mut e = vec![0; n];
                e[j] = 1;
                rows.push(self.embed(i, &e, sign));
            }
        }
        FqMatrix::from_rows(&rows, self.dim()).row_space(self.field())
    }

    /// `W^(Delta,k)`, the point of `P \ G^box` fixed by `P`.
    pub fn w_delta_k(&self) -> FqMatrix {
        self.span_of(1..=self.k, 1)
    }

    /// `W_i^nabla + ... + W_k^nabla`.
    pub fn nabla_tail(&self, i: usize) -> FqMatrix {
        self.span_of(i..=self.k, -1)
    }

    /// `Y_1 subset ... subset Y_(k-1)` with `Y_t = W_(k-t+1)^nabla + ... + W_k^nabla`.
    pub fn default_flag(&self) -> IsotropicFlag {
        IsotropicFlag { subspaces: (1..self.k).map(|t| self.nabla_tail(self.k - t + 1)).collect() }
    }

    /// `iota(g1, g2)`: `g1` on every block except `W_1-`, which gets `g2`.
    pub fn iota(&self, g1: &FqMatrix, g2: &FqMatrix) -> FqMatrix {
        let mut blocks: Vec<&FqMatrix> = vec![g1; 2 * self.k - 1];
        blocks.push(g2);
        FqMatrix::block_diag(&blocks)
    }

    pub fn iota_checked(&self, g: &MatrixGroup, g1: &FqMatrix, g2: &FqMatrix) -> Result<FqMatrix, GeometryError> {
        if !g.contains(g1) || !g.contains(g2) {
            return Err(GeometryError::NotInGroup);
        }
        let h = self.iota(g1, g2);
        debug_assert!(self.space.preserves(&h));
        Ok(h)
    }
}

/// An ascending chain of totally isotropic subspaces (canonical bases).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsotropicFlag {
    pub subspaces: Vec<FqMatrix>,
}

impl IsotropicFlag {
    /// `Y_1 < ... < Y_r < Y_r^perp < ... < Y_1^perp`.
    pub fn extended(&self, space: &FormedSpace) -> Vec<FqMatrix> {
        let mut chain = self.subspaces.clone();
        for y in self.subspaces.iter().rev() {
            chain.push(space.perp(y));
        }
        chain
    }

    pub fn is_valid(&self, space: &FormedSpace) -> bool {
        let f = &space.field;
        self.subspaces.iter().all(|y| space.is_totally_isotropic(y))
            && self.subspaces.windows(2).all(|w| contained_in(&w[0], &w[1], f) && w[0].rows < w[1].rows)
    }
}

/// Maps `v -> (coordinates of v in the given rows)` for vectors of their span.
#[derive(Clone, Debug)]
struct Coordinates {
    pivots: Vec<usize>,
    inv: FqMatrix,
}

impl Coordinates {
    fn new(basis: &FqMatrix, f: &GaloisField) -> Self {
        let (_, pivots) = basis.rref(f);
        let sq = FqMatrix::from_rows(
            &(0..basis.rows).map(|r| pivots.iter().map(|&c| basis.get(r, c)).collect()).collect::<Vec<_>>(),
            pivots.len(),
        );
        Coordinates { inv: sq.inverse(f).expect("independent rows"), pivots }
    }

    fn of(&self, v: &[u16], f: &GaloisField) -> Vec<u16> {
        let w: Vec<u16> = self.pivots.iter().map(|&c| v[c]).collect();
        FqMatrix::from_rows(&[w], self.pivots.len()).mul(&self.inv, f).data
    }
}

/// The unipotent radical `N_bullet` of the stabilizer of the extended flag.
#[derive(Clone, Debug)]
pub struct NBullet {
    pub field: GaloisField,
    /// `C_1 < ... < C_(s-1)`, without `0` and `V`.
    pub chain: Vec<FqMatrix>,
    /// Basis adapted to the chain (rows), its inverse, and the piece of each row.
    adapted: FqMatrix,
    adapted_inv: FqMatrix,
    piece: Vec<usize>,
    pieces: usize,
    form_adapted: FqMatrix,
    /// A basis of the Lie algebra `n_bullet`, in the original coordinates.
    pub lie_basis: Vec<FqMatrix>,
    lie_coords: Option<Coordinates>,
}

impl NBullet {
    pub fn new(space: &FormedSpace, flag: &IsotropicFlag) -> Result<Self, GeometryError> {
        if !flag.is_valid(space) {
            return Err(GeometryError::ShapeMismatch("flag is not an ascending isotropic chain".into()));
        }
        let f = &space.field;
        let n = space.dim;
        let chain = flag.extended(space);
        let mut adapted = FqMatrix::zeros(0, n);
        let mut piece = Vec::new();
        for (p, c) in chain.iter().chain(std::iter::once(&FqMatrix::identity(n))).enumerate() {
            for r in 0..c.rows {
                let cand = adapted.vstack(&c.select_rows(&[r]));
                if cand.rank(f) > adapted.rows {
                    adapted = cand;
                    piece.push(p);
                }
            }
        }
        let pieces = chain.len() + 1;
        let adapted_inv = adapted.inverse(f).expect("adapted basis");
        let form_adapted = adapted.mul(&space.form, f).mul(&adapted.transpose(), f);
        let mut nb = NBullet {
            field: f.clone(),
            chain,
            adapted,
            adapted_inv,
            piece,
            pieces,
            form_adapted,
            lie_basis: Vec::new(),
            lie_coords: None,
        };
        nb.lie_basis = nb.compute_lie_basis();
        if !nb.lie_basis.is_empty() {
            let flat = FqMatrix::from_rows(&nb.lie_basis.iter().map(|x| x.data.clone()).collect::<Vec<_>>(), n * n);
            nb.lie_coords = Some(Coordinates::new(&flat, f));
        }
        Ok(nb)
    }

    pub fn dim(&self) -> usize {
        self.adapted.rows
    }

    /// Unknown positions `(a, b)` of `X'` on layer `d` (`piece(a) - piece(b) = d`).
    fn layer(&self, d: usize) -> Vec<(usize, usize)> {
        let n = self.dim();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.piece[a] == self.piece[b] + d {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Positions of `X'J' + J'X'^T` on level `l` (`piece(a) + piece(b) = s - 1 + l`).
    fn level(&self, l: usize) -> Vec<(usize, usize)> {
        let n = self.dim();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.piece[a] + self.piece[b] == self.pieces - 1 + l {
                    out.push((a, b));
                }
            }
        }
        out
    }

    fn to_original(&self, xa: &FqMatrix) -> FqMatrix {
        let f = &self.field;
        self.adapted_inv.mul(xa, f).mul(&self.adapted, f)
    }

    /// `E J' + J' E^T` for the elementary matrix `E_ab`.
    fn linear_part(&self, a: usize, b: usize) -> FqMatrix {
        let f = &self.field;
        let mut e = FqMatrix::zeros(self.dim(), self.dim());
        e.set(a, b, 1);
        e.mul(&self.form_adapted, f).add(&self.form_adapted.mul(&e.transpose(), f), f)
    }

    fn compute_lie_basis(&self) -> Vec<FqMatrix> {
        let f = &self.field;
        let n = self.dim();
        let unknowns: Vec<(usize, usize)> = (1..self.pieces).flat_map(|d| self.layer(d)).collect();
        if unknowns.is_empty() {
            return Vec::new();
        }
        let cols: Vec<FqMatrix> = unknowns.iter().map(|&(a, b)| self.linear_part(a, b)).collect();
        let mut sys = FqMatrix::zeros(n * n, unknowns.len());
        for (c, m) in cols.iter().enumerate() {
            for (r, &v) in m.data.iter().enumerate() {
                sys.set(r, c, v);
            }
        }
        let ker = sys.right_kernel(f);
        (0..ker.rows)
            .map(|r| {
                let mut xa = FqMatrix::zeros(n, n);
                for (c, &(a, b)) in unknowns.iter().enumerate() {
                    xa.set(a, b, ker.get(r, c));
                }
                self.to_original(&xa)
            })
            .collect()
    }

    /// `q^dim n_bullet`.
    pub fn order(&self) -> u128 {
        (self.field.order() as u128).pow(self.lie_basis.len() as u32)
    }

    /// Whether `u - 1` maps each member of the extended flag into the previous one.
    pub fn lowers_flag(&self, u: &FqMatrix) -> bool {
        let f = &self.field;
        let x = u.sub(&FqMatrix::identity(u.rows), f);
        let full = FqMatrix::identity(u.rows);
        let mut prev: Option<&FqMatrix> = None;
        for c in self.chain.iter().chain(std::iter::once(&full)) {
            let img = c.mul(&x, f);
            let ok = match prev {
                None => img.is_zero(),
                Some(p) => contained_in(&img, p, f),
            };
            if !ok {
                return false;
            }
            prev = Some(c);
        }
        true
    }

    /// Every element of `N_bullet(F_q)`, solved layer by layer in adapted coordinates.
    pub fn elements(&self, limit: u128) -> Result<Vec<FqMatrix>, GeometryError> {
        if self.order() > limit {
            return Err(GeometryError::TooLarge { states: self.order(), limit });
        }
        let f = &self.field;
        let n = self.dim();
        let mut partial = vec![FqMatrix::zeros(n, n)];
        for l in 1..self.pieces {
            let unknowns = self.layer(l);
            let eqs = self.level(l);
            if unknowns.is_empty() {
                continue;
            }
            let cols: Vec<FqMatrix> = unknowns.iter().map(|&(a, b)| self.linear_part(a, b)).collect();
            let mut sys = FqMatrix::zeros(eqs.len(), unknowns.len());
            for (c, m) in cols.iter().enumerate() {
                for (r, &(a, b)) in eqs.iter().enumerate() {
                    sys.set(r, c, m.get(a, b));
                }
            }
            let mut next = Vec::new();
            for x in &partial {
                let fx = self.defect(x);
                let rhs: Vec<u16> = eqs.iter().map(|&(a, b)| f.fneg(fx.get(a, b))).collect();
                let Some((p, ker)) = solve_affine(&sys, &rhs, f) else { continue };
                for sol in affine_span(&p, &ker, f) {
                    let mut y = x.clone();
                    for (c, &(a, b)) in unknowns.iter().enumerate() {
                        y.set(a, b, sol[c]);
                    }
                    next.push(y);
                }
            }
            partial = next;
        }
        let id = FqMatrix::identity(n);
        let mut out: Vec<FqMatrix> = partial.iter().map(|xa| id.add(&self.to_original(xa), f)).collect();
        out.sort();
        debug_assert_eq!(out.len() as u128, self.order());
        Ok(out)
    }

    /// `X J' + J' X^T + X J' X^T` in adapted coordinates.
    fn defect(&self, xa: &FqMatrix) -> FqMatrix {
        let f = &self.field;
        let j = &self.form_adapted;
        let xj = xa.mul(j, f);
        xj.add(&j.mul(&xa.transpose(), f), f).add(&xj.mul(&xa.transpose(), f), f)
    }

    /// Coordinates of a Lie algebra element in `lie_basis`.
    pub fn lie_coordinates(&self, x: &FqMatrix) -> Vec<u16> {
        match &self.lie_coords {
            None => Vec::new(),
            Some(c) => c.of(&x.data, &self.field),
        }
    }

    /// Whether `x` is in `n_bullet`.
    pub fn lie_contains(&self, x: &FqMatrix) -> bool {
        let f = &self.field;
        let c = self.lie_coordinates(x);
        let mut y = FqMatrix::zeros(x.rows, x.cols);
        for (i, b) in self.lie_basis.iter().enumerate() {
            y = y.add(&b.scale(c.get(i).copied().unwrap_or(0), f), f);
        }
        &y == x
    }

    pub fn adapted_pieces(&self) -> Vec<usize> {
        let mut dims = vec![0; self.pieces];
        for &p in &self.piece {
            dims[p] += 1;
        }
        dims
    }
}

/// Everything attached to `(G, k)`: the group, the doubled space, the flag, `N_bullet`.
#[derive(Clone, Debug)]
pub struct DoublingContext {
    pub group: MatrixGroup,
    pub dbl: DoubledSpace,
    pub flag: IsotropicFlag,
    pub nb: NBullet,
}

impl DoublingContext {
    pub fn new(family: Family, m: usize, q: u64, k: usize) -> Result<Self, GeometryError> {
        let group = build_group(family, m, q)?;
        let base = group
            .space
            .clone()
            .ok_or_else(|| GeometryError::UnsupportedFamily("doubling needs a form (families B, C, D)".into()))?;
        let dbl = DoubledSpace::new(base, k)?;
        let flag = dbl.default_flag();
        let nb = NBullet::new(&dbl.space, &flag)?;
        Ok(DoublingContext { group, dbl, flag, nb })
    }

    pub fn field(&self) -> &GaloisField {
        self.dbl.field()
    }

    /// `sum_i tr(u_i o A_i)` for `X = u - 1` (or a Lie algebra element), with `A_i` the identity
    /// `W^nabla -> W^nabla` for `i <= k - 2` and `x^nabla -> (2x, 0)` for `i = k - 1`.
    pub fn psi_linear(&self, x: &FqMatrix) -> u16 {
        let f = self.field();
        let k = self.dbl.k;
        let n = self.dbl.base.dim;
        let mut acc = 0u16;
        for i in 1..k {
            let coord_block = self.dbl.plus_block(k - i + 1);
            for j in 0..n {
                let mut e = vec![0u16; n];
                e[j] = 1;
                let r = if i + 2 <= k {
                    self.dbl.nabla(k - i, &e)
                } else {
                    let mut v = vec![0u16; self.dbl.dim()];
                    v[self.dbl.plus_block(1) * n + j] = fq(f, 2);
                    v
                };
                let img = FqMatrix::from_rows(&[r], self.dbl.dim()).mul(x, f);
                acc = f.fadd(acc, img.get(0, coord_block * n + j));
            }
        }
        acc
    }

    /// The argument of `psi_bullet(u)`.
    pub fn psi_argument(&self, u: &FqMatrix) -> Result<u16, GeometryError> {
        if !self.dbl.space.preserves(u) || !self.nb.lowers_flag(u) {
            return Err(GeometryError::NotUnipotentInFlag);
        }
        let x = u.sub(&FqMatrix::identity(u.rows), self.field());
        Ok(self.psi_linear(&x))
    }

    /// `L = W^(Delta,k) gamma`.
    pub fn lagrangian_of(&self, gamma: &FqMatrix) -> FqMatrix {
        self.dbl.w_delta_k().mul(gamma, self.field()).row_space(self.field())
    }

    /// `Y_(k-1)`, or `0` for `k = 1`.
    pub fn top_flag_space(&self) -> FqMatrix {
        self.flag.subspaces.last().cloned().unwrap_or_else(|| FqMatrix::zeros(0, self.dbl.dim()))
    }

    /// Determinant of `X -> h X h^-1` on `n_bullet`, `h = iota(g1, g2)`.
    pub fn modular_character_check(&self, g1: &FqMatrix, g2: &FqMatrix) -> Result<u16, GeometryError> {
        let f = self.field();
        let h = self.dbl.iota_checked(&self.group, g1, g2)?;
        let hi = h.inverse(f).expect("invertible");
        let d = self.nb.lie_basis.len();
        let mut m = FqMatrix::zeros(d, d);
        for (r, x) in self.nb.lie_basis.iter().enumerate() {
            let y = h.mul(x, f).mul(&hi, f);
            debug_assert!(self.nb.lie_contains(&y), "iota(G x G) normalizes n_bullet");
            for (c, v) in self.nb.lie_coordinates(&y).into_iter().enumerate() {
                m.set(r, c, v);
            }
        }
        Ok(if d == 0 { 1 } else { m.det(f) })
    }

    /// Classifies `L` (a maximal isotropic subspace) into `Omega_1`, `Omega_2` or the complement.
    pub fn classify_lagrangian(&self, l: &FqMatrix) -> OmegaClassification {
        let f = self.field();
        let j = &self.dbl.space.form;
        let y_top = self.top_flag_space();
        let geometric_tilde = intersect(l, &y_top, f).rows == 0;
        let basis = &self.nb.lie_basis;
        let lt = l.transpose();
        let jl = j.mul(&lt, f);
        // p = {X in n_bullet : L X subset L}
        let blocks: Vec<FqMatrix> = basis.iter().map(|x| l.mul(x, f).mul(&jl, f)).collect();
        let p = combos_in_kernel(basis, &blocks, f);
        // n_L cap n_bullet = {X in p : L X = 0}
        let restr: Vec<FqMatrix> = p.iter().map(|x| l.mul(x, f)).collect();
        let n_l = combos_in_kernel(&p, &restr, f);
        let omega1 = n_l.iter().any(|x| self.psi_linear(x) != 0);
        let mut out = OmegaClassification {
            class: OmegaClass::Tilde,
            geometric_tilde,
            induced_flag_dims: Vec::new(),
            repeats_removed: false,
            psi_factors: true,
            a_maps_unique: true,
            a_ranks: Vec::new(),
        };
        if omega1 {
            out.class = OmegaClass::Omega1;
            return out;
        }
        // induced flag in L
        let mut flag: Vec<FqMatrix> = Vec::new();
        for c in &self.nb.chain {
            let s = intersect(l, c, f);
            if s.rows == 0 || s.rows == l.rows {
                continue;
            }
            if flag.last().map(|t| t.rows) == Some(s.rows) {
                out.repeats_removed = true;
                continue;
            }
            flag.push(s);
        }
        out.induced_flag_dims = flag.iter().map(|s| s.rows).collect();
        let t = flag.len();
        if t == 0 {
            return out;
        }
        // basis of L adapted to the induced flag
        let mut adapted = FqMatrix::zeros(0, l.cols);
        let mut piece = Vec::new();
        for (pi, s) in flag.iter().chain(std::iter::once(l)).enumerate() {
            for r in 0..s.rows {
                let cand = adapted.vstack(&s.select_rows(&[r]));
                if cand.rank(f) > adapted.rows {
                    adapted = cand;
                    piece.push(pi);
                }
            }
        }
        let coords = Coordinates::new(&adapted, f);
        // unknown entries of A_i: (c in piece i-1, r in piece i), i = 1..t
        let mut unknowns = Vec::new();
        for r in 0..adapted.rows {
            for c in 0..adapted.rows {
                if piece[r] >= 1 && piece[c] + 1 == piece[r] {
                    unknowns.push((c, r));
                }
            }
        }
        let mut sys = FqMatrix::zeros(p.len(), unknowns.len());
        let mut rhs = Vec::with_capacity(p.len());
        for (e, x) in p.iter().enumerate() {
            let img = adapted.mul(x, f);
            let u: Vec<Vec<u16>> = (0..img.rows).map(|r| coords.of(img.row(r), f)).collect();
            for (col, &(c, r)) in unknowns.iter().enumerate() {
                sys.set(e, col, u[r][c]);
            }
            rhs.push(self.psi_linear(x));
        }
        let Some((sol, ker)) = solve_affine(&sys, &rhs, f) else {
            out.psi_factors = false;
            return out;
        };
        out.a_maps_unique = ker.rows == 0;
        let sizes: Vec<usize> = (0..=t).map(|pi| piece.iter().filter(|&&x| x == pi).count()).collect();
        let offset: Vec<usize> = (0..=t).map(|pi| piece.iter().position(|&x| x == pi).unwrap_or(0)).collect();
        let mut a_maps = Vec::new();
        for i in 1..=t {
            let mut a = FqMatrix::zeros(sizes[i - 1], sizes[i]);
            for (col, &(c, r)) in unknowns.iter().enumerate() {
                if piece[r] == i {
                    a.set(c - offset[i - 1], r - offset[i], sol[col]);
                }
            }
            a_maps.push(a);
        }
        out.a_ranks = a_maps.iter().map(|a| a.rank(f)).collect();
        if compositions_nonzero(&a_maps, self.dbl.k, f) {
            out.class = OmegaClass::Omega2;
        }
        out
    }

    pub fn omega_classify(&self, gamma: &FqMatrix) -> OmegaClassification {
        self.classify_lagrangian(&self.lagrangian_of(gamma))
    }

    /// Whether `psi_bullet` is nontrivial on `gamma^-1 N gamma cap N_bullet`, by running
    /// through the given elements of `N_bullet`.
    pub fn omega1_by_enumeration(&self, l: &FqMatrix, n_bullet: &[FqMatrix]) -> bool {
        let f = self.field();
        let jl = self.dbl.space.form.mul(&l.transpose(), f);
        let id = FqMatrix::identity(self.dbl.dim());
        n_bullet.iter().any(|u| {
            let x = u.sub(&id, f);
            l.mul(&x, f).is_zero() && x.mul(&jl, f).is_zero() && self.psi_linear(&x) != 0
        })
    }

    /// `iota(G x G) cap P = iota(G^diamond)`, checked over the given elements of `G`.
    pub fn diagonal_intersection_check(&self, elements: &[FqMatrix]) -> bool {
        let f = self.field();
        let l0 = self.dbl.w_delta_k();
        elements.iter().all(|g1| {
            elements.iter().all(|g2| {
                let fixes = l0.mul(&self.dbl.iota(g1, g2), f).row_space(f) == l0;
                fixes == (g1 == g2)
            })
        })
    }
}

/// Basis of `{sum c_i basis_i : sum c_i images_i = 0}`.
fn combos_in_kernel(basis: &[FqMatrix], images: &[FqMatrix], f: &GaloisField) -> Vec<FqMatrix> {
    if basis.is_empty() {
        return Vec::new();
    }
    let len = images[0].data.len();
    let mut sys = FqMatrix::zeros(len, basis.len());
    for (c, m) in images.iter().enumerate() {
        for (r, &v) in m.data.iter().enumerate() {
            sys.set(r, c, v);
        }
    }
    let ker = sys.right_kernel(f);
    (0..ker.rows)
        .map(|r| {
            let mut x = FqMatrix::zeros(basis[0].rows, basis[0].cols);
            for (c, b) in basis.iter().enumerate() {
                let co = ker.get(r, c);
                if co != 0 {
                    x = x.add(&b.scale(co, f), f);
                }
            }
            x
        })
        .collect()
}

/// Whether some `A_i A_(i+1) ... A_(i+k-1)` (row convention) is nonzero.
pub fn compositions_nonzero(a_maps: &[FqMatrix], k: usize, f: &GaloisField) -> bool {
    if k == 0 || a_maps.len() < k {
        return false;
    }
    (0..=a_maps.len() - k).any(|i| {
        let mut p = a_maps[i].clone();
        for a in &a_maps[i + 1..i + k] {
            p = p.mul(a, f);
        }
        !p.is_zero()
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OmegaClass {
    Omega1,
    Omega2,
    Tilde,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OmegaClassification {
    pub class: OmegaClass,
    /// `L cap Y_(k-1) = 0`.
    pub geometric_tilde: bool,
    /// Dimensions of the distinct proper members of `L cap (extended flag)`.
    pub induced_flag_dims: Vec<usize>,
    /// Repeated members were dropped from the induced flag.
    pub repeats_removed: bool,
    /// `psi_bullet` on `gamma^-1 P gamma cap N_bullet` is given by maps on the induced flag.
    pub psi_factors: bool,
    pub a_maps_unique: bool,
    pub a_ranks: Vec<usize>,
}
