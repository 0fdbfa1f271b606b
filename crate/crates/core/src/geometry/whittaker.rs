//! Whittaker pairs `(N(Y), psi_A)` for `GL_n` and the orbit `(k^m)`.

use serde::Serialize;

use super::matrix::FqMatrix;
use super::orbits::generating_set;
use super::GeometryError;
use crate::field::GaloisField;

/// A standard flag `0 < Y_1 < ... < Y_t < F^n` (by dimensions) with maps
/// `A_i : Y_i / Y_(i-1) -> Y_(i+1) / Y_i` as `dim(Y_i/Y_(i-1)) x dim(Y_(i+1)/Y_i)` matrices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WhittakerPair {
    pub dim: usize,
    pub flag_dims: Vec<usize>,
    pub a_maps: Vec<FqMatrix>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WhittakerClass {
    InOrbitKm,
    Higher,
    Other,
}

impl WhittakerPair {
    pub fn new(dim: usize, flag_dims: Vec<usize>, a_maps: Vec<FqMatrix>) -> Result<Self, GeometryError> {
        let p = WhittakerPair { dim, flag_dims, a_maps };
        p.check_shape()?;
        Ok(p)
    }

    /// Dimensions of the successive quotients, including `F^n / Y_t`.
    pub fn quotient_dims(&self) -> Vec<usize> {
        let mut prev = 0;
        let mut out = Vec::new();
        for &d in self.flag_dims.iter().chain(std::iter::once(&self.dim)) {
            out.push(d - prev);
            prev = d;
        }
        out
    }

    fn check_shape(&self) -> Result<(), GeometryError> {
        let mut prev = 0;
        for &d in &self.flag_dims {
            if d <= prev || d >= self.dim {
                return Err(GeometryError::ShapeMismatch("flag must be strictly increasing and proper".into()));
            }
            prev = d;
        }
        if self.a_maps.len() != self.flag_dims.len() {
            return Err(GeometryError::ShapeMismatch(format!(
                "{} maps for {} subspaces",
                self.a_maps.len(),
                self.flag_dims.len()
            )));
        }
        let q = self.quotient_dims();
        for (i, a) in self.a_maps.iter().enumerate() {
            if (a.rows, a.cols) != (q[i], q[i + 1]) {
                return Err(GeometryError::ShapeMismatch(format!("A_{} should be {}x{}", i + 1, q[i], q[i + 1])));
            }
        }
        Ok(())
    }
}

/// `InOrbitKm` iff `dim Y_i = m i` (`i < k`) and every `A_i` is invertible; `Higher` iff some
/// `A_(i+k-1) o ... o A_i` is nonzero; `Other` otherwise.
pub fn whittaker_pair_classify(pair: &WhittakerPair, k: usize, m: usize, f: &GaloisField) -> Result<WhittakerClass, GeometryError> {
    pair.check_shape()?;
    if super::doubling::compositions_nonzero(&pair.a_maps, k, f) {
        return Ok(WhittakerClass::Higher);
    }
    let dims_ok = pair.dim == k * m && pair.flag_dims.len() + 1 == k && pair.flag_dims.iter().enumerate().all(|(i, &d)| d == m * (i + 1));
    let isos = pair.a_maps.iter().all(|a| a.is_square() && a.det(f) != 0);
    Ok(if dims_ok && isos { WhittakerClass::InOrbitKm } else { WhittakerClass::Other })
}

/// Stabilizer of `psi_A` in the Levi `prod GL(Y_i/Y_(i-1))` for a pair in the orbit `(k^m)`:
/// `(g_1, ..., g_k)` with `g_i A_i = A_i g_(i+1)`, one for each `g_1` in `GL_m`.
pub fn full_rank_stabilizer(pair: &WhittakerPair, f: &GaloisField, gl_m: &[FqMatrix]) -> Vec<Vec<FqMatrix>> {
    gl_m.iter()
        .map(|g1| {
            let mut tuple = vec![g1.clone()];
            for a in &pair.a_maps {
                let ai = a.inverse(f).expect("pair in the orbit (k^m)");
                let next = ai.mul(tuple.last().unwrap(), f).mul(a, f);
                tuple.push(next);
            }
            tuple
        })
        .collect()
}

/// Whether `(g_i)` fixes `psi_A`: `g_i A_i = A_i g_(i+1)` for all `i`.
pub fn stabilizes(pair: &WhittakerPair, tuple: &[FqMatrix], f: &GaloisField) -> bool {
    pair.a_maps.iter().enumerate().all(|(i, a)| tuple[i].mul(a, f) == a.mul(&tuple[i + 1], f))
}

/// `S_A`: elements of `GL(Y_1)` acting trivially on `Ker A_1` and on `Y_1 / Ker A_1`.
///
/// In a basis that starts with `Ker A_1` these are `[[1, 0], [x, 1]]`; returned in the
/// original coordinates of `Y_1`.
pub fn s_a_group(pair: &WhittakerPair, f: &GaloisField) -> Result<Vec<FqMatrix>, GeometryError> {
    let a1 = pair.a_maps.first().ok_or_else(|| GeometryError::ShapeMismatch("no maps".into()))?;
    let m = a1.rows;
    let ker = a1.left_kernel(f);
    let kd = ker.rows;
    // basis: kernel rows, then completing standard vectors
    let mut basis = ker.clone();
    for i in 0..m {
        let mut e = FqMatrix::zeros(1, m);
        e.set(0, i, 1);
        let cand = basis.vstack(&e);
        if cand.rank(f) > basis.rows {
            basis = cand;
        }
    }
    let binv = basis.inverse(f).expect("completed basis");
    let free = (m - kd) * kd;
    let zero = vec![0u16; free];
    let mut out = Vec::new();
    for x in super::matrix::affine_span(&zero, &FqMatrix::identity(free), f) {
        let mut s = FqMatrix::identity(m);
        for r in 0..m - kd {
            for c in 0..kd {
                s.set(kd + r, c, x[r * kd + c]);
            }
        }
        out.push(binv.mul(&s, f).mul(&basis, f));
    }
    Ok(out)
}

/// Generators of `S_A` (for reports).
pub fn s_a_generators(pair: &WhittakerPair, f: &GaloisField) -> Result<Vec<FqMatrix>, GeometryError> {
    let mut els = s_a_group(pair, f)?;
    els.sort();
    Ok(generating_set(&els, f))
}
