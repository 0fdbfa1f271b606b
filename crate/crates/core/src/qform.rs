//! Weyl-invariant integer quadratic forms on cocharacter lattices.

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::lattice::{Lattice, LatticeHom, Vector};
use crate::roots::{Family, RootDatum};

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum QFormError {
    #[error("family {family} does not admit value {a} on short coroots (parity)")]
    ParityViolation { family: Family, a: i64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invariant forms are not unique: solution space has dimension {0}")]
    NotUnique(usize),
}

/// `Q(y) = sum diag_i y_i^2 + sum_{i<j} offdiag_ij y_i y_j`.
///
/// `offdiag` is stored as a full symmetric matrix with zero diagonal, so that
/// `offdiag[i][j] = B_Q(e_i, e_j)` for `i != j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadraticForm {
    pub diag: Vec<i64>,
    pub offdiag: Vec<Vec<i64>>,
}

impl QuadraticForm {
    pub fn new(diag: Vec<i64>, offdiag: Vec<Vec<i64>>) -> Self {
        let n = diag.len();
        assert_eq!(offdiag.len(), n);
        for i in 0..n {
            assert_eq!(offdiag[i].len(), n);
            assert_eq!(offdiag[i][i], 0, "offdiag has zero diagonal");
            for j in 0..n {
                assert_eq!(offdiag[i][j], offdiag[j][i], "offdiag is symmetric");
            }
        }
        QuadraticForm { diag, offdiag }
    }

    pub fn diagonal(diag: Vec<i64>) -> Self {
        let n = diag.len();
        QuadraticForm { diag, offdiag: vec![vec![0; n]; n] }
    }

    pub fn zero(rank: usize) -> Self {
        Self::diagonal(vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    pub fn lattice(&self) -> Lattice {
        Lattice::new(self.rank())
    }

    /// `B_Q(e_i, e_j)`, with `B_Q(e_i, e_i) = 2 Q(e_i)`.
    pub fn b(&self, i: usize, j: usize) -> i64 {
        if i == j {
            2 * self.diag[i]
        } else {
            self.offdiag[i][j]
        }
    }

    pub fn eval_q(&self, y: &[i64]) -> Result<i64, QFormError> {
        self.check(y)?;
        Ok(self.q(y))
    }

    pub fn eval_b(&self, y1: &[i64], y2: &[i64]) -> Result<i64, QFormError> {
        self.check(y1)?;
        self.check(y2)?;
        Ok(self.bilinear(y1, y2))
    }

    fn check(&self, y: &[i64]) -> Result<(), QFormError> {
        if y.len() != self.rank() {
            return Err(QFormError::DimensionMismatch { expected: self.rank(), got: y.len() });
        }
        Ok(())
    }

    /// `Q(y)`; panics on a length mismatch.
    pub fn q(&self, y: &[i64]) -> i64 {
        let n = self.rank();
        let mut s = 0;
        for i in 0..n {
            s += self.diag[i] * y[i] * y[i];
            for j in i + 1..n {
                s += self.offdiag[i][j] * y[i] * y[j];
            }
        }
        s
    }

    /// `B_Q(y1, y2)`; panics on a length mismatch.
    pub fn bilinear(&self, y1: &[i64], y2: &[i64]) -> i64 {
        let n = self.rank();
        let mut s = 0;
        for i in 0..n {
            if y1[i] == 0 {
                continue;
            }
            for j in 0..n {
                s += y1[i] * self.b(i, j) * y2[j];
            }
        }
        s
    }

    pub fn scaled(&self, m: i64) -> QuadraticForm {
        QuadraticForm {
            diag: self.diag.iter().map(|x| x * m).collect(),
            offdiag: self.offdiag.iter().map(|r| r.iter().map(|x| x * m).collect()).collect(),
        }
    }

    /// `Q o h`.
    pub fn pullback(&self, h: &LatticeHom) -> QuadraticForm {
        assert_eq!(h.target.rank, self.rank());
        let n = h.source.rank;
        let imgs: Vec<Vector> = (0..n).map(|i| h.image_of_basis(i)).collect();
        let diag = imgs.iter().map(|v| self.q(v)).collect();
        let mut off = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off[i][j] = self.bilinear(&imgs[i], &imgs[j]);
                }
            }
        }
        QuadraticForm::new(diag, off)
    }

    /// Orthogonal direct sum.
    pub fn direct_sum(parts: &[QuadraticForm]) -> QuadraticForm {
        let n: usize = parts.iter().map(|p| p.rank()).sum();
        let mut diag = Vec::with_capacity(n);
        let mut off = vec![vec![0; n]; n];
        let mut base = 0;
        for p in parts {
            diag.extend_from_slice(&p.diag);
            for i in 0..p.rank() {
                for j in 0..p.rank() {
                    off[base + i][base + j] = p.offdiag[i][j];
                }
            }
            base += p.rank();
        }
        QuadraticForm::new(diag, off)
    }
}

/// True iff `B_Q` vanishes across the parts of the partition.
pub fn is_decomposable(q: &QuadraticForm, split: &[Vec<usize>]) -> bool {
    let mut part = vec![usize::MAX; q.rank()];
    for (k, p) in split.iter().enumerate() {
        for &i in p {
            part[i] = k;
        }
    }
    assert!(part.iter().all(|&k| k != usize::MAX), "split must cover the basis");
    (0..q.rank()).all(|i| (i + 1..q.rank()).all(|j| part[i] == part[j] || q.offdiag[i][j] == 0))
}

// unknown index of offdiag (i, j), i < j
fn off_index(n: usize, i: usize, j: usize) -> usize {
    n + i * n - i * (i + 1) / 2 + (j - i - 1)
}

fn form_from_unknowns(n: usize, u: &[i64]) -> QuadraticForm {
    let mut off = vec![vec![0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            off[i][j] = u[off_index(n, i, j)];
            off[j][i] = off[i][j];
        }
    }
    QuadraticForm::new(u[..n].to_vec(), off)
}

// coefficient row of Q(y) in the unknowns
fn q_row(n: usize, y: &[i64]) -> Vec<i64> {
    let mut r = vec![0; n + n * (n - 1) / 2];
    for i in 0..n {
        r[i] = y[i] * y[i];
        for j in i + 1..n {
            r[off_index(n, i, j)] = y[i] * y[j];
        }
    }
    r
}

fn sub_row(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Linear constraints on `(diag, offdiag)` cutting out the invariant forms.
///
/// Invariance under each simple reflection is imposed through `Q(s y) = Q(y)`
/// for `y` ranging over the basis vectors and their pairwise sums. Coroots of
/// equal length are required to take equal values, which matters when the
/// root system is reducible (`D_2`); for `GL_n` the form is also required to
/// be decomposable.
fn invariance_constraints(datum: &RootDatum) -> Vec<Vec<i64>> {
    let n = datum.rank;
    let mut probes: Vec<Vector> = Vec::new();
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        probes.push(e.clone());
        for j in i + 1..n {
            let mut f = e.clone();
            f[j] = 1;
            probes.push(f);
        }
    }
    let mut rows = Vec::new();
    for &a in &datum.simple {
        for y in &probes {
            let sy = datum.reflect_coweight(a, y);
            rows.push(sub_row(&q_row(n, &sy), &q_row(n, y)));
        }
    }
    for class in datum.coroot_length_classes().values() {
        let first = q_row(n, &datum.coroots[class[0]]);
        for &c in &class[1..] {
            rows.push(sub_row(&q_row(n, &datum.coroots[c]), &first));
        }
    }
    if datum.family == Family::A {
        for i in 0..n {
            for j in i + 1..n {
                let mut r = vec![0; n + n * (n - 1) / 2];
                r[off_index(n, i, j)] = 1;
                rows.push(r);
            }
        }
    }
    rows
}

/// Integral basis of the rational nullspace of `rows`, one primitive vector per free column.
fn nullspace(rows: &[Vec<i64>], m: usize) -> Vec<Vec<i64>> {
    let mut a: Vec<Vec<Rational64>> =
        rows.iter().map(|r| r.iter().map(|&x| Rational64::from_integer(x)).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= inv;
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c];
                for j in 0..m {
                    let v = a[r][j] * f;
                    a[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..m).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational64::zero(); m];
            v[f] = Rational64::from_integer(1);
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[i][f];
            }
            let l = v.iter().fold(1i64, |acc, x| acc.lcm(x.denom()));
            let ints: Vec<i64> = v.iter().map(|x| (x * l).to_integer()).collect();
            let g = ints.iter().fold(0i64, |acc, x| acc.gcd(x));
            ints.iter().map(|x| x / g).collect()
        })
        .collect()
}

/// A basis of the space of invariant forms under the constraints above.
pub fn invariant_form_space(datum: &RootDatum) -> Vec<QuadraticForm> {
    let n = datum.rank;
    let m = n + n * (n - 1) / 2;
    nullspace(&invariance_constraints(datum), m).iter().map(|u| form_from_unknowns(n, u)).collect()
}

/// Indices of the short coroots (coroots of minimal Euclidean length).
pub fn short_coroots(datum: &RootDatum) -> Vec<usize> {
    datum.coroot_length_classes().into_iter().next().map(|(_, v)| v).unwrap_or_default()
}

/// The unique invariant form taking the value `a` on short coroots.
///
/// For `GL_n` the parameter is `Q(e_i)` instead (so `Q(e_i - e_j) = 2a`).
pub fn weyl_invariant_form(datum: &RootDatum, a: i64) -> Result<QuadraticForm, QFormError> {
    let space = invariant_form_space(datum);
    if space.len() != 1 {
        return Err(QFormError::NotUnique(space.len()));
    }
    let mut gen = space.into_iter().next().unwrap();
    let probe: Vector = if datum.family == Family::A {
        let mut e = vec![0; datum.rank];
        e[0] = 1;
        e
    } else {
        datum.coroots[short_coroots(datum)[0]].clone()
    };
    let mut base = gen.q(&probe);
    if base < 0 {
        gen = gen.scaled(-1);
        base = -base;
    }
    if a % base != 0 {
        return Err(QFormError::ParityViolation { family: datum.family, a });
    }
    Ok(gen.scaled(a / base))
}

/// The `GL_n` form `p sum y_i^2 + q sum_{i<j} y_i y_j`.
pub fn gl_form(rank: usize, p: i64, q: i64) -> QuadraticForm {
    let mut off = vec![vec![q; rank]; rank];
    for (i, row) in off.iter_mut().enumerate() {
        row[i] = 0;
    }
    QuadraticForm::new(vec![p; rank], off)
}

/// True iff `Q` is preserved by every element of the Weyl group.
pub fn is_weyl_invariant(datum: &RootDatum, q: &QuadraticForm) -> bool {
    let n = datum.rank;
    datum.weyl_group().iter().all(|w| {
        (0..n).all(|i| {
            q.q(&w[i]) == q.diag[i] && (i + 1..n).all(|j| q.bilinear(&w[i], &w[j]) == q.offdiag[i][j])
        })
    })
}

/// The coroot used for `n_Q`: `e_1 - e_2` in the Siegel Levi, or the unique
/// positive coroot in rank one.
pub fn siegel_coroot(datum: &RootDatum) -> Vector {
    if datum.rank >= 2 {
        let mut v = vec![0; datum.rank];
        v[0] = 1;
        v[1] = -1;
        v
    } else {
        datum.coroots[0].clone()
    }
}

/// `n_Q = n / gcd(n, Q(alpha^vee))` for a coroot in the Siegel parabolic.
pub fn compute_nq(n: i64, q: &QuadraticForm, datum: &RootDatum) -> i64 {
    assert!(n >= 1);
    let c = siegel_coroot(datum);
    let v = q.q(&c);
    if datum.rank >= 2 {
        assert!(v % 2 == 0, "Q on a Siegel coroot is even");
    }
    n / n.gcd(&v.abs())
}

/// `n_Q = n / gcd(n, 2a)` for the rank one unitary or `GL_1` case.
pub fn compute_nq_rank_one(n: i64, a: i64) -> i64 {
    n / n.gcd(&(2 * a).abs())
}

/// Coroot length classes as `(squared length, count)`, for reports.
pub fn coroot_norms(datum: &RootDatum) -> Vec<(i64, usize)> {
    datum.coroot_length_classes().into_iter().map(|(k, v)| (k, v.len())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::build_root_datum;

    #[test]
    fn solver_examples() {
        let c2 = build_root_datum(Family::C, 2).unwrap();
        let q = weyl_invariant_form(&c2, 1).unwrap();
        assert_eq!(q, QuadraticForm::diagonal(vec![1, 1]));
        assert_eq!(q.q(&[1, -1]), 2);
        let d3 = build_root_datum(Family::D, 3).unwrap();
        assert_eq!(weyl_invariant_form(&d3, 2).unwrap(), QuadraticForm::diagonal(vec![1, 1, 1]));
        let b2 = build_root_datum(Family::B, 2).unwrap();
        assert_eq!(weyl_invariant_form(&b2, 1), Err(QFormError::ParityViolation { family: Family::B, a: 1 }));
        let a2 = build_root_datum(Family::A, 2).unwrap();
        let q = weyl_invariant_form(&a2, 3).unwrap();
        assert_eq!(q, QuadraticForm::diagonal(vec![3, 3, 3]));
        assert_eq!(q.q(&[1, -1, 0]), 6);
    }

    #[test]
    fn d2_needs_the_length_constraint() {
        // without equal values on the two orthogonal factors the space is two dimensional
        let d2 = build_root_datum(Family::D, 2).unwrap();
        let n = 2;
        let rows: Vec<Vec<i64>> = d2
            .simple
            .iter()
            .flat_map(|&a| {
                [vec![1, 0], vec![0, 1], vec![1, 1]]
                    .into_iter()
                    .map(move |y| (a, y))
            })
            .map(|(a, y)| sub_row(&q_row(n, &d2.reflect_coweight(a, &y)), &q_row(n, &y)))
            .collect();
        assert_eq!(nullspace(&rows, 3).len(), 2);
        assert_eq!(invariant_form_space(&d2).len(), 1);
    }

    #[test]
    fn eval_examples() {
        let q = QuadraticForm::diagonal(vec![1, 1]);
        assert_eq!(q.eval_q(&[1, -1]), Ok(2));
        assert_eq!(q.eval_b(&[1, 0], &[0, 1]), Ok(0));
        assert!(q.eval_q(&[1]).is_err());
        let g = gl_form(2, 1, 1);
        for y in [[1, 2], [-3, 5], [0, 7]] {
            assert_eq!(g.bilinear(&y, &y), 2 * g.q(&y));
        }
    }

    #[test]
    fn nq_examples() {
        let c2 = build_root_datum(Family::C, 2).unwrap();
        let q = weyl_invariant_form(&c2, 1).unwrap();
        assert_eq!(compute_nq(4, &q, &c2), 2);
        assert_eq!(compute_nq(3, &q, &c2), 3);
        assert_eq!(compute_nq_rank_one(4, 1), 2);
        let c1 = build_root_datum(Family::C, 1).unwrap();
        let q1 = weyl_invariant_form(&c1, 1).unwrap();
        assert_eq!(compute_nq(2, &q1, &c1), 2);
    }

    #[test]
    fn decomposability() {
        assert!(is_decomposable(&QuadraticForm::diagonal(vec![1, 2, 3]), &[vec![0], vec![1, 2]]));
        assert!(!is_decomposable(&gl_form(2, 1, 1), &[vec![0], vec![1]]));
        let q = QuadraticForm::diagonal(vec![1, 1]);
        let sq = QuadraticForm::direct_sum(&[q.clone(), q]);
        assert!(is_decomposable(&sq, &[vec![0, 1], vec![2, 3]]));
    }
}
