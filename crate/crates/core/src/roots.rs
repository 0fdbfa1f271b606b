//! Classical root data, Weyl group actions, Chevalley signs and (*)-decompositions.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::lattice::{IntMatrix, Lattice, LatticeHom, Vector};

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum RootError {
    #[error("unsupported rank {n} for family {family}")]
    UnsupportedRank { family: Family, n: usize },
    #[error("conjugate of a root element is not a root element: alpha={alpha:?}, beta={beta:?}")]
    RealizationMismatch { alpha: Vector, beta: Vector },
    #[error("{0:?} is not a coroot")]
    NotACoroot(Vector),
    #[error("no (*)-decomposition of {0:?}")]
    NoDecomposition(Vector),
}

/// Classical families. `A(n)` is `GL_{n+1}`, `B(n)` is `SO_{2n+1}`, `C(n)` is
/// `Sp_{2n}` and `D(n)` is `SO_{2n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum Family {
    A,
    B,
    C,
    D,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "A" | "a" | "GL" => Ok(Family::A),
            "B" | "b" => Ok(Family::B),
            "C" | "c" | "Sp" => Ok(Family::C),
            "D" | "d" => Ok(Family::D),
            _ => Err(format!("unknown family {s:?}")),
        }
    }
}

/// Root datum `(X, roots; Y, coroots)` with `X = Y = Z^rank` and the standard pairing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootDatum {
    pub family: Family,
    /// The index in the family name, e.g. 2 for `C_2` or for `A_2 = GL_3`.
    pub n: usize,
    pub rank: usize,
    pub roots: Vec<Vector>,
    pub coroots: Vec<Vector>,
    /// Indices into `roots` of the simple roots, in Bourbaki order.
    pub simple: Vec<usize>,
    /// Number of positive roots; `roots[..num_positive]` are the positive ones.
    pub num_positive: usize,
    #[serde(skip)]
    root_lookup: HashMap<Vector, usize>,
    #[serde(skip)]
    coroot_lookup: HashMap<Vector, usize>,
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn unit(rank: usize, i: usize, c: i64) -> Vector {
    let mut v = vec![0; rank];
    v[i] = c;
    v
}

fn combo(rank: usize, i: usize, ci: i64, j: usize, cj: i64) -> Vector {
    let mut v = vec![0; rank];
    v[i] += ci;
    v[j] += cj;
    v
}

pub fn neg(v: &[i64]) -> Vector {
    v.iter().map(|x| -x).collect()
}

pub fn add(a: &[i64], b: &[i64]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[i64], b: &[i64]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[i64], c: i64) -> Vector {
    a.iter().map(|x| x * c).collect()
}

/// Builds the root datum of a classical family in standard coordinates.
pub fn build_root_datum(family: Family, n: usize) -> Result<RootDatum, RootError> {
    let ok = match family {
        Family::A | Family::B | Family::C => n >= 1,
        Family::D => n >= 2,
    };
    if !ok {
        return Err(RootError::UnsupportedRank { family, n });
    }
    let rank = if family == Family::A { n + 1 } else { n };
    let mut pos: Vec<(Vector, Vector)> = Vec::new();
    for i in 0..rank {
        for j in i + 1..rank {
            let r = combo(rank, i, 1, j, -1);
            pos.push((r.clone(), r));
            if family != Family::A {
                let r = combo(rank, i, 1, j, 1);
                pos.push((r.clone(), r));
            }
        }
    }
    for i in 0..rank {
        match family {
            Family::B => pos.push((unit(rank, i, 1), unit(rank, i, 2))),
            Family::C => pos.push((unit(rank, i, 2), unit(rank, i, 1))),
            _ => {}
        }
    }
    let mut simple_roots: Vec<Vector> = (0..rank - 1).map(|i| combo(rank, i, 1, i + 1, -1)).collect();
    match family {
        Family::A => simple_roots.truncate(n),
        Family::B => simple_roots.push(unit(rank, n - 1, 1)),
        Family::C => simple_roots.push(unit(rank, n - 1, 2)),
        Family::D => simple_roots.push(combo(rank, n - 2, 1, n - 1, 1)),
    }
    let num_positive = pos.len();
    let mut roots: Vec<Vector> = pos.iter().map(|p| p.0.clone()).collect();
    let mut coroots: Vec<Vector> = pos.iter().map(|p| p.1.clone()).collect();
    roots.extend(pos.iter().map(|p| neg(&p.0)));
    coroots.extend(pos.iter().map(|p| neg(&p.1)));
    let simple = simple_roots.iter().map(|s| roots.iter().position(|r| r == s).unwrap()).collect();
    let root_lookup = roots.iter().cloned().zip(0..).collect();
    let coroot_lookup = coroots.iter().cloned().zip(0..).collect();
    Ok(RootDatum { family, n, rank, roots, coroots, simple, num_positive, root_lookup, coroot_lookup })
}

/// A Weyl group element as a word in simple reflections, together with its matrix on `Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylElement {
    pub word: Vec<usize>,
    pub action: IntMatrix,
}

impl RootDatum {
    pub fn lattice(&self) -> Lattice {
        Lattice::new(self.rank)
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn root_index(&self, r: &[i64]) -> Option<usize> {
        if self.root_lookup.is_empty() {
            return self.roots.iter().position(|x| x == r);
        }
        self.root_lookup.get(r).copied()
    }

    pub fn coroot_index(&self, c: &[i64]) -> Option<usize> {
        if self.coroot_lookup.is_empty() {
            return self.coroots.iter().position(|x| x == c);
        }
        self.coroot_lookup.get(c).copied()
    }

    pub fn is_coroot(&self, c: &[i64]) -> bool {
        self.coroot_index(c).is_some()
    }

    pub fn is_positive(&self, idx: usize) -> bool {
        idx < self.num_positive
    }

    /// Index of the root `-roots[idx]`.
    pub fn negative_of(&self, idx: usize) -> usize {
        if idx < self.num_positive {
            idx + self.num_positive
        } else {
            idx - self.num_positive
        }
    }

    pub fn simple_coroots(&self) -> Vec<Vector> {
        self.simple.iter().map(|&i| self.coroots[i].clone()).collect()
    }

    /// The inclusion of the coroot lattice, with the simple coroots as basis.
    pub fn sc_inclusion(&self) -> LatticeHom {
        LatticeHom::from_images(self.lattice(), &self.simple_coroots())
    }

    /// `s_alpha(y) = y - <alpha, y> alpha^vee` on `Y`.
    pub fn reflect_coweight(&self, alpha: usize, y: &[i64]) -> Vector {
        let c = dot(&self.roots[alpha], y);
        sub(y, &scale(&self.coroots[alpha], c))
    }

    /// `s_alpha(x) = x - <x, alpha^vee> alpha` on `X`.
    pub fn reflect_weight(&self, alpha: usize, x: &[i64]) -> Vector {
        let c = dot(x, &self.coroots[alpha]);
        sub(x, &scale(&self.roots[alpha], c))
    }

    /// Index of the root `s_alpha(beta)`.
    pub fn reflect_root(&self, alpha: usize, beta: usize) -> usize {
        let r = self.reflect_weight(alpha, &self.roots[beta]);
        self.root_index(&r).expect("reflections permute roots")
    }

    /// The matrix of the i-th simple reflection on `Y`.
    pub fn simple_reflection(&self, i: usize) -> IntMatrix {
        let a = self.simple[i];
        let cols: Vec<Vector> = (0..self.rank).map(|j| self.reflect_coweight(a, &unit(self.rank, j, 1))).collect();
        IntMatrix::from_columns(self.rank, &cols)
    }

    /// The element `s_{w[0]} s_{w[1]} ...`.
    pub fn weyl_element(&self, word: &[usize]) -> WeylElement {
        let action = word
            .iter()
            .fold(IntMatrix::identity(self.rank), |m, &i| m.mul(&self.simple_reflection(i)));
        WeylElement { word: word.to_vec(), action }
    }

    /// Orbit of a vector of `Y` under the Weyl group.
    pub fn weyl_orbit(&self, y: &[i64]) -> Vec<Vector> {
        let mut seen: HashSet<Vector> = HashSet::new();
        let mut queue = VecDeque::from([y.to_vec()]);
        seen.insert(y.to_vec());
        let mut out = Vec::new();
        while let Some(v) = queue.pop_front() {
            for &a in &self.simple {
                let w = self.reflect_coweight(a, &v);
                if seen.insert(w.clone()) {
                    queue.push_back(w);
                }
            }
            out.push(v);
        }
        out
    }

    /// Every element of the Weyl group, each given by the images of the basis of `Y`.
    pub fn weyl_group(&self) -> Vec<Vec<Vector>> {
        let start: Vec<Vector> = (0..self.rank).map(|i| unit(self.rank, i, 1)).collect();
        let mut seen: HashSet<Vec<Vector>> = HashSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        let mut out = Vec::new();
        while let Some(w) = queue.pop_front() {
            for &a in &self.simple {
                let next: Vec<Vector> = w.iter().map(|y| self.reflect_coweight(a, y)).collect();
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
            out.push(w);
        }
        out
    }

    /// Coordinates of `y` in the simple coroots, if `y` lies in their span.
    pub fn simple_coroot_coords(&self, y: &[i64]) -> Option<Vec<i64>> {
        let cols = self.simple_coroots();
        let sol = solve_rational(&cols, y)?;
        sol.iter().map(|c| c.is_integer().then(|| c.to_integer())).collect()
    }

    /// Number of positive roots of each length class, keyed by `<alpha, alpha>`-style norm of the coroot.
    pub fn coroot_length_classes(&self) -> BTreeMap<i64, Vec<usize>> {
        let mut m: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, c) in self.coroots.iter().enumerate() {
            m.entry(dot(c, c)).or_default().push(i);
        }
        m
    }
}

pub fn weyl_act(w: &WeylElement, y: &[i64]) -> Vector {
    w.action.apply(y)
}

// Unique solution of sum_i x_i cols[i] = y over Q, if any.
fn solve_rational(cols: &[Vector], y: &[i64]) -> Option<Vec<Rational64>> {
    let rows = y.len();
    let n = cols.len();
    let mut m: Vec<Vec<Rational64>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Rational64> = cols.iter().map(|c| Rational64::from_integer(c[r])).collect();
            row.push(Rational64::from_integer(y[r]));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c];
                for j in 0..=n {
                    let v = m[r][j] * f;
                    m[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if (r..rows).any(|i| !m[i][n].is_zero()) {
        return None;
    }
    let mut x = vec![Rational64::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][n];
    }
    Some(x)
}

/// A coroot written as an ordered sum of simple coroots with all prefix sums coroots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarDecomposition {
    pub coroot: Vector,
    /// Indices into the simple system, in the order they are added.
    pub summands: Vec<usize>,
    /// `-1` when the coroot is negative and the summands are negated simple coroots.
    pub sign: i64,
}

impl StarDecomposition {
    pub fn prefix_sums(&self, datum: &RootDatum) -> Vec<Vector> {
        let simple = datum.simple_coroots();
        let mut acc = vec![0; datum.rank];
        self.summands
            .iter()
            .map(|&i| {
                acc = add(&acc, &scale(&simple[i], self.sign));
                acc.clone()
            })
            .collect()
    }
}

/// Every (*)-decomposition of a coroot, in lexicographic order of summands.
pub fn all_star_decompositions(datum: &RootDatum, coroot: &[i64]) -> Result<Vec<StarDecomposition>, RootError> {
    let idx = datum.coroot_index(coroot).ok_or_else(|| RootError::NotACoroot(coroot.to_vec()))?;
    let sign = if datum.is_positive(idx) { 1 } else { -1 };
    let target = scale(coroot, sign);
    let coords = datum.simple_coroot_coords(&target).ok_or_else(|| RootError::NoDecomposition(coroot.to_vec()))?;
    let simple = datum.simple_coroots();
    let mut out = Vec::new();
    let mut path = Vec::new();
    let mut used = vec![0i64; simple.len()];
    fn dfs(
        datum: &RootDatum,
        simple: &[Vector],
        coords: &[i64],
        current: Vector,
        used: &mut Vec<i64>,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if used.as_slice() == coords {
            out.push(path.clone());
            return;
        }
        for i in 0..simple.len() {
            if used[i] >= coords[i] {
                continue;
            }
            let next = add(&current, &simple[i]);
            if !datum.is_coroot(&next) {
                continue;
            }
            used[i] += 1;
            path.push(i);
            dfs(datum, simple, coords, next, used, path, out);
            path.pop();
            used[i] -= 1;
        }
    }
    dfs(datum, &simple, &coords, vec![0; datum.rank], &mut used, &mut path, &mut out);
    if out.is_empty() {
        return Err(RootError::NoDecomposition(coroot.to_vec()));
    }
    Ok(out
        .into_iter()
        .map(|summands| StarDecomposition { coroot: coroot.to_vec(), summands, sign })
        .collect())
}

/// One (*)-decomposition, the lexicographically first.
pub fn star_decompose(datum: &RootDatum, coroot: &[i64]) -> Result<StarDecomposition, RootError> {
    Ok(all_star_decompositions(datum, coroot)?.swap_remove(0))
}

// ---------------------------------------------------------------------------
// Matrix realization over Q, with sparse matrices.

#[derive(Clone, Debug, PartialEq, Eq, Default)]
struct SMat {
    e: BTreeMap<(usize, usize), Rational64>,
}

impl SMat {
    fn identity(n: usize) -> Self {
        SMat { e: (0..n).map(|i| ((i, i), Rational64::one())).collect() }
    }
    fn put(&mut self, i: usize, j: usize, x: Rational64) {
        let v = self.e.entry((i, j)).or_insert_with(Rational64::zero);
        *v += x;
        if v.is_zero() {
            self.e.remove(&(i, j));
        }
    }
    fn mul(&self, o: &SMat) -> SMat {
        let mut rows: HashMap<usize, Vec<(usize, Rational64)>> = HashMap::new();
        for (&(k, j), &x) in &o.e {
            rows.entry(k).or_default().push((j, x));
        }
        let mut out = SMat::default();
        for (&(i, k), &x) in &self.e {
            if let Some(r) = rows.get(&k) {
                for &(j, y) in r {
                    out.put(i, j, x * y);
                }
            }
        }
        out
    }
    fn add(&self, o: &SMat) -> SMat {
        let mut out = self.clone();
        for (&(i, j), &x) in &o.e {
            out.put(i, j, x);
        }
        out
    }
    fn scale(&self, c: Rational64) -> SMat {
        if c.is_zero() {
            return SMat::default();
        }
        SMat { e: self.e.iter().map(|(&k, &x)| (k, x * c)).collect() }
    }
    fn is_zero(&self) -> bool {
        self.e.is_empty()
    }
    fn bracket(&self, o: &SMat) -> SMat {
        self.mul(o).add(&o.mul(self).scale(-Rational64::one()))
    }
    /// exp of a nilpotent matrix.
    fn exp_nilpotent(&self, n: usize) -> SMat {
        let mut out = SMat::identity(n);
        let mut term = SMat::identity(n);
        for k in 1..=n {
            term = term.mul(self).scale(Rational64::new(1, k as i64));
            if term.is_zero() {
                break;
            }
            out = out.add(&term);
        }
        out
    }
    // c with self == c * other, if any
    fn ratio_to(&self, other: &SMat) -> Option<Rational64> {
        let (k, y) = other.e.iter().next()?;
        let c = *self.e.get(k)? / y;
        (self.e.len() == other.e.len() && other.e.iter().all(|(k, y)| self.e.get(k) == Some(&(c * y)))).then_some(c)
    }
}

/// A signed permutation matrix: column `a` has the entry `sign[a]` in row `perm[a]`.
#[derive(Clone, Debug)]
struct Monomial {
    perm: Vec<usize>,
    sign: Vec<Rational64>,
}

impl Monomial {
    fn from_sparse(m: &SMat, n: usize) -> Option<Self> {
        let mut perm = vec![usize::MAX; n];
        let mut sign = vec![Rational64::zero(); n];
        for (&(i, j), &x) in &m.e {
            if perm[j] != usize::MAX {
                return None;
            }
            perm[j] = i;
            sign[j] = x;
        }
        perm.iter().all(|&p| p != usize::MAX).then_some(Monomial { perm, sign })
    }
    /// `M X M^{-1}`.
    fn conj(&self, x: &SMat) -> SMat {
        SMat {
            e: x.e.iter().map(|(&(a, b), &v)| ((self.perm[a], self.perm[b]), self.sign[a] * v / self.sign[b])).collect(),
        }
    }
}

/// The standard matrix realization of a classical group, pinning a Chevalley system.
struct Realization {
    dim: usize,
    /// Torus weight of each coordinate.
    weights: Vec<Vector>,
    /// `form_sign[a]` is the entry of the antidiagonal form in column `a`.
    form_sign: Option<Vec<i64>>,
    /// Root vector for every root, indexed like `RootDatum::roots`.
    root_vectors: Vec<SMat>,
}

impl Realization {
    fn new(datum: &RootDatum) -> Result<Self, RootError> {
        let n = datum.n;
        let (dim, weights): (usize, Vec<Vector>) = match datum.family {
            Family::A => (datum.rank, (0..datum.rank).map(|i| unit(datum.rank, i, 1)).collect()),
            Family::C | Family::D => {
                let w = (0..2 * n)
                    .map(|a| if a < n { unit(n, a, 1) } else { unit(n, 2 * n - 1 - a, -1) })
                    .collect();
                (2 * n, w)
            }
            Family::B => {
                let w = (0..2 * n + 1)
                    .map(|a| {
                        if a < n {
                            unit(n, a, 1)
                        } else if a == n {
                            vec![0; n]
                        } else {
                            unit(n, 2 * n - a, -1)
                        }
                    })
                    .collect();
                (2 * n + 1, w)
            }
        };
        // J[dim-1-a][a]
        let form_sign = match datum.family {
            Family::A => None,
            Family::C => Some((0..dim).map(|a| if dim - 1 - a < n { 1 } else { -1 }).collect()),
            Family::B | Family::D => Some(vec![1; dim]),
        };
        let mut r = Realization { dim, weights, form_sign, root_vectors: Vec::new() };
        let mut vecs: Vec<Option<SMat>> = vec![None; datum.num_roots()];
        let mut lifts: HashMap<usize, Monomial> = HashMap::new();
        // simple root vectors from the matrix units, the rest transported by
        // the Tits lifts of simple reflections so all of them lie in one
        // Chevalley lattice
        let mut queue = VecDeque::new();
        for &s in &datum.simple {
            vecs[s] = Some(r.root_space_vector(&datum.roots[s]));
            r.set_negative(datum, s, &mut vecs)?;
            let x = vecs[s].clone().unwrap();
            let y = vecs[datum.negative_of(s)].clone().unwrap();
            lifts.insert(s, r.lift_from(&x, &y, datum, s)?);
            queue.push_back(s);
        }
        while let Some(b) = queue.pop_front() {
            for &a in &datum.simple {
                let t = datum.reflect_root(a, b);
                if !datum.is_positive(t) || vecs[t].is_some() {
                    continue;
                }
                vecs[t] = Some(lifts[&a].conj(vecs[b].as_ref().unwrap()));
                r.set_negative(datum, t, &mut vecs)?;
                queue.push_back(t);
            }
        }
        r.root_vectors = vecs.into_iter().map(|v| v.expect("every root is conjugate to a simple root")).collect();
        Ok(r)
    }

    // X_{-beta} with [X_beta, X_{-beta}] = H_beta
    fn set_negative(&self, datum: &RootDatum, b: usize, vecs: &mut [Option<SMat>]) -> Result<(), RootError> {
        let nb = datum.negative_of(b);
        let x = vecs[b].as_ref().unwrap();
        let z = self.root_space_vector(&datum.roots[nb]);
        let h = self.coroot_matrix(&datum.coroots[b]);
        let lambda = x.bracket(&z).ratio_to(&h).ok_or_else(|| RootError::RealizationMismatch {
            alpha: datum.roots[b].clone(),
            beta: datum.roots[nb].clone(),
        })?;
        vecs[nb] = Some(z.scale(lambda.recip()));
        Ok(())
    }

    fn root_space_vector(&self, beta: &[i64]) -> SMat {
        // weights are 0 or +-e_i, so beta determines the candidate rows and columns
        let rows: Vec<usize> = (0..self.dim).filter(|&a| self.weights[a].iter().zip(beta).all(|(w, b)| *w == 0 || w.signum() == b.signum())).collect();
        for &a in &rows {
            for b in 0..self.dim {
                if sub(&self.weights[a], &self.weights[b]) != beta {
                    continue;
                }
                let mut x = SMat::default();
                x.put(a, b, Rational64::one());
                if let Some(j) = &self.form_sign {
                    // Y - J Y^t J^{-1}
                    let (ab, bb) = (self.dim - 1 - a, self.dim - 1 - b);
                    x.put(bb, ab, Rational64::from_integer(-j[b] * j[a]));
                }
                if !x.is_zero() {
                    return x;
                }
            }
        }
        panic!("no root vector for {beta:?}")
    }

    fn coroot_matrix(&self, c: &[i64]) -> SMat {
        let mut h = SMat::default();
        for a in 0..self.dim {
            h.put(a, a, Rational64::from_integer(dot(&self.weights[a], c)));
        }
        h
    }

    /// `n_alpha(1) = x_alpha(1) x_{-alpha}(-1) x_alpha(1)`.
    fn lift_from(&self, x: &SMat, y: &SMat, datum: &RootDatum, alpha: usize) -> Result<Monomial, RootError> {
        let xa = x.exp_nilpotent(self.dim);
        let ya = y.scale(-Rational64::one()).exp_nilpotent(self.dim);
        let m = xa.mul(&ya).mul(&xa);
        Monomial::from_sparse(&m, self.dim).ok_or_else(|| RootError::RealizationMismatch {
            alpha: datum.roots[alpha].clone(),
            beta: datum.roots[alpha].clone(),
        })
    }

    fn lift(&self, datum: &RootDatum, alpha: usize) -> Result<Monomial, RootError> {
        let na = datum.negative_of(alpha);
        self.lift_from(&self.root_vectors[alpha], &self.root_vectors[na], datum, alpha)
    }

    /// `epsilon_{alpha,beta}` for every `beta`, from `Ad(n_alpha) X_beta = epsilon X_{s_alpha beta}`,
    /// which is the same as `n_alpha x_beta(t) n_alpha^{-1} = x_{s_alpha beta}(epsilon t)`.
    fn sign_row(&self, datum: &RootDatum, alpha: usize) -> Result<Vec<i8>, RootError> {
        let w = self.lift(datum, alpha)?;
        (0..datum.num_roots())
            .map(|beta| {
                let target = datum.reflect_root(alpha, beta);
                let c = w.conj(&self.root_vectors[beta]).ratio_to(&self.root_vectors[target]);
                match c {
                    Some(c) if c == Rational64::one() => Ok(1),
                    Some(c) if c == -Rational64::one() => Ok(-1),
                    _ => Err(RootError::RealizationMismatch {
                        alpha: datum.roots[alpha].clone(),
                        beta: datum.roots[beta].clone(),
                    }),
                }
            })
            .collect()
    }
}

/// Signs `epsilon_{alpha,beta}` read off the standard matrix realization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChevalleySignTable {
    /// `signs[alpha][beta]`, indexed like the datum's roots.
    pub signs: Vec<Vec<i8>>,
}

impl ChevalleySignTable {
    pub fn get(&self, alpha: usize, beta: usize) -> i64 {
        self.signs[alpha][beta] as i64
    }
}

impl Serialize for ChevalleySignTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.signs.serialize(s)
    }
}

/// Computes `epsilon_{alpha,beta}` from `n_alpha(1) x_beta(t) n_alpha(1)^{-1} = x_{s_alpha beta}(epsilon t)`.
pub fn chevalley_signs(datum: &RootDatum) -> Result<ChevalleySignTable, RootError> {
    let r = Realization::new(datum)?;
    let signs = (0..datum.num_roots()).map(|a| r.sign_row(datum, a)).collect::<Result<_, _>>()?;
    Ok(ChevalleySignTable { signs })
}

/// Signs `epsilon_{alpha,beta}` for simple `alpha` only; row `i` belongs to `datum.simple[i]`.
/// Much cheaper than the full table for large data.
pub fn chevalley_signs_simple(datum: &RootDatum) -> Result<Vec<Vec<i8>>, RootError> {
    let r = Realization::new(datum)?;
    datum.simple.iter().map(|&a| r.sign_row(datum, a)).collect()
}

/// Cached simple-root sign rows, keyed by family and rank.
pub fn chevalley_signs_simple_cached(datum: &RootDatum) -> Vec<Vec<i8>> {
    use std::sync::{Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<HashMap<(Family, usize), Vec<Vec<i8>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&(datum.family, datum.n)) {
        return t.clone();
    }
    let t = chevalley_signs_simple(datum).expect("standard realization is a Chevalley system");
    cache.lock().unwrap().insert((datum.family, datum.n), t.clone());
    t
}

/// Cached sign tables, keyed by family and rank.
pub fn chevalley_signs_cached(datum: &RootDatum) -> ChevalleySignTable {
    use std::sync::{Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<HashMap<(Family, usize), ChevalleySignTable>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&(datum.family, datum.n)) {
        return t.clone();
    }
    let t = chevalley_signs(datum).expect("standard realization is a Chevalley system");
    cache.lock().unwrap().insert((datum.family, datum.n), t.clone());
    t
}


#[cfg(test)]
mod tests {
    use super::*;

    fn classical_count(f: Family, n: usize) -> usize {
        match f {
            Family::A => n * (n + 1),
            Family::B | Family::C => 2 * n * n,
            Family::D => 2 * n * (n - 1),
        }
    }

    #[test]
    fn root_counts() {
        for f in [Family::A, Family::B, Family::C, Family::D] {
            for n in 1..=6 {
                let Ok(d) = build_root_datum(f, n) else {
                    assert_eq!((f, n), (Family::D, 1));
                    continue;
                };
                assert_eq!(d.num_roots(), classical_count(f, n), "{f}{n}");
                assert_eq!(d.simple.len(), n);
            }
        }
        let c2 = build_root_datum(Family::C, 2).unwrap();
        assert!(c2.root_index(&[2, 0]).is_some() && c2.root_index(&[-1, 1]).is_some());
        let a1 = build_root_datum(Family::A, 1).unwrap();
        assert_eq!(a1.roots, vec![vec![1, -1], vec![-1, 1]]);
    }

    #[test]
    fn datum_axioms() {
        for f in [Family::A, Family::B, Family::C, Family::D] {
            for n in 2..=6 {
                let d = build_root_datum(f, n).unwrap();
                for i in 0..d.num_roots() {
                    assert_eq!(dot(&d.roots[i], &d.coroots[i]), 2);
                    for j in 0..d.num_roots() {
                        let r = d.reflect_weight(i, &d.roots[j]);
                        let c = d.reflect_coweight(i, &d.coroots[j]);
                        let k = d.root_index(&r).expect("reflection preserves roots");
                        assert_eq!(d.coroots[k], c);
                    }
                }
                // positive roots are nonnegative combinations of simple roots
                let simple: Vec<Vector> = d.simple.iter().map(|&i| d.roots[i].clone()).collect();
                for r in &d.roots[..d.num_positive] {
                    let x = solve_rational(&simple, r).unwrap();
                    assert!(x.iter().all(|c| c.is_integer() && *c >= Rational64::zero()));
                }
            }
        }
    }

    #[test]
    fn weyl_examples() {
        let a = build_root_datum(Family::A, 1).unwrap();
        assert_eq!(weyl_act(&a.weyl_element(&[0]), &[1, 0]), vec![0, 1]);
        let c = build_root_datum(Family::C, 2).unwrap();
        // the long root 2e_2 is the second simple root; its reflection negates e_2
        assert_eq!(weyl_act(&c.weyl_element(&[1]), &[0, 1]), vec![0, -1]);
        assert_eq!(weyl_act(&c.weyl_element(&[]), &[3, 4]), vec![3, 4]);
        // orbit of e_1 in C_2 is {+-e_1, +-e_2}
        assert_eq!(c.weyl_orbit(&[1, 0]).len(), 4);
        assert_eq!(c.weyl_group().len(), 8);
        assert_eq!(build_root_datum(Family::D, 4).unwrap().weyl_group().len(), 192);
        assert_eq!(build_root_datum(Family::A, 3).unwrap().weyl_group().len(), 24);
    }

    #[test]
    fn signs_known_values() {
        let a = build_root_datum(Family::A, 1).unwrap();
        let t = chevalley_signs(&a).unwrap();
        assert_eq!(t.get(0, 0), -1);
        assert_eq!(t.get(0, 1), -1);
        for f in [Family::A, Family::B, Family::C, Family::D] {
            for n in 2..=4 {
                let d = build_root_datum(f, n).unwrap();
                let t = chevalley_signs(&d).unwrap();
                for al in 0..d.num_roots() {
                    assert_eq!(t.get(al, d.negative_of(al)), -1, "{f}{n}");
                    assert_eq!(t.get(al, al), -1);
                }
            }
        }
    }

    #[test]
    fn signs_match_group_level_conjugation() {
        // n_alpha x_beta(t) n_alpha^{-1} = x_{s_alpha beta}(eps t) at t = 1 and t = -1
        for (f, n) in [(Family::B, 2), (Family::C, 2), (Family::A, 2), (Family::D, 3)] {
            let d = build_root_datum(f, n).unwrap();
            let r = Realization::new(&d).unwrap();
            let t = chevalley_signs(&d).unwrap();
            for al in 0..d.num_roots() {
                let w = r.lift(&d, al).unwrap();
                for be in 0..d.num_roots() {
                    let target = d.reflect_root(al, be);
                    for s in [1i64, -1] {
                        let x = r.root_vectors[be].scale(Rational64::from_integer(s)).exp_nilpotent(r.dim);
                        let conj = SMat { e: x.e.iter().map(|(&(a, b), &v)| ((w.perm[a], w.perm[b]), w.sign[a] * v / w.sign[b])).collect() };
                        let eps = Rational64::from_integer(t.get(al, be) * s);
                        assert_eq!(conj, r.root_vectors[target].scale(eps).exp_nilpotent(r.dim), "{f}{n}");
                    }
                }
            }
        }
    }

    #[test]
    fn simple_rows_agree_with_full_table() {
        for (f, n) in [(Family::B, 3), (Family::C, 3), (Family::D, 4), (Family::A, 3)] {
            let d = build_root_datum(f, n).unwrap();
            let full = chevalley_signs(&d).unwrap();
            let rows = chevalley_signs_simple(&d).unwrap();
            for (i, &s) in d.simple.iter().enumerate() {
                assert_eq!(rows[i], full.signs[s]);
            }
        }
    }

    #[test]
    fn star_examples() {
        let d3 = build_root_datum(Family::D, 3).unwrap();
        let s = star_decompose(&d3, &[1, 0, -1]).unwrap();
        assert_eq!(s.summands, vec![0, 1]);
        let c2 = build_root_datum(Family::C, 2).unwrap();
        let all = all_star_decompositions(&c2, &[1, 1]).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(all[1].summands, vec![1, 0, 1]);
        assert_eq!(all[0].summands, vec![0, 1, 1]);
        assert_eq!(all[0].prefix_sums(&c2), vec![vec![1, -1], vec![1, 0], vec![1, 1]]);
        for i in 0..2 {
            let s = star_decompose(&c2, &c2.coroots[c2.simple[i]]).unwrap();
            assert_eq!(s.summands, vec![i]);
        }
    }
}

#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    fn datum() -> impl Strategy<Value = RootDatum> {
        prop_oneof![
            (1usize..=6).prop_map(|n| (Family::A, n)),
            (2usize..=6).prop_map(|n| (Family::B, n)),
            (1usize..=6).prop_map(|n| (Family::C, n)),
            (2usize..=6).prop_map(|n| (Family::D, n)),
        ]
        .prop_map(|(f, n)| build_root_datum(f, n).unwrap())
    }

    fn datum_and_word() -> impl Strategy<Value = (RootDatum, Vec<usize>)> {
        datum().prop_flat_map(|d| {
            let r = d.simple.len();
            (Just(d), prop::collection::vec(0..r, 0..12))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn weyl_words_permute_coroots_and_keep_pairings((d, word) in datum_and_word(), pick in any::<prop::sample::Index>()) {
            let w = d.weyl_element(&word);
            let i = pick.index(d.coroots.len());
            let image = weyl_act(&w, &d.coroots[i]);
            prop_assert!(d.is_coroot(&image));
            // the dual action moves roots along; pairings are preserved
            let mut root = d.roots[i].clone();
            for &s in word.iter().rev() {
                root = d.reflect_weight(d.simple[s], &root);
            }
            let j = d.root_index(&root);
            prop_assert!(j.is_some());
            prop_assert_eq!(dot(&root, &image), 2);
        }

        #[test]
        fn star_decompositions_have_coroot_prefixes(d in datum(), pick in any::<prop::sample::Index>()) {
            let i = pick.index(d.num_positive);
            if let Ok(dec) = star_decompose(&d, &d.coroots[i]) {
                let sums = dec.prefix_sums(&d);
                prop_assert!(sums.iter().all(|s| d.is_coroot(s)));
                prop_assert_eq!(sums.last().unwrap(), &d.coroots[i]);
            }
        }
    }
}
