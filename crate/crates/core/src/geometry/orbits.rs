//! Maximal isotropic subspaces of the doubled space and their `iota(G x G) N_bullet`-orbits.

use std::collections::{HashMap, HashSet, VecDeque};

use dashmap::DashSet;
use rayon::prelude::*;
use serde::Serialize;

use super::doubling::{DoublingContext, OmegaClass, OmegaClassification};
use super::groups::{closure, FormedSpace};
use super::matrix::{affine_span, intersect, FqMatrix};
use super::GeometryError;
use crate::field::GaloisField;
use crate::roots::Family;

#[derive(Clone, Copy, Debug)]
pub struct EnumerationOptions {
    /// Upper bound on the number of maximal isotropic subspaces visited.
    pub max_states: u128,
    /// Worker threads; `1` runs single-threaded, `0` uses the rayon default.
    pub jobs: usize,
    /// Upper bound on `|G|` for stabilizer computations.
    pub max_group: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions { max_states: 1_000_000, jobs: 0, max_group: 5_000 }
    }
}

/// Number of maximal isotropic subspaces of a `2d`-dimensional space; for a symmetric
/// form, of one of the two families.
pub fn grassmannian_size(space: &FormedSpace) -> u128 {
    let q = space.field.order() as u128;
    let d = (space.dim / 2) as u32;
    if space.epsilon == 1 {
        (1..=d).map(|i| q.pow(i) + 1).product()
    } else {
        (1..d).map(|i| q.pow(i) + 1).product()
    }
}

/// Maximal isotropic subspaces meeting `l` in a hyperplane.
pub fn neighbors(space: &FormedSpace, l: &FqMatrix) -> Vec<FqMatrix> {
    let f = &space.field;
    let d = l.rows;
    let mut out = Vec::new();
    let all = affine_span(&vec![0; d], &FqMatrix::identity(d), f);
    for phi in all {
        // one functional per hyperplane: first nonzero entry 1
        if phi.iter().find(|&&x| x != 0) != Some(&1) {
            continue;
        }
        let phi_m = FqMatrix::from_rows(&[phi.clone()], d);
        let h = phi_m.right_kernel(f).mul(l, f);
        let t = phi.iter().position(|&x| x != 0).unwrap();
        let w1 = l.select_rows(&[t]);
        let hp = space.perp(&h);
        let Some(r) = (0..hp.rows).find(|&r| l.vstack(&hp.select_rows(&[r])).rank(f) > d) else { continue };
        let w2 = hp.select_rows(&[r]);
        for c in f.elements() {
            let v = w2.add(&w1.scale(c, f), f);
            if space.pair(v.row(0), v.row(0)) == 0 {
                out.push(h.vstack(&v).row_space(f));
            }
        }
    }
    out
}

fn with_pool<T: Send>(jobs: usize, work: impl FnOnce() -> T + Send) -> T {
    if jobs == 0 {
        return work();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    }
}

/// All maximal isotropic subspaces reachable from `start` (the `G^box`-orbit of `start`), sorted.
pub fn maximal_isotropics(space: &FormedSpace, start: &FqMatrix, opts: &EnumerationOptions) -> Result<Vec<FqMatrix>, GeometryError> {
    let f = &space.field;
    let d = start.rows;
    // for a symmetric form the neighbours of `l` lie in the other family: walk both, keep one
    let same_family = |l: &FqMatrix| space.epsilon == 1 || (d - intersect(l, start, f).rows) % 2 == 0;
    let visited: DashSet<FqMatrix> = DashSet::new();
    visited.insert(start.clone());
    let mut frontier = vec![start.clone()];
    while !frontier.is_empty() {
        let expand = |l: &FqMatrix| -> Vec<FqMatrix> {
            neighbors(space, l).into_iter().filter(|x| visited.insert(x.clone())).collect()
        };
        frontier = if opts.jobs == 1 {
            frontier.iter().flat_map(expand).collect()
        } else {
            with_pool(opts.jobs, || frontier.par_iter().flat_map_iter(expand).collect())
        };
        if visited.len() as u128 > 2 * opts.max_states {
            return Err(GeometryError::TooLarge { states: visited.len() as u128, limit: opts.max_states });
        }
    }
    let mut out: Vec<FqMatrix> = visited.into_iter().filter(|l| same_family(l)).collect();
    out.sort();
    Ok(out)
}

/// Greedy generating set of a finite matrix group given by its elements.
pub fn generating_set(elements: &[FqMatrix], f: &GaloisField) -> Vec<FqMatrix> {
    let Some(first) = elements.first() else { return Vec::new() };
    let id = FqMatrix::identity(first.rows);
    let mut gens: Vec<FqMatrix> = Vec::new();
    let mut sub: HashSet<FqMatrix> = HashSet::from([id.clone()]);
    for u in elements {
        if sub.contains(u) {
            continue;
        }
        gens.push(u.clone());
        let span = closure(&gens, &id, usize::MAX, |a, b| a.mul(b, f)).expect("no limit");
        sub = span.into_iter().collect();
        if sub.len() == elements.len() {
            break;
        }
    }
    gens
}

/// The largest normal subgroup of `r` consisting of unipotent elements.
pub fn unipotent_core(r: &[FqMatrix], f: &GaloisField) -> Vec<FqMatrix> {
    let Some(first) = r.first() else { return Vec::new() };
    let id = FqMatrix::identity(first.rows);
    let inverses: Vec<FqMatrix> = r.iter().map(|g| g.inverse(f).expect("invertible")).collect();
    let mut good = Vec::new();
    for u in r.iter().filter(|u| **u != id && u.is_unipotent(f)) {
        let conj: Vec<FqMatrix> = r.iter().zip(&inverses).map(|(g, gi)| g.mul(u, f).mul(gi, f)).collect();
        let nc = closure(&conj, &id, r.len(), |a, b| a.mul(b, f));
        if let Ok(nc) = nc {
            if nc.iter().all(|x| x.is_unipotent(f)) {
                good.push(u.clone());
            }
        }
    }
    closure(&good, &id, r.len(), |a, b| a.mul(b, f)).expect("subgroup of r")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitClass {
    Main,
    Negligible,
    Omega1,
    Omega2,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitRecord {
    /// Basis rows of the representative `L = W^(Delta,k) gamma`.
    pub representative: Vec<Vec<u16>>,
    pub size: usize,
    pub class: OrbitClass,
    /// Order of the stabilizer of `L N_bullet` in `iota(G x G)`.
    pub stabilizer_order: usize,
    /// The stabilizer is exactly `iota(G^diamond)`.
    pub stabilizer_is_diagonal: bool,
    pub n_minus_detected: bool,
    pub n_minus_order: usize,
    pub omega: OmegaClassification,
}

#[derive(Clone, Debug, Serialize)]
pub struct DoubleCosetReport {
    pub q: u64,
    pub family: String,
    pub rank: usize,
    pub k: usize,
    pub group_order: usize,
    pub n_bullet_order: u128,
    pub grassmannian_size: usize,
    pub expected_grassmannian_size: u128,
    pub orbits: Vec<OrbitRecord>,
    /// Orbit representatives whose induced flag had repeated members.
    pub normalization_fired: usize,
}

impl DoubleCosetReport {
    pub fn sizes_partition(&self) -> bool {
        self.orbits.iter().map(|o| o.size).sum::<usize>() == self.grassmannian_size
    }

    pub fn main_orbits(&self) -> Vec<&OrbitRecord> {
        self.orbits.iter().filter(|o| o.class == OrbitClass::Main).collect()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// `N_bullet`-orbit of `l`.
fn n_bullet_orbit(l: &FqMatrix, gens: &[FqMatrix], f: &GaloisField) -> HashSet<FqMatrix> {
    let mut seen = HashSet::from([l.clone()]);
    let mut queue = VecDeque::from([l.clone()]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.mul(g, f).row_space(f);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen
}

pub fn enumerate_double_cosets(family: Family, m: usize, q: u64, k: usize, opts: &EnumerationOptions) -> Result<DoubleCosetReport, GeometryError> {
    let ctx = DoublingContext::new(family, m, q, k)?;
    let f = ctx.field().clone();
    let space = &ctx.dbl.space;
    let expected = grassmannian_size(space);
    if expected > opts.max_states {
        return Err(GeometryError::TooLarge { states: expected, limit: opts.max_states });
    }
    let group = ctx.group.elements(opts.max_group)?;
    let l0 = ctx.dbl.w_delta_k();
    let points = maximal_isotropics(space, &l0, opts)?;
    let index: HashMap<&FqMatrix, usize> = points.iter().enumerate().map(|(i, l)| (l, i)).collect();

    let id = ctx.group.identity();
    let mut actors: Vec<FqMatrix> = Vec::new();
    for g in &ctx.group.generators {
        actors.push(ctx.dbl.iota(g, &id));
        actors.push(ctx.dbl.iota(&id, g));
    }
    let nb_gens = if k >= 2 {
        let els = ctx.nb.elements(opts.max_states)?;
        generating_set(&els, &f)
    } else {
        Vec::new()
    };
    actors.extend(nb_gens.iter().cloned());

    let image_of = |l: &FqMatrix| -> Vec<usize> { actors.iter().map(|h| index[&l.mul(h, &f).row_space(&f)]).collect() };
    let images: Vec<Vec<usize>> = if opts.jobs == 1 {
        points.iter().map(image_of).collect()
    } else {
        with_pool(opts.jobs, || points.par_iter().map(image_of).collect())
    };
    let mut uf = UnionFind((0..points.len()).collect());
    for (i, imgs) in images.iter().enumerate() {
        for &j in imgs {
            uf.union(i, j);
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for i in 0..points.len() {
        let r = uf.find(i);
        let s = *slot.entry(r).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[s].push(i);
    }

    let l0_idx = index[&l0];
    let mut orbits = Vec::new();
    let mut normalization_fired = 0;
    for members in &classes {
        let rep = if members.contains(&l0_idx) { &points[l0_idx] } else { &points[members[0]] };
        let omega = ctx.classify_lagrangian(rep);
        if omega.repeats_removed {
            normalization_fired += 1;
        }
        let orbit_n = n_bullet_orbit(rep, &nb_gens, &f);
        let mut stab_pairs = 0;
        let mut all_diagonal = true;
        for g1 in &group {
            for g2 in &group {
                if orbit_n.contains(&rep.mul(&ctx.dbl.iota(g1, g2), &f).row_space(&f)) {
                    stab_pairs += 1;
                    all_diagonal &= g1 == g2;
                }
            }
        }
        let r_minus: Vec<FqMatrix> = group
            .iter()
            .filter(|g| orbit_n.contains(&rep.mul(&ctx.dbl.iota(&id, g), &f).row_space(&f)))
            .cloned()
            .collect();
        let core = unipotent_core(&r_minus, &f);
        let n_minus_detected = core.len() > 1;
        let class = match omega.class {
            OmegaClass::Omega1 => OrbitClass::Omega1,
            OmegaClass::Omega2 => OrbitClass::Omega2,
            OmegaClass::Tilde if n_minus_detected => OrbitClass::Negligible,
            OmegaClass::Tilde => OrbitClass::Main,
        };
        orbits.push(OrbitRecord {
            representative: rep.to_rows(),
            size: members.len(),
            class,
            stabilizer_order: stab_pairs,
            stabilizer_is_diagonal: all_diagonal && stab_pairs == group.len(),
            n_minus_detected,
            n_minus_order: core.len(),
            omega,
        });
    }
    Ok(DoubleCosetReport {
        q,
        family: family.to_string(),
        rank: m,
        k,
        group_order: group.len(),
        n_bullet_order: ctx.nb.order(),
        grassmannian_size: points.len(),
        expected_grassmannian_size: expected,
        orbits,
        normalization_fired,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(jobs: usize) -> EnumerationOptions {
        EnumerationOptions { jobs, ..Default::default() }
    }

    #[test]
    fn sp2_q2_two_orbits() {
        let r = enumerate_double_cosets(Family::C, 1, 2, 1, &opts(0)).unwrap();
        assert_eq!(r.grassmannian_size, 15);
        assert_eq!(r.expected_grassmannian_size, 15);
        let mut sizes: Vec<usize> = r.orbits.iter().map(|o| o.size).collect();
        sizes.sort();
        assert_eq!(sizes, vec![6, 9]);
        let main = r.main_orbits();
        assert_eq!(main.len(), 1);
        assert_eq!(main[0].size, 6);
        assert_eq!(main[0].stabilizer_order, 6);
        assert!(main[0].stabilizer_is_diagonal);
        let other = r.orbits.iter().find(|o| o.class != OrbitClass::Main).unwrap();
        assert_eq!(other.class, OrbitClass::Negligible);
        assert!(other.n_minus_detected);
    }

    #[test]
    fn sp2_q3_forty_lagrangians() {
        let r = enumerate_double_cosets(Family::C, 1, 3, 1, &opts(0)).unwrap();
        assert_eq!(r.grassmannian_size, 40);
        assert!(r.sizes_partition());
        let main = r.main_orbits();
        assert_eq!(main.len(), 1);
        assert_eq!(main[0].stabilizer_order, 24);
        assert!(r.orbits.iter().filter(|o| o.class != OrbitClass::Main).all(|o| o.n_minus_detected));
    }

    #[test]
    fn single_thread_matches_parallel() {
        let a = enumerate_double_cosets(Family::C, 1, 3, 1, &opts(1)).unwrap();
        let b = enumerate_double_cosets(Family::C, 1, 3, 1, &opts(4)).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn orthogonal_so3() {
        let r = enumerate_double_cosets(Family::B, 1, 3, 1, &opts(0)).unwrap();
        assert_eq!(r.group_order, 24);
        assert_eq!(r.grassmannian_size as u128, r.expected_grassmannian_size);
        assert!(r.sizes_partition());
        assert_eq!(r.main_orbits().len(), 1);
    }

    #[test]
    fn odd_q_complement_matches_intersection_criterion() {
        use rand::{Rng, SeedableRng};
        let ctx = DoublingContext::new(Family::C, 1, 3, 2).unwrap();
        let space = &ctx.dbl.space;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut seen = HashSet::new();
        for _ in 0..150 {
            let mut l = ctx.dbl.w_delta_k();
            for _ in 0..12 {
                let nb = neighbors(space, &l);
                l = nb[rng.gen_range(0..nb.len())].clone();
            }
            let c = ctx.classify_lagrangian(&l);
            assert_eq!(c.class == OmegaClass::Tilde, c.geometric_tilde);
            seen.insert(format!("{:?}", c.class));
        }
        assert_eq!(seen.len(), 3);
    }

    #[test]
    fn size_guard() {
        let o = EnumerationOptions { max_states: 10, ..Default::default() };
        assert!(matches!(enumerate_double_cosets(Family::C, 1, 3, 1, &o), Err(GeometryError::TooLarge { .. })));
    }
}
