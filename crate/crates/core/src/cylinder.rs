//! Finite pieces of the cylinder-measure picture: hypercomplex discrete
//! measures and their variation, coordinate marginals of measure specs, the
//! semigroup law in time, and consistency of finite projective families.
//!
//! A family is indexed by subsets of a totally ordered label set
//! `t_1 < ... < t_n`, ordered by inclusion; the projection from a larger
//! subset to a smaller one restricts coordinates.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::CCDNumber;
use crate::charfunc::char_functional;
use crate::error::{Error, Result};
use crate::kernel::{eval_density, suggest_grid};
use crate::spectral::{BlockSpec, MeasureSpec};

/// Finitely supported measure with values in `A_{r,C}`; atoms at equal
/// points are merged.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    level: u8,
    dim: usize,
    atoms: Vec<(Vec<f64>, CCDNumber)>,
}

fn point_key(x: &[f64]) -> Vec<u64> {
    // +0.0 so that -0.0 and 0.0 are one point
    x.iter().map(|v| (v + 0.0).to_bits()).collect()
}

impl DiscreteMeasure {
    pub fn new(level: u8, dim: usize, atoms: Vec<(Vec<f64>, CCDNumber)>) -> Result<Self> {
        let mut merged: Vec<(Vec<f64>, CCDNumber)> = Vec::with_capacity(atoms.len());
        let mut index: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
        for (x, w) in atoms {
            if x.len() != dim {
                return Err(Error::dim("atom coordinates", dim, x.len()));
            }
            if w.level() != level {
                return Err(Error::LevelMismatch(level, w.level()));
            }
            if !w.is_finite() || x.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("atom".into()));
            }
            match index.get(&point_key(&x)) {
                Some(&i) => merged[i].1 += &w,
                None => {
                    index.insert(point_key(&x), merged.len());
                    merged.push((x, w));
                }
            }
        }
        Ok(Self {
            level,
            dim,
            atoms: merged,
        })
    }

    pub fn level(&self) -> u8 {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[(Vec<f64>, CCDNumber)] {
        &self.atoms
    }

    pub fn total(&self) -> CCDNumber {
        let mut acc = CCDNumber::zero(self.level);
        for (_, w) in &self.atoms {
            acc += w;
        }
        acc
    }

    pub fn variation(&self) -> f64 {
        variation(self)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            level: self.level,
            dim: self.dim,
            atoms: self.atoms.iter().map(|(x, w)| (x.clone(), w.scale(s))).collect(),
        }
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &Self, s: f64) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::dim("measure dimension", self.dim, other.dim));
        }
        let atoms = self
            .atoms
            .iter()
            .cloned()
            .chain(other.atoms.iter().map(|(x, w)| (x.clone(), w.scale(s))))
            .collect();
        Self::new(self.level, self.dim, atoms)
    }

    /// Image under restriction to the given 1-based coordinates.
    pub fn pushforward(&self, coords: &[usize]) -> Result<Self> {
        let coords = normalize_coords(coords, self.dim)?;
        let atoms = self
            .atoms
            .iter()
            .map(|(x, w)| (coords.iter().map(|&c| x[c - 1]).collect(), w.clone()))
            .collect();
        Self::new(self.level, coords.len(), atoms)
    }

    /// `sum w exp(I (y, x))`.
    pub fn functional(&self, y: &[f64]) -> Result<CCDNumber> {
        if y.len() != self.dim {
            return Err(Error::dim("argument y", self.dim, y.len()));
        }
        let mut acc = CCDNumber::zero(self.level);
        for (x, w) in &self.atoms {
            let phase: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
            acc += &w.scale_complex(Complex64::new(0.0, phase).exp());
        }
        Ok(acc)
    }
}

/// `sum_k (|mu_{k,0}| + |mu_{k,1}|)` over the real components.
pub fn variation(mu: &DiscreteMeasure) -> f64 {
    mu.atoms
        .iter()
        .flat_map(|(_, w)| w.interleaved().collect::<Vec<_>>())
        .map(f64::abs)
        .sum()
}

/// Sorted, deduplicated 1-based coordinates, validated against `n`.
fn normalize_coords(coords: &[usize], n: usize) -> Result<Vec<usize>> {
    if coords.is_empty() {
        return Err(Error::EmptySubset);
    }
    if let Some(&bad) = coords.iter().find(|&&c| c == 0 || c > n) {
        return Err(Error::CoordinateOutOfRange { coord: bad, n });
    }
    let mut c = coords.to_vec();
    c.sort_unstable();
    c.dedup();
    Ok(c)
}

/// Spec of the image of `mu_{U,p}` under restriction to the given 1-based
/// coordinates: principal submatrices of each `B_j`, blocks without kept
/// coordinates dropped.
pub fn marginal(spec: &MeasureSpec, coords: &[usize]) -> Result<MeasureSpec> {
    let coords = normalize_coords(coords, spec.n())?;
    let mut blocks = Vec::new();
    for (j, block) in spec.blocks().iter().enumerate() {
        let range = spec.block_range(j);
        let local: Vec<usize> = coords
            .iter()
            .map(|c| c - 1)
            .filter(|k| range.contains(k))
            .map(|k| k - range.start)
            .collect();
        if local.is_empty() {
            continue;
        }
        let psi = local.iter().map(|&k| block.psi()[k].clone()).collect();
        blocks.push(BlockSpec::new(block.a().clone(), block.b().principal(&local), psi)?);
    }
    let p = coords.iter().map(|&c| spec.p()[c - 1].clone()).collect();
    MeasureSpec::new(blocks, p)
}

/// Deterministic probe points, uniform in `[-radius, radius]^n`.
pub fn probe_points(n: usize, count: usize, seed: u64, radius: f64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..n).map(|_| rng.gen_range(-radius..=radius)).collect())
        .collect()
}

/// `max_y || theta_t(y) theta_s(y) - theta_{t+s}(y) ||` for the
/// characteristic functionals of `mu_{Ut, pt}`.
pub fn semigroup_check(spec: &MeasureSpec, t: f64, s: f64, probes: &[Vec<f64>]) -> Result<f64> {
    for v in [t, s] {
        if !(v >= 0.0) {
            return Err(Error::NonPositiveTime(v));
        }
    }
    let devs = probes
        .par_iter()
        .map(|y| {
            let lhs = &char_functional(spec, y, t)? * &char_functional(spec, y, s)?;
            let rhs = char_functional(spec, y, t + s)?;
            Ok((&lhs - &rhs).norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(devs.into_iter().fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq)]
pub enum MemberMeasure {
    Spec(MeasureSpec),
    Discrete(DiscreteMeasure),
}

impl MemberMeasure {
    fn dim(&self) -> usize {
        match self {
            Self::Spec(s) => s.n(),
            Self::Discrete(d) => d.dim(),
        }
    }

    fn level(&self) -> u8 {
        match self {
            Self::Spec(s) => s.level(),
            Self::Discrete(d) => d.level(),
        }
    }

    /// Fourier functional at time 1.
    fn functional(&self, y: &[f64]) -> Result<CCDNumber> {
        match self {
            Self::Spec(s) => char_functional(s, y, 1.0),
            Self::Discrete(d) => d.functional(y),
        }
    }

    /// Image under restriction to positions (1-based) inside this member.
    fn project(&self, positions: &[usize]) -> Result<Self> {
        Ok(match self {
            Self::Spec(s) => Self::Spec(marginal(s, positions)?),
            Self::Discrete(d) => Self::Discrete(d.pushforward(positions)?),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyMember {
    pub name: String,
    /// Sorted 1-based indices into the label set.
    pub coords: Vec<usize>,
    pub measure: MemberMeasure,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    labels: Vec<f64>,
    members: Vec<FamilyMember>,
}

impl FamilySpec {
    pub fn new(labels: Vec<f64>, members: Vec<FamilyMember>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidFamily("no labels".into()));
        }
        if labels.iter().any(|l| !l.is_finite()) || labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidFamily(
                "labels must be finite and strictly increasing".into(),
            ));
        }
        let mut family = Self {
            labels,
            members: Vec::with_capacity(members.len()),
        };
        for m in members {
            family.push(m)?;
        }
        Ok(family)
    }

    fn push(&mut self, member: FamilyMember) -> Result<()> {
        let coords = normalize_coords(&member.coords, self.labels.len())?;
        if coords.len() != member.coords.len() || coords != member.coords {
            return Err(Error::InvalidFamily(format!(
                "member {:?}: coords must be strictly increasing",
                member.name
            )));
        }
        if member.measure.dim() != coords.len() {
            return Err(Error::InvalidFamily(format!(
                "member {:?}: measure has dimension {}, coords list {}",
                member.name,
                member.measure.dim(),
                coords.len()
            )));
        }
        if self.members.iter().any(|m| m.name == member.name) {
            return Err(Error::InvalidFamily(format!("duplicate member {:?}", member.name)));
        }
        if let Some(first) = self.members.first() {
            if first.measure.level() != member.measure.level() {
                return Err(Error::LevelMismatch(first.measure.level(), member.measure.level()));
            }
        }
        self.members.push(member);
        Ok(())
    }

    /// Members are the marginals of `spec` on the given 1-based subsets.
    pub fn from_marginals(labels: Vec<f64>, spec: &MeasureSpec, subsets: &[Vec<usize>]) -> Result<Self> {
        if labels.len() != spec.n() {
            return Err(Error::dim("labels", spec.n(), labels.len()));
        }
        let members = subsets
            .iter()
            .map(|s| {
                let coords = normalize_coords(s, spec.n())?;
                Ok(FamilyMember {
                    name: subset_name(&coords),
                    measure: MemberMeasure::Spec(marginal(spec, &coords)?),
                    coords,
                })
            })
            .collect::<Result<_>>()?;
        Self::new(labels, members)
    }

    /// Add the image of member `parent` on a subset of its coordinates.
    pub fn extend_with_marginal(&mut self, parent: &str, coords: &[usize], name: &str) -> Result<()> {
        let parent = self
            .members
            .iter()
            .find(|m| m.name == parent)
            .ok_or_else(|| Error::InvalidFamily(format!("no member {parent:?}")))?;
        let coords = normalize_coords(coords, self.labels.len())?;
        let positions = positions_in(&parent.coords, &coords).ok_or_else(|| {
            Error::InvalidFamily(format!("coords {coords:?} are not inside {:?}", parent.name))
        })?;
        let measure = parent.measure.project(&positions)?;
        self.push(FamilyMember {
            name: name.to_string(),
            coords,
            measure,
        })
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn members(&self) -> &[FamilyMember] {
        &self.members
    }

    pub fn members_mut(&mut self) -> &mut [FamilyMember] {
        &mut self.members
    }
}

fn subset_name(coords: &[usize]) -> String {
    let inner: Vec<String> = coords.iter().map(usize::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

/// 1-based positions of `small` inside `large`, if `small` is a subset.
fn positions_in(large: &[usize], small: &[usize]) -> Option<Vec<usize>> {
    small
        .iter()
        .map(|c| large.iter().position(|l| l == c).map(|p| p + 1))
        .collect()
}

#[derive(Clone, Debug)]
pub struct ConsistencyOptions {
    pub probes: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub probe_radius: f64,
}

impl Default for ConsistencyOptions {
    fn default() -> Self {
        Self {
            probes: 20,
            seed: 7,
            tolerance: 1e-9,
            probe_radius: 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairCheck {
    pub larger: String,
    pub smaller: String,
    /// Variation distance for discrete pairs, largest `|U|` or `|p|` entry
    /// difference for spec pairs, functional deviation otherwise.
    pub deviation: f64,
    pub functional_deviation: f64,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub pairs: Vec<PairCheck>,
    pub composition_triples: usize,
    pub composition_violations: usize,
    /// Per member, in family order; `None` where it is not computed.
    pub variations: Vec<Option<f64>>,
    /// `sup_l |mu^l|` over members with a computed variation.
    pub bound: Option<f64>,
    pub monotone: bool,
    pub consistent: bool,
    pub violations: Vec<String>,
}

fn max_entry_gap(a: &MeasureSpec, b: &MeasureSpec) -> f64 {
    let (ua, ub) = (a.u_matrix(), b.u_matrix());
    let mut gap: f64 = 0.0;
    for (ra, rb) in ua.iter().zip(&ub) {
        for (x, y) in ra.iter().zip(rb) {
            gap = gap.max((x - y).abs());
        }
    }
    for (x, y) in a.p().iter().zip(b.p()) {
        gap = gap.max((x - y).abs());
    }
    gap
}

/// Variation of the real-slice density of a spec member, on a suggested
/// grid; only for one and two coordinates.
fn spec_variation(spec: &MeasureSpec) -> Result<Option<f64>> {
    if spec.n() > 2 {
        return Ok(None);
    }
    let grid = suggest_grid(spec, 1.0)?;
    Ok(Some(eval_density(spec, &grid)?.variation()))
}

pub fn consistency_check(family: &FamilySpec, opts: &ConsistencyOptions) -> Result<ConsistencyReport> {
    let members = &family.members;
    let mut violations = Vec::new();

    let comparable: Vec<(usize, usize, Vec<usize>)> = (0..members.len())
        .flat_map(|k| (0..members.len()).map(move |l| (k, l)))
        .filter(|&(k, l)| k != l)
        .filter_map(|(k, l)| {
            let pos = positions_in(&members[k].coords, &members[l].coords)?;
            let proper = members[l].coords.len() < members[k].coords.len();
            // equal coordinate sets are compared once
            (proper || k < l).then_some((k, l, pos))
        })
        .collect();

    let pairs = comparable
        .par_iter()
        .map(|(k, l, pos)| {
            let (big, small) = (&members[*k], &members[*l]);
            let image = big.measure.project(pos)?;
            let probes = probe_points(pos.len(), opts.probes, opts.seed, opts.probe_radius);
            let mut functional_deviation: f64 = 0.0;
            for y in &probes {
                let d = (&image.functional(y)? - &small.measure.functional(y)?).norm();
                functional_deviation = functional_deviation.max(d);
            }
            let deviation = match (&image, &small.measure) {
                (MemberMeasure::Spec(a), MemberMeasure::Spec(b)) => max_entry_gap(a, b),
                (MemberMeasure::Discrete(a), MemberMeasure::Discrete(b)) => {
                    a.add_scaled(b, -1.0)?.variation()
                }
                _ => functional_deviation,
            };
            Ok(PairCheck {
                larger: big.name.clone(),
                smaller: small.name.clone(),
                deviation,
                functional_deviation,
                consistent: deviation <= opts.tolerance && functional_deviation <= opts.tolerance,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    for p in pairs.iter().filter(|p| !p.consistent) {
        violations.push(format!(
            "{} -> {}: deviation {:e}, functional deviation {:e}",
            p.larger, p.smaller, p.deviation, p.functional_deviation
        ));
    }

    // composition of restrictions on every chain m >= k >= l
    let mut triples = 0;
    let mut composition_violations = 0;
    for (m, k, pos_mk) in &comparable {
        for (k2, l, pos_kl) in &comparable {
            if k2 != k || l == m {
                continue;
            }
            let Some(pos_ml) = positions_in(&members[*m].coords, &members[*l].coords) else {
                continue;
            };
            triples += 1;
            let composed: Vec<usize> = pos_kl.iter().map(|&i| pos_mk[i - 1]).collect();
            if composed != pos_ml {
                composition_violations += 1;
                violations.push(format!(
                    "projections {} -> {} -> {} do not compose",
                    members[*m].name, members[*k].name, members[*l].name
                ));
            }
        }
    }

    let variations = members
        .par_iter()
        .map(|m| match &m.measure {
            MemberMeasure::Discrete(d) => Ok(Some(d.variation())),
            MemberMeasure::Spec(s) => spec_variation(s),
        })
        .collect::<Result<Vec<_>>>()?;
    let bound = variations.iter().flatten().cloned().reduce(f64::max);
    let mut monotone = true;
    for (k, l, _) in &comparable {
        if let (Some(vk), Some(vl)) = (variations[*k], variations[*l]) {
            if vl > vk * (1.0 + 1e-6) + opts.tolerance {
                monotone = false;
                violations.push(format!(
                    "variation grows under projection {} -> {}: {vk} < {vl}",
                    members[*k].name, members[*l].name
                ));
            }
        }
    }

    Ok(ConsistencyReport {
        consistent: violations.is_empty(),
        pairs,
        composition_triples: triples,
        composition_violations,
        variations,
        bound,
        monotone,
        violations,
    })
}
