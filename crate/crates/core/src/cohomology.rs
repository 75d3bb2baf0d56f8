//! Degree-truncated cohomology of free CDGAs by exact linear algebra over
//! monomial bases, plus the operations built on it: cup products, induced
//! maps of morphisms, and graded dimensions of quotient rings.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::Zero;
use rayon::prelude::*;

use crate::cdga::{FreeCdga, Morphism};
use crate::error::{Error, Result};
use crate::gradedalg::{basis_of_degree_bounded, Generator, Monomial, Polynomial, Scalar};
use crate::linalg::{kernel, RowReducer, SparseVec};

pub const DEFAULT_MAX_BASIS: usize = 200_000;

/// Environment variable overriding [`DEFAULT_MAX_BASIS`].
pub const MAX_BASIS_ENV: &str = "RHT_MAX_BASIS";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyOptions {
    /// Largest monomial basis allowed in any single degree.
    pub max_basis: usize,
    pub representatives: bool,
}

impl Default for CohomologyOptions {
    fn default() -> Self {
        CohomologyOptions {
            max_basis: DEFAULT_MAX_BASIS,
            representatives: false,
        }
    }
}

impl CohomologyOptions {
    /// Defaults, with the basis cap taken from `RHT_MAX_BASIS` when set.
    pub fn from_env() -> Self {
        let max_basis = std::env::var(MAX_BASIS_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_MAX_BASIS);
        CohomologyOptions {
            max_basis,
            ..CohomologyOptions::default()
        }
    }

    pub fn with_representatives(mut self) -> Self {
        self.representatives = true;
        self
    }
}

/// `4 · #generators`, capped at 40.
pub fn default_max_degree(model: &FreeCdga) -> u32 {
    (4 * model.generators().len() as u32).min(40)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeReport {
    pub degree: u32,
    pub basis_size: usize,
    /// dim ker(d: A^n → A^{n+1})
    pub cocycle_rank: usize,
    /// dim im(d: A^{n-1} → A^n)
    pub coboundary_rank: usize,
    pub betti: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyReport {
    pub max_degree: u32,
    pub degrees: Vec<DegreeReport>,
    pub representatives: Option<BTreeMap<u32, Vec<Polynomial>>>,
}

impl CohomologyReport {
    pub fn betti(&self, n: u32) -> usize {
        self.degrees.get(n as usize).map_or(0, |d| d.betti)
    }

    /// Betti numbers for degrees `0..=max_degree`.
    pub fn betti_numbers(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.betti).collect()
    }

    /// Degrees with nonzero Betti number, in ascending order.
    pub fn nonzero(&self) -> Vec<(u32, usize)> {
        self.degrees
            .iter()
            .filter(|d| d.betti > 0)
            .map(|d| (d.degree, d.betti))
            .collect()
    }

    pub fn total_dimension(&self) -> usize {
        self.degrees.iter().map(|d| d.betti).sum()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees
            .iter()
            .map(|d| {
                if d.degree % 2 == 0 {
                    d.betti as i64
                } else {
                    -(d.betti as i64)
                }
            })
            .sum()
    }
}

impl fmt::Display for CohomologyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>6} {:>8} {:>9} {:>12} {:>6}",
            "degree", "basis", "cocycles", "coboundaries", "betti"
        )?;
        for d in &self.degrees {
            writeln!(
                f,
                "{:>6} {:>8} {:>9} {:>12} {:>6}",
                d.degree, d.basis_size, d.cocycle_rank, d.coboundary_rank, d.betti
            )?;
            if let Some(reps) = self.representatives.as_ref().and_then(|r| r.get(&d.degree)) {
                for rep in reps {
                    writeln!(f, "{:>8}[{rep}]", "")?;
                }
            }
        }
        Ok(())
    }
}

/// Monomial basis of one degree with a reverse index.
#[derive(Clone, Debug)]
pub(crate) struct DegreeSpace {
    basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl DegreeSpace {
    pub(crate) fn new(gens: &[Generator], n: u32, limit: usize) -> Result<Self> {
        let basis = basis_of_degree_bounded(gens, n, limit)?;
        let index = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        Ok(DegreeSpace { basis, index })
    }

    pub(crate) fn len(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of a polynomial whose terms all lie in this degree.
    pub(crate) fn coords(&self, p: &Polynomial) -> Option<SparseVec> {
        let mut v: SparseVec = Vec::with_capacity(p.len());
        for (m, c) in p.terms() {
            v.push((*self.index.get(m)?, c.clone()));
        }
        v.sort_by_key(|(k, _)| *k);
        Some(v)
    }

    pub(crate) fn polynomial(&self, v: &SparseVec) -> Polynomial {
        let mut p = Polynomial::zero();
        for (k, c) in v {
            p.add_term(self.basis[*k].clone(), c.clone());
        }
        p
    }
}

fn d_rows(model: &FreeCdga, src: &DegreeSpace, dst: &DegreeSpace) -> Vec<SparseVec> {
    src.basis
        .iter()
        .map(|m| {
            dst.coords(&model.d_monomial(m))
                .expect("d raises degree by one within the model")
        })
        .collect()
}

fn spaces(model: &FreeCdga, top: u32, limit: usize) -> Result<Vec<DegreeSpace>> {
    (0..=top)
        .into_par_iter()
        .map(|n| DegreeSpace::new(model.generators(), n, limit))
        .collect()
}

/// Betti numbers up to `max_degree` with default options.
pub fn betti(model: &FreeCdga, max_degree: u32) -> Result<CohomologyReport> {
    betti_with(model, max_degree, &CohomologyOptions::default())
}

pub fn betti_with(model: &FreeCdga, max_degree: u32, opts: &CohomologyOptions) -> Result<CohomologyReport> {
    let spaces = spaces(model, max_degree + 1, opts.max_basis)?;
    // ranks[n] = rank of d: A^n -> A^{n+1}
    let ranks: Vec<usize> = (0..=max_degree as usize)
        .into_par_iter()
        .map(|n| {
            let mut r = RowReducer::new();
            for row in d_rows(model, &spaces[n], &spaces[n + 1]) {
                r.insert(row);
            }
            r.rank()
        })
        .collect();
    let degrees = (0..=max_degree as usize)
        .map(|n| {
            let basis_size = spaces[n].len();
            let cocycle_rank = basis_size - ranks[n];
            let coboundary_rank = if n == 0 { 0 } else { ranks[n - 1] };
            DegreeReport {
                degree: n as u32,
                basis_size,
                cocycle_rank,
                coboundary_rank,
                betti: cocycle_rank - coboundary_rank,
            }
        })
        .collect();
    let representatives = if opts.representatives {
        let reps: Result<Vec<(u32, Vec<Polynomial>)>> = (0..=max_degree)
            .into_par_iter()
            .map(|n| Ok((n, CohomologyBasis::new(model, n, opts.max_basis)?.representatives())))
            .collect();
        Some(reps?.into_iter().filter(|(_, r)| !r.is_empty()).collect())
    } else {
        None
    };
    Ok(CohomologyReport {
        max_degree,
        degrees,
        representatives,
    })
}

/// A chosen basis of `H^n`: cocycle representatives in reduced row echelon
/// form modulo the coboundaries.
#[derive(Clone, Debug)]
pub struct CohomologyBasis {
    degree: u32,
    space: DegreeSpace,
    coboundaries: RowReducer,
    reps: Vec<SparseVec>,
    rep_pivots: Vec<usize>,
    next_space: DegreeSpace,
    model: FreeCdga,
}

impl CohomologyBasis {
    pub fn new(model: &FreeCdga, n: u32, limit: usize) -> Result<Self> {
        let space = DegreeSpace::new(model.generators(), n, limit)?;
        let next_space = DegreeSpace::new(model.generators(), n + 1, limit)?;
        let mut coboundaries = RowReducer::new();
        if n > 0 {
            let prev = DegreeSpace::new(model.generators(), n - 1, limit)?;
            for row in d_rows(model, &prev, &space) {
                coboundaries.insert(row);
            }
        }
        let cocycles = kernel(d_rows(model, &space, &next_space));
        let mut classes = RowReducer::new();
        for z in &cocycles {
            classes.insert(coboundaries.reduce(z));
        }
        let reps = classes.rref();
        let rep_pivots = reps.iter().map(|r| r[0].0).collect();
        Ok(CohomologyBasis {
            degree: n,
            space,
            coboundaries,
            reps,
            rep_pivots,
            next_space,
            model: model.clone(),
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn dimension(&self) -> usize {
        self.reps.len()
    }

    pub fn representatives(&self) -> Vec<Polynomial> {
        self.reps.iter().map(|r| self.space.polynomial(r)).collect()
    }

    /// Coordinates of the class of a cocycle in the chosen basis.
    pub fn coordinates(&self, cocycle: &Polynomial) -> Result<Vec<Scalar>> {
        let not_cocycle = || Error::NotACocycle(cocycle.to_string());
        let v = self.space.coords(cocycle).ok_or_else(not_cocycle)?;
        let dv = self.model.apply_d(cocycle)?;
        if !dv.is_zero() {
            return Err(not_cocycle());
        }
        debug_assert!(self.next_space.coords(&dv).is_some());
        let normal = self.coboundaries.reduce(&v);
        let lookup: BTreeMap<usize, Scalar> = normal.iter().cloned().collect();
        let coords: Vec<Scalar> = self
            .rep_pivots
            .iter()
            .map(|p| lookup.get(p).cloned().unwrap_or_else(Scalar::zero))
            .collect();
        Ok(coords)
    }

    /// Cocycle representing the class with the given coordinates.
    pub fn class_representative(&self, coords: &[Scalar]) -> Polynomial {
        let mut p = Polynomial::zero();
        for (c, r) in coords.iter().zip(self.representatives()) {
            p += r.scale(c);
        }
        p
    }
}

/// A cohomology class expressed in a [`CohomologyBasis`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyClass {
    pub degree: u32,
    pub coordinates: Vec<Scalar>,
    pub basis: Vec<Polynomial>,
}

impl CohomologyClass {
    pub fn is_zero(&self) -> bool {
        self.coordinates.iter().all(Zero::is_zero)
    }

    pub fn representative(&self) -> Polynomial {
        let mut p = Polynomial::zero();
        for (c, r) in self.coordinates.iter().zip(&self.basis) {
            p += r.scale(c);
        }
        p
    }
}

impl fmt::Display for CohomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, r) in self.coordinates.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            let sign = if c < &Scalar::zero() { "-" } else { "+" };
            let abs = if c < &Scalar::zero() { -c.clone() } else { c.clone() };
            match (first, sign) {
                (true, "-") => f.write_str("-")?,
                (true, _) => {}
                (false, s) => write!(f, " {s} ")?,
            }
            if abs != Scalar::from_integer(1.into()) {
                write!(f, "{abs}*")?;
            }
            write!(f, "[{r}]")?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Class of a cocycle in the deterministic basis of its degree.
pub fn class_of(model: &FreeCdga, cocycle: &Polynomial, max_basis: usize) -> Result<CohomologyClass> {
    let n = cocycle
        .degree_of()
        .ok_or_else(|| Error::NotACocycle(cocycle.to_string()))?;
    let basis = CohomologyBasis::new(model, n, max_basis)?;
    Ok(CohomologyClass {
        degree: n,
        coordinates: basis.coordinates(cocycle)?,
        basis: basis.representatives(),
    })
}

/// Product of the classes of two cocycles, in the basis of the product degree.
pub fn cup_product(model: &FreeCdga, a: &Polynomial, b: &Polynomial, max_degree: u32) -> Result<CohomologyClass> {
    let limit = CohomologyOptions::default().max_basis;
    for c in [a, b] {
        let d = model.apply_d(c)?;
        if !d.is_zero() || !c.is_homogeneous() {
            return Err(Error::NotACocycle(c.to_string()));
        }
    }
    let deg = |p: &Polynomial| p.degree_of().unwrap_or(0);
    let n = deg(a) + deg(b);
    if n > max_degree {
        return Err(Error::InvalidInput(format!(
            "product degree {n} exceeds max degree {max_degree}"
        )));
    }
    let product = a * b;
    let basis = CohomologyBasis::new(model, n, limit)?;
    Ok(CohomologyClass {
        degree: n,
        coordinates: basis.coordinates(&product)?,
        basis: basis.representatives(),
    })
}

/// Graded commutative ring given by even generators and homogeneous relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingPresentation {
    generators: Vec<Generator>,
    relations: Vec<Polynomial>,
}

impl RingPresentation {
    pub fn new(generators: Vec<Generator>, relations: Vec<Polynomial>) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.is_odd()) {
            return Err(Error::InvalidInput(format!(
                "presentation generator {g} has odd degree {}",
                g.degree()
            )));
        }
        for r in &relations {
            if !r.is_homogeneous() {
                return Err(Error::DegreeMismatch {
                    context: format!("relation {r}"),
                    expected: r.degrees().into_iter().next().unwrap_or(0),
                    found: r.degrees().into_iter().collect(),
                });
            }
            if let Some(h) = r.generators().into_iter().find(|h| !generators.contains(h)) {
                return Err(Error::UnknownGenerator(h.name().to_string()));
            }
        }
        Ok(RingPresentation { generators, relations })
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn relations(&self) -> &[Polynomial] {
        &self.relations
    }
}

/// Dimension of each degree of the quotient ring, by spanning the ideal
/// with every monomial multiple of every relation.
pub fn quotient_ring_dims(pres: &RingPresentation, max_degree: u32) -> Result<BTreeMap<u32, usize>> {
    quotient_ring_dims_with(pres, max_degree, DEFAULT_MAX_BASIS)
}

pub fn quotient_ring_dims_with(pres: &RingPresentation, max_degree: u32, limit: usize) -> Result<BTreeMap<u32, usize>> {
    (0..=max_degree)
        .into_par_iter()
        .map(|n| {
            let space = DegreeSpace::new(&pres.generators, n, limit)?;
            let mut span = RowReducer::new();
            for r in pres.relations.iter().filter(|r| !r.is_zero()) {
                let rd = r.degree_of().expect("nonzero homogeneous relation");
                if rd > n {
                    continue;
                }
                for m in basis_of_degree_bounded(&pres.generators, n - rd, limit)? {
                    let product = &Polynomial::term(m, Scalar::from_integer(1.into())) * r;
                    span.insert(space.coords(&product).expect("product lies in degree n"));
                }
            }
            Ok((n, space.len() - span.rank()))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InducedMap {
    Bijective,
    NotInjective,
    NotSurjective,
    NeitherInjectiveNorSurjective,
}

impl fmt::Display for InducedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InducedMap::Bijective => "bijective",
            InducedMap::NotInjective => "not injective",
            InducedMap::NotSurjective => "not surjective",
            InducedMap::NeitherInjectiveNorSurjective => "neither injective nor surjective",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeVerdict {
    pub degree: u32,
    pub source_dim: usize,
    pub target_dim: usize,
    pub rank: usize,
    pub verdict: InducedMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiIsoReport {
    pub max_degree: u32,
    pub degrees: Vec<DegreeVerdict>,
}

impl QuasiIsoReport {
    pub fn is_quasi_iso(&self) -> bool {
        self.degrees.iter().all(|d| d.verdict == InducedMap::Bijective)
    }

    pub fn failures(&self) -> impl Iterator<Item = &DegreeVerdict> {
        self.degrees.iter().filter(|d| d.verdict != InducedMap::Bijective)
    }
}

impl fmt::Display for QuasiIsoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>6} {:>6} {:>6} {:>5}  verdict",
            "degree", "source", "target", "rank"
        )?;
        for d in &self.degrees {
            writeln!(
                f,
                "{:>6} {:>6} {:>6} {:>5}  {}",
                d.degree, d.source_dim, d.target_dim, d.rank, d.verdict
            )?;
        }
        write!(
            f,
            "quasi-isomorphism up to degree {}: {}",
            self.max_degree,
            if self.is_quasi_iso() { "yes" } else { "no" }
        )
    }
}

/// Compares the induced map on cohomology degree by degree.
pub fn is_quasi_iso(m: &Morphism, max_degree: u32) -> Result<QuasiIsoReport> {
    is_quasi_iso_with(m, max_degree, DEFAULT_MAX_BASIS)
}

pub fn is_quasi_iso_with(m: &Morphism, max_degree: u32, limit: usize) -> Result<QuasiIsoReport> {
    if let Err(vs) = m.compose_and_check() {
        let msg: Vec<String> = vs.iter().map(ToString::to_string).collect();
        return Err(Error::InvalidInput(format!(
            "{} is not a CDGA morphism: {}",
            m.name(),
            msg.join("; ")
        )));
    }
    let degrees: Result<Vec<DegreeVerdict>> = (0..=max_degree)
        .into_par_iter()
        .map(|n| {
            let src = CohomologyBasis::new(m.source(), n, limit)?;
            let tgt = CohomologyBasis::new(m.target(), n, limit)?;
            let mut image = RowReducer::new();
            for rep in src.representatives() {
                let coords = tgt.coordinates(&m.apply(&rep))?;
                image.insert(coords.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect());
            }
            let rank = image.rank();
            let (s, t) = (src.dimension(), tgt.dimension());
            let verdict = match (rank == s, rank == t) {
                (true, true) => InducedMap::Bijective,
                (false, true) => InducedMap::NotInjective,
                (true, false) => InducedMap::NotSurjective,
                (false, false) => InducedMap::NeitherInjectiveNorSurjective,
            };
            Ok(DegreeVerdict {
                degree: n,
                source_dim: s,
                target_dim: t,
                rank,
                verdict,
            })
        })
        .collect();
    Ok(QuasiIsoReport {
        max_degree,
        degrees: degrees?,
    })
}
