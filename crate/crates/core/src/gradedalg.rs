//! Free graded-commutative algebras over the rationals.
//!
//! Elements of ΛV are stored as maps from sign-normalized monomials to
//! nonzero rational coefficients. Even generators commute freely, odd
//! generators anticommute and square to zero, so every product is brought
//! back to a sorted monomial together with the Koszul sign of the
//! permutation that sorted it.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational coefficient.
pub type Scalar = BigRational;

pub fn scalar(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Scalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// A named algebra generator of positive degree.
///
/// Generators are totally ordered by `(degree, name)`; that order fixes the
/// normal form of every monomial.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator {
    degree: u32,
    name: Arc<str>,
}

impl Generator {
    /// Panics on degree zero; use [`Generator::try_new`] for untrusted input.
    pub fn new(name: impl AsRef<str>, degree: u32) -> Self {
        Self::try_new(name, degree).expect("generator degree must be positive")
    }

    pub fn try_new(name: impl AsRef<str>, degree: u32) -> Result<Self> {
        let name = name.as_ref();
        if degree == 0 {
            return Err(Error::ZeroDegree(name.to_string()));
        }
        Ok(Generator {
            degree,
            name: Arc::from(name),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_odd(&self) -> bool {
        self.degree % 2 == 1
    }

    pub fn is_even(&self) -> bool {
        !self.is_odd()
    }

    /// Same degree, different name.
    pub fn renamed(&self, name: impl AsRef<str>) -> Self {
        Generator::new(name, self.degree)
    }
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.name, self.degree)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A sorted product of generator powers. Odd generators appear with
/// exponent one; the empty product is the unit.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    factors: Vec<(Generator, u32)>,
    degree: u32,
}

/// Outcome of bringing a word of factors into normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Normalized {
    Zero,
    Term(Monomial, i32),
}

/// Sorts a word of generator powers into a monomial, tracking the Koszul
/// sign of the transpositions among odd factors.
pub fn sort_with_sign(word: &[(Generator, u32)]) -> Normalized {
    let odd: Vec<&Generator> = word
        .iter()
        .filter(|(g, e)| *e > 0 && g.is_odd())
        .map(|(g, _)| g)
        .collect();
    if word.iter().any(|(g, e)| g.is_odd() && *e > 1) {
        return Normalized::Zero;
    }
    let mut inversions = 0usize;
    for i in 0..odd.len() {
        for j in i + 1..odd.len() {
            match odd[i].cmp(odd[j]) {
                Ordering::Equal => return Normalized::Zero,
                Ordering::Greater => inversions += 1,
                Ordering::Less => {}
            }
        }
    }
    let mut powers: BTreeMap<&Generator, u32> = BTreeMap::new();
    for (g, e) in word.iter().filter(|(_, e)| *e > 0) {
        *powers.entry(g).or_insert(0) += e;
    }
    let factors = powers.into_iter().map(|(g, e)| (g.clone(), e)).collect();
    let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };
    Normalized::Term(Monomial::from_sorted(factors), sign)
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn generator(g: &Generator) -> Self {
        Monomial::from_sorted(vec![(g.clone(), 1)])
    }

    fn from_sorted(factors: Vec<(Generator, u32)>) -> Self {
        debug_assert!(factors.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(factors.iter().all(|(g, e)| *e > 0 && (g.is_even() || *e == 1)));
        let degree = factors.iter().map(|(g, e)| g.degree * e).sum();
        Monomial { factors, degree }
    }

    pub fn factors(&self) -> &[(Generator, u32)] {
        &self.factors
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn exponent(&self, g: &Generator) -> u32 {
        self.factors
            .binary_search_by(|(h, _)| h.cmp(g))
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    /// The generator if this monomial is a single generator to the first power.
    pub fn as_generator(&self) -> Option<&Generator> {
        match self.factors.as_slice() {
            [(g, 1)] => Some(g),
            _ => None,
        }
    }

    /// Product with Koszul sign, or `None` when an odd generator repeats.
    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, i32)> {
        let (a, b) = (&self.factors, &other.factors);
        // odd factors of `a` at or after position i
        let mut odd_suffix = vec![0usize; a.len() + 1];
        for i in (0..a.len()).rev() {
            odd_suffix[i] = odd_suffix[i + 1] + usize::from(a[i].0.is_odd());
        }
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut flips = 0usize;
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    if b[j].0.is_odd() {
                        flips += odd_suffix[i];
                    }
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    if a[i].0.is_odd() {
                        return None;
                    }
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        let sign = if flips.is_multiple_of(2) { 1 } else { -1 };
        Some((Monomial::from_sorted(out), sign))
    }

    pub fn mentions(&self, g: &Generator) -> bool {
        self.exponent(g) > 0
    }
}

impl Ord for Monomial {
    /// Degree first; within a degree, larger exponents of earlier generators
    /// come first (so `x^2 < x*y < y^2` when `x < y`).
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| {
            for (l, r) in self.factors.iter().zip(other.factors.iter()) {
                let ord = l.0.cmp(&r.0).then_with(|| r.1.cmp(&l.1));
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            other.factors.len().cmp(&self.factors.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (k, (g, e)) in self.factors.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "{g}^{e}")?;
            }
        }
        Ok(())
    }
}

/// All monomials of total degree exactly `n`, in ascending [`Monomial`] order.
pub fn basis_of_degree(gens: &[Generator], n: u32) -> Vec<Monomial> {
    basis_of_degree_bounded(gens, n, usize::MAX).expect("unbounded enumeration cannot fail")
}

/// As [`basis_of_degree`], failing once more than `limit` monomials exist.
pub fn basis_of_degree_bounded(gens: &[Generator], n: u32, limit: usize) -> Result<Vec<Monomial>> {
    let gens: Vec<Generator> = gens.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let mut out = Vec::new();
    let mut current = Vec::new();
    enumerate(&gens, 0, n, &mut current, &mut out, limit).map_err(|_| Error::ResourceLimit { degree: n, limit })?;
    // enumeration already walks exponents of earlier generators downwards
    debug_assert!(out.windows(2).all(|w| w[0] < w[1]));
    Ok(out)
}

fn enumerate(
    gens: &[Generator],
    start: usize,
    remaining: u32,
    current: &mut Vec<(Generator, u32)>,
    out: &mut Vec<Monomial>,
    limit: usize,
) -> std::result::Result<(), ()> {
    if remaining == 0 {
        if out.len() >= limit {
            return Err(());
        }
        out.push(Monomial::from_sorted(current.clone()));
        return Ok(());
    }
    for idx in start..gens.len() {
        let g = &gens[idx];
        let max_exp = if g.is_odd() {
            u32::from(g.degree <= remaining)
        } else {
            remaining / g.degree
        };
        for e in (1..=max_exp).rev() {
            current.push((g.clone(), e));
            enumerate(gens, idx + 1, remaining - e * g.degree, current, out, limit)?;
            current.pop();
        }
    }
    Ok(())
}

/// A finite ℚ-linear combination of monomials, with no zero coefficients stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Scalar>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one() -> Self {
        Polynomial::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Polynomial::term(Monomial::one(), c)
    }

    pub fn term(m: Monomial, c: Scalar) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(m, c);
        p
    }

    pub fn generator(g: &Generator) -> Self {
        Polynomial::term(Monomial::generator(g), Scalar::one())
    }

    /// Builds the normalized product of a word of factors times `c`.
    pub fn from_word(word: &[(Generator, u32)], c: Scalar) -> Self {
        match sort_with_sign(word) {
            Normalized::Zero => Polynomial::zero(),
            Normalized::Term(m, s) => Polynomial::term(m, c * scalar(s as i64)),
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Set of degrees occurring among the terms.
    pub fn degrees(&self) -> BTreeSet<u32> {
        self.terms.keys().map(Monomial::degree).collect()
    }

    /// The common degree of a nonzero homogeneous polynomial.
    pub fn degree_of(&self) -> Option<u32> {
        let degrees = self.degrees();
        if degrees.len() == 1 {
            degrees.into_iter().next()
        } else {
            None
        }
    }

    /// True for zero and for polynomials whose terms share one degree.
    pub fn is_homogeneous(&self) -> bool {
        self.degrees().len() <= 1
    }

    /// Zero counts as homogeneous of every degree.
    pub fn is_homogeneous_of(&self, n: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == n)
    }

    pub fn generators(&self) -> BTreeSet<Generator> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(g, _)| g.clone()))
            .collect()
    }

    pub fn mentions(&self, g: &Generator) -> bool {
        self.terms.keys().any(|m| m.mentions(g))
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Keeps the terms of the given degree.
    pub fn component(&self, n: u32) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == n)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Extends a generator assignment multiplicatively. Generators for which
    /// `image` returns `None` are left in place.
    pub fn eval<F>(&self, mut image: F) -> Polynomial
    where
        F: FnMut(&Generator) -> Option<Polynomial>,
    {
        let mut cache: BTreeMap<Generator, Option<Polynomial>> = BTreeMap::new();
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut acc = Polynomial::constant(c.clone());
            for (g, e) in m.factors() {
                let img = cache.entry(g.clone()).or_insert_with(|| image(g)).clone();
                let factor = match img {
                    Some(p) => p.pow(*e),
                    None => Polynomial::term(Monomial::from_sorted(vec![(g.clone(), *e)]), Scalar::one()),
                };
                acc = &acc * &factor;
                if acc.is_zero() {
                    break;
                }
            }
            out += acc;
        }
        out
    }

    /// Replaces every occurrence of `g` by `r`.
    pub fn substitute(&self, g: &Generator, r: &Polynomial) -> Result<Polynomial> {
        check_replacement(g, r)?;
        Ok(self.eval(|h| (h == g).then(|| r.clone())))
    }

    /// Applies a renaming of generators; unmapped generators stay put.
    pub fn rename(&self, map: &BTreeMap<Generator, Generator>) -> Polynomial {
        self.eval(|g| map.get(g).map(Polynomial::generator))
    }
}

/// Checks that `r` may stand in for `g` in an algebra map.
pub(crate) fn check_replacement(g: &Generator, r: &Polynomial) -> Result<()> {
    if r.is_homogeneous_of(g.degree()) {
        return Ok(());
    }
    match r.degree_of() {
        Some(d) if d % 2 != g.degree() % 2 => Err(Error::ParityMismatch {
            generator: g.name().to_string(),
            expected: g.degree(),
            found: d,
        }),
        _ => Err(Error::DegreeMismatch {
            context: format!("replacement for {g}"),
            expected: g.degree(),
            found: r.degrees().into_iter().collect(),
        }),
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub(crate) fn fmt_term(f: &mut fmt::Formatter<'_>, m: &Monomial, c: &Scalar, first: bool) -> fmt::Result {
    let negative = c.is_negative();
    let abs = c.abs();
    match (first, negative) {
        (true, true) => f.write_str("-")?,
        (false, true) => f.write_str(" - ")?,
        (false, false) => f.write_str(" + ")?,
        (true, false) => {}
    }
    if m.is_one() {
        write!(f, "{abs}")
    } else if abs.is_one() {
        write!(f, "{m}")
    } else {
        write!(f, "{abs}*{m}")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            fmt_term(f, m, c, k == 0)?;
        }
        Ok(())
    }
}

impl From<&Generator> for Polynomial {
    fn from(g: &Generator) -> Self {
        Polynomial::generator(g)
    }
}

impl AddAssign<Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: Polynomial) {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl AddAssign<&Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: &Polynomial) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Polynomial> for Polynomial {
    fn sub_assign(&mut self, rhs: &Polynomial) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(mut self, rhs: Polynomial) -> Polynomial {
        self += rhs;
        self
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(mut self, rhs: Polynomial) -> Polynomial {
        self -= &rhs;
        self
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                if let Some((m, s)) = m1.mul(m2) {
                    let c = c1 * c2;
                    out.add_term(m, if s < 0 { -c } else { c });
                }
            }
        }
        out
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}
