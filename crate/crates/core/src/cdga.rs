//! Free commutative differential graded algebras, their morphisms, and the
//! two rewriting moves used to shrink a model without changing its
//! cohomology: a linear change of variable and the removal of a contractible
//! pair `(v, dv)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::gradedalg::{check_replacement, Generator, Monomial, Polynomial, Scalar};

/// A free CDGA `(ΛV, d)` given by its generators and their differentials.
///
/// Equality ignores the display name.
#[derive(Clone)]
pub struct FreeCdga {
    name: String,
    generators: Vec<Generator>,
    differential: BTreeMap<Generator, Polynomial>,
}

impl PartialEq for FreeCdga {
    fn eq(&self, other: &Self) -> bool {
        self.generators == other.generators && self.differential == other.differential
    }
}

impl Eq for FreeCdga {}

/// A reason a model fails to be a CDGA.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `d g` mixes degrees; `offending` lists the terms whose degree is not `|g| + 1`.
    Inhomogeneous {
        generator: String,
        differential: String,
        expected: u32,
        offending: Vec<(String, u32)>,
    },
    WrongDegree {
        generator: String,
        differential: String,
        expected: u32,
        found: u32,
    },
    /// `d(d g) != 0`.
    NotClosed { generator: String, dd: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Inhomogeneous {
                generator,
                differential,
                expected,
                offending,
            } => {
                write!(
                    f,
                    "d {generator} = {differential} is inhomogeneous: expected degree {expected}"
                )?;
                for (term, deg) in offending {
                    write!(f, ", offending term {term} has degree {deg}")?;
                }
                Ok(())
            }
            Violation::WrongDegree {
                generator,
                differential,
                expected,
                found,
            } => write!(
                f,
                "d {generator} = {differential} has degree {found}, expected {expected}"
            ),
            Violation::NotClosed { generator, dd } => {
                write!(f, "d(d {generator}) = {dd} is not zero")
            }
        }
    }
}

/// Checks that `dg` is homogeneous of degree `|g| + 1`.
pub fn degree_violation(g: &Generator, dg: &Polynomial) -> Option<Violation> {
    let expected = g.degree() + 1;
    let degrees = dg.degrees();
    if degrees.len() > 1 {
        let offending = dg
            .terms()
            .filter(|(m, _)| m.degree() != expected)
            .map(|(m, c)| (Polynomial::term(m.clone(), c.clone()).to_string(), m.degree()))
            .collect();
        return Some(Violation::Inhomogeneous {
            generator: g.name().to_string(),
            differential: dg.to_string(),
            expected,
            offending,
        });
    }
    match degrees.into_iter().next() {
        Some(found) if found != expected => Some(Violation::WrongDegree {
            generator: g.name().to_string(),
            differential: dg.to_string(),
            expected,
            found,
        }),
        _ => None,
    }
}

impl FreeCdga {
    /// Builds a model, checking only names and generator references.
    /// Generators without an entry get the zero differential. Use
    /// [`FreeCdga::validate`] to check degrees and `d² = 0`.
    pub fn new(
        name: impl Into<String>,
        generators: impl IntoIterator<Item = Generator>,
        differentials: impl IntoIterator<Item = (Generator, Polynomial)>,
    ) -> Result<Self> {
        let mut gens: Vec<Generator> = generators.into_iter().collect();
        gens.sort();
        let mut names = BTreeSet::new();
        for g in &gens {
            if !names.insert(g.name().to_string()) {
                return Err(Error::DuplicateGenerator(g.name().to_string()));
            }
        }
        let known: BTreeSet<&Generator> = gens.iter().collect();
        let mut differential: BTreeMap<Generator, Polynomial> =
            gens.iter().map(|g| (g.clone(), Polynomial::zero())).collect();
        for (g, dg) in differentials {
            if !known.contains(&g) {
                return Err(Error::UnknownGenerator(g.name().to_string()));
            }
            if let Some(h) = dg.generators().into_iter().find(|h| !known.contains(h)) {
                return Err(Error::UnknownGenerator(h.name().to_string()));
            }
            differential.insert(g, dg);
        }
        Ok(FreeCdga {
            name: name.into(),
            generators: gens,
            differential,
        })
    }

    /// The model with no generators; its cohomology is ℚ in degree 0.
    pub fn trivial() -> Self {
        FreeCdga {
            name: "trivial".into(),
            generators: Vec::new(),
            differential: BTreeMap::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator(&self, name: &str) -> Option<&Generator> {
        self.generators.iter().find(|g| g.name() == name)
    }

    /// Looks a generator up by name, failing with `UnknownGenerator`.
    pub fn gen(&self, name: &str) -> Result<&Generator> {
        self.generator(name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn contains(&self, g: &Generator) -> bool {
        self.differential.contains_key(g)
    }

    pub fn d(&self, g: &Generator) -> Option<&Polynomial> {
        self.differential.get(g)
    }

    pub fn differentials(&self) -> impl Iterator<Item = (&Generator, &Polynomial)> {
        self.differential.iter()
    }

    pub fn even_generators(&self) -> Vec<Generator> {
        self.generators.iter().filter(|g| g.is_even()).cloned().collect()
    }

    pub fn odd_generators(&self) -> Vec<Generator> {
        self.generators.iter().filter(|g| g.is_odd()).cloned().collect()
    }

    /// The graded Leibniz extension of the generator differentials.
    pub fn apply_d(&self, p: &Polynomial) -> Result<Polynomial> {
        if let Some(g) = p.generators().into_iter().find(|g| !self.contains(g)) {
            return Err(Error::UnknownGenerator(g.name().to_string()));
        }
        let mut out = Polynomial::zero();
        for (m, c) in p.terms() {
            out += self.d_monomial(m).scale(c);
        }
        Ok(out)
    }

    /// `d` of one monomial; every factor must belong to the model.
    pub(crate) fn d_monomial(&self, m: &Monomial) -> Polynomial {
        let factors = m.factors();
        let mut out = Polynomial::zero();
        let mut prefix_degree = 0u32;
        for (i, (g, e)) in factors.iter().enumerate() {
            let dg = &self.differential[g];
            if !dg.is_zero() {
                let mut word: Vec<(Generator, u32)> = Vec::with_capacity(factors.len());
                word.extend_from_slice(&factors[..i]);
                if *e > 1 {
                    word.push((g.clone(), e - 1));
                }
                let prefix = Polynomial::from_word(&word, Scalar::one());
                let suffix = Polynomial::from_word(&factors[i + 1..], Scalar::one());
                let mut coeff = Scalar::from_integer((*e).into());
                if prefix_degree % 2 == 1 {
                    coeff = -coeff;
                }
                out += (&(&prefix * dg) * &suffix).scale(&coeff);
            }
            prefix_degree += g.degree() * e;
        }
        out
    }

    /// Reports every generator whose differential is inhomogeneous, of the
    /// wrong degree, or fails `d² = 0`.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut violations = Vec::new();
        for g in &self.generators {
            let dg = &self.differential[g];
            violations.extend(degree_violation(g, dg));
            let dd = self.apply_d(dg).expect("differentials only mention model generators");
            if !dd.is_zero() {
                violations.push(Violation::NotClosed {
                    generator: g.name().to_string(),
                    dd: dd.to_string(),
                });
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    pub fn validated(self) -> Result<Self> {
        self.validate().map_err(Error::InvalidModel)?;
        Ok(self)
    }

    /// Copy of the model with one differential replaced.
    pub fn with_differential(&self, g: &Generator, dg: Polynomial) -> Result<FreeCdga> {
        if !self.contains(g) {
            return Err(Error::UnknownGenerator(g.name().to_string()));
        }
        let diffs = self
            .differential
            .iter()
            .map(|(h, dh)| (h.clone(), if h == g { dg.clone() } else { dh.clone() }));
        FreeCdga::new(self.name.clone(), self.generators.iter().cloned(), diffs)
    }

    /// Applies a generator renaming (degrees must match).
    pub fn rename(&self, map: &BTreeMap<Generator, Generator>) -> Result<FreeCdga> {
        for (from, to) in map {
            if from.degree() != to.degree() {
                return Err(Error::DegreeMismatch {
                    context: format!("renaming {from} to {to}"),
                    expected: from.degree(),
                    found: vec![to.degree()],
                });
            }
        }
        let image = |g: &Generator| map.get(g).cloned().unwrap_or_else(|| g.clone());
        FreeCdga::new(
            self.name.clone(),
            self.generators.iter().map(image),
            self.differential.iter().map(|(g, dg)| (image(g), dg.rename(map))),
        )
    }

    /// Searches for a degree-preserving bijection of generators carrying
    /// every differential of `self` exactly onto the corresponding one of
    /// `other`.
    pub fn renaming_onto(&self, other: &FreeCdga) -> Option<BTreeMap<Generator, Generator>> {
        if self.generators.len() != other.generators.len() {
            return None;
        }
        let mut map = BTreeMap::new();
        let mut used = BTreeSet::new();
        if self.search_renaming(other, 0, &mut map, &mut used) {
            Some(map)
        } else {
            None
        }
    }

    fn search_renaming(
        &self,
        other: &FreeCdga,
        idx: usize,
        map: &mut BTreeMap<Generator, Generator>,
        used: &mut BTreeSet<Generator>,
    ) -> bool {
        if idx == self.generators.len() {
            return self
                .differential
                .iter()
                .all(|(g, dg)| dg.rename(map) == other.differential[&map[g]]);
        }
        let g = &self.generators[idx];
        for h in other.generators.iter().filter(|h| h.degree() == g.degree()) {
            if used.contains(h) {
                continue;
            }
            map.insert(g.clone(), h.clone());
            used.insert(h.clone());
            // prune once every generator this differential needs is mapped
            let consistent = self.generators[..=idx].iter().all(|k| {
                let dk = &self.differential[k];
                !dk.generators().iter().all(|x| map.contains_key(x)) || dk.rename(map) == other.differential[&map[k]]
            });
            if consistent && self.search_renaming(other, idx + 1, map, used) {
                return true;
            }
            map.remove(g);
            used.remove(h);
        }
        false
    }
}

impl fmt::Debug for FreeCdga {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FreeCdga {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.generators.iter().map(Generator::name).collect();
        write!(f, "Λ({})", names.join(", "))?;
        let nonzero: Vec<String> = self
            .differential
            .iter()
            .filter(|(_, dg)| !dg.is_zero())
            .map(|(g, dg)| format!("d{g} = {dg}"))
            .collect();
        if !nonzero.is_empty() {
            write!(f, " with {}", nonzero.join(", "))?;
        }
        Ok(())
    }
}

/// Tensor product; generators of `b` whose names collide with `a` are primed.
pub fn tensor(a: &FreeCdga, b: &FreeCdga) -> FreeCdga {
    tensor_with_renaming(a, b).0
}

/// As [`tensor`], also returning how `b`'s generators were renamed.
pub fn tensor_with_renaming(a: &FreeCdga, b: &FreeCdga) -> (FreeCdga, BTreeMap<Generator, Generator>) {
    let mut taken: BTreeSet<String> = a.generators.iter().map(|g| g.name().to_string()).collect();
    let b_names: BTreeSet<String> = b.generators.iter().map(|g| g.name().to_string()).collect();
    let mut renaming = BTreeMap::new();
    for g in &b.generators {
        let mut name = g.name().to_string();
        if taken.contains(&name) {
            while taken.contains(&name) || b_names.contains(&name) {
                name.push('\'');
            }
            renaming.insert(g.clone(), g.renamed(&name));
        }
        taken.insert(name);
    }
    let image = |g: &Generator| renaming.get(g).cloned().unwrap_or_else(|| g.clone());
    let gens = a.generators.iter().cloned().chain(b.generators.iter().map(image));
    let diffs = a
        .differential
        .iter()
        .map(|(g, dg)| (g.clone(), dg.clone()))
        .chain(b.differential.iter().map(|(g, dg)| (image(g), dg.rename(&renaming))));
    let name = format!("{} ⊗ {}", a.name, b.name);
    let model = FreeCdga::new(name, gens, diffs).expect("names were made disjoint");
    (model, renaming)
}

/// Splits a relation `λ·old + Q` into `(λ, Q)`, provided `old` occurs only
/// in that one isolated linear term.
pub fn solve_linear(relation: &Polynomial, old: &Generator) -> Result<(Scalar, Polynomial)> {
    let m = Monomial::generator(old);
    let lambda = relation.coefficient(&m);
    let rest = relation - &Polynomial::term(m, lambda.clone());
    if lambda.is_zero() || rest.mentions(old) {
        return Err(Error::NotSolvable {
            generator: old.name().to_string(),
            relation: relation.to_string(),
        });
    }
    Ok((lambda, rest))
}

/// Replaces generator `old` by `fresh = relation`, rewriting every
/// differential through `old = (fresh - Q) / λ`.
pub fn change_of_variable(
    model: &FreeCdga,
    old: &Generator,
    fresh: &Generator,
    relation: &Polynomial,
) -> Result<FreeCdga> {
    if !model.contains(old) {
        return Err(Error::UnknownGenerator(old.name().to_string()));
    }
    if model.generator(fresh.name()).is_some() {
        return Err(Error::DuplicateGenerator(fresh.name().to_string()));
    }
    if fresh.degree() != old.degree() {
        return Err(Error::DegreeMismatch {
            context: format!("fresh generator {fresh}"),
            expected: old.degree(),
            found: vec![fresh.degree()],
        });
    }
    if !relation.is_homogeneous_of(old.degree()) {
        return Err(Error::DegreeMismatch {
            context: format!("relation {relation}"),
            expected: old.degree(),
            found: relation.degrees().into_iter().collect(),
        });
    }
    let (lambda, rest) = solve_linear(relation, old)?;
    let inverse = (&Polynomial::generator(fresh) - &rest).scale(&lambda.recip());
    check_replacement(old, &inverse)?;
    let d_fresh = model.apply_d(relation)?.substitute(old, &inverse)?;
    let mut diffs = Vec::with_capacity(model.generators.len());
    for (g, dg) in &model.differential {
        if g != old {
            diffs.push((g.clone(), dg.substitute(old, &inverse)?));
        }
    }
    diffs.push((fresh.clone(), d_fresh));
    let gens = model
        .generators
        .iter()
        .filter(|g| *g != old)
        .cloned()
        .chain(std::iter::once(fresh.clone()));
    FreeCdga::new(model.name.clone(), gens, diffs)?.validated()
}

/// Record of one removed contractible pair: `d odd = scalar · even`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CancellationCertificate {
    pub odd: Generator,
    pub even: Generator,
    pub scalar: Scalar,
}

/// Removes an odd generator `v` with `dv = λ·x` together with `x`, setting
/// `x` to zero in the remaining differentials. Refused when `v` occurs in
/// any other differential.
pub fn cancel_acyclic_pair(model: &FreeCdga, v: &Generator) -> Result<(FreeCdga, CancellationCertificate)> {
    let dv = model
        .d(v)
        .ok_or_else(|| Error::UnknownGenerator(v.name().to_string()))?;
    let not_linear = || Error::NotLinearDifferential {
        generator: v.name().to_string(),
        differential: dv.to_string(),
    };
    if !v.is_odd() || dv.len() != 1 {
        return Err(not_linear());
    }
    let (m, lambda) = dv.terms().next().expect("one term");
    let x = m.as_generator().filter(|x| x.is_even()).ok_or_else(not_linear)?.clone();
    if !model.differential[&x].is_zero() {
        return Err(not_linear());
    }
    for (g, dg) in &model.differential {
        if g != v && dg.mentions(v) {
            return Err(Error::ResidualOccurrence {
                generator: v.name().to_string(),
                occurs_in: g.name().to_string(),
            });
        }
    }
    let zero = Polynomial::zero();
    let mut diffs = Vec::new();
    for (g, dg) in &model.differential {
        if g != v && *g != x {
            diffs.push((g.clone(), dg.substitute(&x, &zero)?));
        }
    }
    let gens = model.generators.iter().filter(|g| *g != v && **g != x).cloned();
    let reduced = FreeCdga::new(model.name.clone(), gens, diffs)?;
    let cert = CancellationCertificate {
        odd: v.clone(),
        even: x,
        scalar: lambda.clone(),
    };
    Ok((reduced, cert))
}

/// A degree-zero algebra map given on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    name: String,
    source: FreeCdga,
    target: FreeCdga,
    images: BTreeMap<Generator, Polynomial>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismViolation {
    ImageDegree {
        generator: String,
        image: String,
        expected: u32,
        found: Vec<u32>,
    },
    /// `d(f(g)) != f(d g)`.
    ChainCondition {
        generator: String,
        d_of_image: String,
        image_of_d: String,
    },
}

impl fmt::Display for MorphismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorphismViolation::ImageDegree {
                generator,
                image,
                expected,
                found,
            } => write!(
                f,
                "image of {generator} is {image} with degrees {found:?}, expected {expected}"
            ),
            MorphismViolation::ChainCondition {
                generator,
                d_of_image,
                image_of_d,
            } => write!(
                f,
                "chain condition fails on {generator}: d(f({generator})) = {d_of_image} but f(d{generator}) = {image_of_d}"
            ),
        }
    }
}

impl Morphism {
    /// Unassigned source generators map to zero.
    pub fn new(
        name: impl Into<String>,
        source: FreeCdga,
        target: FreeCdga,
        images: impl IntoIterator<Item = (Generator, Polynomial)>,
    ) -> Result<Self> {
        let mut map: BTreeMap<Generator, Polynomial> = source
            .generators
            .iter()
            .map(|g| (g.clone(), Polynomial::zero()))
            .collect();
        for (g, img) in images {
            if !source.contains(&g) {
                return Err(Error::UnknownGenerator(g.name().to_string()));
            }
            if let Some(h) = img.generators().into_iter().find(|h| !target.contains(h)) {
                return Err(Error::UnknownGenerator(h.name().to_string()));
            }
            map.insert(g, img);
        }
        Ok(Morphism {
            name: name.into(),
            source,
            target,
            images: map,
        })
    }

    pub fn identity(model: &FreeCdga) -> Self {
        let images = model.generators.iter().map(|g| (g.clone(), Polynomial::generator(g)));
        Morphism::new("id", model.clone(), model.clone(), images).expect("identity is well formed")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &FreeCdga {
        &self.source
    }

    pub fn target(&self) -> &FreeCdga {
        &self.target
    }

    pub fn images(&self) -> impl Iterator<Item = (&Generator, &Polynomial)> {
        self.images.iter()
    }

    pub fn image(&self, g: &Generator) -> Option<&Polynomial> {
        self.images.get(g)
    }

    /// Extends the generator images multiplicatively.
    pub fn apply(&self, p: &Polynomial) -> Polynomial {
        p.eval(|g| self.images.get(g).cloned())
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &Morphism) -> Result<Morphism> {
        if self.target != next.source {
            return Err(Error::InvalidInput(format!(
                "cannot compose {} with {}: target and source differ",
                self.name, next.name
            )));
        }
        let images = self.images.iter().map(|(g, img)| (g.clone(), next.apply(img)));
        Morphism::new(
            format!("{}∘{}", next.name, self.name),
            self.source.clone(),
            next.target.clone(),
            images,
        )
    }

    /// Checks degree preservation and the chain condition on every generator.
    pub fn compose_and_check(&self) -> Result<(), Vec<MorphismViolation>> {
        let mut violations = Vec::new();
        for (g, img) in &self.images {
            if !img.is_homogeneous_of(g.degree()) {
                violations.push(MorphismViolation::ImageDegree {
                    generator: g.name().to_string(),
                    image: img.to_string(),
                    expected: g.degree(),
                    found: img.degrees().into_iter().collect(),
                });
                continue;
            }
            let d_of_image = self.target.apply_d(img).expect("images use target generators");
            let image_of_d = self.apply(&self.source.differential[g]);
            if d_of_image != image_of_d {
                violations.push(MorphismViolation::ChainCondition {
                    generator: g.name().to_string(),
                    d_of_image: d_of_image.to_string(),
                    image_of_d: image_of_d.to_string(),
                });
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }
}

/// True iff every even generator is closed and every odd generator's
/// differential lies in the subalgebra on even generators.
pub fn pure_check(model: &FreeCdga) -> bool {
    model.differentials().all(|(g, dg)| {
        if g.is_even() {
            dg.is_zero()
        } else {
            dg.generators().iter().all(Generator::is_even)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gradedalg::scalar;

    fn gp(g: &Generator) -> Polynomial {
        Polynomial::generator(g)
    }

    fn hp1() -> FreeCdga {
        let (x4, x7) = (Generator::new("x4", 4), Generator::new("x7", 7));
        FreeCdga::new("HP1", [x4.clone(), x7.clone()], [(x7, gp(&x4).pow(2))]).unwrap()
    }

    fn prop31_n2() -> FreeCdga {
        let a4 = Generator::new("a4", 4);
        let v4 = Generator::new("v4", 4);
        let b3 = Generator::new("b3", 3);
        let z3 = Generator::new("z3", 3);
        let rel = &gp(&v4) - &gp(&a4);
        FreeCdga::new("P31", [a4, v4, b3.clone(), z3.clone()], [(b3, rel.clone()), (z3, rel)]).unwrap()
    }

    #[test]
    fn leibniz_on_hp1() {
        let m = hp1();
        let x4 = m.gen("x4").unwrap();
        let x7 = m.gen("x7").unwrap();
        let d = m.apply_d(&(&gp(x4) * &gp(x7))).unwrap();
        assert_eq!(d, gp(x4).pow(3));
        assert!(m.apply_d(&Polynomial::one()).unwrap().is_zero());
    }

    #[test]
    fn leibniz_sign_on_odd_product() {
        let m = prop31_n2();
        let (a4, v4, b3, z3) = (
            m.gen("a4").unwrap(),
            m.gen("v4").unwrap(),
            m.gen("b3").unwrap(),
            m.gen("z3").unwrap(),
        );
        let rel = &gp(v4) - &gp(a4);
        let expected = &(&rel * &gp(z3)) - &(&gp(b3) * &rel);
        assert_eq!(m.apply_d(&(&gp(b3) * &gp(z3))).unwrap(), expected);
    }

    #[test]
    fn apply_d_rejects_foreign_generators() {
        let m = hp1();
        let y = Generator::new("y4", 4);
        assert_eq!(m.apply_d(&gp(&y)).unwrap_err(), Error::UnknownGenerator("y4".into()));
    }

    #[test]
    fn validate_reports_inhomogeneous_term() {
        let v7 = Generator::new("v7", 7);
        let z8 = Generator::new("z8", 8);
        let b4 = Generator::new("b4", 4);
        let dv = &gp(&z8) - &gp(&b4).pow(4).scale(&scalar(3));
        let m = FreeCdga::new("Bad", [v7.clone(), z8, b4], [(v7, dv)]).unwrap();
        let errs = m.validate().unwrap_err();
        assert_eq!(errs.len(), 1);
        match &errs[0] {
            Violation::Inhomogeneous {
                offending, expected, ..
            } => {
                assert_eq!(*expected, 8);
                assert_eq!(offending, &vec![("-3*b4^4".to_string(), 16)]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(errs[0].to_string().contains("-3*b4^4"));
    }

    #[test]
    fn validate_reports_degree_and_d_squared() {
        let v = Generator::new("v", 3);
        let x = Generator::new("x", 4);
        let m = FreeCdga::new("Loop", [v.clone(), x.clone()], [(v.clone(), gp(&x)), (x, gp(&v))]).unwrap();
        let errs = m.validate().unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, Violation::WrongDegree { generator, .. } if generator == "x")));
        assert!(errs.iter().any(|e| matches!(e, Violation::NotClosed { .. })));
    }

    #[test]
    fn tensor_renames_collisions() {
        let x4 = Generator::new("x4", 4);
        let a = FreeCdga::new("A", [x4.clone()], []).unwrap();
        let t = tensor(&a, &a);
        let names: Vec<&str> = t.generators().iter().map(Generator::name).collect();
        assert_eq!(names, ["x4", "x4'"]);
        assert_eq!(tensor(&hp1(), &FreeCdga::trivial()), hp1());
    }

    #[test]
    fn change_of_variable_isolates_new_generator() {
        let m = prop31_n2();
        let (a4, v4) = (m.gen("a4").unwrap().clone(), m.gen("v4").unwrap().clone());
        let t4 = Generator::new("t4", 4);
        let out = change_of_variable(&m, &v4, &t4, &(&gp(&v4) - &gp(&a4))).unwrap();
        assert_eq!(out.d(out.gen("b3").unwrap()).unwrap(), &gp(&t4));
        assert_eq!(out.d(out.gen("z3").unwrap()).unwrap(), &gp(&t4));
        assert!(out.d(&t4).unwrap().is_zero());
    }

    #[test]
    fn change_of_variable_needs_linear_occurrence() {
        let m = hp1();
        let x4 = m.gen("x4").unwrap().clone();
        let t8 = Generator::new("t4", 4);
        let err = change_of_variable(&m, &x4, &t8, &gp(&x4).pow(2)).unwrap_err();
        assert!(matches!(err, Error::DegreeMismatch { .. }));
        let y4 = Generator::new("y4", 4);
        let m2 = FreeCdga::new("M", [x4.clone(), y4.clone()], []).unwrap();
        let err = change_of_variable(&m2, &x4, &t8, &(&gp(&x4) * &gp(&y4)).component(4)).unwrap_err();
        assert!(matches!(err, Error::NotSolvable { .. }));
        let err = change_of_variable(&m2, &x4, &t8, &gp(&y4)).unwrap_err();
        assert!(matches!(err, Error::NotSolvable { .. }));
    }

    #[test]
    fn cancel_contractible_pair() {
        let t4 = Generator::new("t4", 4);
        let v3 = Generator::new("v3", 3);
        let m = FreeCdga::new("C", [t4.clone(), v3.clone()], [(v3.clone(), gp(&t4))]).unwrap();
        let (out, cert) = cancel_acyclic_pair(&m, &v3).unwrap();
        assert_eq!(out, FreeCdga::trivial());
        assert_eq!(cert.even, t4);
        assert_eq!(cert.scalar, scalar(1));
    }

    #[test]
    fn cancel_rejects_nonlinear_and_residual() {
        let x4 = Generator::new("x4", 4);
        let y4 = Generator::new("y4", 4);
        let v7 = Generator::new("v7", 7);
        let m = FreeCdga::new(
            "Q",
            [x4.clone(), y4.clone(), v7.clone()],
            [(v7.clone(), &gp(&x4) * &gp(&y4))],
        )
        .unwrap();
        assert!(matches!(
            cancel_acyclic_pair(&m, &v7),
            Err(Error::NotLinearDifferential { .. })
        ));

        let t4 = Generator::new("t4", 4);
        let v3 = Generator::new("v3", 3);
        let w7 = Generator::new("w7", 7);
        let m = FreeCdga::new(
            "R",
            [t4.clone(), v3.clone(), x4.clone(), w7.clone()],
            [(v3.clone(), gp(&t4)), (w7, &gp(&v3) * &gp(&x4))],
        )
        .unwrap();
        assert!(matches!(
            cancel_acyclic_pair(&m, &v3),
            Err(Error::ResidualOccurrence { .. })
        ));
    }

    #[test]
    fn morphism_chain_checks() {
        let b4 = Generator::new("b4", 4);
        let v15 = Generator::new("v15", 15);
        let x4 = Generator::new("x4", 4);
        let a15 = Generator::new("a15", 15);
        let src = FreeCdga::new("B", [b4.clone(), v15.clone()], [(v15.clone(), -gp(&b4).pow(4))]).unwrap();
        let tgt = FreeCdga::new("P", [x4.clone(), a15.clone()], [(a15.clone(), gp(&x4).pow(4))]).unwrap();
        let eta = Morphism::new(
            "eta",
            src.clone(),
            tgt.clone(),
            [(b4.clone(), gp(&x4)), (v15.clone(), -gp(&a15))],
        )
        .unwrap();
        assert!(eta.compose_and_check().is_ok());
        let bad = Morphism::new("bad", src, tgt, [(b4, gp(&x4)), (v15, gp(&a15))]).unwrap();
        let errs = bad.compose_and_check().unwrap_err();
        assert!(matches!(errs[0], MorphismViolation::ChainCondition { .. }));
        assert!(Morphism::identity(&hp1()).compose_and_check().is_ok());
    }

    #[test]
    fn morphism_degree_violation() {
        let m = hp1();
        let x4 = m.gen("x4").unwrap().clone();
        let x7 = m.gen("x7").unwrap().clone();
        let f = Morphism::new("f", m.clone(), m.clone(), [(x4.clone(), gp(&x7))]).unwrap();
        let errs = f.compose_and_check().unwrap_err();
        assert!(matches!(errs[0], MorphismViolation::ImageDegree { .. }));
    }

    #[test]
    fn pure_models() {
        assert!(pure_check(&hp1()));
        let (a3, b3, c5) = (
            Generator::new("a3", 3),
            Generator::new("b3", 3),
            Generator::new("c5", 5),
        );
        let m = FreeCdga::new("NP", [a3.clone(), b3.clone(), c5.clone()], [(c5, &gp(&a3) * &gp(&b3))]).unwrap();
        assert!(m.validate().is_ok());
        assert!(!pure_check(&m));
    }

    #[test]
    fn renaming_search_finds_bijection() {
        let m = hp1();
        let (y4, y7) = (Generator::new("y4", 4), Generator::new("y7", 7));
        let other = FreeCdga::new("HP1y", [y4.clone(), y7.clone()], [(y7, gp(&y4).pow(2))]).unwrap();
        let map = m.renaming_onto(&other).unwrap();
        assert_eq!(map[m.gen("x4").unwrap()], y4);
        let (z4, z7) = (Generator::new("z4", 4), Generator::new("z7", 7));
        let different = FreeCdga::new("S", [z4.clone(), z7.clone()], [(z7, -gp(&z4).pow(2))]).unwrap();
        assert!(m.renaming_onto(&different).is_none());
    }
}
