//! Standard models and the two model factories: biquotients `K\G/H` from
//! classifying-space data, and projectivizations of quaternionic bundles
//! from Pontryagin data.

use std::collections::BTreeMap;

use crate::cdga::{tensor_with_renaming, FreeCdga};
use crate::error::{Error, Result};
use crate::gradedalg::{Generator, Polynomial};

/// Model of `BSp(n)`: `Λ(y4, …, y4n)` with zero differential.
pub fn bsp_model(n: u32) -> Result<FreeCdga> {
    if n == 0 {
        return Err(Error::InvalidInput("BSp(n) needs n >= 1".into()));
    }
    let gens = (1..=n).map(|i| Generator::new(format!("y{}", 4 * i), 4 * i));
    FreeCdga::new(format!("BSp({n})"), gens, [])
}

/// Minimal model of `S^d` for `d ≡ 0 (mod 4)`: `Λ(a_d, a_{2d-1})`, `d a_{2d-1} = a_d²`.
pub fn sphere_model(d: u32) -> Result<FreeCdga> {
    if d == 0 || !d.is_multiple_of(4) {
        return Err(Error::UnsupportedDimension(d));
    }
    let a = Generator::new(format!("a{d}"), d);
    let b = Generator::new(format!("a{}", 2 * d - 1), 2 * d - 1);
    FreeCdga::new(
        format!("S{d}"),
        [a.clone(), b.clone()],
        [(b, Polynomial::generator(&a).pow(2))],
    )
}

/// Minimal model of `ℍPⁿ` on generators `x4`, `x{4n+3}`.
pub fn hp_model(n: u32) -> Result<FreeCdga> {
    hp_model_with(n, "x")
}

/// Minimal model of `ℍPⁿ` with a chosen generator letter:
/// `Λ(l4, l{4n+3})`, `d l{4n+3} = l4^{n+1}`.
pub fn hp_model_with(n: u32, letter: &str) -> Result<FreeCdga> {
    if n == 0 {
        return Err(Error::InvalidInput("HP^n needs n >= 1".into()));
    }
    let x = Generator::new(format!("{letter}4"), 4);
    let top = 4 * n + 3;
    let y = Generator::new(format!("{letter}{top}"), top);
    FreeCdga::new(
        format!("HP{n}"),
        [x.clone(), y.clone()],
        [(y, Polynomial::generator(&x).pow(n + 1))],
    )
}

/// A generator of `V` (so that `H*(BG) = ΛV`) and the name of its
/// desuspension `sv`, defaulting to `s<name>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuspendedGenerator {
    pub generator: Generator,
    pub suspension: Option<String>,
}

impl SuspendedGenerator {
    pub fn new(generator: Generator) -> Self {
        SuspendedGenerator {
            generator,
            suspension: None,
        }
    }

    pub fn named(generator: Generator, suspension: impl Into<String>) -> Self {
        SuspendedGenerator {
            generator,
            suspension: Some(suspension.into()),
        }
    }

    pub fn suspended(&self) -> Generator {
        let name = self
            .suspension
            .clone()
            .unwrap_or_else(|| format!("s{}", self.generator.name()));
        Generator::new(name, self.generator.degree() - 1)
    }
}

/// Classifying-space data of a biquotient: `ΛW_H = H*(BH)`, `ΛW_K = H*(BK)`,
/// `ΛV = H*(BG)` and the restriction maps `φ_H`, `φ_K` on generators of `V`.
/// Missing images are zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassifyingData {
    pub name: String,
    pub wh: Vec<Generator>,
    pub wk: Vec<Generator>,
    pub v: Vec<SuspendedGenerator>,
    pub phi_h: BTreeMap<Generator, Polynomial>,
    pub phi_k: BTreeMap<Generator, Polynomial>,
}

impl ClassifyingData {
    fn check_images(&self, which: &str, images: &BTreeMap<Generator, Polynomial>, allowed: &[Generator]) -> Result<()> {
        for (v, img) in images {
            if !self.v.iter().any(|s| &s.generator == v) {
                return Err(Error::UnknownGenerator(v.name().to_string()));
            }
            if let Some(h) = img.generators().into_iter().find(|h| !allowed.contains(h)) {
                return Err(Error::UnknownGenerator(h.name().to_string()));
            }
            if !img.is_homogeneous_of(v.degree()) {
                return Err(Error::DegreeMismatch {
                    context: format!("{which}({v}) = {img}"),
                    expected: v.degree(),
                    found: img.degrees().into_iter().collect(),
                });
            }
        }
        Ok(())
    }
}

/// `(Λ(W_H ⊕ W_K) ⊗ Λ(sV), d)` with `dw = 0` and `d(sv) = φ_H(v) − φ_K(v)`.
pub fn biquotient_model(data: &ClassifyingData) -> Result<FreeCdga> {
    data.check_images("phiH", &data.phi_h, &data.wh)?;
    data.check_images("phiK", &data.phi_k, &data.wk)?;
    if let Some(v) = data.v.iter().find(|s| s.generator.degree() < 2) {
        return Err(Error::InvalidInput(format!(
            "generator {} of V has degree {}; its desuspension would have degree 0",
            v.generator,
            v.generator.degree()
        )));
    }
    let zero = Polynomial::zero();
    let mut gens: Vec<Generator> = data.wh.iter().chain(&data.wk).cloned().collect();
    let mut diffs = Vec::new();
    for s in &data.v {
        let sv = s.suspended();
        let dh = data.phi_h.get(&s.generator).unwrap_or(&zero);
        let dk = data.phi_k.get(&s.generator).unwrap_or(&zero);
        diffs.push((sv.clone(), dh - dk));
        gens.push(sv);
    }
    FreeCdga::new(data.name.clone(), gens, diffs)?.validated()
}

/// A quaternionic rank-`n` bundle over a base model, described by cocycle
/// representatives `p_1, …, p_n` of its Pontryagin classes (`p_i` in degree
/// `4i`; missing trailing classes are zero).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PontryaginData {
    pub base: FreeCdga,
    pub classes: Vec<Polynomial>,
    pub rank: u32,
}

/// `(A ⊗ Λ(x4, x_{4n-1}), D)` with `D x_{4n-1} = x4ⁿ + Σ p_i x4^{n-i}` and
/// `D` restricting to the differential of `A`.
pub fn projectivize(data: &PontryaginData) -> Result<FreeCdga> {
    let n = data.rank;
    if n == 0 {
        return Err(Error::InvalidInput("bundle rank must be at least 1".into()));
    }
    if data.classes.len() > n as usize {
        return Err(Error::InvalidInput(format!(
            "{} Pontryagin classes given for a rank {n} bundle",
            data.classes.len()
        )));
    }
    for (i, p) in data.classes.iter().enumerate() {
        let expected = 4 * (i as u32 + 1);
        if !p.is_homogeneous_of(expected) {
            return Err(Error::DegreeMismatch {
                context: format!("p{} = {p}", i + 1),
                expected,
                found: p.degrees().into_iter().collect(),
            });
        }
        if !data.base.apply_d(p)?.is_zero() {
            return Err(Error::NotACocycle(format!("p{} = {p}", i + 1)));
        }
    }
    let x4 = Generator::new("x4", 4);
    let top = Generator::new(format!("x{}", 4 * n - 1), 4 * n - 1);
    let fiber = FreeCdga::new(format!("HP{}", n - 1), [x4.clone(), top.clone()], [])?;
    let (total, renaming) = tensor_with_renaming(&data.base, &fiber);
    let x4 = renaming.get(&x4).cloned().unwrap_or(x4);
    let top = renaming.get(&top).cloned().unwrap_or(top);
    let x = Polynomial::generator(&x4);
    let mut dtop = x.pow(n);
    for (i, p) in data.classes.iter().enumerate() {
        dtop += p * &x.pow(n - 1 - i as u32);
    }
    let name = format!("P({})", data.base.name());
    total.with_differential(&top, dtop)?.with_name(name).validated()
}
