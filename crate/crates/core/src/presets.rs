//! Shipped example documents and generators for the parametric families.
//!
//! The `.rht` files under `presets/` are the data for the default parameters;
//! the `*_source` functions produce the same documents for any `n` and any
//! choice of the free rational coefficients.

use std::fmt;
use std::str::FromStr;

use num_integer::binomial;

use crate::cdga::FreeCdga;
use crate::constructors::{ClassifyingData, PontryaginData, SuspendedGenerator};
use crate::dsl::{self, parse_document, Discrepancy, Document, Pos};
use crate::error::{Error, Result};
use crate::gradedalg::{scalar, Generator, Polynomial, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Preset {
    pub file: &'static str,
    pub description: &'static str,
    pub source: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        file: "hp1.rht",
        description: "quaternionic projective line",
        source: include_str!("../presets/hp1.rht"),
    },
    Preset {
        file: "hp2.rht",
        description: "quaternionic projective plane",
        source: include_str!("../presets/hp2.rht"),
    },
    Preset {
        file: "s4.rht",
        description: "4-sphere",
        source: include_str!("../presets/s4.rht"),
    },
    Preset {
        file: "s8.rht",
        description: "8-sphere",
        source: include_str!("../presets/s8.rht"),
    },
    Preset {
        file: "thm34.rht",
        description: "HP1-bundle over HP2 with p1 = y4, p2 = y4^2 against Sp(1)\\Sp(3)/(Sp(1)×Sp(1))",
        source: include_str!("../presets/thm34.rht"),
    },
    Preset {
        file: "thm33_n2.rht",
        description: "HP1-bundle over S8 with p2 = a8 against Sp(1)\\Sp(4)/Sp(3)",
        source: include_str!("../presets/thm33_n2.rht"),
    },
    Preset {
        file: "thm33_n3.rht",
        description: "HP2-bundle over S12 with p3 = a12 against Sp(1)\\Sp(6)/Sp(5)",
        source: include_str!("../presets/thm33_n3.rht"),
    },
    Preset {
        file: "prop31_n2.rht",
        description: "Sp(1)\\(Sp(1)×Sp(1))/Sp(1) from the stated classifying maps",
        source: include_str!("../presets/prop31_n2.rht"),
    },
    Preset {
        file: "prop31_n3.rht",
        description: "Sp(1)\\(Sp(1)×Sp(2))/Sp(2) from the stated classifying maps",
        source: include_str!("../presets/prop31_n3.rht"),
    },
    Preset {
        file: "prop32_n2.rht",
        description: "Sp(1)\\Sp(3)/(Sp(1)×Sp(1)) with beta = (3, 3, 1)",
        source: include_str!("../presets/prop32_n2.rht"),
    },
];

pub fn preset(file: &str) -> Option<&'static Preset> {
    PRESETS
        .iter()
        .find(|p| p.file == file || p.file.strip_suffix(".rht") == Some(file))
}

pub fn load(file: &str) -> Result<Document> {
    let p = preset(file).ok_or_else(|| Error::InvalidInput(format!("no preset named {file}")))?;
    Ok(parse_document(p.source)?)
}

/// The four worked families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Case {
    Prop31,
    Prop32,
    Thm33,
    Thm34,
}

impl Case {
    pub const ALL: [Case; 4] = [Case::Prop31, Case::Prop32, Case::Thm33, Case::Thm34];

    pub fn id(self) -> &'static str {
        match self {
            Case::Prop31 => "prop31",
            Case::Prop32 => "prop32",
            Case::Thm33 => "thm33",
            Case::Thm34 => "thm34",
        }
    }

    pub fn default_n(self) -> u32 {
        2
    }

    pub fn min_n(self) -> u32 {
        match self {
            Case::Thm33 => 1,
            _ => 2,
        }
    }

    pub fn description(self, n: u32) -> String {
        match self {
            Case::Prop31 => format!("Sp(1)\\(Sp(1)×Sp({m}))/Sp({m}), n = {n}", m = n - 1),
            Case::Prop32 => format!("Sp(1)\\Sp({})/(Sp(1)×Sp({})), n = {n}", n + 1, n - 1),
            Case::Thm33 => format!(
                "HP{}-bundle over S{} versus Sp(1)\\Sp({})/Sp({}), n = {n}",
                n - 1,
                4 * n,
                2 * n,
                2 * n - 1
            ),
            Case::Thm34 => "HP1-bundle over HP2 versus Sp(1)\\Sp(3)/(Sp(1)×Sp(1))".to_string(),
        }
    }

    /// Source text for parameter `n` with default coefficients: the shipped
    /// file when there is one, otherwise generated.
    pub fn source(self, n: u32) -> Result<String> {
        let shipped = match (self, n) {
            (Case::Thm34, _) => Some("thm34.rht"),
            (Case::Thm33, 2) => Some("thm33_n2.rht"),
            (Case::Thm33, 3) => Some("thm33_n3.rht"),
            (Case::Prop31, 2) => Some("prop31_n2.rht"),
            (Case::Prop31, 3) => Some("prop31_n3.rht"),
            (Case::Prop32, 2) => Some("prop32_n2.rht"),
            _ => None,
        };
        if let Some(file) = shipped {
            return Ok(preset(file).expect("shipped preset").source.to_string());
        }
        match self {
            Case::Prop31 => prop31_source(n),
            Case::Prop32 => prop32_source(n, &prop32_default_betas(n)),
            Case::Thm33 => thm33_source(n, &thm33_default_coefficients(n)),
            Case::Thm34 => unreachable!("thm34 is shipped"),
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Case::ALL
            .into_iter()
            .find(|c| c.id() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown case {s}; expected prop31, prop32, thm33 or thm34")))
    }
}

fn check_n(case: Case, n: u32) -> Result<()> {
    if n < case.min_n() || n > 12 {
        return Err(Error::InvalidInput(format!(
            "{case} needs {} <= n <= 12, got {n}",
            case.min_n()
        )));
    }
    Ok(())
}

fn g(name: impl AsRef<str>, degree: u32) -> Generator {
    Generator::new(name, degree)
}

fn p(gen: &Generator) -> Polynomial {
    Polynomial::generator(gen)
}

fn discrepancy(
    id: String,
    stated: (Generator, Polynomial),
    corrected: (Generator, Polynomial),
    note: &str,
) -> Discrepancy {
    Discrepancy {
        id,
        pos: Pos::default(),
        stated: Some(stated),
        corrected: Some(corrected),
        note: Some(note.to_string()),
    }
}

fn note_only(id: &str, note: String) -> String {
    format!("discrepancy {id} {{\n  note {note:?};\n}}\n")
}

// ---------------------------------------------------------------- sphere bundles

/// `c_k = n + 1` for `k = 1, …, 2n − 1`.
pub fn thm33_default_coefficients(n: u32) -> Vec<Scalar> {
    vec![scalar(i64::from(n) + 1); (2 * n - 1) as usize]
}

/// Biquotient data: `d v_{4k-1} = z_{4k} − c_k b4^k` for `k < 2n` and
/// `d v_{8n-1} = −b4^{2n}`.
pub fn thm33_data(n: u32, coefficients: &[Scalar]) -> Result<ClassifyingData> {
    check_n(Case::Thm33, n)?;
    if coefficients.len() != (2 * n - 1) as usize {
        return Err(Error::InvalidInput(format!(
            "expected {} coefficients, got {}",
            2 * n - 1,
            coefficients.len()
        )));
    }
    let b4 = g("b4", 4);
    let mut data = ClassifyingData {
        name: "B".into(),
        wk: vec![b4.clone()],
        ..ClassifyingData::default()
    };
    for k in 1..=2 * n {
        let v = g(format!("v{}", 4 * k), 4 * k);
        data.v
            .push(SuspendedGenerator::named(v.clone(), format!("v{}", 4 * k - 1)));
        if k < 2 * n {
            let z = g(format!("z{}", 4 * k), 4 * k);
            data.wh.push(z.clone());
            data.phi_h.insert(v.clone(), p(&z));
            data.phi_k
                .insert(v, p(&b4).pow(k).scale(&coefficients[(k - 1) as usize]));
        } else {
            data.phi_k.insert(v, p(&b4).pow(k));
        }
    }
    Ok(data)
}

pub fn thm33_source(n: u32, coefficients: &[Scalar]) -> Result<String> {
    let data = thm33_data(n, coefficients)?;
    let (d, top) = (4 * n, 8 * n - 1);
    let base = FreeCdga::new(
        format!("S{d}"),
        [g(format!("a{d}"), d), g(format!("a{top}"), top)],
        [(g(format!("a{top}"), top), p(&g(format!("a{d}"), d)).pow(2))],
    )?;
    let mut classes = vec![Polynomial::zero(); n as usize];
    classes[(n - 1) as usize] = p(&g(format!("a{d}"), d));
    let bundle = PontryaginData {
        base: base.clone(),
        classes,
        rank: n,
    };
    let x4 = g("x4", 4);
    let a = g(format!("a{top}"), top);
    let pe_reduced = FreeCdga::new("PEreduced", [x4.clone(), a.clone()], [(a.clone(), p(&x4).pow(2 * n))])?;
    let b4 = g("b4", 4);
    let v = g(format!("v{top}"), top);
    let b_reduced = FreeCdga::new("Breduced", [b4.clone(), v.clone()], [(v.clone(), -p(&b4).pow(2 * n))])?;

    let mut out = format!(
        "# Rank {n} quaternionic bundle over S{d} with p{n} = a{d}, and the biquotient\n\
         # Sp(1)\\Sp({})/Sp({}). Coefficients c_k of phiK are free parameters.\n\n",
        2 * n,
        2 * n - 1
    );
    out.push_str(&dsl::render_model(&base));
    out.push('\n');
    out.push_str(&dsl::render_bundle("PE", &bundle));
    out.push('\n');
    out.push_str("# expected result of reducing PE\n");
    out.push_str(&dsl::render_model(&pe_reduced));
    out.push('\n');
    out.push_str(&dsl::render_biquotient(&data));
    out.push('\n');
    out.push_str("# expected result of reducing B\n");
    out.push_str(&dsl::render_model(&b_reduced));
    out.push('\n');
    out.push_str(&format!(
        "morphism eta : Breduced -> PEreduced {{\n  b4 -> x4;\n  v{top} -> -a{top};\n}}\n"
    ));
    if n >= 2 {
        let stated_coeff = scalar(i64::from(n) + 1);
        let z = |k: u32| g(format!("z{}", 4 * k), 4 * k);
        let vk = |k: u32| g(format!("v{}", 4 * k - 1), 4 * k - 1);
        let first = discrepancy(
            "dv7".into(),
            (vk(2), &p(&z(2)) - &p(&b4).pow(4).scale(&stated_coeff)),
            (vk(2), &p(&z(2)) - &p(&b4).pow(2).scale(&coefficients[1])),
            "exponent of b4 printed as 4; degree 8 needs b4^2",
        );
        let last = discrepancy(
            format!("dv{}", 8 * n - 5),
            (
                vk(2 * n - 1),
                &p(&z(2 * n - 1)) - &p(&b4).pow(2 * (n - 1)).scale(&stated_coeff),
            ),
            (
                vk(2 * n - 1),
                &p(&z(2 * n - 1)) - &p(&b4).pow(2 * n - 1).scale(&coefficients[(2 * n - 2) as usize]),
            ),
            "general exponent printed as 2(n-1); degree 8n-4 needs 2n-1",
        );
        out.push('\n');
        out.push_str(&dsl::render_discrepancy(&first));
        if first.id != last.id {
            out.push('\n');
            out.push_str(&dsl::render_discrepancy(&last));
        }
    }
    out.push('\n');
    out.push_str(&note_only(
        "eta",
        format!("image of v{top} printed as -b{top}, which is not a generator of the target; -a{top} satisfies the chain condition"),
    ));
    Ok(out)
}

// ---------------------------------------------------------------- prop31

/// `H = Sp(n−1)` with generators `v4, …, v_{4n−4}`, `K = Sp(1)` with `a4`,
/// `V = {b4, z4, …, z_{4n−4}}`; `φ_K(b4) = φ_K(z4) = a4`, `φ_K(z_{4i}) = 0`
/// for `i ≥ 2`, `φ_H(b4) = v4`, `φ_H(z_{4i}) = v_{4i}`.
pub fn prop31_data(n: u32) -> Result<ClassifyingData> {
    check_n(Case::Prop31, n)?;
    let a4 = g("a4", 4);
    let v = |i: u32| g(format!("v{}", 4 * i), 4 * i);
    let mut data = ClassifyingData {
        name: "B".into(),
        wh: (1..n).map(v).collect(),
        wk: vec![a4.clone()],
        ..ClassifyingData::default()
    };
    let b4 = g("b4", 4);
    data.v.push(SuspendedGenerator::named(b4.clone(), "b3"));
    data.phi_h.insert(b4.clone(), p(&v(1)));
    data.phi_k.insert(b4, p(&a4));
    for i in 1..n {
        let z = g(format!("z{}", 4 * i), 4 * i);
        data.v
            .push(SuspendedGenerator::named(z.clone(), format!("z{}", 4 * i - 1)));
        data.phi_h.insert(z.clone(), p(&v(i)));
        if i == 1 {
            data.phi_k.insert(z, p(&a4));
        }
    }
    Ok(data)
}

pub const PROP31_CLAIM: &str = "the model is stated to be contractible";

pub fn prop31_source(n: u32) -> Result<String> {
    let data = prop31_data(n)?;
    let mut out = format!(
        "# Sp(1)\\(Sp(1)×Sp({m}))/Sp({m}) built from the stated classifying maps.\n\n",
        m = n - 1
    );
    out.push_str(&dsl::render_biquotient(&data));
    out.push('\n');
    out.push_str(&note_only("contractible", PROP31_CLAIM.to_string()));
    if n >= 3 {
        let z7 = g("z7", 7);
        let v8 = g("v8", 8);
        let a4 = g("a4", 4);
        let d = discrepancy(
            "dz7".into(),
            (z7.clone(), &p(&v8) - &p(&a4).pow(2)),
            (z7, p(&v8)),
            "phiK(z8) = 0 gives dz7 = v8 with no a4^2 term",
        );
        out.push('\n');
        out.push_str(&dsl::render_discrepancy(&d));
    }
    Ok(out)
}

// ---------------------------------------------------------------- prop32

/// `β_{4k−1} = C(n+1, k)` for `k = 1, …, n+1`.
pub fn prop32_default_betas(n: u32) -> Vec<Scalar> {
    (1..=n + 1)
        .map(|k| Scalar::from_integer(binomial(u64::from(n) + 1, u64::from(k)).into()))
        .collect()
}

fn check_betas(n: u32, betas: &[Scalar]) -> Result<()> {
    check_n(Case::Prop32, n)?;
    if betas.len() != (n + 1) as usize {
        return Err(Error::InvalidInput(format!(
            "expected {} beta coefficients (beta3, beta7, …, beta{}), got {}",
            n + 1,
            4 * n + 3,
            betas.len()
        )));
    }
    Ok(())
}

/// `H = Sp(1)×Sp(n−1)` with `x4, b4, …, b_{4n−4}`, `K = Sp(1)` with `c4`,
/// `V = {a4, …, a_{4n+4}}`; `φ_H(a_{4k}) = x4·b_{4k−4} + b_{4k}` (with
/// `b_0 = 1` and `b_j = 0` past `4n−4`), `φ_K(a_{4k}) = β_{4k−1} c4^k`.
pub fn prop32_data(n: u32, betas: &[Scalar]) -> Result<ClassifyingData> {
    check_betas(n, betas)?;
    let x4 = g("x4", 4);
    let c4 = g("c4", 4);
    let b = |i: u32| -> Polynomial {
        match i {
            0 => Polynomial::one(),
            i if i < n => p(&g(format!("b{}", 4 * i), 4 * i)),
            _ => Polynomial::zero(),
        }
    };
    let mut data = ClassifyingData {
        name: "B".into(),
        wh: std::iter::once(x4.clone())
            .chain((1..n).map(|i| g(format!("b{}", 4 * i), 4 * i)))
            .collect(),
        wk: vec![c4.clone()],
        ..ClassifyingData::default()
    };
    for k in 1..=n + 1 {
        let a = g(format!("a{}", 4 * k), 4 * k);
        data.v
            .push(SuspendedGenerator::named(a.clone(), format!("a{}", 4 * k - 1)));
        data.phi_h.insert(a.clone(), &(&p(&x4) * &b(k - 1)) + &b(k));
        data.phi_k.insert(a, p(&c4).pow(k).scale(&betas[(k - 1) as usize]));
    }
    Ok(data)
}

/// The reduced model in closed form: `Λ(b4, c4, a_{4n−1}, a_{4n+3})` with
/// `d a_{4n−1} = (−b4 + β3 c4)·B_{n−1} − β_{4n−1} c4ⁿ`, `d a_{4n+3} =
/// −β_{4n+3} c4^{n+1}`, where `B_1 = b4` and `B_k = (b4 − β3 c4) B_{k−1} +
/// β_{4k−1} c4^k`.
pub fn prop32_reduced(n: u32, betas: &[Scalar]) -> Result<FreeCdga> {
    check_betas(n, betas)?;
    let b4 = g("b4", 4);
    let c4 = g("c4", 4);
    let step = &p(&b4) - &p(&c4).scale(&betas[0]);
    let mut bk = p(&b4);
    for k in 2..n {
        bk = &(&step * &bk) + &p(&c4).pow(k).scale(&betas[(k - 1) as usize]);
    }
    let low = g(format!("a{}", 4 * n - 1), 4 * n - 1);
    let high = g(format!("a{}", 4 * n + 3), 4 * n + 3);
    let d_low = &(&(-&step) * &bk) - &p(&c4).pow(n).scale(&betas[(n - 1) as usize]);
    let d_high = -p(&c4).pow(n + 1).scale(&betas[n as usize]);
    FreeCdga::new(
        "Breduced",
        [b4, c4, low.clone(), high.clone()],
        [(low, d_low), (high, d_high)],
    )?
    .validated()
}

pub fn prop32_source(n: u32, betas: &[Scalar]) -> Result<String> {
    let data = prop32_data(n, betas)?;
    let reduced = prop32_reduced(n, betas)?;
    let rendered: Vec<String> = betas.iter().map(ToString::to_string).collect();
    let mut out = format!(
        "# Sp(1)\\Sp({})/(Sp(1)×Sp({})) with beta = ({}).\n\n",
        n + 1,
        n - 1,
        rendered.join(", ")
    );
    out.push_str(&dsl::render_biquotient(&data));
    out.push('\n');
    out.push_str("# closed form of the reduced model\n");
    out.push_str(&dsl::render_model(&reduced));

    let x4 = g("x4", 4);
    let c4 = g("c4", 4);
    let bn = g(format!("b{}", 4 * n - 4), 4 * n - 4);
    let low = g(format!("a{}", 4 * n - 1), 4 * n - 1);
    let high = g(format!("a{}", 4 * n + 3), 4 * n + 3);
    let beta_low = &betas[(n - 1) as usize];
    let beta_high = &betas[n as usize];
    let x4b = &p(&x4) * &p(&bn);
    let first = discrepancy(
        format!("da{}", 4 * n - 1),
        (low.clone(), &x4b - &p(&c4).pow(n - 1).scale(beta_low)),
        (low, &x4b - &p(&c4).pow(n).scale(beta_low)),
        "exponent of c4 printed as n-1; the degree forces n",
    );
    let second = discrepancy(
        format!("da{}", 4 * n + 3),
        (high.clone(), -p(&c4).pow(n - 1).scale(beta_high)),
        (high, -p(&c4).pow(n + 1).scale(beta_high)),
        "exponent of c4 printed as n-1; the degree forces n+1",
    );
    for d in [first, second] {
        out.push('\n');
        out.push_str(&dsl::render_discrepancy(&d));
    }
    Ok(out)
}

/// Parses comma-separated rationals such as `3, 3/2, -1`.
pub fn parse_scalars(text: &str) -> Result<Vec<Scalar>> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<Scalar>()
                .map_err(|_| Error::InvalidInput(format!("not a rational number: {s:?}")))
        })
        .collect()
}
