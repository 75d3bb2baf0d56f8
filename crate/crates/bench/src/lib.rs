//! Models used by the benchmarks.

use rht_core::constructors::{biquotient_model, bsp_model, hp_model, projectivize, PontryaginData};
use rht_core::presets;
use rht_core::{FreeCdga, Polynomial};

/// Biquotient model of the sphere-bundle family at `n`.
pub fn sphere_family(n: u32) -> FreeCdga {
    let data = presets::thm33_data(n, &presets::thm33_default_coefficients(n)).expect("valid n");
    biquotient_model(&data).expect("valid data")
}

/// Rank-`rank` projectivization over `HP^base` with `p_i = x4^i`.
pub fn hp_bundle(base: u32, rank: u32) -> FreeCdga {
    let m = hp_model(base).expect("base >= 1");
    let x4 = Polynomial::generator(m.gen("x4").expect("x4"));
    let classes = (1..=rank).map(|i| x4.pow(i)).collect();
    projectivize(&PontryaginData { base: m, classes, rank }).expect("valid bundle")
}

/// Polynomial ring on `n` generators of degrees 4, 8, …, 4n.
pub fn classifying(n: u32) -> FreeCdga {
    bsp_model(n).expect("n >= 1")
}
