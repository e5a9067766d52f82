//! Fixed inputs shared by the benchmarks.

use extpow::extrep::cauchy_binet;
use extpow::forms::form_polarized;
use extpow::sample::{random_gl, rng};
use extpow::{Matrix, MultilinearForm, RepMatrix, Ring, Subset};

pub const SEED: u64 = 0x5eed;

/// A random element of `GL_n` over `ring`.
pub fn base_matrix(n: usize, ring: &Ring) -> Matrix {
    random_gl(n, ring, &mut rng(SEED))
}

/// `∧^m h` for the fixed `h`.
pub fn image(n: usize, m: usize, ring: &Ring) -> RepMatrix {
    cauchy_binet(&base_matrix(n, ring), m).expect("valid parameters")
}

pub fn form(n: usize, m: usize) -> MultilinearForm {
    form_polarized(&Subset::full(n).expect("n fits"), m, &Ring::integers()).expect("valid parameters")
}
