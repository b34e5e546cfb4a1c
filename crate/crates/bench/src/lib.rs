//! Fixed inputs shared by the benchmarks.

use young_core::generators::{random_hermitian, random_pair, stream, GeneratorConfig};
use young_core::ComplexMatrix;

pub const SIZES: [usize; 4] = [4, 8, 16, 32];

pub fn hermitian(n: usize) -> ComplexMatrix {
    random_hermitian(&mut stream(n as u64, 0), n)
}

pub fn pair(n: usize, p: f64) -> (ComplexMatrix, ComplexMatrix) {
    let cfg = GeneratorConfig::new(n as u64, n)
        .and_then(|c| c.with_p(p))
        .expect("bench dimensions are valid");
    random_pair(&cfg)
}
