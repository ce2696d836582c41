//! Spectral Hodge theory of `(∧•L̄, d_L)` on the flat torus.
//!
//! Every frequency is an invariant finite-dimensional block. The fiber metric
//! makes the frame words `θ_I` orthonormal and the volume is normalised, so
//! adjoints are conjugate transposes of the per-frequency symbol matrices.

use crate::brackets::d_l_componentwise;
use crate::fields::{Frequency, LbarFiber, LbarSection};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Symbol matrices of one frequency block, on the word basis `θ_I`, `I = 0..4^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    pub n: usize,
    pub k: Frequency,
    pub d_l: Matrix,
    pub d_l_star: Matrix,
    pub laplacian: Matrix,
    pub harmonic: Matrix,
    pub green: Matrix,
}

impl SpectralDecomposition {
    pub fn build(n: usize, k: &Frequency) -> Self {
        let size = 1usize << (2 * n);
        // d_L symbol read off column by column from basis images.
        let mut cols = Vec::with_capacity(size);
        for m in 0..size {
            let s = LbarSection::single(n, k.clone(), LbarFiber::word(n, m as u32, Scalar::one()));
            let img = d_l_componentwise(&s);
            let v = img.terms.get(k).cloned().unwrap_or_else(|| LbarFiber::zero(n));
            cols.push((0..size).map(|i| v.get(i as u32)).collect::<Vec<_>>());
        }
        let d_l = Matrix::from_cols(&cols, size);
        let d_l_star = d_l.adjoint();
        let laplacian = d_l.mul(&d_l_star).add(&d_l_star.mul(&d_l));
        let kernel = laplacian.nullspace();
        let harmonic = if kernel.is_empty() {
            Matrix::zeros(size, size)
        } else {
            let nb = Matrix::from_cols(&kernel, size);
            let gram = nb.adjoint().mul(&nb).inverse().expect("kernel basis is independent");
            nb.mul(&gram).mul(&nb.adjoint())
        };
        let id = Matrix::identity(size);
        // Δ + H is invertible and (Δ + H)⁻¹(id − H) is the pseudo-inverse of Δ.
        let green = laplacian.add(&harmonic).inverse().expect("Δ + H is invertible").mul(&id.sub(&harmonic));
        SpectralDecomposition { n, k: k.clone(), d_l, d_l_star, laplacian, harmonic, green }
    }
}

pub fn spectral(n: usize, k: &Frequency) -> Arc<SpectralDecomposition> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, Frequency), Arc<SpectralDecomposition>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (n, k.clone());
    if let Some(s) = cache.lock().unwrap().get(&key) {
        return s.clone();
    }
    let s = Arc::new(SpectralDecomposition::build(n, k));
    cache.lock().unwrap().insert(key, s.clone());
    s
}

fn fiber_vec(v: &LbarFiber) -> Vec<Scalar> {
    (0..1u32 << (2 * v.n)).map(|m| v.get(m)).collect()
}

fn fiber_from(n: usize, x: &[Scalar]) -> LbarFiber {
    let mut f = LbarFiber::zero(n);
    for (m, c) in x.iter().enumerate() {
        f.add_term(m as u32, c);
    }
    f
}

fn blockwise(e: &LbarSection, pick: impl Fn(&SpectralDecomposition) -> &Matrix) -> LbarSection {
    let n = e.n;
    e.map(|k, v| {
        let sd = spectral(n, k);
        fiber_from(n, &pick(&sd).apply(&fiber_vec(v)))
    })
}

/// `d_L` through the spectral blocks.
pub fn d_l_spectral(e: &LbarSection) -> LbarSection {
    blockwise(e, |s| &s.d_l)
}

pub fn d_l_star(e: &LbarSection) -> LbarSection {
    blockwise(e, |s| &s.d_l_star)
}

pub fn laplacian(e: &LbarSection) -> LbarSection {
    blockwise(e, |s| &s.laplacian)
}

pub fn green(e: &LbarSection) -> LbarSection {
    blockwise(e, |s| &s.green)
}

pub fn harmonic(e: &LbarSection) -> LbarSection {
    blockwise(e, |s| &s.harmonic)
}

/// Constant words of degree `p`; on the flat torus these span the harmonics.
pub fn harmonic_basis(n: usize, p: usize) -> Vec<LbarSection> {
    (0..1u32 << (2 * n))
        .filter(|m| m.count_ones() as usize == p)
        .map(|m| LbarSection::constant(LbarFiber::word(n, m, Scalar::one())))
        .collect()
}

/// `L²` product `Σ_k Σ_I conj(a_{k,I}) b_{k,I}`.
pub fn inner(a: &LbarSection, b: &LbarSection) -> Scalar {
    let mut acc = Scalar::zero();
    for (k, va) in &a.terms {
        if let Some(vb) = b.terms.get(k) {
            for (m, c) in &va.coeffs {
                acc += &(&c.conj() * &vb.get(*m));
            }
        }
    }
    acc
}

/// `(H e, d_L d_L* G e, d_L* d_L G e)`.
pub fn hodge_decompose(e: &LbarSection) -> (LbarSection, LbarSection, LbarSection) {
    let g = green(e);
    (harmonic(e), d_l_spectral(&d_l_star(&g)), d_l_star(&d_l_spectral(&g)))
}
