//! Generalized Kähler co-deformation on the flat torus: the `U`-grading,
//! integrability through `π_{U^{-n+3}}`, realification `ε(t) → a(t)`, the quad
//! bundle and the closedness correction `b(t)`.
//!
//! The spinor factor `e^{Z(t)}` is always kept in the factored form
//! `e^{a(t)}e^{b(t)}`; no logarithm is taken.

use crate::algebra::{
    self, ad_matrix, canonical_form, clifford_mul, lbar_generator, real_dim, spin_action, CliffordFiber, FormFiber,
    GCFiberStructure, TangentCotangentFiber,
};
use crate::fields::{
    clifford_apply, clifford_product, decode_section, exterior_d, lbar_frame, lbar_to_clifford,
    reality_check, CliffordSection, Fiber, FormSection, Frequency, LbarFiber, LbarSection, MatrixSection,
};
use crate::hodge::{d_l_star, green, harmonic};
use crate::linalg::Matrix;
use crate::mc::{exp_series, LbarSeries, TruncatedSeries};
use crate::scalar::Scalar;
use std::collections::BTreeSet;
use thiserror::Error;

pub type CliffordSeries = TruncatedSeries<CliffordFiber>;
pub type FormSeries = TruncatedSeries<FormFiber>;
pub type MatrixSeries = TruncatedSeries<Matrix>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GkError {
    #[error("order {order}: linear system has no solution at frequency {frequency:?}")]
    NoSolution { order: usize, frequency: Frequency },
    #[error("order {order}: d_L-harmonic obstruction, squared norm {norm_sq}")]
    Obstruction { order: usize, norm_sq: String },
    #[error("order {order}: solution is not real")]
    NotReal { order: usize },
    #[error("spinor is not pure: annihilator dimension {dim}")]
    NotPure { dim: usize },
    #[error("spinor is degenerate: Mukai pairing with its conjugate vanishes")]
    Degenerate,
}

/// Constant matrix section (the generic `constant` reads `n` off the fiber, which fails for matrices).
pub fn matrix_const(n: usize, m: Matrix) -> MatrixSection {
    MatrixSection::single(n, vec![0; 2 * n], m)
}

pub fn matrix_product(a: &MatrixSection, b: &MatrixSection) -> MatrixSection {
    a.convolve(b, |x, y| x.mul(y))
}

pub fn constant_series<V: Fiber>(n: usize, order: usize, s: crate::fields::FourierSection<V>) -> TruncatedSeries<V> {
    let mut r = TruncatedSeries::zero(n, 1, order);
    r.set(vec![0], s);
    r
}

/// Evaluate a one-variable series at a rational `t`.
pub fn evaluate<V: Fiber>(s: &TruncatedSeries<V>, t: &Scalar) -> crate::fields::FourierSection<V> {
    let mut acc = crate::fields::FourierSection::zero(s.n);
    for (a, c) in &s.coeffs {
        acc = acc.add(&c.scale(&t.pow(a[0] as u32)));
    }
    acc
}

/// Value at the sample point `x = 0`.
pub fn at_origin<V: Fiber>(s: &crate::fields::FourierSection<V>) -> Option<V> {
    s.terms.values().cloned().reduce(|a, b| a.add(&b))
}

/// `e^{x}` for a Clifford series without constant term.
pub fn clifford_exp(x: &CliffordSeries) -> CliffordSeries {
    let one = CliffordSection::single(x.n, vec![0; 2 * x.n], CliffordFiber::identity(x.n));
    exp_series(x, &one, &clifford_product)
}

pub fn act(c: &CliffordSeries, f: &FormSeries) -> FormSeries {
    c.mul(f, clifford_apply)
}

pub fn d_series(f: &FormSeries) -> FormSeries {
    f.map(exterior_d)
}

/// `e^{a}e^{b}·φ` for a constant form `φ`.
pub fn spinor_series(a: &CliffordSeries, b: &CliffordSeries, phi: &FormFiber) -> FormSeries {
    let f = constant_series(a.n, a.order, FormSection::constant(phi.clone()));
    act(&clifford_exp(a), &act(&clifford_exp(b), &f))
}

/// `e^{-b}e^{-a} d e^{a}e^{b} · φ` for a constant form `φ`.
pub fn conjugated_d(a: &CliffordSeries, b: &CliffordSeries, phi: &FormFiber) -> FormSeries {
    let m1 = Scalar::from_int(-1);
    let inner = d_series(&spinor_series(a, b, phi));
    act(&clifford_exp(&b.scale(&m1)), &act(&clifford_exp(&a.scale(&m1)), &inner))
}

/// Projectors `π_{U^{-n+p}}` on forms, for the standard `𝒥_J`.
#[derive(Clone, Debug)]
pub struct UGrading {
    pub n: usize,
    pub projectors: Vec<Matrix>,
}

impl UGrading {
    pub fn new(n: usize) -> Self {
        let frame = lbar_frame(n);
        let size = 1usize << (2 * n);
        let cols: Vec<Vec<Scalar>> = frame.word_on_omega.iter().map(|f| f.to_vec()).collect();
        let enc = Matrix::from_cols(&cols, size);
        let projectors = (0..=2 * n)
            .map(|p| {
                let mut d = Matrix::zeros(size, size);
                for m in 0..size {
                    if (m as u32).count_ones() as usize == p {
                        d.set(m, m, Scalar::one());
                    }
                }
                enc.mul(&d).mul(&frame.decode)
            })
            .collect();
        UGrading { n, projectors }
    }

    pub fn project_fiber(&self, p: usize, phi: &FormFiber) -> FormFiber {
        FormFiber::from_vec(self.n, &self.projectors[p].apply(&phi.to_vec()))
    }

    pub fn project(&self, p: usize, s: &FormSection) -> FormSection {
        s.map(|_, v| self.project_fiber(p, v))
    }

    /// Grades `p` with a nonzero component.
    pub fn support(&self, s: &FormSection) -> BTreeSet<usize> {
        (0..=2 * self.n).filter(|p| !self.project(*p, s).is_zero()).collect()
    }
}

/// `π_{U^{-n+3}}((e^{-a}de^{a})_{[k]}·Ω)`.
pub fn integrability_defect(a: &CliffordSeries, k: usize) -> FormSection {
    let n = a.n;
    let zero = CliffordSeries::zero(n, 1, a.order);
    UGrading::new(n).project(3, &conjugated_d(a, &zero, &canonical_form(n)).at(k))
}

pub fn ad_section(s: &CliffordSection) -> MatrixSection {
    s.map(|_, c| ad_matrix(c).expect("element of CL² preserves T ⊕ T*"))
}

/// `Ad_{e^{x}}` on `T ⊕ T*` as `exp(ad_x)`.
pub fn adjoint_series(x: &CliffordSeries) -> MatrixSeries {
    let n = x.n;
    let one = matrix_const(n, Matrix::identity(2 * real_dim(n)));
    exp_series(&x.map(ad_section), &one, &matrix_product)
}

/// `Ad_{e^{x}} 𝒥₀ Ad_{e^{-x}}`.
pub fn deformed_structure(x: &CliffordSeries, j0: &Matrix) -> MatrixSeries {
    let n = x.n;
    let fwd = adjoint_series(x);
    let back = adjoint_series(&x.scale(&Scalar::from_int(-1)));
    let j = constant_series(n, x.order, matrix_const(n, j0.clone()));
    fwd.mul(&j, matrix_product).mul(&back, matrix_product)
}

fn flatten(m: &Matrix) -> Vec<Scalar> {
    m.data.clone()
}

fn degree_two_words(n: usize) -> Vec<u32> {
    (0..1u32 << (2 * n)).filter(|m| m.count_ones() == 2).collect()
}

/// `P_L̄ Ad_{e^{-ε}} Ad_{e^{a}} P_L`; vanishes iff `Ad_{e^{a}}` and `Ad_{e^{ε}}` carry `L` to the same bundle.
pub fn realification_defect(a: &CliffordSeries, eps: &LbarSeries) -> MatrixSeries {
    let n = a.n;
    let gj = GCFiberStructure::standard_complex(n);
    let m = adjoint_series(&eps.map(lbar_to_clifford).scale(&Scalar::from_int(-1))).mul(&adjoint_series(a), matrix_product);
    let pl = constant_series(n, a.order, matrix_const(n, gj.l_projector));
    let plb = constant_series(n, a.order, matrix_const(n, gj.lbar_projector));
    plb.mul(&m, matrix_product).mul(&pl, matrix_product)
}

/// Per frequency, the `x ∈ ∧²L̄` with `P_L̄ ad_x P_L = target`.
fn match_lbar_block(n: usize, target: &MatrixSection, order: usize) -> Result<LbarSection, GkError> {
    let gj = GCFiberStructure::standard_complex(n);
    let masks = degree_two_words(n);
    let cols: Vec<Vec<Scalar>> = masks
        .iter()
        .map(|m| {
            let ad = ad_matrix(&LbarFiber::word(n, *m, Scalar::one()).to_clifford()).expect("CL² element");
            flatten(&gj.lbar_projector.mul(&ad).mul(&gj.l_projector))
        })
        .collect();
    let size = cols[0].len();
    let sys = Matrix::from_cols(&cols, size);
    let mut out = LbarSection::zero(n);
    for (k, rhs) in &target.terms {
        let x = sys.solve(&flatten(rhs)).ok_or(GkError::NoSolution { order, frequency: k.clone() })?;
        let mut f = LbarFiber::zero(n);
        for (m, xi) in masks.iter().zip(&x) {
            f.add_term(*m, xi);
        }
        out.add_term(k.clone(), f);
    }
    Ok(out)
}

/// Order-by-order real `a(t)` in `∧²L̄ ⊕ ∧²L` with `Ad_{e^{a(t)}}L = Ad_{e^{ε(t)}}L`.
///
/// At order `k` the unknown is `a_k = x + x̄`; only `x` reaches the `L → L̄` block.
pub fn realify(eps: &LbarSeries) -> Result<CliffordSeries, GkError> {
    let n = eps.n;
    let mut a = CliffordSeries::zero(n, 1, eps.order);
    for k in 1..=eps.order {
        let rhs = realification_defect(&a, eps).at(k).scale(&Scalar::from_int(-1));
        let x = lbar_to_clifford(&match_lbar_block(n, &rhs, k)?);
        let ak = x.add(&x.conj());
        if !reality_check(&ak) {
            return Err(GkError::NotReal { order: k });
        }
        a.set(vec![k], ak);
    }
    Ok(a)
}

/// Inverse of [`realify`]: the `∧²L̄`-valued `ε(t)` carrying `L` where `Ad_{e^{a(t)}}` does.
pub fn derealify(a: &CliffordSeries) -> Result<LbarSeries, GkError> {
    let n = a.n;
    let mut eps = LbarSeries::zero(n, 1, a.order);
    for k in 1..=a.order {
        // The unknown ε_k enters the defect as −P_L̄ ad_{ε_k} P_L.
        let rhs = realification_defect(a, &eps).at(k);
        eps.set(vec![k], match_lbar_block(n, &rhs, k)?);
    }
    Ok(eps)
}

/// Coordinates of `c` in the span of `basis`, if it lies there.
pub fn coordinates(basis: &[CliffordFiber], c: &CliffordFiber) -> Option<Vec<Scalar>> {
    let size = c.to_matrix().data.len();
    let sys = Matrix::from_cols(&basis.iter().map(|u| u.to_matrix().data).collect::<Vec<_>>(), size);
    sys.solve(&c.to_matrix().data)
}

/// Columns of `a` spanning `span(A) ∩ span(B)`.
fn intersect(a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let dim = a[0].len();
    let mut cols: Vec<Vec<Scalar>> = a.to_vec();
    cols.extend(b.iter().map(|v| v.iter().map(|x| -x).collect::<Vec<_>>()));
    let m = Matrix::from_cols(&cols, dim);
    let am = Matrix::from_cols(a, dim);
    m.nullspace().iter().map(|z| am.apply(&z[..a.len()])).collect()
}

/// Basis of the annihilator of a form in `(T ⊕ T*) ⊗ ℂ`.
pub fn annihilator(psi: &FormFiber) -> Vec<Vec<Scalar>> {
    let n = psi.n;
    let dim = 2 * real_dim(n);
    let cols: Vec<Vec<Scalar>> = (0..dim)
        .map(|k| {
            let mut e = vec![Scalar::zero(); dim];
            e[k] = Scalar::one();
            spin_action(&TangentCotangentFiber::from_vec(n, &e), psi).unwrap().to_vec()
        })
        .collect();
    Matrix::from_cols(&cols, 1 << (2 * n)).nullspace()
}

/// Top-degree part of `σ(φ) ∧ χ`, `σ` the reversal anti-automorphism.
pub fn mukai_pairing(phi: &FormFiber, chi: &FormFiber) -> Scalar {
    let n = phi.n;
    let mut sigma = FormFiber::zero(n);
    for (m, c) in &phi.coeffs {
        let p = m.count_ones() as usize;
        sigma.add_term(*m, &(c * &Scalar::sign(p * p.saturating_sub(1) / 2)));
    }
    algebra::wedge(&sigma, chi).unwrap().get((1u32 << real_dim(n)) - 1)
}

/// Generalized complex structure with `+i`-eigenbundle `Ann(ψ)`.
pub fn gc_from_spinor(psi: &FormFiber) -> Result<GCFiberStructure, GkError> {
    let n = psi.n;
    let ann = annihilator(psi);
    if ann.len() != real_dim(n) {
        return Err(GkError::NotPure { dim: ann.len() });
    }
    if mukai_pairing(psi, &psi.conj()).is_zero() {
        return Err(GkError::Degenerate);
    }
    GCFiberStructure::from_l_basis(n, &ann).ok_or(GkError::Degenerate)
}

/// Simultaneous eigenbundles of `(𝒥_J, 𝒥_ψ)` and the quad bundle `L⁻·L̄⁺ ⊕ L̄⁻·L⁺`.
#[derive(Clone, Debug)]
pub struct QuadBundle {
    pub n: usize,
    pub l_plus: Vec<Vec<Scalar>>,
    pub l_minus: Vec<Vec<Scalar>>,
    pub lbar_plus: Vec<Vec<Scalar>>,
    pub lbar_minus: Vec<Vec<Scalar>>,
    /// Complex basis; the first half spans `L⁻·L̄⁺`, the second its conjugate `L̄⁻·L⁺`.
    pub basis: Vec<CliffordFiber>,
}

fn conj_vecs(v: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    v.iter().map(|x| x.iter().map(|s| s.conj()).collect()).collect()
}

fn vec_op(n: usize, v: &[Scalar]) -> CliffordFiber {
    CliffordFiber::from_vector(&TangentCotangentFiber::from_vec(n, v))
}

impl QuadBundle {
    pub fn new(psi0: &FormFiber) -> Self {
        let n = psi0.n;
        let lbar_j: Vec<Vec<Scalar>> = (0..2 * n).map(|g| lbar_generator(n, g).to_vec()).collect();
        let l_j = conj_vecs(&lbar_j);
        let l_psi = annihilator(psi0);
        let lbar_psi = conj_vecs(&l_psi);
        let l_minus = intersect(&l_j, &lbar_psi);
        let lbar_plus = intersect(&lbar_j, &lbar_psi);
        let l_plus = intersect(&l_j, &l_psi);
        let lbar_minus = intersect(&lbar_j, &l_psi);
        let mut basis = Vec::new();
        for u in &l_minus {
            for v in &lbar_plus {
                basis.push(clifford_mul(&vec_op(n, u), &vec_op(n, v)).unwrap());
            }
        }
        let half: Vec<CliffordFiber> = basis.iter().map(|c| c.conj()).collect();
        basis.extend(half);
        QuadBundle { n, l_plus, l_minus, lbar_plus, lbar_minus, basis }
    }

    pub fn contains(&self, c: &CliffordFiber) -> bool {
        c.is_zero() || coordinates(&self.basis, c).is_some()
    }

    pub fn contains_section(&self, s: &CliffordSection) -> bool {
        s.terms.values().all(|c| self.contains(c))
    }
}

fn wedge_frequency(n: usize, k: &Frequency, phi: &FormFiber) -> FormFiber {
    let mut m = FormFiber::zero(n);
    for (a, ka) in k.iter().enumerate() {
        m.add_term(1 << a, &Scalar::from_int(*ka).mul_i());
    }
    algebra::wedge(&m, phi).unwrap()
}

/// Order-`k` correction `b_k` making `(d e^{a}e^{b}ψ₀)_{[k]} = 0`, given `b` through `k−1`.
///
/// Each frequency pair `±m` is solved exactly, with `b_{-m} = conj(b_m)` imposed.
pub fn solve_b(a: &CliffordSeries, b_prefix: &CliffordSeries, quad: &QuadBundle, psi0: &FormFiber, k: usize) -> Result<CliffordSection, GkError> {
    let n = a.n;
    let mut b = b_prefix.clone();
    b.set(vec![k], CliffordSection::zero(n));
    let forcing = d_series(&spinor_series(a, &b, psi0)).at(k);
    let on_psi: Vec<FormFiber> = quad.basis.iter().map(|w| w.apply(psi0)).collect();
    let on_psibar: Vec<FormFiber> = quad.basis.iter().map(|w| w.apply(&psi0.conj())).collect();
    let mut out = CliffordSection::zero(n);
    let mut done: BTreeSet<Frequency> = BTreeSet::new();
    for m in forcing.frequencies() {
        if done.contains(&m) {
            continue;
        }
        let neg: Frequency = m.iter().map(|x| -x).collect();
        done.insert(m.clone());
        done.insert(neg.clone());
        if m.iter().all(|x| *x == 0) {
            return Err(GkError::NoSolution { order: k, frequency: m });
        }
        let cols: Vec<Vec<Scalar>> = on_psi
            .iter()
            .zip(&on_psibar)
            .map(|(p, q)| {
                let mut c = wedge_frequency(n, &m, p).to_vec();
                c.extend(wedge_frequency(n, &m, q).to_vec());
                c
            })
            .collect();
        let size = 2 * (1usize << (2 * n));
        let zero_form = FormFiber::zero(n);
        let fm = forcing.terms.get(&m).unwrap_or(&zero_form);
        let fneg = forcing.terms.get(&neg).map(|f| f.conj()).unwrap_or_else(|| zero_form.clone());
        let mut rhs: Vec<Scalar> = fm.to_vec().iter().map(|x| -x).collect();
        rhs.extend(fneg.to_vec().iter().map(|x| -x));
        let z = Matrix::from_cols(&cols, size).solve(&rhs).ok_or(GkError::NoSolution { order: k, frequency: m.clone() })?;
        let mut bm = CliffordFiber::zero(n);
        for (w, zi) in quad.basis.iter().zip(&z) {
            if !zi.is_zero() {
                bm = bm.add(&w.scale(zi));
            }
        }
        out.add_term(neg, bm.conj());
        out.add_term(m, bm);
    }
    Ok(out)
}

/// `x = −d_L*G(R)` for `R` the decoded `U^{-n+3}` defect, so that `d_L x = −R`.
pub fn integrability_correction(defect: &FormSection, order: usize) -> Result<LbarSection, GkError> {
    let r = decode_section(defect);
    let h = harmonic(&r);
    if !h.is_zero() {
        return Err(GkError::Obstruction { order, norm_sq: h.sobolev_norm_sq(0).to_string() });
    }
    Ok(d_l_star(&green(&r)).scale(&Scalar::from_int(-1)))
}
