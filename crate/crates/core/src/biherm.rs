//! From generalized Kähler deformations to bihermitian data: the maps `Γ±`,
//! the order-by-order correction loop producing `(a_k, b_k)`, an independent
//! condition checker, extraction of `(J⁺_t, J⁻_t, h_t, b_t)` and the
//! first-order check for `J⁻_t`.

use crate::algebra::{
    self, ad_matrix, canonical_form, commutator, endo_to_ttstar, exp_two_form, j_star, real_dim,
    CliffordFiber, FormFiber, GCFiberStructure, TangentCotangentFiber,
};
use crate::brackets::schouten;
use crate::fields::{
    exterior_d, lbar_to_clifford, reality_check, wedge_sections, CliffordSection, FormSection, LbarSection, MatrixSection,
    PoissonData, TorusKahlerData,
};
use crate::gk::{
    adjoint_series, clifford_exp, conjugated_d, constant_series, d_series, gc_from_spinor, integrability_correction,
    matrix_const, matrix_product, solve_b, spinor_series, CliffordSeries, FormSeries, GkError, MatrixSeries, QuadBundle,
    UGrading,
};
use crate::linalg::Matrix;
use crate::mc::inverse_series;
use crate::scalar::{Scalar, ScalarJson};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BihermError {
    #[error(transparent)]
    Gk(#[from] GkError),
    #[error("β is not a holomorphic Poisson bivector of type (2,0)")]
    NotPoisson,
    #[error("order-0 generalized metric is not positive definite")]
    DegenerateMetric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> Scalar {
        match self {
            Sign::Plus => Scalar::from_int(-1),
            Sign::Minus => Scalar::one(),
        }
    }
}

/// `Ĵ±(v, η) = v ∓ J*η` as a matrix on `T ⊕ T*`.
pub fn hat_j(sign: Sign, j: &Matrix) -> Matrix {
    let m = j.rows;
    let js = j_star(j).scale(&sign.factor());
    let mut r = Matrix::zeros(2 * m, 2 * m);
    for a in 0..m {
        r.set(a, a, Scalar::one());
        for b in 0..m {
            r.set(m + a, m + b, js.get(a, b).clone());
        }
    }
    r
}

pub fn hat_j_apply(sign: Sign, e: &TangentCotangentFiber, j: &Matrix) -> TangentCotangentFiber {
    TangentCotangentFiber::from_vec(e.n, &hat_j(sign, j).apply(&e.to_vec()))
}

/// `Ad_{e^ω}` restricted to `T` (a `4n × 2n` matrix).
pub fn ad_exp_omega_on_t(omega: &FormFiber) -> Matrix {
    let n = omega.n;
    let m = real_dim(n);
    let full = algebra::adjoint_matrix(&exp_two_form(omega).unwrap()).expect("e^ω is invertible");
    Matrix::from_cols(&(0..m).map(|c| full.col(c)).collect::<Vec<_>>(), 2 * m)
}

/// Projection `T ⊕ T* → T`.
pub fn pi_t(n: usize) -> Matrix {
    let m = real_dim(n);
    let mut p = Matrix::zeros(m, 2 * m);
    for a in 0..m {
        p.set(a, a, Scalar::one());
    }
    p
}

/// `Ad_{e^{Z}} = Ad_{e^{a}} Ad_{e^{b}}`.
pub fn ad_exp_z(a: &CliffordSeries, b: &CliffordSeries) -> MatrixSeries {
    adjoint_series(a).mul(&adjoint_series(b), matrix_product)
}

/// `Γ±_t = π ∘ Ad_{e^{Z(t)}} ∘ Ĵ± ∘ Ad_{e^ω}` on `T`.
pub fn gamma_pm(a: &CliffordSeries, b: &CliffordSeries, torus: &TorusKahlerData, sign: Sign) -> MatrixSeries {
    let n = a.n;
    let order = a.order;
    let c = |m: Matrix| constant_series(n, order, matrix_const(n, m));
    let right = hat_j(sign, &torus.j_standard).mul(&ad_exp_omega_on_t(&torus.omega));
    c(pi_t(n)).mul(&ad_exp_z(a, b), matrix_product).mul(&c(right), matrix_product)
}

/// `J±_t = Γ±_t J (Γ±_t)^{-1}`, so that `Γ±_t` carries `T^{1,0}_J` onto `T^{1,0}_{J±_t}`.
pub fn conjugated_j(gamma: &MatrixSeries, j: &Matrix) -> MatrixSeries {
    let n = gamma.n;
    let one = matrix_const(n, Matrix::identity(j.rows));
    let inv = inverse_series(gamma, &one, &matrix_product);
    gamma.mul(&constant_series(n, gamma.order, matrix_const(n, j.clone())), matrix_product).mul(&inv, matrix_product)
}

/// The other ordering `(Γ±_t)^{-1} J Γ±_t`, kept for comparison in reports.
pub fn inverse_conjugated_j(gamma: &MatrixSeries, j: &Matrix) -> MatrixSeries {
    let n = gamma.n;
    let one = matrix_const(n, Matrix::identity(j.rows));
    let inv = inverse_series(gamma, &one, &matrix_product);
    inv.mul(&constant_series(n, gamma.order, matrix_const(n, j.clone())), matrix_product).mul(gamma, matrix_product)
}

fn real_part(x: &LbarSection) -> CliffordSection {
    let c = lbar_to_clifford(x);
    c.add(&c.conj())
}

/// One row of the construction ledger.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderLedger {
    pub k: usize,
    pub a_hat: CliffordSection,
    pub b_hat: CliffordSection,
    pub gamma: CliffordSection,
    pub a: CliffordSection,
    pub b: CliffordSection,
}

#[derive(Clone, Debug)]
pub struct GKDeformationState {
    pub n: usize,
    pub order: usize,
    pub torus: TorusKahlerData,
    pub beta: PoissonData,
    pub a: CliffordSeries,
    pub b: CliffordSeries,
    pub ledger: Vec<OrderLedger>,
}

/// Order-by-order construction of `(a(t), b(t))` starting from `â₁ = β + β̄`.
///
/// Each order: `â_k` clears the `U^{-n+3}` defect, `b̂_k` restores closedness of
/// the spinor, `γ_k ∈ T·T*` cancels `(Γ⁺)_{[k]}`, then `b_k` is re-solved for `a_k = â_k + γ_k`.
pub fn construction_loop(beta: &PoissonData, torus: &TorusKahlerData, order: usize) -> Result<GKDeformationState, BihermError> {
    let n = torus.n;
    if !beta.is_type_20() || !beta.is_holomorphic() || !schouten(&beta.beta, &beta.beta).is_zero() {
        return Err(BihermError::NotPoisson);
    }
    let quad = QuadBundle::new(&torus.psi0);
    let omega_k = canonical_form(n);
    let grading = UGrading::new(n);
    let mut a = CliffordSeries::zero(n, 1, order);
    let mut b = CliffordSeries::zero(n, 1, order);
    let mut ledger = Vec::new();
    for k in 1..=order {
        let a_hat = if k == 1 {
            real_part(&beta.beta)
        } else {
            let defect = grading.project(3, &conjugated_d(&a, &b, &omega_k).at(k));
            real_part(&integrability_correction(&defect, k)?)
        };
        let mut trial_a = a.clone();
        trial_a.set(vec![k], a_hat.clone());
        let b_hat = solve_b(&trial_a, &b, &quad, &torus.psi0, k)?;
        let mut trial_b = b.clone();
        trial_b.set(vec![k], b_hat.clone());
        let g = gamma_pm(&trial_a, &trial_b, torus, Sign::Plus).at(k);
        let gamma = g.map(|_, m| endo_to_ttstar(n, &m.scale(&Scalar::from_int(-1))));
        let ak = a_hat.add(&gamma);
        a.set(vec![k], ak.clone());
        let bk = solve_b(&a, &b, &quad, &torus.psi0, k)?;
        b.set(vec![k], bk.clone());
        ledger.push(OrderLedger { k, a_hat, b_hat, gamma, a: ak, b: bk });
    }
    Ok(GKDeformationState { n, order, torus: torus.clone(), beta: beta.clone(), a, b, ledger })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionRow {
    pub order: usize,
    /// `(e^{-Z}de^{Z})_{[i]}·K_J ⊂ CL¹·K_J`, i.e. only `U^{-n}, U^{-n+1}` components.
    pub integrable: bool,
    /// `(d e^{Z}ψ₀)_{[i]} = 0`.
    pub closed: bool,
    /// `[(Γ⁺_t)_{[i]}, J] = 0`.
    pub j_plus_fixed: bool,
    pub real: bool,
    pub in_quad_bundle: bool,
    /// `π_{U^{-n+3}}[d, γ]·Ω = 0` for `γ ∈ T·T*` with `ad_γ = (Γ⁺_t)_{[i]}` on `T`.
    pub gamma_defect_clear: bool,
}

impl ConditionRow {
    pub fn passed(&self) -> bool {
        self.integrable && self.closed && self.j_plus_fixed && self.real && self.in_quad_bundle && self.gamma_defect_clear
    }
}

/// `Γ±` through the Clifford adjoint action on vectors, without `ad`-matrix exponentials.
pub fn gamma_clifford(state: &GKDeformationState, sign: Sign) -> MatrixSeries {
    let n = state.n;
    let order = state.order;
    let m1 = Scalar::from_int(-1);
    let g = clifford_exp(&state.a).mul(&clifford_exp(&state.b), crate::fields::clifford_product);
    let gi = clifford_exp(&state.b.scale(&m1)).mul(&clifford_exp(&state.a.scale(&m1)), crate::fields::clifford_product);
    let right = hat_j(sign, &state.torus.j_standard).mul(&ad_exp_omega_on_t(&state.torus.omega));
    let mut out = MatrixSeries::zero(n, 1, order);
    for col in 0..real_dim(n) {
        let e = CliffordFiber::from_vector(&TangentCotangentFiber::from_vec(n, &right.col(col)));
        let es = constant_series(n, order, CliffordSection::constant(e));
        let img = g.mul(&es, crate::fields::clifford_product).mul(&gi, crate::fields::clifford_product);
        for k in 0..=order {
            let sec = img.at(k);
            let mut acc = out.at(k);
            for (freq, c) in &sec.terms {
                let v = c.as_vector().expect("adjoint action preserves T ⊕ T*");
                let mut m = Matrix::zeros(real_dim(n), real_dim(n));
                for r in 0..real_dim(n) {
                    m.set(r, col, v.vector_part[r].clone());
                }
                acc.add_term(freq.clone(), m);
            }
            out.set(vec![k], acc);
        }
    }
    out
}

/// Re-evaluate the three loop conditions from `(a, b)` alone.
pub fn check_conditions(state: &GKDeformationState) -> Vec<ConditionRow> {
    let n = state.n;
    let grading = UGrading::new(n);
    let quad = QuadBundle::new(&state.torus.psi0);
    let conj_d = conjugated_d(&state.a, &state.b, &canonical_form(n));
    let dpsi = d_series(&spinor_series(&state.a, &state.b, &state.torus.psi0));
    let gamma = gamma_clifford(state, Sign::Plus);
    let j = matrix_const(n, state.torus.j_standard.clone());
    (1..=state.order)
        .map(|i| {
            let g = gamma.at(i);
            let comm = matrix_product(&g, &j).sub(&matrix_product(&j, &g));
            let omega_k = FormSection::constant(canonical_form(n));
            let gc = g.map(|_, m| endo_to_ttstar(n, m));
            let commutator_on_k = exterior_d(&crate::fields::clifford_apply(&gc, &omega_k)).sub(&crate::fields::clifford_apply(&gc, &exterior_d(&omega_k)));
            ConditionRow {
                order: i,
                integrable: grading.support(&conj_d.at(i)).iter().all(|p| *p <= 1),
                closed: dpsi.at(i).is_zero(),
                j_plus_fixed: comm.is_zero(),
                real: reality_check(&state.a.at(i)) && reality_check(&state.b.at(i)),
                in_quad_bundle: quad.contains_section(&state.b.at(i)),
                gamma_defect_clear: grading.project(3, &commutator_on_k).is_zero(),
            }
        })
        .collect()
}

/// Purity data of `ψ_t = e^{a(t)}e^{b(t)}ψ₀` at a rational `t`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PurityRow {
    pub t: ScalarJson,
    /// `Ad_{e^Z}L_ψ · ψ_t ≡ 0` through the truncation order.
    pub formal_annihilator: bool,
    /// Rank of the evaluated annihilator family at `x = 0`.
    pub annihilator_rank: usize,
    /// `a(t), b(t)` real and of Clifford filtration degree at most two.
    pub group_certificate: bool,
    /// Mukai pairing `(ψ_t, ψ̄_t)` at `x = 0` is nonzero.
    pub nondegenerate: bool,
}

impl PurityRow {
    pub fn passed(&self, n: usize) -> bool {
        self.formal_annihilator && self.annihilator_rank == real_dim(n) && self.group_certificate && self.nondegenerate
    }
}

pub fn purity_check(state: &GKDeformationState, t: &Scalar) -> PurityRow {
    let n = state.n;
    let order = state.order;
    let psi = spinor_series(&state.a, &state.b, &state.torus.psi0);
    let ann0 = crate::gk::annihilator(&state.torus.psi0);
    let adz = ad_exp_z(&state.a, &state.b);
    let mut formal = true;
    let mut evaluated = Vec::new();
    for u in &ann0 {
        let col = matrix_const(n, Matrix::from_cols(&[u.clone()], u.len()));
        let ut = adz.mul(&constant_series(n, order, col), matrix_product);
        // u(t)·ψ(t) through the Clifford action of vectors.
        let us: CliffordSeries = ut.map(|s| s.map(|_, m| CliffordFiber::from_vector(&TangentCotangentFiber::from_vec(n, &m.col(0)))));
        let prod = us.mul(&psi, crate::fields::clifford_apply);
        formal &= prod.coeffs.is_empty();
        let v = crate::gk::at_origin(&crate::gk::evaluate(&ut, t)).map(|m| m.col(0)).unwrap_or_else(|| vec![Scalar::zero(); u.len()]);
        evaluated.push(v);
    }
    let annihilator_rank = Matrix::from_cols(&evaluated, 2 * real_dim(n)).rank();
    let cl2 = |s: &CliffordSeries| {
        s.coeffs.values().all(|sec| reality_check(sec) && sec.terms.values().all(|c| algebra::filtration_degree(c) <= 2))
    };
    let psi_t = crate::gk::at_origin(&crate::gk::evaluate(&psi, t)).unwrap_or_else(|| FormFiber::zero(n));
    PurityRow {
        t: ScalarJson::from_scalar(t),
        formal_annihilator: formal,
        annihilator_rank,
        group_certificate: cl2(&state.a) && cl2(&state.b),
        nondegenerate: !crate::gk::mukai_pairing(&psi_t, &psi_t.conj()).is_zero(),
    }
}

#[derive(Clone, Debug)]
pub struct BihermitianResult {
    pub j_plus: MatrixSeries,
    pub j_minus: MatrixSeries,
    pub h: MatrixSeries,
    pub b_field: FormSeries,
}

/// Form `φ(M·, …, M·)` for a matrix series `M`.
pub fn induced_action(m: &MatrixSeries, phi: &FormSeries) -> FormSeries {
    let n = m.n;
    let order = m.order;
    let rows: Vec<FormSeries> = (0..real_dim(n))
        .map(|i| {
            m.map(|sec| {
                sec.map(|_, mm| {
                    let mut f = FormFiber::zero(n);
                    for l in 0..real_dim(n) {
                        f.add_term(1 << l, mm.get(i, l));
                    }
                    f
                })
            })
        })
        .collect();
    let mut out = FormSeries::zero(n, 1, order);
    for (idx, sec) in &phi.coeffs {
        for (freq, fiber) in &sec.terms {
            for (mask, c) in &fiber.coeffs {
                let mut acc = FormSeries::zero(n, 1, order);
                acc.set(idx.clone(), FormSection::single(n, freq.clone(), FormFiber::one(n).scale(c)));
                for i in 0..real_dim(n) {
                    if mask & (1 << i) != 0 {
                        acc = acc.mul(&rows[i], wedge_sections);
                    }
                }
                out = out.add(&acc);
            }
        }
    }
    out
}

/// `d^c = I^{-1} d I` with `I` induced by `J` and `I^{-1}` by `−J`.
pub fn d_c(j: &MatrixSeries, phi: &FormSeries) -> FormSeries {
    induced_action(&j.scale(&Scalar::from_int(-1)), &d_series(&induced_action(j, phi)))
}

fn transpose_series(m: &MatrixSeries) -> MatrixSeries {
    m.map(|s| s.map(|_, x| x.transpose()))
}

/// `ω = h(J·,·)`, i.e. the matrix `Jᵀh`.
pub fn fundamental_form(j: &MatrixSeries, h: &MatrixSeries) -> FormSeries {
    transpose_series(j).mul(h, matrix_product).map(|s| s.map(|_, w| crate::fields::two_form_from_matrix(s.n, w)))
}

/// Sub-block of a square matrix.
fn block(m: &Matrix, r0: usize, c0: usize, size: usize) -> Matrix {
    let mut out = Matrix::zeros(size, size);
    for r in 0..size {
        for c in 0..size {
            out.set(r, c, m.get(r0 + r, c0 + c).clone());
        }
    }
    out
}

/// Generalized metric `G = 𝒥_t 𝒥_{ψ_t}` through the truncation order.
///
/// With the spin conventions used here `−𝒥_J𝒥_ψ = −[[0, g⁻¹], [g, 0]]`, so the
/// positive product carries the opposite overall sign.
pub fn generalized_metric(state: &GKDeformationState) -> Result<MatrixSeries, BihermError> {
    let n = state.n;
    let order = state.order;
    let m1 = Scalar::from_int(-1);
    let jj = GCFiberStructure::standard_complex(n).j_matrix;
    let jpsi = gc_from_spinor(&state.torus.psi0)?.j_matrix;
    let g0 = jj.mul(&jpsi);
    let fwd = ad_exp_z(&state.a, &state.b);
    let back = adjoint_series(&state.b.scale(&m1)).mul(&adjoint_series(&state.a.scale(&m1)), matrix_product);
    Ok(fwd.mul(&constant_series(n, order, matrix_const(n, g0)), matrix_product).mul(&back, matrix_product))
}

/// Reads `(h, b)` off the blocks `G = [[−h⁻¹b, h⁻¹], [h − bh⁻¹b, bh⁻¹]]`, and `J±` from `Γ±`.
pub fn extract_bihermitian(state: &GKDeformationState) -> Result<BihermitianResult, BihermError> {
    let n = state.n;
    let m = real_dim(n);
    let order = state.order;
    let g = generalized_metric(state)?;
    let blocks = |r0: usize, c0: usize| g.map(|s| s.map(|_, x| block(x, r0, c0, m)));
    let upper_right = blocks(0, m);
    let upper_left = blocks(0, 0);
    let ur0 = upper_right.at(0).terms.values().next().cloned().ok_or(BihermError::DegenerateMetric)?;
    let h0 = ur0.inverse().ok_or(BihermError::DegenerateMetric)?;
    if h0.transpose() != h0 || h0.leading_minors().iter().any(|x| !x.is_real() || x.re <= crate::Q::from_integer(0.into())) {
        return Err(BihermError::DegenerateMetric);
    }
    // h = (UR)^{-1} = h₀ (UR·h₀)^{-1}
    let normalized = upper_right.mul(&constant_series(n, order, matrix_const(n, h0.clone())), matrix_product);
    let inv = inverse_series(&normalized, &matrix_const(n, Matrix::identity(m)), &matrix_product);
    let h = constant_series(n, order, matrix_const(n, h0)).mul(&inv, matrix_product);
    let b_mat = h.mul(&upper_left, matrix_product).scale(&Scalar::from_int(-1));
    let b_field = b_mat.map(|s| s.map(|_, w| crate::fields::two_form_from_matrix(n, w)));
    let j = &state.torus.j_standard;
    let j_plus = conjugated_j(&gamma_pm(&state.a, &state.b, &state.torus, Sign::Plus), j);
    let j_minus = conjugated_j(&gamma_pm(&state.a, &state.b, &state.torus, Sign::Minus), j);
    Ok(BihermitianResult { j_plus, j_minus, h, b_field })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BihermitianChecks {
    pub j_plus_is_j: bool,
    pub j_squares: bool,
    pub h_symmetric: bool,
    pub h_hermitian: bool,
    pub omega_antisymmetric: bool,
    pub block_consistent: bool,
    /// `−d^c₊ω₊ = d^c₋ω₋`.
    pub torsion_pm: bool,
    /// `d^c₋ω₋ = db`.
    pub torsion_db: bool,
    /// The common torsion has no constant (harmonic) part.
    pub torsion_exact: bool,
    /// `J±_t` acts by `i` on `π(Ad_{e^Z} L̄±₀)` through the truncation order, with
    /// `L̄±₀ = Ĵ±Ad_{e^ω}(T^{1,0})` read off the simultaneous eigenbundles.
    pub eigenbundles: bool,
}

impl BihermitianChecks {
    pub fn all(&self) -> bool {
        self.j_plus_is_j
            && self.j_squares
            && self.h_symmetric
            && self.h_hermitian
            && self.omega_antisymmetric
            && self.block_consistent
            && self.torsion_pm
            && self.torsion_db
            && self.torsion_exact
            && self.eigenbundles
    }
}

pub fn check_bihermitian(state: &GKDeformationState, r: &BihermitianResult) -> Result<BihermitianChecks, BihermError> {
    let n = state.n;
    let m = real_dim(n);
    let order = state.order;
    let c = |x: Matrix| constant_series(n, order, matrix_const(n, x));
    let j = c(state.torus.j_standard.clone());
    let minus_id = c(Matrix::identity(m).scale(&Scalar::from_int(-1)));
    let sq = |x: &MatrixSeries| x.mul(x, matrix_product);
    let hermitian = |x: &MatrixSeries| transpose_series(x).mul(&r.h, matrix_product).mul(x, matrix_product) == r.h;
    let w_plus = fundamental_form(&r.j_plus, &r.h);
    let w_minus = fundamental_form(&r.j_minus, &r.h);
    let antisym = [&r.j_plus, &r.j_minus].iter().all(|jj| {
        let w = transpose_series(jj).mul(&r.h, matrix_product);
        transpose_series(&w) == w.scale(&Scalar::from_int(-1))
    });
    // Remaining blocks of G must match the (h, b) parametrisation.
    let g = generalized_metric(state)?;
    let bm = r.b_field.map(|s| s.map(|_, f| crate::fields::two_form_matrix(f)));
    let one = matrix_const(n, Matrix::identity(m));
    let hinv = inverse_series(&r.h.mul(&c(r.h.at(0).terms.values().next().unwrap().inverse().unwrap()), matrix_product), &one, &matrix_product);
    let hinv = c(r.h.at(0).terms.values().next().unwrap().inverse().unwrap()).mul(&hinv, matrix_product);
    let lower_left = g.map(|s| s.map(|_, x| block(x, m, 0, m)));
    let lower_right = g.map(|s| s.map(|_, x| block(x, m, m, m)));
    let expect_ll = r.h.add(&bm.mul(&hinv, matrix_product).mul(&bm, matrix_product).scale(&Scalar::from_int(-1)));
    let expect_lr = bm.mul(&hinv, matrix_product);
    let dcp = d_c(&r.j_plus, &w_plus);
    let dcm = d_c(&r.j_minus, &w_minus);
    let db = d_series(&r.b_field);
    let quad = QuadBundle::new(&state.torus.psi0);
    let adz = ad_exp_z(&state.a, &state.b);
    let eig = |jt: &MatrixSeries, basis: &Vec<Vec<crate::scalar::Scalar>>| {
        basis.iter().all(|u| {
            let v = c(pi_t(n)).mul(&adz, matrix_product).mul(&c(Matrix::from_cols(&[u.clone()], 2 * m)), matrix_product);
            jt.mul(&v, matrix_product) == v.scale(&Scalar::i())
        })
    };
    Ok(BihermitianChecks {
        j_plus_is_j: r.j_plus == j,
        j_squares: sq(&r.j_plus) == minus_id && sq(&r.j_minus) == minus_id,
        h_symmetric: transpose_series(&r.h) == r.h,
        h_hermitian: hermitian(&r.j_plus) && hermitian(&r.j_minus),
        omega_antisymmetric: antisym,
        block_consistent: lower_left == expect_ll && lower_right == expect_lr,
        torsion_pm: dcp.scale(&Scalar::from_int(-1)) == dcm,
        torsion_db: dcm == db,
        torsion_exact: dcm.coeffs.values().all(|s| s.constant_part().is_zero()),
        eigenbundles: eig(&r.j_plus, &quad.lbar_minus) && eig(&r.j_minus, &quad.lbar_plus),
    })
}

/// Hand contraction `(β·ω)^a_c = Σ_b B^{ab} ω_{bc}` for the real bivector `B = β + β̄`.
pub fn contraction_beta_omega(beta: &crate::fields::LbarFiber, omega: &FormFiber) -> Matrix {
    let n = beta.n;
    let m = real_dim(n);
    // ∂/∂z_j = ½(∂_{2j} − i∂_{2j+1}) in real coordinates.
    let dz = |j: usize| {
        let mut v = vec![Scalar::zero(); m];
        v[2 * j] = Scalar::frac(1, 2);
        v[2 * j + 1] = Scalar::frac(-1, 2).mul_i();
        v
    };
    let mut bv = Matrix::zeros(m, m);
    for (mask, c) in &beta.coeffs {
        let idx: Vec<usize> = (0..2 * n).filter(|g| mask & (1 << g) != 0).collect();
        assert!(idx.len() == 2 && idx[1] < n, "β must be a (2,0) bivector");
        let (u, w) = (dz(idx[0]), dz(idx[1]));
        for a in 0..m {
            for b in 0..m {
                let t = &(&u[a] * &w[b]) - &(&u[b] * &w[a]);
                let cur = bv.get(a, b).clone();
                bv.set(a, b, &cur + &(c * &t));
            }
        }
    }
    let real = bv.add(&bv.conj());
    real.mul(&crate::fields::two_form_matrix(omega))
}

/// `π[[β+β̄, ω], v]` on `T`, through the spin representation.
pub fn clifford_beta_omega(beta: &crate::fields::LbarFiber, omega: &FormFiber) -> Matrix {
    let n = beta.n;
    let bb = beta.to_clifford();
    let bb = bb.add(&bb.conj());
    let c = commutator(&bb, &CliffordFiber::wedge_by(omega));
    let ad = ad_matrix(&c).expect("degree-two element");
    pi_t(n).mul(&ad).mul(&pi_t(n).transpose())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FirstOrderReport {
    /// Order-1 coefficient of `J⁻_t` (constant part), row-major.
    pub j_minus_1: Vec<ScalarJson>,
    /// `β·ω + β̄·ω` by hand contraction.
    pub contraction: Vec<ScalarJson>,
    /// The two routes to `β·ω + β̄·ω` agree.
    pub contraction_routes_agree: bool,
    /// Scalar `λ` with `(J⁻)_{[1]} = λ(β·ω + β̄·ω)`, if one exists.
    pub ratio: Option<ScalarJson>,
    /// The same ratio for the ordering `(Γ⁻)^{-1}JΓ⁻`.
    pub ratio_inverse_ordering: Option<ScalarJson>,
    /// Scalar `μ` with `(Γ⁻)_{[1]} = μ(β·ω + β̄·ω)J`.
    pub gamma_ratio: Option<ScalarJson>,
    /// Literal claim `(J⁻)_{[1]} = −2(β·ω + β̄·ω)`.
    pub matches_minus_two: bool,
    pub j_plus_1_zero: bool,
    /// Harmonic (constant) part of the first-order deformation is nonzero.
    pub kodaira_spencer_nonzero: bool,
}

fn mat_strings(m: &Matrix) -> Vec<ScalarJson> {
    m.data.iter().map(ScalarJson::from_scalar).collect()
}

pub fn first_order_check(state: &GKDeformationState, r: &BihermitianResult) -> FirstOrderReport {
    let n = state.n;
    let m = real_dim(n);
    let beta = state.beta.beta.constant_part().terms.values().next().cloned().unwrap_or_else(|| crate::fields::LbarFiber::zero(n));
    let hand = contraction_beta_omega(&beta, &state.torus.omega);
    let spin = clifford_beta_omega(&beta, &state.torus.omega);
    let j1: MatrixSection = r.j_minus.at(1);
    let j1c = j1.constant_part().terms.values().next().cloned().unwrap_or_else(|| Matrix::zeros(m, m));
    let ratio = proportionality(&j1c, &hand);
    let gm = gamma_pm(&state.a, &state.b, &state.torus, Sign::Minus);
    let const_of = |x: &MatrixSection| x.constant_part().terms.values().next().cloned().unwrap_or_else(|| Matrix::zeros(m, m));
    let inv1 = const_of(&inverse_conjugated_j(&gm, &state.torus.j_standard).at(1));
    let g1 = const_of(&gm.at(1));
    FirstOrderReport {
        j_minus_1: mat_strings(&j1c),
        contraction: mat_strings(&hand),
        contraction_routes_agree: hand == spin,
        ratio: ratio.as_ref().map(ScalarJson::from_scalar),
        ratio_inverse_ordering: proportionality(&inv1, &hand).as_ref().map(ScalarJson::from_scalar),
        gamma_ratio: proportionality(&g1, &hand.mul(&state.torus.j_standard)).as_ref().map(ScalarJson::from_scalar),
        matches_minus_two: j1c == hand.scale(&Scalar::from_int(-2)) && j1.is_constant(),
        j_plus_1_zero: r.j_plus.at(1).is_zero(),
        kodaira_spencer_nonzero: !j1c.is_zero(),
    }
}

/// `λ` with `x = λ y`, if `y ≠ 0` and such `λ` exists.
pub fn proportionality(x: &Matrix, y: &Matrix) -> Option<Scalar> {
    let (i, yi) = y.data.iter().enumerate().find(|(_, v)| !v.is_zero())?;
    let lambda = &x.data[i] * &yi.inv()?;
    (y.scale(&lambda) == *x).then_some(lambda)
}

pub fn first_order_row(state: &GKDeformationState) -> Result<FirstOrderReport, BihermError> {
    Ok(first_order_check(state, &extract_bihermitian(state)?))
}

/// Convenience: the constant `β` scenario used by the acceptance suite.
pub fn constant_beta(n: usize, c: Scalar) -> PoissonData {
    PoissonData { beta: LbarSection::constant(crate::fields::LbarFiber::word(n, 0b11, c)) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::LbarFiber;
    use crate::scalar::q;
    use proptest::prelude::*;

    fn int_json(k: i64) -> ScalarJson {
        ScalarJson::from_scalar(&Scalar::from_int(k))
    }

    fn beta_c() -> Scalar {
        Scalar::new(q(1, 2), q(1, 3))
    }

    fn state(n: usize, order: usize, c: Scalar) -> GKDeformationState {
        construction_loop(&constant_beta(n, c), &TorusKahlerData::standard(n), order).unwrap()
    }

    #[test]
    fn hat_j_examples() {
        let n = 2;
        let j = algebra::standard_j(n);
        let v = TangentCotangentFiber::coord_vector(n, 1);
        assert_eq!(hat_j_apply(Sign::Plus, &v, &j), v);
        // ⟨J*dx⁰, ∂_b⟩ = dx⁰(J∂_b): J∂_1 = −∂_0, so J*dx⁰ = −dx¹.
        let dx0 = TangentCotangentFiber::coord_covector(n, 0);
        let dx1 = TangentCotangentFiber::coord_covector(n, 1);
        assert_eq!(hat_j_apply(Sign::Plus, &dx0, &j), dx1);
        assert_eq!(hat_j_apply(Sign::Minus, &dx0, &j), dx1.scale(&Scalar::from_int(-1)));
        let both = hat_j(Sign::Plus, &j).mul(&hat_j(Sign::Minus, &j));
        assert_eq!(both, Matrix::identity(8));
    }

    #[test]
    fn ad_omega_is_minus_contraction() {
        let t = TorusKahlerData::standard(2);
        let a = ad_exp_omega_on_t(&t.omega);
        let w = crate::fields::two_form_matrix(&t.omega);
        for col in 0..4 {
            let v = a.col(col);
            for r in 0..4 {
                assert_eq!(v[r], if r == col { Scalar::one() } else { Scalar::zero() });
                assert_eq!(v[4 + r], -w.get(col, r));
            }
        }
    }

    #[test]
    fn gamma_examples() {
        let n = 2;
        let t = TorusKahlerData::standard(n);
        let zero = CliffordSeries::zero(n, 1, 3);
        let id = constant_series(n, 3, matrix_const(n, Matrix::identity(4)));
        assert_eq!(gamma_pm(&zero, &zero, &t, Sign::Plus), id);
        assert_eq!(gamma_pm(&zero, &zero, &t, Sign::Minus), id);
        // Quad-bundle b alone commutes with J at every order.
        let quad = QuadBundle::new(&t.psi0);
        let mut b = CliffordSeries::zero(n, 1, 3);
        let w = quad.basis[1].scale(&Scalar::new(q(1, 3), q(-1, 2)));
        b.set(vec![1], CliffordSection::constant(w.add(&w.conj())));
        let g = gamma_pm(&zero, &b, &t, Sign::Plus);
        let j = matrix_const(n, t.j_standard.clone());
        for k in 0..=3 {
            let gk = g.at(k);
            assert_eq!(matrix_product(&gk, &j), matrix_product(&j, &gk));
        }
        // γ ∈ T·T*: the first-order part is ad_γ on T.
        let a_mat = Matrix::from_rows(vec![
            vec![Scalar::from_int(1), Scalar::from_int(2), Scalar::zero(), Scalar::zero()],
            vec![Scalar::zero(), Scalar::frac(1, 2), Scalar::zero(), Scalar::from_int(-1)],
            vec![Scalar::zero(), Scalar::zero(), Scalar::from_int(3), Scalar::zero()],
            vec![Scalar::from_int(1), Scalar::zero(), Scalar::zero(), Scalar::zero()],
        ]);
        let mut gam = CliffordSeries::zero(n, 1, 3);
        gam.set(vec![1], CliffordSection::constant(endo_to_ttstar(n, &a_mat)));
        for sign in [Sign::Plus, Sign::Minus] {
            assert_eq!(gamma_pm(&gam, &zero, &t, sign).at(1), matrix_const(n, a_mat.clone()));
        }
    }

    #[test]
    fn zero_beta_gives_zero_state() {
        let n = 2;
        let t = TorusKahlerData::standard(n);
        let s = construction_loop(&PoissonData { beta: LbarSection::zero(n) }, &t, 3).unwrap();
        assert!(s.a.coeffs.is_empty() && s.b.coeffs.is_empty());
        let r = extract_bihermitian(&s).unwrap();
        let c = |m: Matrix| constant_series(n, 3, matrix_const(n, m));
        assert_eq!(r.j_plus, c(t.j_standard.clone()));
        assert_eq!(r.j_minus, c(t.j_standard.clone()));
        assert_eq!(r.h, c(t.metric()));
        assert!(r.b_field.coeffs.is_empty());
        let f = first_order_check(&s, &r);
        assert!(f.j_plus_1_zero && !f.kodaira_spencer_nonzero && f.ratio.is_none());
    }

    #[test]
    fn non_poisson_rejected() {
        let n = 2;
        let t = TorusKahlerData::standard(n);
        let wave = PoissonData { beta: LbarSection::single(n, vec![1, 0, 0, 0], LbarFiber::word(n, 0b11, Scalar::one())) };
        assert_eq!(construction_loop(&wave, &t, 2).unwrap_err(), BihermError::NotPoisson);
        let mixed = PoissonData { beta: LbarSection::constant(LbarFiber::word(n, 0b0101, Scalar::one())) };
        assert_eq!(construction_loop(&mixed, &t, 2).unwrap_err(), BihermError::NotPoisson);
    }

    #[test]
    fn constant_beta_ledger() {
        let s = state(2, 4, beta_c());
        for row in &s.ledger {
            assert!(row.b_hat.is_zero() && row.b.is_zero());
            assert!(row.a.is_constant());
            if row.k >= 2 {
                assert!(row.a_hat.is_zero());
                // Higher γ_k are forced by the nonlinear tail of Γ⁺.
                assert!(!row.gamma.is_zero());
            }
        }
        assert_eq!(s.ledger[0].a_hat, real_part(&s.beta.beta));
        assert!(check_conditions(&s).iter().all(|r| r.passed()));
    }

    #[test]
    fn constant_beta_bihermitian() {
        let s = state(2, 4, beta_c());
        let r = extract_bihermitian(&s).unwrap();
        let ch = check_bihermitian(&s, &r).unwrap();
        assert!(ch.all(), "{ch:?}");
        // Independent conjugation through the Clifford route.
        assert_eq!(r.j_minus, conjugated_j(&gamma_clifford(&s, Sign::Minus), &s.torus.j_standard));
        assert_eq!(r.j_plus, conjugated_j(&gamma_clifford(&s, Sign::Plus), &s.torus.j_standard));
        for t in [Scalar::zero(), Scalar::frac(1, 8), Scalar::frac(-1, 8)] {
            assert!(purity_check(&s, &t).passed(2));
        }
    }

    #[test]
    fn first_order_factor() {
        let s = state(2, 2, beta_c());
        let f = first_order_row(&s).unwrap();
        assert!(f.contraction_routes_agree);
        assert!(f.j_plus_1_zero && f.kodaira_spencer_nonzero);
        // The exact coefficient is 4(β·ω + β̄·ω) (−4 for the reversed ordering), not −2.
        assert_eq!(f.ratio, Some(int_json(4)));
        assert_eq!(f.ratio_inverse_ordering, Some(int_json(-4)));
        assert_eq!(f.gamma_ratio, Some(int_json(-2)));
        assert!(!f.matches_minus_two);
    }

    #[test]
    fn contraction_oracle_by_hand() {
        // β = ∂_{z_0}∧∂_{z_1}, ω standard: B = β+β̄ has B^{02} = ½, B^{13} = −½, B^{03} = B^{12} = 0.
        let n = 2;
        let t = TorusKahlerData::standard(n);
        let c = contraction_beta_omega(&LbarFiber::word(n, 0b11, Scalar::one()), &t.omega);
        let h = Scalar::frac(1, 2);
        let expect = Matrix::from_rows(vec![
            vec![Scalar::zero(), Scalar::zero(), Scalar::zero(), h.clone()],
            vec![Scalar::zero(), Scalar::zero(), h.clone(), Scalar::zero()],
            vec![Scalar::zero(), -&h, Scalar::zero(), Scalar::zero()],
            vec![-&h, Scalar::zero(), Scalar::zero(), Scalar::zero()],
        ]);
        assert_eq!(c, expect);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(6))]
        #[test]
        fn random_constant_beta(re in -4i64..5, im in -4i64..5, den in 1i64..4) {
            prop_assume!(re != 0 || im != 0);
            let s = state(2, 2, Scalar::new(q(re, den), q(im, den)));
            prop_assert!(check_conditions(&s).iter().all(|r| r.passed()));
            let r = extract_bihermitian(&s).unwrap();
            prop_assert!(check_bihermitian(&s, &r).unwrap().all());
            let f = first_order_check(&s, &r);
            prop_assert_eq!(f.ratio, Some(int_json(4)));
        }
    }
}
