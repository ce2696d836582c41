//! Trigonometric-polynomial sections over the flat torus `ℝ^{2n}/2πℤ^{2n}`.
//!
//! A term `(k, v)` stands for `v · e^{i⟨k,x⟩}`. Derivatives act by
//! `∂_{x_a} ↦ i k_a`, so every spectral quantity stays a Gaussian rational.
//! The complex coordinates are `z_j = x^{2j-1} + i x^{2j}`.

use crate::algebra::{self, CliffordFiber, FormFiber};
use crate::linalg::Matrix;
use crate::scalar::{q_from_strs, q_to_json, Scalar, Q};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

pub type Frequency = Vec<i64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("invalid Kähler data: {0}")]
    InvalidKahler(String),
    #[error("malformed section JSON: {0}")]
    Json(String),
}

/// Values that can sit in a fiber of a section.
pub trait Fiber: Clone + PartialEq + std::fmt::Debug {
    fn zero_of(n: usize) -> Self;
    fn dim_n(&self) -> usize;
    fn add(&self, o: &Self) -> Self;
    fn scale(&self, s: &Scalar) -> Self;
    fn is_zero(&self) -> bool;
    fn norm_sq(&self) -> Q;
}

pub trait Conjugate {
    fn conj(&self) -> Self;
}

impl Fiber for FormFiber {
    fn zero_of(n: usize) -> Self {
        FormFiber::zero(n)
    }
    fn dim_n(&self) -> usize {
        self.n
    }
    fn add(&self, o: &Self) -> Self {
        FormFiber::add(self, o)
    }
    fn scale(&self, s: &Scalar) -> Self {
        FormFiber::scale(self, s)
    }
    fn is_zero(&self) -> bool {
        FormFiber::is_zero(self)
    }
    fn norm_sq(&self) -> Q {
        FormFiber::norm_sq(self)
    }
}

impl Conjugate for FormFiber {
    fn conj(&self) -> Self {
        FormFiber::conj(self)
    }
}

impl Fiber for CliffordFiber {
    fn zero_of(n: usize) -> Self {
        CliffordFiber::zero(n)
    }
    fn dim_n(&self) -> usize {
        self.n
    }
    fn add(&self, o: &Self) -> Self {
        CliffordFiber::add(self, o)
    }
    fn scale(&self, s: &Scalar) -> Self {
        CliffordFiber::scale(self, s)
    }
    fn is_zero(&self) -> bool {
        CliffordFiber::is_zero(self)
    }
    fn norm_sq(&self) -> Q {
        CliffordFiber::norm_sq(self)
    }
}

impl Conjugate for CliffordFiber {
    fn conj(&self) -> Self {
        CliffordFiber::conj(self)
    }
}

/// Element of `∧•L̄` at a point, on the frame words `θ_I` where
/// `θ_j = ∂/∂z_j` (j < n) and `θ_{n+j} = dz̄_j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LbarFiber {
    pub n: usize,
    pub coeffs: BTreeMap<u32, Scalar>,
}

impl LbarFiber {
    pub fn zero(n: usize) -> Self {
        LbarFiber { n, coeffs: BTreeMap::new() }
    }
    pub fn word(n: usize, mask: u32, c: Scalar) -> Self {
        let mut f = Self::zero(n);
        f.add_term(mask, &c);
        f
    }
    pub fn one(n: usize) -> Self {
        Self::word(n, 0, Scalar::one())
    }
    pub fn add_term(&mut self, mask: u32, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(mask).or_insert_with(Scalar::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&mask);
        }
    }
    pub fn get(&self, mask: u32) -> Scalar {
        self.coeffs.get(&mask).cloned().unwrap_or_else(Scalar::zero)
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&Scalar::from_int(-1)))
    }
    pub fn homogeneous(&self, p: usize) -> Self {
        LbarFiber {
            n: self.n,
            coeffs: self.coeffs.iter().filter(|(m, _)| m.count_ones() as usize == p).map(|(m, c)| (*m, c.clone())).collect(),
        }
    }
    pub fn is_homogeneous(&self, p: usize) -> bool {
        self.coeffs.keys().all(|m| m.count_ones() as usize == p)
    }
    /// Product in `∧•L̄`; since `L̄` is isotropic this is the Clifford product.
    pub fn wedge(&self, o: &Self) -> Self {
        let mut r = Self::zero(self.n);
        for (a, ca) in &self.coeffs {
            for (b, cb) in &o.coeffs {
                let s = algebra::wedge_sign(*a, *b);
                if s != 0 {
                    let c = ca * cb;
                    r.add_term(a | b, &if s > 0 { c } else { -c });
                }
            }
        }
        r
    }
    /// Spin operator of this multivector.
    pub fn to_clifford(&self) -> CliffordFiber {
        let frame = lbar_frame(self.n);
        let mut acc = CliffordFiber::zero(self.n);
        for (m, c) in &self.coeffs {
            acc = acc.add(&frame.word_ops[*m as usize].scale(c));
        }
        acc
    }
    /// `self · Ω` where `Ω` is the canonical (n,0)-form.
    pub fn encode(&self) -> FormFiber {
        let frame = lbar_frame(self.n);
        let mut acc = FormFiber::zero(self.n);
        for (m, c) in &self.coeffs {
            acc = acc.add(&frame.word_on_omega[*m as usize].scale(c));
        }
        acc
    }
    /// Inverse of [`LbarFiber::encode`]; the map `θ_I ↦ θ_I·Ω` is a bijection.
    pub fn decode(phi: &FormFiber) -> Self {
        let frame = lbar_frame(phi.n);
        let c = frame.decode.apply(&phi.to_vec());
        let mut r = Self::zero(phi.n);
        for (m, x) in c.iter().enumerate() {
            r.add_term(m as u32, x);
        }
        r
    }
}

/// Per-dimension tables for the constant `L̄`-frame.
#[derive(Debug)]
pub struct LbarFrame {
    pub word_ops: Vec<CliffordFiber>,
    pub word_on_omega: Vec<FormFiber>,
    pub decode: Matrix,
}

pub fn lbar_frame(n: usize) -> Arc<LbarFrame> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<LbarFrame>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(f) = cache.lock().unwrap().get(&n) {
        return f.clone();
    }
    let gens: Vec<CliffordFiber> = (0..2 * n).map(|g| CliffordFiber::from_vector(&algebra::lbar_generator(n, g))).collect();
    let size = 1usize << (2 * n);
    let mut word_ops = Vec::with_capacity(size);
    for m in 0..size {
        let mut w = CliffordFiber::identity(n);
        for (g, gen) in gens.iter().enumerate() {
            if m & (1 << g) != 0 {
                w = algebra::clifford_mul(&w, gen).unwrap();
            }
        }
        word_ops.push(w);
    }
    let omega = algebra::canonical_form(n);
    let word_on_omega: Vec<FormFiber> = word_ops.iter().map(|w| w.apply(&omega)).collect();
    let cols: Vec<Vec<Scalar>> = word_on_omega.iter().map(|f| f.to_vec()).collect();
    let decode = Matrix::from_cols(&cols, size).inverse().expect("θ_I·Ω is a basis of forms");
    let frame = Arc::new(LbarFrame { word_ops, word_on_omega, decode });
    cache.lock().unwrap().insert(n, frame.clone());
    frame
}

impl Fiber for LbarFiber {
    fn zero_of(n: usize) -> Self {
        LbarFiber::zero(n)
    }
    fn dim_n(&self) -> usize {
        self.n
    }
    fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.coeffs {
            r.add_term(*m, c);
        }
        r
    }
    fn scale(&self, s: &Scalar) -> Self {
        let mut r = Self::zero(self.n);
        for (m, c) in &self.coeffs {
            r.add_term(*m, &(c * s));
        }
        r
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    /// The frame words are taken orthonormal.
    fn norm_sq(&self) -> Q {
        self.coeffs.values().fold(Q::zero(), |a, c| a + c.norm_sq())
    }
}

/// Dense matrix-valued fiber (endomorphisms of `T`, tensors).
impl Fiber for Matrix {
    fn zero_of(_n: usize) -> Self {
        Matrix::zeros(0, 0)
    }
    fn dim_n(&self) -> usize {
        self.rows / 2
    }
    fn add(&self, o: &Self) -> Self {
        if self.rows == 0 {
            return o.clone();
        }
        if o.rows == 0 {
            return self.clone();
        }
        Matrix::add(self, o)
    }
    fn scale(&self, s: &Scalar) -> Self {
        Matrix::scale(self, s)
    }
    fn is_zero(&self) -> bool {
        Matrix::is_zero(self)
    }
    fn norm_sq(&self) -> Q {
        self.data.iter().fold(Q::zero(), |a, c| a + c.norm_sq())
    }
}

impl Conjugate for Matrix {
    fn conj(&self) -> Self {
        Matrix::conj(self)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FourierSection<V: Fiber> {
    pub n: usize,
    pub terms: BTreeMap<Frequency, V>,
}

pub type FormSection = FourierSection<FormFiber>;
pub type CliffordSection = FourierSection<CliffordFiber>;
pub type LbarSection = FourierSection<LbarFiber>;
pub type MatrixSection = FourierSection<Matrix>;

impl<V: Fiber> FourierSection<V> {
    pub fn zero(n: usize) -> Self {
        FourierSection { n, terms: BTreeMap::new() }
    }

    pub fn constant(v: V) -> Self {
        let n = v.dim_n();
        Self::single(n, vec![0; 2 * n], v)
    }

    pub fn single(n: usize, k: Frequency, v: V) -> Self {
        assert_eq!(k.len(), 2 * n, "frequency length must be 2n");
        let mut s = Self::zero(n);
        s.add_term(k, v);
        s
    }

    pub fn add_term(&mut self, k: Frequency, v: V) {
        if v.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(e) => {
                let sum = e.add(&v);
                if sum.is_zero() {
                    self.terms.remove(&k);
                } else {
                    *e = sum;
                }
            }
            None => {
                self.terms.insert(k, v);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (k, v) in &o.terms {
            r.add_term(k.clone(), v.clone());
        }
        r
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut r = Self::zero(self.n);
        for (k, v) in &self.terms {
            r.add_term(k.clone(), v.scale(s));
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&Scalar::from_int(-1)))
    }

    pub fn constant_part(&self) -> Self {
        let zero = vec![0; 2 * self.n];
        let mut r = Self::zero(self.n);
        if let Some(v) = self.terms.get(&zero) {
            r.add_term(zero, v.clone());
        }
        r
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|k| k.iter().all(|x| *x == 0))
    }

    /// Apply a fiberwise map that may depend on the frequency.
    pub fn map<W: Fiber>(&self, f: impl Fn(&Frequency, &V) -> W) -> FourierSection<W> {
        let mut r = FourierSection::zero(self.n);
        for (k, v) in &self.terms {
            r.add_term(k.clone(), f(k, v));
        }
        r
    }

    /// Frequency convolution with a bilinear fiber product.
    pub fn convolve<W: Fiber, U: Fiber>(&self, o: &FourierSection<W>, f: impl Fn(&V, &W) -> U) -> FourierSection<U> {
        assert_eq!(self.n, o.n, "section dimension mismatch");
        let mut r = FourierSection::zero(self.n);
        for (k1, v1) in &self.terms {
            for (k2, v2) in &o.terms {
                let k: Frequency = k1.iter().zip(k2).map(|(a, b)| a + b).collect();
                r.add_term(k, f(v1, v2));
            }
        }
        r
    }

    /// `Σ_k (1 + |k|²)^s · |v_k|²`.
    pub fn sobolev_norm_sq(&self, s_index: u32) -> Q {
        let mut acc = Q::zero();
        for (k, v) in &self.terms {
            let k2: i64 = k.iter().map(|x| x * x).sum();
            let w = num_traits::pow(Q::from_integer((1 + k2).into()), s_index as usize);
            acc += w * v.norm_sq();
        }
        acc
    }

    pub fn frequencies(&self) -> Vec<Frequency> {
        self.terms.keys().cloned().collect()
    }
}

impl<V: Fiber + Conjugate> FourierSection<V> {
    pub fn conj(&self) -> Self {
        let mut r = Self::zero(self.n);
        for (k, v) in &self.terms {
            r.add_term(k.iter().map(|x| -x).collect(), v.conj());
        }
        r
    }
}

pub fn reality_check<V: Fiber + Conjugate>(s: &FourierSection<V>) -> bool {
    &s.conj() == s
}

/// `∂/∂z_j` and `∂/∂z̄_j` symbols of `e^{i⟨k,x⟩}`.
pub fn dz_symbol(k: &Frequency, j: usize) -> Scalar {
    Scalar::new(Q::from_integer(k[2 * j + 1].into()), Q::from_integer(k[2 * j].into())).scale(&Q::new(1.into(), 2.into()))
}

pub fn dzbar_symbol(k: &Frequency, j: usize) -> Scalar {
    Scalar::new(Q::from_integer((-k[2 * j + 1]).into()), Q::from_integer(k[2 * j].into())).scale(&Q::new(1.into(), 2.into()))
}

pub fn dz_form(n: usize, j: usize) -> FormFiber {
    FormFiber::dx(n, 2 * j).add(&FormFiber::dx(n, 2 * j + 1).scale(&Scalar::i()))
}

pub fn dzbar_form(n: usize, j: usize) -> FormFiber {
    FormFiber::dx(n, 2 * j).add(&FormFiber::dx(n, 2 * j + 1).scale(&-Scalar::i()))
}

/// `d(v e^{ikx}) = i Σ_a k_a dx^a ∧ v e^{ikx}`.
pub fn exterior_d(s: &FormSection) -> FormSection {
    s.map(|k, v| {
        let mut acc = FormFiber::zero(s.n);
        for (a, ka) in k.iter().enumerate() {
            if *ka != 0 {
                acc = acc.add(&algebra::ext_coord(a, v).scale(&Scalar::new(Q::zero(), Q::from_integer((*ka).into()))));
            }
        }
        acc
    })
}

/// `(∂s, ∂̄s)` with `∂ = Σ dz_j ∧ ∂/∂z_j` lowering and `∂̄ = Σ dz̄_j ∧ ∂/∂z̄_j`
/// raising the `U`-grading of the standard complex structure.
pub fn dolbeault_split(s: &FormSection) -> (FormSection, FormSection) {
    let n = s.n;
    let del = s.map(|k, v| {
        let mut acc = FormFiber::zero(n);
        for j in 0..n {
            let c = dz_symbol(k, j);
            if !c.is_zero() {
                acc = acc.add(&algebra::wedge(&dz_form(n, j), v).unwrap().scale(&c));
            }
        }
        acc
    });
    let delbar = s.map(|k, v| {
        let mut acc = FormFiber::zero(n);
        for j in 0..n {
            let c = dzbar_symbol(k, j);
            if !c.is_zero() {
                acc = acc.add(&algebra::wedge(&dzbar_form(n, j), v).unwrap().scale(&c));
            }
        }
        acc
    });
    (del, delbar)
}

pub fn wedge_sections(a: &FormSection, b: &FormSection) -> FormSection {
    a.convolve(b, |x, y| algebra::wedge(x, y).unwrap())
}

/// Pointwise spin action of a Clifford section on a form section.
pub fn clifford_apply(c: &CliffordSection, s: &FormSection) -> FormSection {
    c.convolve(s, |x, y| x.apply(y))
}

pub fn clifford_product(a: &CliffordSection, b: &CliffordSection) -> CliffordSection {
    a.convolve(b, |x, y| algebra::clifford_mul(x, y).unwrap())
}

pub fn lbar_to_clifford(s: &LbarSection) -> CliffordSection {
    s.map(|_, v| v.to_clifford())
}

pub fn encode_section(s: &LbarSection) -> FormSection {
    s.map(|_, v| v.encode())
}

pub fn decode_section(s: &FormSection) -> LbarSection {
    s.map(|_, v| LbarFiber::decode(v))
}

/// Flat Kähler data on the torus: standard `J` and a constant compatible `ω`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusKahlerData {
    pub n: usize,
    pub j_standard: Matrix,
    pub omega: FormFiber,
    pub psi0: FormFiber,
}

/// `ω(∂_a, ∂_b)` as a matrix.
pub fn two_form_matrix(omega: &FormFiber) -> Matrix {
    let m = 2 * omega.n;
    let mut w = Matrix::zeros(m, m);
    for (mask, c) in &omega.coeffs {
        if mask.count_ones() != 2 {
            continue;
        }
        let a = mask.trailing_zeros() as usize;
        let b = (31 - mask.leading_zeros()) as usize;
        w.set(a, b, c.clone());
        w.set(b, a, -c);
    }
    w
}

pub fn two_form_from_matrix(n: usize, w: &Matrix) -> FormFiber {
    let mut f = FormFiber::zero(n);
    for a in 0..2 * n {
        for b in a + 1..2 * n {
            f.add_term((1 << a) | (1 << b), w.get(a, b));
        }
    }
    f
}

impl TorusKahlerData {
    /// `ω = Σ_j dx^{2j-1} ∧ dx^{2j}`.
    pub fn standard(n: usize) -> Self {
        let mut omega = FormFiber::zero(n);
        for j in 0..n {
            omega.add_term((1 << (2 * j)) | (1 << (2 * j + 1)), &Scalar::one());
        }
        Self::new(n, omega).expect("standard data is Kähler")
    }

    pub fn new(n: usize, omega: FormFiber) -> Result<Self, FieldError> {
        if omega.n != n || !omega.is_homogeneous(2) {
            return Err(FieldError::InvalidKahler("ω must be a 2-form of matching dimension".into()));
        }
        if omega.coeffs.values().any(|c| !c.is_real()) {
            return Err(FieldError::InvalidKahler("ω must be real".into()));
        }
        let j = algebra::standard_j(n);
        let w = two_form_matrix(&omega);
        if j.transpose().mul(&w).mul(&j) != w {
            return Err(FieldError::InvalidKahler("ω is not J-invariant".into()));
        }
        let g = w.mul(&j);
        if g.transpose() != g {
            return Err(FieldError::InvalidKahler("ω(·,J·) is not symmetric".into()));
        }
        if g.leading_minors().iter().any(|m| m.re <= Q::zero()) {
            return Err(FieldError::InvalidKahler("ω(·,J·) is not positive definite".into()));
        }
        let psi0 = algebra::exp_two_form(&omega.scale(&Scalar::i())).unwrap().apply(&FormFiber::one(n));
        Ok(TorusKahlerData { n, j_standard: j, omega, psi0 })
    }

    /// `g(u, v) = ω(u, Jv)`.
    pub fn metric(&self) -> Matrix {
        two_form_matrix(&self.omega).mul(&self.j_standard)
    }

    pub fn psi0_section(&self) -> FormSection {
        FormSection::constant(self.psi0.clone())
    }
}

/// A bivector section of type (2,0).
#[derive(Clone, Debug, PartialEq)]
pub struct PoissonData {
    pub beta: LbarSection,
}

impl PoissonData {
    pub fn is_type_20(&self) -> bool {
        let n = self.beta.n;
        let holo_mask = (1u32 << n) - 1;
        self.beta.terms.values().all(|v| v.coeffs.keys().all(|m| m.count_ones() == 2 && m & !holo_mask == 0))
    }

    /// `∂̄β = 0` coefficientwise in the constant frame.
    pub fn is_holomorphic(&self) -> bool {
        let n = self.beta.n;
        self.beta.terms.keys().all(|k| (0..n).all(|j| dzbar_symbol(k, j).is_zero()))
    }
}

/// Stable JSON codec for sections.
pub trait FiberJson: Fiber {
    const KIND: &'static str;
    fn words(&self) -> Vec<(u64, Scalar)>;
    fn from_words(n: usize, w: &[(u64, Scalar)]) -> Self;
}

impl FiberJson for FormFiber {
    const KIND: &'static str = "form";
    fn words(&self) -> Vec<(u64, Scalar)> {
        self.coeffs.iter().map(|(m, c)| (*m as u64, c.clone())).collect()
    }
    fn from_words(n: usize, w: &[(u64, Scalar)]) -> Self {
        let mut f = FormFiber::zero(n);
        for (m, c) in w {
            f.add_term(*m as u32, c);
        }
        f
    }
}

impl FiberJson for LbarFiber {
    const KIND: &'static str = "multivector";
    fn words(&self) -> Vec<(u64, Scalar)> {
        self.coeffs.iter().map(|(m, c)| (*m as u64, c.clone())).collect()
    }
    fn from_words(n: usize, w: &[(u64, Scalar)]) -> Self {
        let mut f = LbarFiber::zero(n);
        for (m, c) in w {
            f.add_term(*m as u32, c);
        }
        f
    }
}

impl FiberJson for CliffordFiber {
    const KIND: &'static str = "clifford";
    fn words(&self) -> Vec<(u64, Scalar)> {
        algebra::clifford_coefficients(self).into_iter().collect()
    }
    fn from_words(n: usize, w: &[(u64, Scalar)]) -> Self {
        let mut c = CliffordFiber::zero(n);
        for (m, s) in w {
            c = c.add(&algebra::clifford_word(n, *m).scale(s));
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub k: Vec<i64>,
    pub basis_word: u64,
    pub re_num: String,
    pub re_den: String,
    pub im_num: String,
    pub im_den: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionJson {
    pub n: usize,
    pub fiber_kind: String,
    pub terms: Vec<TermJson>,
}

pub fn section_to_json<V: FiberJson>(s: &FourierSection<V>) -> SectionJson {
    let mut terms = Vec::new();
    for (k, v) in &s.terms {
        for (w, c) in v.words() {
            let re = q_to_json(&c.re);
            let im = q_to_json(&c.im);
            terms.push(TermJson { k: k.clone(), basis_word: w, re_num: re.num, re_den: re.den, im_num: im.num, im_den: im.den });
        }
    }
    SectionJson { n: s.n, fiber_kind: V::KIND.to_string(), terms }
}

pub fn section_from_json<V: FiberJson>(j: &SectionJson) -> Result<FourierSection<V>, FieldError> {
    if j.fiber_kind != V::KIND {
        return Err(FieldError::Json(format!("expected fiber_kind {}, found {}", V::KIND, j.fiber_kind)));
    }
    let mut grouped: BTreeMap<Frequency, Vec<(u64, Scalar)>> = BTreeMap::new();
    for t in &j.terms {
        if t.k.len() != 2 * j.n {
            return Err(FieldError::Json("frequency length must be 2n".into()));
        }
        let re = q_from_strs(&t.re_num, &t.re_den).ok_or_else(|| FieldError::Json("bad rational".into()))?;
        let im = q_from_strs(&t.im_num, &t.im_den).ok_or_else(|| FieldError::Json("bad rational".into()))?;
        grouped.entry(t.k.clone()).or_default().push((t.basis_word, Scalar::new(re, im)));
    }
    let mut s = FourierSection::zero(j.n);
    for (k, words) in grouped {
        s.add_term(k, V::from_words(j.n, &words));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use proptest::prelude::*;

    fn rand_form_section(n: usize, seed: &[(i64, i64, u32, i64, i64)]) -> FormSection {
        let mut s = FormSection::zero(n);
        for (k0, k1, m, a, b) in seed {
            let mut k = vec![0; 2 * n];
            k[0] = *k0;
            k[2 * n - 1] = *k1;
            s.add_term(k, FormFiber::monomial(n, m % (1 << (2 * n)), Scalar::new(q(*a, 1), q(*b, 1))));
        }
        s
    }

    fn arb_terms() -> impl Strategy<Value = Vec<(i64, i64, u32, i64, i64)>> {
        prop::collection::vec((-2i64..3, -2i64..3, 0u32..16, -3i64..4, -3i64..4), 0..4)
    }

    #[test]
    fn d_examples() {
        let n = 2;
        let c = FormSection::constant(FormFiber::dx(n, 1));
        assert!(exterior_d(&c).is_zero());
        let s = FormSection::single(n, vec![1, 0, 0, 0], FormFiber::one(n));
        let expect = FormSection::single(n, vec![1, 0, 0, 0], FormFiber::dx(n, 0).scale(&Scalar::i()));
        assert_eq!(exterior_d(&s), expect);
        let t = TorusKahlerData::standard(n);
        assert!(exterior_d(&t.psi0_section()).is_zero());
    }

    #[test]
    fn holomorphic_character_has_no_dbar_part_by_hand_expansion() {
        // e^{i x¹} = e^{i(z+z̄)/2}: ∂ gives (i/2) dz, ∂̄ gives (i/2) dz̄.
        let n = 1;
        let s = FormSection::single(n, vec![1, 0], FormFiber::one(n));
        let (del, delbar) = dolbeault_split(&s);
        let half_i = Scalar::new(Q::zero(), q(1, 2));
        assert_eq!(del, FormSection::single(n, vec![1, 0], dz_form(n, 0).scale(&half_i)));
        assert_eq!(delbar, FormSection::single(n, vec![1, 0], dzbar_form(n, 0).scale(&half_i)));
        // frequency (1, i) direction in z only is impossible on the lattice; the
        // ∂̄-symbol vanishes exactly at k = 0.
        assert!(dzbar_symbol(&vec![0, 0], 0).is_zero());
        assert!(dolbeault_split(&FormSection::constant(FormFiber::one(n))).1.is_zero());
    }

    #[test]
    fn sobolev_examples() {
        let n = 1;
        assert_eq!(FormSection::zero(n).sobolev_norm_sq(3), Q::zero());
        let c = FormSection::constant(FormFiber::one(n).scale(&Scalar::new(q(1, 1), q(2, 1))));
        assert_eq!(c.sobolev_norm_sq(0), q(5, 1));
        assert_eq!(c.sobolev_norm_sq(7), q(5, 1));
        let s = FormSection::single(n, vec![0, 1], FormFiber::one(n));
        assert_eq!(s.sobolev_norm_sq(2), q(4, 1));
    }

    #[test]
    fn reality_examples() {
        let n = 2;
        let beta = LbarFiber::word(n, 0b11, Scalar::new(q(1, 1), q(2, 1)));
        let b = CliffordSection::single(n, vec![1, 0, 0, 0], beta.to_clifford());
        assert!(reality_check(&b.add(&b.conj())));
        let im = b.sub(&b.conj()).scale(&Scalar::i());
        assert!(reality_check(&im));
        assert!(!reality_check(&b));
    }

    #[test]
    fn kahler_validation() {
        let t = TorusKahlerData::standard(2);
        assert_eq!(t.metric(), Matrix::identity(4));
        let bad = FormFiber::monomial(2, 0b0101, Scalar::one());
        assert!(TorusKahlerData::new(2, bad).is_err());
        let neg = TorusKahlerData::standard(1).omega.scale(&Scalar::from_int(-1));
        assert!(TorusKahlerData::new(1, neg).is_err());
    }

    #[test]
    fn frame_encoding_is_bijective_and_l_kills_omega() {
        for n in 1..=2 {
            let omega = algebra::canonical_form(n);
            for g in 0..2 * n {
                let l = algebra::lbar_generator(n, g).conj();
                assert!(algebra::spin_action(&l, &omega).unwrap().is_zero());
            }
            for m in 0..(1u32 << (2 * n)) {
                let w = LbarFiber::word(n, m, Scalar::new(q(2, 1), q(-1, 3)));
                assert_eq!(LbarFiber::decode(&w.encode()), w);
                assert_eq!(w.to_clifford().apply(&omega), w.encode());
            }
        }
        // U-grading: θ_I·Ω has form degrees n − |vector part| + |covector part|.
        let n = 2;
        let e = LbarFiber::word(n, 0b0101, Scalar::one()).encode();
        assert!(e.is_homogeneous(2));
    }

    #[test]
    fn json_roundtrip() {
        let s = rand_form_section(2, &[(1, -2, 5, 3, -1), (0, 0, 0, 1, 0)]);
        let j = section_to_json(&s);
        let txt = serde_json::to_string(&j).unwrap();
        let back: SectionJson = serde_json::from_str(&txt).unwrap();
        assert_eq!(section_from_json::<FormFiber>(&back).unwrap(), s);
        assert!(section_from_json::<LbarFiber>(&back).is_err());
        let beta = LbarFiber::word(2, 0b11, Scalar::new(q(1, 3), q(2, 1))).to_clifford();
        let c = CliffordSection::single(2, vec![0, 1, 0, 0], beta);
        assert_eq!(section_from_json::<CliffordFiber>(&section_to_json(&c)).unwrap(), c);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn d_squared_and_split(t in arb_terms()) {
            let s = rand_form_section(2, &t);
            prop_assert!(exterior_d(&exterior_d(&s)).is_zero());
            let (del, delbar) = dolbeault_split(&s);
            prop_assert_eq!(del.add(&delbar), exterior_d(&s));
            let (dd, _) = dolbeault_split(&del);
            let (_, bb) = dolbeault_split(&delbar);
            prop_assert!(dd.is_zero());
            prop_assert!(bb.is_zero());
            let (_, db) = dolbeault_split(&del);
            let (bd, _) = dolbeault_split(&delbar);
            prop_assert!(db.add(&bd).is_zero());
        }

        #[test]
        fn d_is_a_derivation(a in arb_terms(), b in arb_terms()) {
            let x = rand_form_section(1, &a).map(|_, v| v.homogeneous(1));
            let y = rand_form_section(1, &b);
            let lhs = exterior_d(&wedge_sections(&x, &y));
            let rhs = wedge_sections(&exterior_d(&x), &y).sub(&wedge_sections(&x, &exterior_d(&y)));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn conj_commutes_with_d(t in arb_terms()) {
            let s = rand_form_section(2, &t);
            prop_assert_eq!(exterior_d(&s).conj(), exterior_d(&s.conj()));
        }

        #[test]
        fn convolution_associative_distributive(a in arb_terms(), b in arb_terms(), c in arb_terms()) {
            let (x, y, z) = (rand_form_section(1, &a), rand_form_section(1, &b), rand_form_section(1, &c));
            prop_assert_eq!(wedge_sections(&wedge_sections(&x, &y), &z), wedge_sections(&x, &wedge_sections(&y, &z)));
            prop_assert_eq!(wedge_sections(&x, &y.add(&z)), wedge_sections(&x, &y).add(&wedge_sections(&x, &z)));
        }

        #[test]
        fn sobolev_monotone(t in arb_terms(), s in 0u32..5) {
            let x = rand_form_section(2, &t);
            prop_assert!(x.sobolev_norm_sq(s) <= x.sobolev_norm_sq(s + 1));
            prop_assert_eq!(x.sobolev_norm_sq(s).is_zero(), x.is_zero());
        }
    }
}
