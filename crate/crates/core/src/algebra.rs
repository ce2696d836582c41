//! Exterior and Clifford algebra of `T ⊕ T*` over a single fiber of a real
//! `2n`-dimensional space.
//!
//! Forms are stored on the monomial basis `dx^I`, `I` a bitmask over the `2n`
//! coordinates. A Clifford element is stored as its (faithful) spin
//! endomorphism: the list of images of the basis monomials. The spin action of
//! `X + ξ` is `ι_X + ξ∧`, and the pairing is `⟨X+ξ, Y+η⟩ = ½(ξ(Y) + η(X))`, so
//! `uv + vu = 2⟨u,v⟩`.

use crate::linalg::Matrix;
use crate::scalar::{Scalar, Q};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("expected a homogeneous form of degree {expected}")]
    WrongDegree { expected: usize },
    #[error("element is not invertible")]
    NotInvertible,
    #[error("element is not nilpotent")]
    NotNilpotent,
}

/// Sign of `dx^a ∧ dx^b` relative to `dx^{a∪b}` in increasing order; zero if they overlap.
pub fn wedge_sign(a: u32, b: u32) -> i32 {
    if a & b != 0 {
        return 0;
    }
    let mut swaps = 0u32;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        // elements of a strictly above j must hop over dx^j
        swaps += (a >> (j + 1)).count_ones();
        bb &= bb - 1;
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Real dimension `2n` coordinate count for a complex dimension `n`.
pub fn real_dim(n: usize) -> usize {
    2 * n
}

pub fn form_dim(n: usize) -> usize {
    1usize << (2 * n)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FormFiber {
    pub n: usize,
    pub coeffs: BTreeMap<u32, Scalar>,
}

impl FormFiber {
    pub fn zero(n: usize) -> Self {
        FormFiber { n, coeffs: BTreeMap::new() }
    }

    pub fn one(n: usize) -> Self {
        Self::monomial(n, 0, Scalar::one())
    }

    pub fn monomial(n: usize, mask: u32, c: Scalar) -> Self {
        let mut f = Self::zero(n);
        f.add_term(mask, &c);
        f
    }

    /// `dx^{a+1}` for 0-based coordinate `a`.
    pub fn dx(n: usize, a: usize) -> Self {
        Self::monomial(n, 1 << a, Scalar::one())
    }

    pub fn volume(n: usize) -> Self {
        Self::monomial(n, (1u32 << (2 * n)) - 1, Scalar::one())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, mask: u32) -> Scalar {
        self.coeffs.get(&mask).cloned().unwrap_or_else(Scalar::zero)
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

    pub fn add(&self, o: &FormFiber) -> FormFiber {
        assert_eq!(self.n, o.n, "form dimension mismatch");
        let mut r = self.clone();
        for (m, c) in &o.coeffs {
            r.add_term(*m, c);
        }
        r
    }

    pub fn sub(&self, o: &FormFiber) -> FormFiber {
        assert_eq!(self.n, o.n, "form dimension mismatch");
        let mut r = self.clone();
        for (m, c) in &o.coeffs {
            r.add_term(*m, &-c);
        }
        r
    }

    pub fn scale(&self, s: &Scalar) -> FormFiber {
        let mut r = FormFiber::zero(self.n);
        if s.is_zero() {
            return r;
        }
        for (m, c) in &self.coeffs {
            r.add_term(*m, &(c * s));
        }
        r
    }

    pub fn conj(&self) -> FormFiber {
        FormFiber { n: self.n, coeffs: self.coeffs.iter().map(|(m, c)| (*m, c.conj())).collect() }
    }

    pub fn homogeneous(&self, deg: usize) -> FormFiber {
        FormFiber {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(m, _)| m.count_ones() as usize == deg)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn is_homogeneous(&self, deg: usize) -> bool {
        self.coeffs.keys().all(|m| m.count_ones() as usize == deg)
    }

    /// Sum of |coefficient|² over the monomial basis.
    pub fn norm_sq(&self) -> Q {
        self.coeffs.values().fold(Q::zero(), |acc, c| acc + c.norm_sq())
    }

    /// Dense coordinate vector of length `2^{2n}`.
    pub fn to_vec(&self) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); form_dim(self.n)];
        for (m, c) in &self.coeffs {
            v[*m as usize] = c.clone();
        }
        v
    }

    pub fn from_vec(n: usize, v: &[Scalar]) -> FormFiber {
        let mut f = FormFiber::zero(n);
        for (m, c) in v.iter().enumerate() {
            f.add_term(m as u32, c);
        }
        f
    }
}

pub fn wedge(a: &FormFiber, b: &FormFiber) -> Result<FormFiber, AlgebraError> {
    if a.n != b.n {
        return Err(AlgebraError::DimensionMismatch(a.n, b.n));
    }
    let mut r = FormFiber::zero(a.n);
    for (ma, ca) in &a.coeffs {
        for (mb, cb) in &b.coeffs {
            let s = wedge_sign(*ma, *mb);
            if s == 0 {
                continue;
            }
            let c = ca * cb;
            r.add_term(ma | mb, &if s > 0 { c } else { -c });
        }
    }
    Ok(r)
}

/// Interior product with the coordinate vector field `∂_a`.
pub fn interior_coord(a: usize, phi: &FormFiber) -> FormFiber {
    let bit = 1u32 << a;
    let mut r = FormFiber::zero(phi.n);
    for (m, c) in &phi.coeffs {
        if m & bit == 0 {
            continue;
        }
        let before = (m & (bit - 1)).count_ones();
        r.add_term(m & !bit, &if before % 2 == 0 { c.clone() } else { -c });
    }
    r
}

/// `dx^a ∧ φ`.
pub fn ext_coord(a: usize, phi: &FormFiber) -> FormFiber {
    let bit = 1u32 << a;
    let mut r = FormFiber::zero(phi.n);
    for (m, c) in &phi.coeffs {
        if m & bit != 0 {
            continue;
        }
        let before = (m & (bit - 1)).count_ones();
        r.add_term(m | bit, &if before % 2 == 0 { c.clone() } else { -c });
    }
    r
}

/// An element `X + ξ` of `(T ⊕ T*)_ℂ` at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentCotangentFiber {
    pub n: usize,
    pub vector_part: Vec<Scalar>,
    pub covector_part: Vec<Scalar>,
}

impl TangentCotangentFiber {
    pub fn zero(n: usize) -> Self {
        let m = real_dim(n);
        TangentCotangentFiber { n, vector_part: vec![Scalar::zero(); m], covector_part: vec![Scalar::zero(); m] }
    }

    pub fn coord_vector(n: usize, a: usize) -> Self {
        let mut u = Self::zero(n);
        u.vector_part[a] = Scalar::one();
        u
    }

    pub fn coord_covector(n: usize, a: usize) -> Self {
        let mut u = Self::zero(n);
        u.covector_part[a] = Scalar::one();
        u
    }

    /// Coordinates on the ordered basis `∂_1..∂_{2n}, dx^1..dx^{2n}`.
    pub fn to_vec(&self) -> Vec<Scalar> {
        self.vector_part.iter().chain(self.covector_part.iter()).cloned().collect()
    }

    pub fn from_vec(n: usize, v: &[Scalar]) -> Self {
        let m = real_dim(n);
        assert_eq!(v.len(), 2 * m);
        TangentCotangentFiber { n, vector_part: v[..m].to_vec(), covector_part: v[m..].to_vec() }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_vec(self.n, &self.to_vec().iter().zip(o.to_vec()).map(|(a, b)| a + &b).collect::<Vec<_>>())
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        Self::from_vec(self.n, &self.to_vec().iter().map(|a| a * s).collect::<Vec<_>>())
    }

    pub fn conj(&self) -> Self {
        Self::from_vec(self.n, &self.to_vec().iter().map(|a| a.conj()).collect::<Vec<_>>())
    }

    pub fn is_zero(&self) -> bool {
        self.to_vec().iter().all(|x| x.is_zero())
    }
}

/// `⟨X+ξ, Y+η⟩ = ½(ξ(Y) + η(X))` (complex bilinear).
pub fn pairing(u: &TangentCotangentFiber, v: &TangentCotangentFiber) -> Scalar {
    let mut acc = Scalar::zero();
    for a in 0..real_dim(u.n) {
        acc += &(&u.covector_part[a] * &v.vector_part[a]);
        acc += &(&v.covector_part[a] * &u.vector_part[a]);
    }
    acc.scale(&Q::new(1.into(), 2.into()))
}

pub fn spin_action(u: &TangentCotangentFiber, phi: &FormFiber) -> Result<FormFiber, AlgebraError> {
    if u.n != phi.n {
        return Err(AlgebraError::DimensionMismatch(u.n, phi.n));
    }
    let mut r = FormFiber::zero(phi.n);
    for a in 0..real_dim(u.n) {
        if !u.vector_part[a].is_zero() {
            r = r.add(&interior_coord(a, phi).scale(&u.vector_part[a]));
        }
        if !u.covector_part[a].is_zero() {
            r = r.add(&ext_coord(a, phi).scale(&u.covector_part[a]));
        }
    }
    Ok(r)
}

/// A Clifford element, stored as the spin endomorphism of forms:
/// `cols[I]` is the image of `dx^I`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CliffordFiber {
    pub n: usize,
    pub cols: Vec<FormFiber>,
}

impl CliffordFiber {
    pub fn zero(n: usize) -> Self {
        CliffordFiber { n, cols: vec![FormFiber::zero(n); form_dim(n)] }
    }

    pub fn scalar(n: usize, s: &Scalar) -> Self {
        let cols = (0..form_dim(n)).map(|m| FormFiber::monomial(n, m as u32, s.clone())).collect();
        CliffordFiber { n, cols }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, &Scalar::one())
    }

    pub fn from_fn(n: usize, f: impl Fn(&FormFiber) -> FormFiber) -> Self {
        let cols = (0..form_dim(n)).map(|m| f(&FormFiber::monomial(n, m as u32, Scalar::one()))).collect();
        CliffordFiber { n, cols }
    }

    pub fn from_vector(u: &TangentCotangentFiber) -> Self {
        Self::from_fn(u.n, |phi| spin_action(u, phi).expect("same dimension"))
    }

    /// Left wedge multiplication by a form.
    pub fn wedge_by(form: &FormFiber) -> Self {
        Self::from_fn(form.n, |phi| wedge(form, phi).expect("same dimension"))
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_zero())
    }

    pub fn apply(&self, phi: &FormFiber) -> FormFiber {
        assert_eq!(self.n, phi.n, "dimension mismatch");
        let mut r = FormFiber::zero(self.n);
        for (m, c) in &phi.coeffs {
            for (mm, cc) in &self.cols[*m as usize].coeffs {
                r.add_term(*mm, &(c * cc));
            }
        }
        r
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        CliffordFiber { n: self.n, cols: self.cols.iter().zip(&o.cols).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        CliffordFiber { n: self.n, cols: self.cols.iter().zip(&o.cols).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        CliffordFiber { n: self.n, cols: self.cols.iter().map(|a| a.scale(s)).collect() }
    }

    pub fn conj(&self) -> Self {
        CliffordFiber { n: self.n, cols: self.cols.iter().map(|a| a.conj()).collect() }
    }

    pub fn is_real(&self) -> bool {
        self.cols.iter().all(|c| c.coeffs.values().all(|x| x.is_real()))
    }

    /// Frobenius norm squared of the endomorphism.
    pub fn norm_sq(&self) -> Q {
        self.cols.iter().fold(Q::zero(), |acc, c| acc + c.norm_sq())
    }

    pub fn to_matrix(&self) -> Matrix {
        let d = form_dim(self.n);
        Matrix::from_cols(&self.cols.iter().map(|c| c.to_vec()).collect::<Vec<_>>(), d)
    }

    pub fn from_matrix(n: usize, m: &Matrix) -> Self {
        CliffordFiber { n, cols: (0..m.cols).map(|j| FormFiber::from_vec(n, &m.col(j))).collect() }
    }

    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        self.to_matrix().inverse().map(|m| Self::from_matrix(self.n, &m)).ok_or(AlgebraError::NotInvertible)
    }

    /// Even elements preserve form parity; odd ones flip it.
    pub fn parity(&self) -> Option<usize> {
        let mut even = true;
        let mut odd = true;
        for (m, col) in self.cols.iter().enumerate() {
            for k in col.coeffs.keys() {
                if (k.count_ones() + (m as u32).count_ones()) % 2 == 0 {
                    odd = false;
                } else {
                    even = false;
                }
            }
        }
        match (even, odd) {
            (true, _) => Some(0),
            (false, true) => Some(1),
            _ => None,
        }
    }

    /// Decode a degree-one element `X + ξ`, if this is one.
    pub fn as_vector(&self) -> Option<TangentCotangentFiber> {
        let n = self.n;
        let mut u = TangentCotangentFiber::zero(n);
        let img1 = self.apply(&FormFiber::one(n));
        for a in 0..real_dim(n) {
            u.covector_part[a] = img1.get(1 << a);
        }
        let vol = FormFiber::volume(n);
        let imgv = self.apply(&vol);
        for a in 0..real_dim(n) {
            let c = imgv.get(vol.coeffs.keys().next().unwrap() & !(1 << a));
            // ι_{∂_a} dx^{1..2n} = (−1)^a dx^{..â..}
            u.vector_part[a] = if a % 2 == 0 { c } else { -c };
        }
        if &CliffordFiber::from_vector(&u) == self {
            Some(u)
        } else {
            None
        }
    }
}

pub fn clifford_mul(a: &CliffordFiber, b: &CliffordFiber) -> Result<CliffordFiber, AlgebraError> {
    if a.n != b.n {
        return Err(AlgebraError::DimensionMismatch(a.n, b.n));
    }
    Ok(CliffordFiber { n: a.n, cols: b.cols.iter().map(|c| a.apply(c)).collect() })
}

pub fn commutator(a: &CliffordFiber, b: &CliffordFiber) -> CliffordFiber {
    clifford_mul(a, b).unwrap().sub(&clifford_mul(b, a).unwrap())
}

/// `exp(c) = Σ c^k/k!` for a nilpotent element.
pub fn exp_nilpotent(c: &CliffordFiber) -> Result<CliffordFiber, AlgebraError> {
    let n = c.n;
    let mut acc = CliffordFiber::identity(n);
    let mut term = CliffordFiber::identity(n);
    for k in 1..=(form_dim(n) + 1) {
        term = clifford_mul(&term, c)?.scale(&Scalar::frac(1, k as i64));
        if term.is_zero() {
            return Ok(acc);
        }
        acc = acc.add(&term);
    }
    Err(AlgebraError::NotNilpotent)
}

/// `e^ω` for a 2-form acting by wedge.
pub fn exp_two_form(omega: &FormFiber) -> Result<CliffordFiber, AlgebraError> {
    if !omega.is_homogeneous(2) {
        return Err(AlgebraError::WrongDegree { expected: 2 });
    }
    exp_nilpotent(&CliffordFiber::wedge_by(omega))
}

pub fn adjoint_action(g: &CliffordFiber, e: &CliffordFiber) -> Result<CliffordFiber, AlgebraError> {
    let gi = g.inverse()?;
    clifford_mul(&clifford_mul(g, e)?, &gi)
}

/// Ordered orthogonal generators `∂_a ± dx^a` used for the canonical monomial basis.
/// Generator `2a` is `∂_a + dx^a` (square 1), `2a+1` is `∂_a − dx^a` (square −1).
pub fn orthogonal_generator(n: usize, g: usize) -> TangentCotangentFiber {
    let a = g / 2;
    let mut u = TangentCotangentFiber::zero(n);
    u.vector_part[a] = Scalar::one();
    u.covector_part[a] = if g % 2 == 0 { Scalar::one() } else { Scalar::from_int(-1) };
    u
}

/// Product of the orthogonal generators listed in the mask, in increasing order.
pub fn clifford_word(n: usize, mask: u64) -> CliffordFiber {
    let mut acc = CliffordFiber::identity(n);
    for g in 0..(4 * n) {
        if mask & (1 << g) != 0 {
            acc = clifford_mul(&acc, &CliffordFiber::from_vector(&orthogonal_generator(n, g))).unwrap();
        }
    }
    acc
}

fn trace(c: &CliffordFiber) -> Scalar {
    let mut t = Scalar::zero();
    for (m, col) in c.cols.iter().enumerate() {
        t += &col.get(m as u32);
    }
    t
}

/// Coefficient of `c` along the word `w`; words are orthogonal for the trace form.
pub fn word_coefficient(c: &CliffordFiber, mask: u64) -> Scalar {
    let w = clifford_word(c.n, mask);
    let ww = clifford_mul(&w, &w).unwrap();
    // w² = ±1, so w⁻¹ = ±w
    let sign = ww.cols[0].get(0);
    let winv = w.scale(&sign);
    let t = trace(&clifford_mul(&winv, c).unwrap());
    t.scale(&Q::new(1.into(), (form_dim(c.n) as i64).into()))
}

fn words_up_to(n: usize, max_len: usize) -> Vec<u64> {
    let g = 4 * n;
    (0u64..(1u64 << g)).filter(|m| m.count_ones() as usize <= max_len).collect()
}

/// Full expansion on the orthogonal monomial basis.
pub fn clifford_coefficients(c: &CliffordFiber) -> BTreeMap<u64, Scalar> {
    words_up_to(c.n, 4 * c.n)
        .into_iter()
        .filter_map(|m| {
            let s = word_coefficient(c, m);
            (!s.is_zero()).then_some((m, s))
        })
        .collect()
}

/// Highest word length present (the filtration degree).
pub fn filtration_degree(c: &CliffordFiber) -> usize {
    clifford_coefficients(c).keys().map(|m| m.count_ones() as usize).max().unwrap_or(0)
}

/// Component of `c` on words of length ≤ 2.
pub fn project_cl2(c: &CliffordFiber) -> CliffordFiber {
    let mut r = CliffordFiber::zero(c.n);
    for m in words_up_to(c.n, 2) {
        let s = word_coefficient(c, m);
        if !s.is_zero() {
            r = r.add(&clifford_word(c.n, m).scale(&s));
        }
    }
    r
}

/// `γ = Σ A_ij ∂_i·dx^j`, so that `[γ, ∂_l] = Σ_i A_il ∂_i` and `[γ, T*] ⊂ T*`.
pub fn endo_to_ttstar(n: usize, a: &Matrix) -> CliffordFiber {
    let m = real_dim(n);
    assert_eq!((a.rows, a.cols), (m, m));
    let mut g = CliffordFiber::zero(n);
    for i in 0..m {
        for j in 0..m {
            let s = a.get(i, j);
            if s.is_zero() {
                continue;
            }
            let term = clifford_mul(
                &CliffordFiber::from_vector(&TangentCotangentFiber::coord_vector(n, i)),
                &CliffordFiber::from_vector(&TangentCotangentFiber::coord_covector(n, j)),
            )
            .unwrap();
            g = g.add(&term.scale(s));
        }
    }
    g
}

/// Matrix of `E ↦ [c, E]` on `T ⊕ T*` (4n×4n), if `c` preserves degree one.
pub fn ad_matrix(c: &CliffordFiber) -> Option<Matrix> {
    let n = c.n;
    let dim = 2 * real_dim(n);
    let mut cols = Vec::with_capacity(dim);
    for k in 0..dim {
        let mut e = vec![Scalar::zero(); dim];
        e[k] = Scalar::one();
        let u = TangentCotangentFiber::from_vec(n, &e);
        let img = commutator(c, &CliffordFiber::from_vector(&u)).as_vector()?;
        cols.push(img.to_vec());
    }
    Some(Matrix::from_cols(&cols, dim))
}

/// Matrix of `E ↦ g E g⁻¹` on `T ⊕ T*`.
pub fn adjoint_matrix(g: &CliffordFiber) -> Option<Matrix> {
    let n = g.n;
    let gi = g.inverse().ok()?;
    let dim = 2 * real_dim(n);
    let mut cols = Vec::with_capacity(dim);
    for k in 0..dim {
        let mut e = vec![Scalar::zero(); dim];
        e[k] = Scalar::one();
        let u = CliffordFiber::from_vector(&TangentCotangentFiber::from_vec(n, &e));
        let img = clifford_mul(&clifford_mul(g, &u).ok()?, &gi).ok()?.as_vector()?;
        cols.push(img.to_vec());
    }
    Some(Matrix::from_cols(&cols, dim))
}

/// Pairing matrix on the basis `∂_1..∂_{2n}, dx^1..dx^{2n}`.
pub fn pairing_matrix(n: usize) -> Matrix {
    let m = real_dim(n);
    let mut p = Matrix::zeros(2 * m, 2 * m);
    for a in 0..m {
        p.set(a, m + a, Scalar::frac(1, 2));
        p.set(m + a, a, Scalar::frac(1, 2));
    }
    p
}

/// The standard complex structure `J ∂_{2j-1} = ∂_{2j}` on `T` (2n×2n).
pub fn standard_j(n: usize) -> Matrix {
    let m = real_dim(n);
    let mut j = Matrix::zeros(m, m);
    for k in 0..n {
        j.set(2 * k + 1, 2 * k, Scalar::one());
        j.set(2 * k, 2 * k + 1, Scalar::from_int(-1));
    }
    j
}

/// `J*` on covector coordinates, defined by `⟨J*η, v⟩ = ⟨η, Jv⟩`; its matrix is `Jᵀ`.
pub fn j_star(j: &Matrix) -> Matrix {
    j.transpose()
}

/// Generators of `L̄ = T^{1,0} ⊕ T*^{0,1}` for the standard complex structure:
/// `θ_j = ∂/∂z_j = ½(∂_{2j-1} − i∂_{2j})` for `j < n`, `θ_{n+j} = dz̄_j = dx^{2j-1} − i dx^{2j}`.
pub fn lbar_generator(n: usize, g: usize) -> TangentCotangentFiber {
    let mut u = TangentCotangentFiber::zero(n);
    if g < n {
        u.vector_part[2 * g] = Scalar::frac(1, 2);
        u.vector_part[2 * g + 1] = Scalar::cplx(Q::zero(), Q::new((-1).into(), 2.into()));
    } else {
        let j = g - n;
        u.covector_part[2 * j] = Scalar::one();
        u.covector_part[2 * j + 1] = Scalar::cplx(Q::zero(), -Q::one());
    }
    u
}

/// The (n,0)-form `Ω = dz_1 ∧ … ∧ dz_n` spanning the canonical line.
pub fn canonical_form(n: usize) -> FormFiber {
    let mut acc = FormFiber::one(n);
    for j in 0..n {
        let dz = FormFiber::dx(n, 2 * j).add(&FormFiber::dx(n, 2 * j + 1).scale(&Scalar::i()));
        acc = wedge(&acc, &dz).unwrap();
    }
    acc
}

/// A generalized complex structure on one fiber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GCFiberStructure {
    pub n: usize,
    pub j_matrix: Matrix,
    pub l_projector: Matrix,
    pub lbar_projector: Matrix,
}

impl GCFiberStructure {
    /// Build from a basis of the `+i` eigenspace `L` (columns in ℂ^{4n}).
    pub fn from_l_basis(n: usize, l_basis: &[Vec<Scalar>]) -> Option<Self> {
        let dim = 2 * real_dim(n);
        if l_basis.len() != dim / 2 {
            return None;
        }
        let mut cols: Vec<Vec<Scalar>> = l_basis.to_vec();
        cols.extend(l_basis.iter().map(|v| v.iter().map(|x| x.conj()).collect::<Vec<_>>()));
        let m = Matrix::from_cols(&cols, dim);
        let mi = m.inverse()?;
        let mut d = Matrix::zeros(dim, dim);
        for k in 0..dim / 2 {
            d.set(k, k, Scalar::one());
        }
        let pl = m.mul(&d).mul(&mi);
        let plb = Matrix::identity(dim).sub(&pl);
        let j = pl.scale(&Scalar::i()).sub(&plb.scale(&Scalar::i()));
        Some(GCFiberStructure { n, j_matrix: j, l_projector: pl, lbar_projector: plb })
    }

    /// `𝒥_J` for the standard complex structure: `L = T^{0,1} ⊕ T*^{1,0}`.
    pub fn standard_complex(n: usize) -> Self {
        let basis: Vec<Vec<Scalar>> = (0..2 * n).map(|g| lbar_generator(n, g).conj().to_vec()).collect();
        Self::from_l_basis(n, &basis).expect("standard L is a complement of its conjugate")
    }

    pub fn check_invariants(&self) -> bool {
        let dim = self.j_matrix.rows;
        let id = Matrix::identity(dim);
        let p = pairing_matrix(self.n);
        let j2 = self.j_matrix.mul(&self.j_matrix);
        let orth = self.j_matrix.transpose().mul(&p).mul(&self.j_matrix) == p;
        j2 == id.scale(&Scalar::from_int(-1))
            && orth
            && self.l_projector.add(&self.lbar_projector) == id
            && self.l_projector.mul(&self.l_projector) == self.l_projector
            && self.l_projector.conj() == self.lbar_projector
    }
}
