//! Binary quadratic forms: the degree-3 embedding of SL2 into the automorphs
//! of `xz - y^2`, height reduction, Markoff forms and their reduction
//! cycles, symmetric-form detection, fundamental automorphs, and the
//! two-square pipeline connecting residue profiles to Pythagorean data.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{mat2_det, mat2_mul, mat2_transpose, Mat2};
use crate::mat3::Mat3;
use crate::profile::{native_profiles, ResidueProfile};
use crate::report::IdentityReport;
use crate::tree::{enumerate, MarkoffTriple, Orientation};
use crate::{int, Int, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QformError {
    /// `xz - y^2 = 1` fails or x is not positive.
    BadInput,
    /// Not a Markoff number.
    NotMarkoff,
    /// Discriminant not positive or a perfect square.
    BadDiscriminant,
    /// Parameters fail the arithmetic relations of the requested automorph.
    BadParams,
    /// The two members do not sit in a common triple.
    NoCommonTriple,
}

/// Integer binary quadratic form `A s^2 + B s t + C t^2`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Bqf {
    pub a: Int,
    pub b: Int,
    pub c: Int,
}

impl Bqf {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        Bqf {
            a: int(a),
            b: int(b),
            c: int(c),
        }
    }

    pub fn disc(&self) -> Int {
        &self.b * &self.b - int(4) * &self.a * &self.c
    }

    /// Symmetric: outer coefficients are negatives of each other.
    pub fn is_symmetric(&self) -> bool {
        self.c == -&self.a
    }

    /// Ambiguous: the middle coefficient is divisible by the leading one.
    pub fn is_ambiguous(&self) -> bool {
        !self.a.is_zero() && self.b.is_multiple_of(&self.a)
    }

    /// Transform by an SL2 matrix `[[p, q], [r, s]]` acting on `(s, t)`.
    pub fn transform(&self, m: &Mat2) -> Bqf {
        let (p, q, r, s) = (&m[0][0], &m[0][1], &m[1][0], &m[1][1]);
        let a = &self.a * p * p + &self.b * p * r + &self.c * r * r;
        let b = int(2) * &self.a * p * q + &self.b * (p * s + q * r) + int(2) * &self.c * r * s;
        let c = &self.a * q * q + &self.b * q * s + &self.c * s * s;
        Bqf { a, b, c }
    }

    /// Reduced for a positive non-square discriminant:
    /// `0 < B < sqrt(D)` and `sqrt(D) - B < 2|A| < sqrt(D) + B`.
    pub fn is_reduced(&self) -> bool {
        let d = self.disc();
        if !d.is_positive() {
            return false;
        }
        let b = &self.b;
        if !b.is_positive() || b * b >= d {
            return false;
        }
        let t = int(2) * self.a.abs();
        // sqrt(D) - B < 2|A|  <=>  D < (2|A| + B)^2
        let hi = &t + b;
        if d >= &hi * &hi {
            return false;
        }
        // 2|A| < sqrt(D) + B  <=>  2|A| - B < sqrt(D)
        let lo = &t - b;
        lo.is_negative() || &lo * &lo < d
    }
}

/// A closed cycle of reduced forms under the reduction step, stored from
/// its lexicographically least member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    pub forms: Vec<Bqf>,
}

impl Cycle {
    pub fn contains(&self, f: &Bqf) -> bool {
        self.forms.contains(f)
    }

    /// Membership up to the `(s,t) -> (-t,s)` transformation.
    pub fn contains_up_to_flip(&self, f: &Bqf) -> bool {
        let flipped = Bqf {
            a: f.c.clone(),
            b: -&f.b,
            c: f.a.clone(),
        };
        self.contains(f) || self.contains(&flipped)
    }

    pub fn symmetric_forms(&self) -> Vec<Bqf> {
        self.forms
            .iter()
            .filter(|f| f.is_symmetric())
            .cloned()
            .collect()
    }
}

/// One reduction step: the right-neighbor operator on reduced forms (and a
/// normalizing step on non-reduced ones).
pub fn rho(f: &Bqf, sqrt_d: &Int) -> Bqf {
    let two_c_abs = int(2) * f.c.abs();
    debug_assert!(!f.c.is_zero());
    let bp = if &f.c.abs() > sqrt_d {
        // land in (-|c|, |c|]
        let m = (-&f.b).mod_floor(&two_c_abs);
        if &m > &f.c.abs() {
            m - &two_c_abs
        } else {
            m
        }
    } else {
        // land in (sqrt(D) - 2|c|, sqrt(D)]
        sqrt_d - (sqrt_d + &f.b).mod_floor(&two_c_abs)
    };
    let d = f.disc();
    let cp = (&bp * &bp - d) / (int(4) * &f.c);
    Bqf {
        a: f.c.clone(),
        b: bp,
        c: cp,
    }
}

/// The full cycle of reduced forms equivalent to `f`, starting from the
/// lexicographically least member.
pub fn reduction_cycle(f: &Bqf) -> Result<Cycle, QformError> {
    let d = f.disc();
    if !d.is_positive() {
        return Err(QformError::BadDiscriminant);
    }
    let s = d.sqrt();
    if &s * &s == d {
        return Err(QformError::BadDiscriminant);
    }
    let mut g = f.clone();
    let mut guard = 0usize;
    while !g.is_reduced() {
        g = rho(&g, &s);
        guard += 1;
        assert!(guard < 100_000, "reduction did not terminate");
    }
    let first = g.clone();
    let mut forms = vec![g.clone()];
    loop {
        g = rho(&g, &s);
        debug_assert!(g.is_reduced());
        if g == first {
            break;
        }
        forms.push(g.clone());
        assert!(forms.len() < 1_000_000, "cycle did not close");
    }
    // deterministic starting point
    let min_pos = forms
        .iter()
        .enumerate()
        .min_by(|(_, x), (_, y)| x.cmp(y))
        .map(|(i, _)| i)
        .unwrap();
    forms.rotate_left(min_pos);
    Ok(Cycle { forms })
}

/// 2x2 integer matrix of determinant 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sl2Mat(pub Mat2);

impl Sl2Mat {
    pub fn new(m: Mat2) -> Option<Self> {
        mat2_det(&m).is_one().then_some(Sl2Mat(m))
    }

    pub fn identity() -> Self {
        Sl2Mat(crate::arith::mat2(1, 0, 0, 1))
    }

    pub fn mul(&self, other: &Sl2Mat) -> Sl2Mat {
        Sl2Mat(mat2_mul(&self.0, &other.0))
    }

    pub fn inverse(&self) -> Sl2Mat {
        let m = &self.0;
        Sl2Mat([[m[1][1].clone(), -&m[0][1]], [-&m[1][0], m[0][0].clone()]])
    }

    pub fn transpose(&self) -> Sl2Mat {
        Sl2Mat(mat2_transpose(&self.0))
    }

    pub fn trace(&self) -> Int {
        &self.0[0][0] + &self.0[1][1]
    }
}

/// The degree-3 representation sending `[[p,q],[r,s]]` to the automorph
/// `[[p^2, 2pq, q^2], [pr, ps+qr, qs], [r^2, 2rs, s^2]]` of `xz - y^2`.
pub fn psi(m: &Mat2) -> Mat3 {
    let (p, q, r, s) = (&m[0][0], &m[0][1], &m[1][0], &m[1][1]);
    let e = |v: Int| Rat::from_integer(v);
    Mat3::from_rows([
        [e(p * p), e(int(2) * p * q), e(q * q)],
        [e(p * r), e(p * s + q * r), e(q * s)],
        [e(r * r), e(int(2) * r * s), e(s * s)],
    ])
}

/// Reduce a representation `x z - y^2 = 1` (x positive) to `(1, 0, 1)` by
/// shear moves, returning the SL2 matrix `A` with
/// `psi(A) (x,y,z)^t = (1,0,1)^t` and the intermediate triples.
pub fn reduce_height(x: &Int, y: &Int, z: &Int) -> Result<(Sl2Mat, Vec<[Int; 3]>), QformError> {
    if !x.is_positive() || x * z - y * y != Int::one() {
        return Err(QformError::BadInput);
    }
    let mut acc = Sl2Mat::identity();
    let mut v = [x.clone(), y.clone(), z.clone()];
    let mut steps = vec![v.clone()];
    let round_div = |n: &Int, d: &Int| -> Int {
        // nearest integer to n/d, d > 0
        let two_n = int(2) * n;
        (&two_n + d).div_floor(&(int(2) * d))
    };
    while !v[1].is_zero() {
        // shear on the smaller outer coefficient
        if v[0] <= v[2] {
            let r = -round_div(&v[1], &v[0]);
            let g = Sl2Mat(crate::arith::mat2(1, 0, 0, 1));
            let mut m = g.0;
            m[1][0] = r.clone();
            let g = Sl2Mat(m);
            // psi(g) action: x' = x, y' = r x + y, z' = r^2 x + 2 r y + z
            let x2 = v[0].clone();
            let y2 = &r * &v[0] + &v[1];
            let z2 = &r * &r * &v[0] + int(2) * &r * &v[1] + &v[2];
            v = [x2, y2, z2];
            acc = g.mul(&acc);
        } else {
            let q = -round_div(&v[1], &v[2]);
            let mut m = crate::arith::mat2(1, 0, 0, 1);
            m[0][1] = q.clone();
            let g = Sl2Mat(m);
            let x2 = &v[0] + int(2) * &q * &v[1] + &q * &q * &v[2];
            let y2 = &v[1] + &q * &v[2];
            let z2 = v[2].clone();
            v = [x2, y2, z2];
            acc = g.mul(&acc);
        }
        steps.push(v.clone());
        assert!(steps.len() < 10_000, "height reduction stalled");
    }
    debug_assert!(v[0].is_one() && v[2].is_one());
    Ok((acc, steps))
}

/// `(k, l)` residue data of a Markoff number: the bounded positive root of
/// -1 attached to the triple it dominates (inspection value for 1).
pub fn markoff_residue(m: u64) -> Result<(Int, Int), QformError> {
    if m == 1 {
        return Ok((int(1), int(2)));
    }
    // the orientations with m/3 = m live on the parent of the triple m
    // dominates
    let t = enumerate(m)
        .into_iter()
        .find(|t| t.dominant() == m)
        .ok_or(QformError::NotMarkoff)?;
    let parent = t.parent().ok_or(QformError::NotMarkoff)?;
    for o in parent.orientations() {
        if o.m_frak() as u64 != m {
            continue;
        }
        for p in native_profiles(&o).map_err(|_| QformError::NotMarkoff)? {
            if p.k[1].is_positive() {
                return Ok((p.k[1].clone(), p.l[1].clone()));
            }
        }
    }
    Err(QformError::NotMarkoff)
}

/// The Markoff form `m s^2 + (2k - 3m) s t + (l - 3k) t^2` of discriminant
/// `9 m^2 - 4`.
pub fn markoff_form(m: u64) -> Result<Bqf, QformError> {
    let (k, l) = markoff_residue(m)?;
    let mi = int(m as i64);
    let f = Bqf {
        a: mi.clone(),
        b: int(2) * &k - int(3) * &mi,
        c: &l - int(3) * &k,
    };
    debug_assert_eq!(f.disc(), int(9) * &mi * &mi - int(4));
    Ok(f)
}

/// Symmetric forms in the reduction cycle of the Markoff form.
pub fn symmetric_forms_in_cycle(m: u64) -> Result<Vec<Bqf>, QformError> {
    let f = markoff_form(m)?;
    let cycle = reduction_cycle(&f)?;
    Ok(cycle.symmetric_forms())
}

/// Candidate symmetric coefficients: all `(u, v)` with `4u^2 + v^2 = 9m^2-4`,
/// u > 0, v > 0.
pub fn symmetric_candidates(m: u64) -> Vec<(Int, Int)> {
    let d = 9 * (m as u128) * (m as u128) - 4;
    let mut out = Vec::new();
    let mut u = 1u128;
    while 4 * u * u < d {
        let rest = d - 4 * u * u;
        let v = rest.isqrt();
        if v * v == rest && v > 0 {
            out.push((int(u as i64), int(v as i64)));
        }
        u += 1;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AutomorphKind {
    F,
    G,
    H,
}

/// The fundamental automorph of the Markoff form, the two-square form, or a
/// symmetric form; trace `3m` (with `m = f^2 + g^2` for kind G).
pub fn fundamental_automorph(kind: AutomorphKind, params: &[Int]) -> Result<Sl2Mat, QformError> {
    match kind {
        AutomorphKind::F => {
            let [m, k, l] = params else {
                return Err(QformError::BadParams);
            };
            if k * k + int(1) != m * l {
                return Err(QformError::BadParams);
            }
            Ok(Sl2Mat([
                [int(3) * m - k, int(3) * k - l],
                [m.clone(), k.clone()],
            ]))
        }
        AutomorphKind::G => {
            let [f, g] = params else {
                return Err(QformError::BadParams);
            };
            Ok(Sl2Mat([
                [int(3) * g * g, int(3) * f * g - int(1)],
                [int(3) * f * g + int(1), int(3) * f * f],
            ]))
        }
        AutomorphKind::H => {
            let [u, v, m] = params else {
                return Err(QformError::BadParams);
            };
            if int(4) * u * u + v * v != int(9) * m * m - int(4) {
                return Err(QformError::BadParams);
            }
            if (int(3) * m - v).is_odd() {
                return Err(QformError::BadParams);
            }
            Ok(Sl2Mat([
                [(int(3) * m - v) / int(2), u.clone()],
                [u.clone(), (int(3) * m + v) / int(2)],
            ]))
        }
    }
}

/// The two-square form `(1 + 3fg, 3(f^2 - g^2), 1 - 3fg)`.
pub fn g_form(f: &Int, g: &Int) -> Bqf {
    Bqf {
        a: int(1) + int(3) * f * g,
        b: int(3) * (f * f - g * g),
        c: int(1) - int(3) * f * g,
    }
}

/// Everything the two-square pipeline extracts from a residue profile.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub a_sl2: Sl2Mat,
    /// `psi(A) * profile matrix`, with unit middle column.
    pub framed: Mat3,
    pub p_frak: Int,
    pub q_frak: Int,
    pub f: Int,
    pub g: Int,
    pub u_a: Int,
    pub v_a: Int,
    pub u_c: Int,
    pub v_c: Int,
    pub report: IdentityReport,
}

/// Run the height reduction on the middle profile column and read off the
/// Pythagorean data of the fourth member.
pub fn pipeline(p: &ResidueProfile) -> Result<Pipeline, QformError> {
    let (a_sl2, steps) = reduce_height(&p.cols[1], &p.k[1], &p.l[1])?;
    // sign preservation along the way
    let mut pass = steps
        .iter()
        .all(|s| s[0].is_positive() && s[2].is_positive());
    let framed = psi(&a_sl2.0).mul(&p.matrix());
    let col = |j: usize| -> [Int; 3] { core::array::from_fn(|i| framed.0[i][j].numer().clone()) };
    let mid = col(1);
    pass &= mid == [int(1), int(0), int(1)];
    let (x1, y1, z1) = {
        let c = col(0);
        (c[0].clone(), c[1].clone(), c[2].clone())
    };
    let (x2, y2, z2) = {
        let c = col(2);
        (c[0].clone(), c[1].clone(), c[2].clone())
    };
    // unit representations per column
    pass &= &x1 * &z1 - &y1 * &y1 == Int::one();
    pass &= &x2 * &z2 - &y2 * &y2 == Int::one();
    // column sums recover the members
    let af = &p.cols[2];
    let cf = &p.cols[0];
    pass &= &x1 + &z1 == int(3) * af && &x2 + &z2 == int(3) * cf;
    let (v_a, v_c) = (&x1 - &z1, &x2 - &z2);
    let (u_a, u_c) = (y1, y2);
    // adjugate second row is the two-square row; its outer sum is det = 2
    let adj = framed.adjugate();
    let r21 = adj.0[1][0].numer().clone();
    let r22 = adj.0[1][1].numer().clone();
    let r23 = adj.0[1][2].numer().clone();
    pass &= &r21 + &r23 == int(2);
    let (p3, rp) = r22.div_rem(&int(3));
    let (q3, rq) = (&r21 - int(1)).div_rem(&int(3));
    pass &= rp.is_zero() && rq.is_zero();
    let bf = p.b_frak();
    // p^2 + 4 q^2 = b^2
    pass &= &p3 * &p3 + int(4) * &q3 * &q3 == &bf * &bf;
    // f^2 = (b + p)/2, g^2 = (b - p)/2
    let (f2, rf) = (&bf + &p3).div_rem(&int(2));
    let (g2, rg) = (&bf - &p3).div_rem(&int(2));
    let mut f = Int::zero();
    let mut g = Int::zero();
    if rf.is_zero() && rg.is_zero() && !f2.is_negative() && !g2.is_negative() {
        f = f2.sqrt();
        g = g2.sqrt();
        pass &= &f * &f == f2 && &g * &g == g2;
        if !q3.is_zero() && (&f * &g).sign() != q3.sign() {
            g = -g;
        }
        pass &= &f * &g == q3 && &f * &f + &g * &g == bf;
    } else {
        pass = false;
    }
    // the (7.30)-style contractions
    pass &= &p3 * &u_a + &q3 * &v_a == -af;
    pass &= &p3 * &u_c + &q3 * &v_c == -cf;
    let report = IdentityReport::flag(
        "7.pipeline",
        format!("profile {:?}", (&p.cols[0], &p.cols[1], &p.cols[2])),
        pass,
        format!("p={p3} q={q3} f={f} g={g}"),
    );
    Ok(Pipeline {
        a_sl2,
        framed,
        p_frak: p3,
        q_frak: q3,
        f,
        g,
        u_a,
        v_a,
        u_c,
        v_c,
        report,
    })
}

/// The two-square split of a Markoff number together with the symmetric
/// factorization of its fundamental automorph.
#[derive(Debug, Clone)]
pub struct GDecomposition {
    pub f: Int,
    pub g: Int,
    pub s_mat: Sl2Mat,
    pub t_mat: Sl2Mat,
}

/// Orientation whose fourth member is the requested Markoff number, fed by
/// the child of a triple containing it.
fn orientation_with_b(b: u64) -> Option<Orientation> {
    let t = enumerate(b.max(2))
        .into_iter()
        .find(|t| t.dominant() == b || b == 1)?;
    let [x0, x1, dom] = if b == 1 { [1, 1, 1] } else { t.members() };
    let _ = x0;
    // replace the smallest member of (x0, x1, dom) to climb one step
    let (y, z) = if b == 1 {
        (1, 2)
    } else {
        (x1, 3 * x1 * dom - x0)
    };
    let bb = 3 * y * z - if b == 1 { 5 } else { b };
    let _ = bb;
    let o = Orientation::new(3 * y as i64, 3 * b as i64, 3 * z as i64)
        .or_else(|| Orientation::new(3 * z as i64, 3 * b as i64, 3 * y as i64))?;
    Some(o)
}

/// Split a Markoff number into the two squares attached to its residue and
/// factor the fundamental automorph into two symmetric unimodular matrices.
pub fn decompose_g(b: u64) -> Result<GDecomposition, QformError> {
    let o = orientation_with_b(b).ok_or(QformError::NotMarkoff)?;
    let profiles = native_profiles(&o).map_err(|_| QformError::NotMarkoff)?;
    let pl = pipeline(&profiles[0])?;
    if !pl.report.pass {
        return Err(QformError::BadParams);
    }
    // the split of b is canonical up to signs and order
    let (mut f, mut g) = (pl.f.abs(), pl.g.abs());
    if f < g {
        core::mem::swap(&mut f, &mut g);
    }
    let gg = fundamental_automorph(AutomorphKind::G, &[f.clone(), g.clone()])?;
    // S T = G with S, T symmetric unimodular: solve G S = S G^t over
    // symmetric S, then T = S^{-1} G
    let (s_mat, t_mat) = symmetric_split(&gg).ok_or(QformError::BadParams)?;
    Ok(GDecomposition { f, g, s_mat, t_mat })
}

/// Factor a unimodular matrix into two symmetric unimodular matrices.
pub fn symmetric_split(m: &Sl2Mat) -> Option<(Sl2Mat, Sl2Mat)> {
    // S = [[x, y], [y, z]] with M S = S M^t is a 2-dim lattice; scan small
    // combinations for det(S) = +-1 and symmetric S^{-1} M
    let g = &m.0;
    for x in -40i64..=40 {
        for y in -40i64..=40 {
            for z in -40i64..=40 {
                let s = [[int(x), int(y)], [int(y), int(z)]];
                let ms = mat2_mul(g, &s);
                let smt = mat2_mul(&s, &mat2_transpose(g));
                if ms != smt {
                    continue;
                }
                let det = int(x) * int(z) - int(y) * int(y);
                if det.abs() != Int::one() {
                    continue;
                }
                let s_inv = if det.is_one() {
                    [[int(z), int(-y)], [int(-y), int(x)]]
                } else {
                    [[int(-z), int(y)], [int(y), int(-x)]]
                };
                let t = mat2_mul(&s_inv, g);
                if t[0][1] != t[1][0] || !mat2_det(&t).abs().is_one() {
                    continue;
                }
                // commutator trace must be -2
                let s_m = Sl2Mat::new(s.clone());
                let t_m = Sl2Mat::new(t.clone());
                if let (Some(sm), Some(tm)) = (s_m, t_m) {
                    let comm = sm.mul(&tm).mul(&sm.inverse()).mul(&tm.inverse());
                    if comm.trace() == int(-2) {
                        return Some((sm, tm));
                    }
                } else {
                    // allow det -1 pairs whose product still lands in SL2
                    let prod = mat2_mul(&s, &t);
                    if prod == *g {
                        let sd = int(x) * int(z) - int(y) * int(y);
                        let td = mat2_det(&t);
                        if (&sd * &td).is_one() {
                            // commutator S T S^{-1} T^{-1}
                            let si = s_inv;
                            let ti = {
                                let d = td;
                                if d.is_one() {
                                    [[t[1][1].clone(), -&t[0][1]], [-&t[1][0], t[0][0].clone()]]
                                } else {
                                    [[-&t[1][1], t[0][1].clone()], [t[1][0].clone(), -&t[0][0]]]
                                }
                            };
                            let comm = mat2_mul(&mat2_mul(&s, &t), &mat2_mul(&si, &ti));
                            if &comm[0][0] + &comm[1][1] == int(-2) {
                                return Some((Sl2Mat(s), Sl2Mat(t)));
                            }
                        }
                    }
                }
            }
        }
    }
    None
}

/// Canonical solution of `p^2 + q^2 = b^2`, `u^2 + v^2 = 9a^2 - 4`,
/// `p u + q v = -2a` for co-membered Markoff numbers, minimal over the
/// orthogonal orbit with p > 0.
pub fn solve_two_square_system(b: u64, a: u64) -> Result<(Int, Int, Int, Int), QformError> {
    // common triple test: some c completes (a, b)
    let prod = 9 * (a as i128) * (a as i128) * (b as i128) * (b as i128)
        - 4 * (a as i128 * a as i128 + b as i128 * b as i128);
    if prod < 0 {
        return Err(QformError::NoCommonTriple);
    }
    let s = (prod as u128).isqrt() as i128;
    let common = s * s == prod && (3 * (a as i128) * (b as i128) + s) % 2 == 0;
    if !common {
        return Err(QformError::NoCommonTriple);
    }
    let b2 = (b as u128) * (b as u128);
    let d = 9 * (a as u128) * (a as u128) - 4;
    let reps = |n: u128| -> Vec<(i128, i128)> {
        let mut out = Vec::new();
        let mut x = 0u128;
        while x * x <= n {
            let rest = n - x * x;
            let y = rest.isqrt();
            if y * y == rest {
                for (sx, sy) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                    out.push((sx * x as i128, sy * y as i128));
                    out.push((sx * y as i128, sy * x as i128));
                }
            }
            x += 1;
        }
        out.sort_unstable();
        out.dedup();
        out
    };
    let mut best: Option<(i128, i128, i128, i128)> = None;
    for (p, q) in reps(b2) {
        if p <= 0 {
            continue;
        }
        for (u, v) in reps(d) {
            if p * u + q * v == -2 * a as i128 {
                let cand = (p, q, u, v);
                if best.is_none() || cand < best.unwrap() {
                    best = Some(cand);
                }
            }
        }
    }
    let (p, q, u, v) = best.ok_or(QformError::NoCommonTriple)?;
    Ok((int(p as i64), int(q as i64), int(u as i64), int(v as i64)))
}

/// Gram determinant of the two-square system: `((9a^2-4)(9b^2-4) - 16)/9`
/// is the perfect square `(3ab - 2c)^2` for either completion c of (a, b).
pub fn gram_determinant_check(a: u64, b: u64) -> IdentityReport {
    let (ai, bi) = (int(a as i64), int(b as i64));
    let val = ((int(9) * &ai * &ai - int(4)) * (int(9) * &bi * &bi - int(4)) - int(16)) / int(9);
    let r = val.sqrt();
    let is_sq = &r * &r == val;
    // match against the completions of (a, b)
    let mut matched = false;
    if is_sq {
        let disc = int(9) * &ai * &ai * &bi * &bi - int(4) * (&ai * &ai + &bi * &bi);
        let sd = disc.sqrt();
        if &sd * &sd == disc {
            for c2 in [int(3) * &ai * &bi - &sd, int(3) * &ai * &bi + &sd] {
                if c2.is_even() {
                    let c = c2 / int(2);
                    let expr = (int(3) * &ai * &bi - int(2) * &c).abs();
                    if expr == r {
                        matched = true;
                    }
                }
            }
        }
    }
    IdentityReport::flag(
        "7.32",
        format!("(a,b)=({a},{b})"),
        is_sq && matched,
        format!("value={val} sqrt={r}"),
    )
}

/// The transposed-profile re-expression of the inverse bracket:
/// `bracket(mu) = D1 X^t C D1` where X carries the x-shifted first column
/// and the middle column is shifted exactly when mu = +1.
pub fn transposed_bracket_check(p: &ResidueProfile) -> IdentityReport {
    let Ok((closed, mu, kb, lb)) = crate::profile::inverse_formula(p) else {
        return IdentityReport::flag("7.r4", String::from("degenerate"), false, String::new());
    };
    let bracket = closed.scale(&Rat::from_integer(int(2)));
    let [cf, _, af] = &p.cols;
    let [kc, _, ka] = &p.k;
    let [lc, _, la] = &p.l;
    let bf = p.b_frak();
    let d1 = Mat3::diag(
        Rat::from_integer(int(1)),
        Rat::from_integer(int(-1)),
        Rat::from_integer(int(1)),
    );
    let cmat = Mat3::from_i64([[0, -3, 1], [-3, 2, 0], [1, 0, 0]]);
    let r = |v: Int| Rat::from_integer(v);
    let x_of = |shift: bool| -> Mat3 {
        let (kbm, lbm) = if shift {
            (&kb + int(3) * &bf, &lb + int(6) * &kb + int(9) * &bf)
        } else {
            (kb.clone(), lb.clone())
        };
        Mat3::from_rows([
            [r(cf.clone()), r(bf.clone()), r(af.clone())],
            [r(kc + int(3) * cf), r(kbm), r(ka.clone())],
            [r(lc + int(6) * kc + int(9) * cf), r(lbm), r(la.clone())],
        ])
    };
    let variant = |shift: bool| -> Mat3 { d1.mul(&x_of(shift).transpose()).mul(&cmat).mul(&d1) };
    let m0 = variant(false) == bracket;
    let m1 = variant(true) == bracket;
    // unshifted middle pairs with mu = -1, shifted with mu = +1
    let pass = (m0 ^ m1) && (m1 == (mu == 1));
    IdentityReport::flag(
        "7.r4",
        format!("profile {:?}", (&p.cols[0], &p.cols[1], &p.cols[2])),
        pass,
        format!("mu={mu} unshifted={m0} shifted={m1}"),
    )
}

/// Triple membership helper for the two-square system.
pub fn common_triple(a: u64, b: u64) -> Option<MarkoffTriple> {
    enumerate(3 * a * b)
        .into_iter()
        .find(|t| t.members().contains(&a) && t.members().contains(&b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn psi_examples() {
        assert_eq!(psi(&crate::arith::mat2(1, 0, 0, 1)), Mat3::identity());
        assert_eq!(
            psi(&crate::arith::mat2(1, 1, 0, 1)),
            Mat3::from_i64([[1, 2, 1], [0, 1, 1], [0, 0, 1]])
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn psi_is_homomorphism_and_preserves_form(
            p in -9i64..9, q in -9i64..9, r in -9i64..9,
            x in -50i64..50, y in -50i64..50, z in -50i64..50
        ) {
            // shear products cover SL2 without rejection
            let m = mat2_mul(
                &mat2_mul(&crate::arith::mat2(1, p, 0, 1), &crate::arith::mat2(1, 0, q, 1)),
                &crate::arith::mat2(1, r, 0, 1),
            );
            prop_assert!(mat2_det(&m).is_one());
            let p = psi(&m);
            // preserves Q(x, y, z) = xz - y^2
            let v = [crate::rat(x), crate::rat(y), crate::rat(z)];
            let w = p.apply(&v);
            prop_assert_eq!(&w[0] * &w[2] - &w[1] * &w[1], &v[0] * &v[2] - &v[1] * &v[1]);
            // second matrix and homomorphism
            let m2 = crate::arith::mat2(1, 3, 1, 4);
            let prod = psi(&mat2_mul(&m, &m2));
            prop_assert_eq!(prod, psi(&m).mul(&psi(&m2)));
        }

        #[test]
        fn psi_det_is_cube(a in -9i64..9, b in -9i64..9, c in -9i64..9, d in -9i64..9) {
            let m = crate::arith::mat2(a, b, c, d);
            let det = mat2_det(&m);
            let cube = Rat::from_integer(&det * &det * &det);
            prop_assert_eq!(psi(&m).det(), cube);
        }
    }

    #[test]
    fn reduce_height_examples() {
        let (a, steps) = reduce_height(&int(1), &int(0), &int(1)).unwrap();
        assert_eq!(a, Sl2Mat::identity());
        assert_eq!(steps.len(), 1);
        // (m, k, l) = (5, 2, 1)
        let (a, steps) = reduce_height(&int(5), &int(2), &int(1)).unwrap();
        let v = psi(&a.0).apply(&[crate::rat(5), crate::rat(2), crate::rat(1)]);
        assert_eq!(v, [crate::rat(1), crate::rat(0), crate::rat(1)]);
        for s in steps {
            assert!(s[0].is_positive() && s[2].is_positive());
        }
        // (2, 1, 1): single shear
        let (a, steps) = reduce_height(&int(2), &int(1), &int(1)).unwrap();
        assert_eq!(steps.len(), 2);
        let v = psi(&a.0).apply(&[crate::rat(2), crate::rat(1), crate::rat(1)]);
        assert_eq!(v, [crate::rat(1), crate::rat(0), crate::rat(1)]);
        assert_eq!(
            reduce_height(&int(2), &int(1), &int(3)),
            Err(QformError::BadInput)
        );
    }

    #[test]
    fn markoff_form_examples() {
        assert_eq!(markoff_form(5).unwrap(), Bqf::new(5, -11, -5));
        assert_eq!(markoff_form(5).unwrap().disc(), int(221));
        assert_eq!(markoff_form(13).unwrap(), Bqf::new(13, -29, -13));
        assert_eq!(markoff_form(13).unwrap().disc(), int(1517));
        let f1 = markoff_form(1).unwrap();
        assert_eq!(f1.disc(), int(5));
        assert!(f1.is_symmetric());
        assert!(markoff_form(4).is_err());
    }

    #[test]
    fn cycle_examples() {
        // discriminant 5: short symmetric cycle
        let c = reduction_cycle(&markoff_form(1).unwrap()).unwrap();
        assert!(!c.forms.is_empty());
        assert!(c.forms.iter().all(|f| f.is_reduced()));
        assert!(c.forms.iter().any(|f| f.is_symmetric()));
        // cycle closes: rho of last = first
        let d = c.forms[0].disc();
        let s = d.sqrt();
        assert_eq!(rho(c.forms.last().unwrap(), &s), c.forms[0]);
        // rotation invariance: cycles from every member agree
        let c5 = reduction_cycle(&markoff_form(5).unwrap()).unwrap();
        for f in &c5.forms {
            assert_eq!(reduction_cycle(f).unwrap(), c5);
        }
        // symmetric forms for m = 5: candidates (7,5) and (5,11)
        let cands = symmetric_candidates(5);
        assert_eq!(cands, vec![(int(5), int(11)), (int(7), int(5))]);
        let syms = symmetric_forms_in_cycle(5).unwrap();
        assert!(syms.len() >= 2);
        let us: Vec<Int> = syms.iter().map(|f| f.a.clone()).collect();
        assert!(us.iter().any(|u1| us.iter().any(|u2| *u2 != -u1)));
        assert_eq!(
            reduction_cycle(&Bqf::new(1, 0, -1)),
            Err(QformError::BadDiscriminant)
        );
        assert_eq!(
            reduction_cycle(&Bqf::new(1, 0, 1)),
            Err(QformError::BadDiscriminant)
        );
    }

    #[test]
    fn small_markoff_cycles_have_one_symmetric_class() {
        for m in [1u64, 2] {
            let syms = symmetric_forms_in_cycle(m).unwrap();
            assert!(!syms.is_empty());
            let mut mags: Vec<Int> = syms.iter().map(|f| f.a.abs()).collect();
            mags.sort();
            mags.dedup();
            assert_eq!(mags.len(), 1, "m = {m}");
            assert!(syms.iter().all(|f| f.is_ambiguous()), "m = {m}");
        }
    }

    #[test]
    fn automorph_examples() {
        // G with (f, g) = (2, 1): trace 15
        let g = fundamental_automorph(AutomorphKind::G, &[int(2), int(1)]).unwrap();
        assert_eq!(g.trace(), int(15));
        assert!(mat2_det(&g.0).is_one());
        let gf = g_form(&int(2), &int(1));
        assert_eq!(gf.transform(&g.0), gf);
        // F for (5, 2, 1) fixes the Markoff form
        let f = fundamental_automorph(AutomorphKind::F, &[int(5), int(2), int(1)]).unwrap();
        assert!(mat2_det(&f.0).is_one());
        assert_eq!(f.trace(), int(15));
        let mf = markoff_form(5).unwrap();
        assert_eq!(mf.transform(&f.0), mf);
        // H for (7, 5), m = 5 fixes the symmetric form
        let h = fundamental_automorph(AutomorphKind::H, &[int(7), int(5), int(5)]).unwrap();
        assert!(mat2_det(&h.0).is_one());
        assert_eq!(h.trace(), int(15));
        let hf = Bqf::new(7, 5, -7);
        assert_eq!(hf.transform(&h.0), hf);
        assert!(fundamental_automorph(AutomorphKind::H, &[int(1), int(1), int(5)]).is_err());
    }

    #[test]
    fn pipeline_on_profiles() {
        for t in enumerate(200) {
            for o in t.orientations() {
                for p in native_profiles(&o).unwrap() {
                    let pl = pipeline(&p).unwrap();
                    assert!(pl.report.pass, "{o:?}: {}", pl.report.detail);
                }
            }
        }
    }

    #[test]
    fn decompose_g_examples() {
        let d = decompose_g(5).unwrap();
        assert_eq!((d.f.clone(), d.g.clone()), (int(2), int(1)));
        let d = decompose_g(1).unwrap();
        assert_eq!((d.f.clone(), d.g.clone()), (int(1), int(0)));
        let d = decompose_g(13).unwrap();
        assert_eq!((d.f.clone(), d.g.clone()), (int(3), int(2)));
        // S T = G, both symmetric, commutator trace -2
        for b in [1u64, 2, 5, 13, 29] {
            let d = decompose_g(b).unwrap();
            let g = fundamental_automorph(AutomorphKind::G, &[d.f.clone(), d.g.clone()]).unwrap();
            assert_eq!(d.s_mat.mul(&d.t_mat).0, g.0, "b = {b}");
            assert_eq!(d.s_mat.0[0][1], d.s_mat.0[1][0]);
            assert_eq!(d.t_mat.0[0][1], d.t_mat.0[1][0]);
            // b = f^2 + g^2 and trace = 3b
            assert_eq!(&d.f * &d.f + &d.g * &d.g, int(b as i64));
            assert_eq!(g.trace(), int(3 * b as i64));
        }
    }

    #[test]
    fn common_triple_lookup() {
        assert_eq!(
            common_triple(2, 5),
            Some(MarkoffTriple::new(1, 2, 5).unwrap())
        );
        assert_eq!(common_triple(5, 34), None);
    }

    #[test]
    fn two_square_system_examples() {
        let (p, q, u, v) = solve_two_square_system(5, 2).unwrap();
        // up to the orthogonal orbit this is (3, 4, 4, -4)
        let orbit_match = {
            let target = [
                (int(3), int(4), int(4), int(-4)),
                (int(3), int(-4), int(4), int(4)),
                (int(4), int(3), int(-4), int(4)),
                (int(4), int(-3), int(-4), int(-4)),
            ];
            target.contains(&(p.clone(), q.clone(), u.clone(), v.clone()))
        };
        assert!(orbit_match, "got ({p},{q},{u},{v})");
        assert_eq!(&p * &p + &q * &q, int(25));
        assert_eq!(&u * &u + &v * &v, int(32));
        assert_eq!(&p * &u + &q * &v, int(-4));
        let (p, q, u, v) = solve_two_square_system(1, 1).unwrap();
        assert_eq!(&p * &p + &q * &q, int(1));
        assert_eq!(&u * &u + &v * &v, int(5));
        assert_eq!(&p * &u + &q * &v, int(-2));
        assert!(solve_two_square_system(5, 13).is_ok()); // (5,13) share (1,5,13)... wait
        assert!(solve_two_square_system(5, 34).is_err());
    }

    #[test]
    fn gram_identity_examples() {
        let r = gram_determinant_check(2, 5);
        assert!(r.pass, "{}", r.detail);
        // value is (32*221-16)/9 = 784 = 28^2
        assert!(r.detail.contains("value=784"));
        for (a, b) in [(1u64, 1u64), (1, 2), (2, 5), (5, 13), (1, 5)] {
            assert!(gram_determinant_check(a, b).pass);
        }
    }

    #[test]
    fn transposed_bracket_splits_by_mu() {
        let mut seen_mu_plus = false;
        let mut seen_mu_minus = false;
        for t in enumerate(200) {
            for o in t.orientations() {
                for p in native_profiles(&o).unwrap() {
                    if p.cols[0] == p.cols[2] {
                        continue;
                    }
                    let r = transposed_bracket_check(&p);
                    assert!(r.pass, "{o:?}: {}", r.detail);
                    if r.detail.contains("mu=1") {
                        seen_mu_plus = true;
                    } else {
                        seen_mu_minus = true;
                    }
                }
            }
        }
        assert!(seen_mu_plus && seen_mu_minus);
    }

    #[test]
    fn markoff_cycles_contain_required_symmetric_forms() {
        for t in enumerate(1000) {
            let m = t.dominant();
            let syms = symmetric_forms_in_cycle(m).unwrap();
            assert!(!syms.is_empty(), "m = {m}");
            if m >= 5 {
                let found = syms.iter().any(|f1| syms.iter().any(|f2| f2.a != -&f1.a));
                assert!(found, "m = {m}");
                // candidate coefficients satisfy the two-square relation
                for f in &syms {
                    let u = f.a.abs();
                    let v = f.b.abs();
                    assert_eq!(int(4) * &u * &u + &v * &v, int(9 * (m * m) as i64) - int(4));
                }
            }
        }
    }
}
