//! Exact 3x3 rational matrices and constructors for the named matrix
//! families attached to a Markoff triple orientation.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::tree::Orientation;
use crate::{int, rat, Int, Rat};

/// 3x3 matrix with exact rational entries.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat3(pub [[Rat; 3]; 3]);

impl fmt::Debug for Mat3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for r in &self.0 {
            writeln!(f, "  [{}, {}, {}]", r[0], r[1], r[2])?;
        }
        write!(f, "]")
    }
}

impl Mat3 {
    pub fn from_rows(rows: [[Rat; 3]; 3]) -> Self {
        Mat3(rows)
    }

    pub fn from_i64(rows: [[i64; 3]; 3]) -> Self {
        Mat3(rows.map(|r| r.map(rat)))
    }

    pub fn zero() -> Self {
        Self::from_i64([[0; 3]; 3])
    }

    pub fn identity() -> Self {
        Self::from_i64([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    }

    pub fn diag(a: Rat, b: Rat, c: Rat) -> Self {
        let mut m = Self::zero();
        m.0[0][0] = a;
        m.0[1][1] = b;
        m.0[2][2] = c;
        m
    }

    /// Column vector times row vector.
    pub fn outer(col: &[Rat; 3], row: &[Rat; 3]) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = &col[i] * &row[j];
            }
        }
        m
    }

    pub fn mul(&self, other: &Mat3) -> Mat3 {
        let mut out = Mat3::zero();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = Rat::zero();
                for k in 0..3 {
                    s += &self.0[i][k] * &other.0[k][j];
                }
                out.0[i][j] = s;
            }
        }
        out
    }

    pub fn add(&self, other: &Mat3) -> Mat3 {
        let mut out = self.clone();
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] += &other.0[i][j];
            }
        }
        out
    }

    pub fn sub(&self, other: &Mat3) -> Mat3 {
        let mut out = self.clone();
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] -= &other.0[i][j];
            }
        }
        out
    }

    pub fn neg(&self) -> Mat3 {
        self.scale(&rat(-1))
    }

    pub fn scale(&self, s: &Rat) -> Mat3 {
        let mut out = self.clone();
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] *= s;
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat3 {
        let mut out = self.clone();
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = self.0[j][i].clone();
            }
        }
        out
    }

    pub fn apply(&self, v: &[Rat; 3]) -> [Rat; 3] {
        let mut out = [Rat::zero(), Rat::zero(), Rat::zero()];
        for i in 0..3 {
            for k in 0..3 {
                out[i] += &self.0[i][k] * &v[k];
            }
        }
        out
    }

    pub fn det(&self) -> Rat {
        let m = &self.0;
        &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
            - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
    }

    /// Transpose of the cofactor matrix; `m * adj(m) = det(m) * E`.
    pub fn adjugate(&self) -> Mat3 {
        let m = &self.0;
        let cof = |i: usize, j: usize| -> Rat {
            let r: Vec<usize> = (0..3).filter(|&x| x != i).collect();
            let c: Vec<usize> = (0..3).filter(|&x| x != j).collect();
            let minor = &m[r[0]][c[0]] * &m[r[1]][c[1]] - &m[r[0]][c[1]] * &m[r[1]][c[0]];
            if (i + j) % 2 == 0 {
                minor
            } else {
                -minor
            }
        };
        let mut out = Mat3::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = cof(j, i);
            }
        }
        out
    }

    pub fn inverse(&self) -> Option<Mat3> {
        let d = self.det();
        if d.is_zero() {
            return None;
        }
        Some(self.adjugate().scale(&d.recip()))
    }

    pub fn pow(&self, n: u32) -> Mat3 {
        let mut out = Mat3::identity();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(|e| e.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().flatten().all(|e| e.is_integer())
    }

    /// True when every entry times `den` is an integer.
    pub fn denominators_divide(&self, den: i64) -> bool {
        let d = rat(den);
        self.0.iter().flatten().all(|e| (e * &d).is_integer())
    }

    /// Coefficients `[c0, c1, c2, c3]` of `det(self - x E)` as a cubic in x.
    pub fn charpoly(&self) -> [Rat; 4] {
        let m = &self.0;
        let tr = &m[0][0] + &m[1][1] + &m[2][2];
        let e2 = (&m[0][0] * &m[1][1] - &m[0][1] * &m[1][0])
            + (&m[0][0] * &m[2][2] - &m[0][2] * &m[2][0])
            + (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]);
        [self.det(), -e2, tr, rat(-1)]
    }

    /// Entries as exact integers; fails if any entry is non-integral.
    pub fn to_int(&self) -> Option<[[Int; 3]; 3]> {
        if !self.is_integral() {
            return None;
        }
        let get = |i: usize, j: usize| self.0[i][j].numer().clone();
        Some([
            [get(0, 0), get(0, 1), get(0, 2)],
            [get(1, 0), get(1, 1), get(1, 2)],
            [get(2, 0), get(2, 1), get(2, 2)],
        ])
    }

    /// True when every entry is divisible by `d` (entries must be integers).
    pub fn divisible_by(&self, d: &Int) -> bool {
        match self.to_int() {
            Some(m) => m.iter().flatten().all(|e| e.is_multiple_of(d)),
            None => false,
        }
    }
}

/// Invariant factors `(d1, d2/d1, d3/d2)` of an integer matrix, computed
/// from the determinantal divisors: gcd of the entries, gcd of the adjugate
/// entries, and the determinant. A vanishing determinant (rank 2) yields a
/// trailing zero.
pub fn smith_invariants(m: &Mat3) -> Option<(Int, Int, Int)> {
    let entries = m.to_int()?;
    let d1 = entries.iter().flatten().fold(Int::zero(), |g, e| g.gcd(e));
    if d1.is_zero() {
        return Some((Int::zero(), Int::zero(), Int::zero()));
    }
    let adj = m
        .adjugate()
        .to_int()
        .expect("adjugate of integer matrix is integral");
    let d2 = adj.iter().flatten().fold(Int::zero(), |g, e| g.gcd(e));
    if d2.is_zero() {
        return Some((d1, Int::zero(), Int::zero()));
    }
    let d3 = m.det().numer().abs();
    let s2 = &d2 / &d1;
    if d3.is_zero() {
        Some((d1, s2, Int::zero()))
    } else {
        Some((d1, s2, d3 / d2))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mat3Error {
    /// Parameters fail the arithmetic precondition of the requested family.
    BadParams,
    /// `exp_r` was asked for a non-nilpotent input.
    NotNilpotent,
    UnknownIdentity,
}

// ---------------------------------------------------------------------------
// matrix families attached to a triple orientation
// ---------------------------------------------------------------------------

/// Upper unitriangular `M(a, b, c)` for arbitrary entries.
pub fn m_of(a: &Rat, b: &Rat, c: &Rat) -> Mat3 {
    let mut m = Mat3::identity();
    m.0[0][1] = a.clone();
    m.0[0][2] = b.clone();
    m.0[1][2] = c.clone();
    m
}

/// The MT-matrix of an orientation.
pub fn m_mat(o: &Orientation) -> Mat3 {
    m_of(&rat(o.a), &rat(o.b), &rat(o.c))
}

/// `H = M^{-1} M^t`, the unipotent automorph.
pub fn h_mat(o: &Orientation) -> Mat3 {
    let m = m_mat(o);
    m.inverse().expect("unitriangular").mul(&m.transpose())
}

/// Explicit display of `H`, used to cross-check `h_mat`.
pub fn h_mat_printed(o: &Orientation) -> Mat3 {
    let (a, b, c) = (o.a as i128, o.b as i128, o.c as i128);
    let e = |v: i128| Rat::from_integer(Int::from(v));
    Mat3::from_rows([
        [
            e(1 - (a * a + b * b - a * b * c)),
            e(a * c * c - b * c - a),
            e(a * c - b),
        ],
        [e(a - b * c), e(1 - c * c), e(-c)],
        [e(b), e(c), e(1)],
    ])
}

/// The integral rank-2 solution `R` of `R^t M + M R = 0`.
pub fn r_mat(o: &Orientation) -> Mat3 {
    let (a, b, c) = (o.a as i128, o.b as i128, o.c as i128);
    let e = |v: i128| Rat::from_integer(Int::from(v));
    Mat3::from_rows([
        [
            e(a * a + b * b - a * b * c),
            e(2 * a + b * c - a * c * c),
            e(2 * b - a * c),
        ],
        [e(b * c - 2 * a), e(c * c - a * a), e(2 * c - a * b)],
        [
            e(a * c - 2 * b),
            e(-2 * c - a * b + a * a * c),
            e(a * b * c - b * b - c * c),
        ],
    ])
}

/// `S = H - E`.
pub fn s_mat(o: &Orientation) -> Mat3 {
    h_mat(o).sub(&Mat3::identity())
}

/// `W(a, b, c)`, the canonical solution of the q = m matrix system.
pub fn w_mat(o: &Orientation) -> Mat3 {
    let (a, b, c) = (o.a as i128, o.b as i128, o.c as i128);
    let m = o.m() as i128;
    let e = |v: i128| Rat::from_integer(Int::from(v));
    Mat3::from_rows([
        [e(c), e(0), e(2 * a - m * c)],
        [e(-b), e(1), e(c * c - a * a)],
        [e(a), e(0), e(m * a - 2 * c)],
    ])
}

/// `Z(a, b, c)`, the companion of `W` on the transposed side.
pub fn z_mat(o: &Orientation) -> Mat3 {
    let (a, c) = (rat(o.a), rat(o.c));
    let m = rat(o.m());
    Mat3::from_rows([
        [c.clone(), m, a.clone()],
        [-a.clone(), rat(0), c.clone()],
        [a, rat(2), c],
    ])
}

/// Printed display of `Z^adj`.
pub fn z_adj_printed(o: &Orientation) -> Mat3 {
    let (a, b, c) = (o.a as i128, o.b as i128, o.c as i128);
    let m = o.m() as i128;
    let e = |v: i128| Rat::from_integer(Int::from(v));
    Mat3::from_rows([
        [e(-2 * c), e(2 * a - m * c), e(m * c)],
        [e(2 * a * c), e(c * c - a * a), e(-m * b)],
        [e(-2 * a), e(m * a - 2 * c), e(m * a)],
    ])
}

/// Triangular factor `A` of the q = m solution system, `Z X = A B`.
///
/// Requires `alpha^2 + 1 = (m/3) l`.
pub fn cal_a(m: i64, alpha: &Int, l: &Int) -> Result<Mat3, Mat3Error> {
    if m % 3 != 0 || alpha * alpha + 1 != Int::from(m / 3) * l {
        return Err(Mat3Error::BadParams);
    }
    let al = Rat::from_integer(alpha.clone());
    Ok(Mat3::from_rows([
        [rat(1), rat(0), rat(0)],
        [-al.clone(), rat(m), rat(0)],
        [Rat::new(l.clone(), int(3)), -(&al + &al), rat(m)],
    ]))
}

/// Triangular factor `B`; requires `eps^2 + 1 = (q/3) j`.
pub fn cal_b(q: i64, eps: &Int, j: &Int) -> Result<Mat3, Mat3Error> {
    if q % 3 != 0 || eps * eps + 1 != Int::from(q / 3) * j {
        return Err(Mat3Error::BadParams);
    }
    let ep = Rat::from_integer(eps.clone());
    Ok(Mat3::from_rows([
        [rat(0), rat(q), rat(0)],
        [rat(0), ep.clone(), rat(2 * q)],
        [rat(2), Rat::new(j.clone(), int(3)), &ep * rat(4)],
    ]))
}

/// Jordan-chain conjugator `T` for `S`, with `S T = T J`.
pub fn t_mat(o: &Orientation) -> Mat3 {
    let (a, b, c) = (o.a as i128, o.b as i128, o.c as i128);
    let (ac, m) = (a * c, (a * c - b));
    let e = |v: i128| Rat::from_integer(Int::from(v));
    Mat3::from_rows([
        [e(c), e(ac * (a * c * c - b * c - a)), e(ac * m * c)],
        [e(m), e(ac * (-c * c)), e(ac * m * (-b))],
        [e(a), e(ac * c), e(ac * m * a)],
    ])
}

/// `U = M T`.
pub fn u_mat(o: &Orientation) -> Mat3 {
    m_mat(o).mul(&t_mat(o))
}

/// Factor `A` in `T = A B C D`.
pub fn a_fac(o: &Orientation) -> Mat3 {
    let (a, b, c) = (o.a as i128, o.b as i128, o.c as i128);
    let m = a * c - b;
    let e = |v: i128| Rat::from_integer(Int::from(v));
    Mat3::from_rows([
        [e(0), e(c * m - a), e(c)],
        [e(1), e(-c * c), e(-b)],
        [e(0), e(c), e(a)],
    ])
}

pub fn b_fac(o: &Orientation) -> Mat3 {
    Mat3::diag(rat(o.a) * rat(o.c), rat(1), rat(1))
}

pub fn c_fac(_o: &Orientation) -> Mat3 {
    Mat3::from_i64([[1, 0, 0], [0, 1, 0], [1, 0, 1]])
}

pub fn d_fac(o: &Orientation) -> Mat3 {
    let ac = rat(o.a) * rat(o.c);
    Mat3::diag(rat(1), ac.clone(), ac * rat(o.m()))
}

/// Factor `F` in `A^{-1} = F K L / (ac-b)^2`.
pub fn f_fac(o: &Orientation) -> Mat3 {
    Mat3::diag(rat(o.m()), rat(1), rat(1))
}

pub fn k_fac(o: &Orientation) -> Mat3 {
    let (a, c) = (o.a as i128, o.c as i128);
    let m = o.m() as i128;
    let e = |v: i128| Rat::from_integer(Int::from(v));
    Mat3::from_rows([
        [e(c), e(1), e(a)],
        [e(a), e(0), e(-c)],
        [e(-c), e(0), e(c * m - a)],
    ])
}

pub fn l_fac(o: &Orientation) -> Mat3 {
    Mat3::diag(rat(1), rat(o.m()), rat(1))
}

/// Factor `V` in `U = V B C D`.
pub fn v_mat(o: &Orientation) -> Mat3 {
    Mat3::from_i64([[o.a, -o.a, o.c], [1, 0, o.m()], [0, o.c, o.a]])
}

/// Printed display of `V^{-1}` (times `(ac-b)^2`).
pub fn v_inv_printed(o: &Orientation) -> Mat3 {
    let (a, b, c) = (o.a as i128, o.b as i128, o.c as i128);
    let m = a * c - b;
    let e = |v: i128| Rat::from_integer(Int::from(v));
    Mat3::from_rows([
        [e(c * m), e(-b * m), e(a * m)],
        [e(a), e(-a * a), e(a * m - c)],
        [e(-c), e(a * c), e(-a)],
    ])
    .scale(&Rat::new(int(1), Int::from(m * m)))
}

/// `U = W * [[1,0,0],[-m,1,0],[0,0,1]]`; its columns are orthogonal for the
/// symmetrized MT-form.
pub fn u_script(o: &Orientation) -> Mat3 {
    let shear = Mat3::from_i64([[1, 0, 0], [-o.m(), 1, 0], [0, 0, 1]]);
    w_mat(o).mul(&shear)
}

/// Symmetrization `Q = (M + M^t) / 2`.
pub fn q_script(o: &Orientation) -> Mat3 {
    let m = m_mat(o);
    m.add(&m.transpose()).scale(&Rat::new(int(1), int(2)))
}

/// Reversal involution.
pub fn j_cal() -> Mat3 {
    Mat3::from_i64([[0, 0, 1], [0, 1, 0], [1, 0, 0]])
}

/// The elementary nilpotent Jordan block.
pub fn j_frak() -> Mat3 {
    Mat3::from_i64([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
}

/// Move matrix `P(x)`.
pub fn p_move(x: i64) -> Mat3 {
    Mat3::from_i64([[0, -1, 0], [1, x, 0], [0, 0, 1]])
}

/// Move matrix `Q(y)`.
pub fn q_move(y: i64) -> Mat3 {
    Mat3::from_i64([[1, 0, 0], [0, y, 1], [0, -1, 0]])
}

/// Right hand side of the Diophantine matrix system for a parameter q.
pub fn rhs_system(q: i64) -> Mat3 {
    let q = q as i128;
    let e = |v: i128| Rat::from_integer(Int::from(v));
    Mat3::from_rows([
        [e(0), e(q), e(0)],
        [e(q), e(1), e(q * q)],
        [e(0), e(-q * q), e(-4 * q * q)],
    ])
}

/// Right hand side of the adjugate-side identity, `2m^2 [[-2,m,m],[-m,-2,0],[m,0,0]]`.
pub fn rhs_z_adj(m: i64) -> Mat3 {
    let m = m as i128;
    let e = |v: i128| Rat::from_integer(Int::from(v));
    Mat3::from_rows([
        [e(-2), e(m), e(m)],
        [e(-m), e(-2), e(0)],
        [e(m), e(0), e(0)],
    ])
    .scale(&Rat::from_integer(Int::from(2 * m * m)))
}

/// The skew constant `1/2 [[0,1,1],[-1,-2,0],[1,0,0]]`.
pub fn half_skew() -> Mat3 {
    Mat3::from_i64([[0, 1, 1], [-1, -2, 0], [1, 0, 0]]).scale(&Rat::new(int(1), int(2)))
}

/// `Z W` collapses to a constant pattern in m.
pub fn zw_rhs(m: i64) -> Mat3 {
    let m = m as i128;
    let e = |v: i128| Rat::from_integer(Int::from(v));
    Mat3::from_rows([
        [e(0), e(m), e(0)],
        [e(0), e(0), e(2 * m * m)],
        [e(2 * m), e(2), e(0)],
    ])
}

/// Nilpotent normal form `[[0,0,4m],[0,0,0],[0,1,0]]` conjugate to `R` via `W`.
pub fn nilp_w(m: i64) -> Mat3 {
    Mat3::from_i64([[0, 0, 4 * m], [0, 0, 0], [0, 1, 0]])
}

/// Normal form `[[0,2,1],[0,0,2],[0,0,0]]` of `R/3` over the integers.
pub fn nilp_normal() -> Mat3 {
    Mat3::from_i64([[0, 2, 1], [0, 0, 2], [0, 0, 0]])
}

/// Exponential `exp(s R)` of the nilpotent `R` of an orientation,
/// evaluated exactly as `E + sR + s^2 R^2 / 2`.
pub fn exp_r(s: &Rat, o: &Orientation) -> Result<Mat3, Mat3Error> {
    let r = r_mat(o);
    exp_nilpotent(s, &r)
}

/// `exp(s N)` for a nilpotent `N` with `N^3 = 0`.
pub fn exp_nilpotent(s: &Rat, n: &Mat3) -> Result<Mat3, Mat3Error> {
    let n2 = n.mul(n);
    if !n2.mul(n).is_zero() {
        return Err(Mat3Error::NotNilpotent);
    }
    let half_s2 = s * s * Rat::new(int(1), int(2));
    Ok(Mat3::identity().add(&n.scale(s)).add(&n2.scale(&half_s2)))
}

/// Column `(c, -b, a)^t` of an orientation.
pub fn kernel_col(o: &Orientation) -> [Rat; 3] {
    [rat(o.c), rat(-o.b), rat(o.a)]
}

/// Row `(c, ac-b, a)` of an orientation.
pub fn eigen_row(o: &Orientation) -> [Rat; 3] {
    [rat(o.c), rat(o.m()), rat(o.a)]
}

/// Family tags for the generic builder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    M,
    H,
    R,
    S,
    W,
    Z,
    ZAdj,
    T,
    U,
    UScript,
    QScript,
    CalA,
    CalB,
}

/// Build a named family for an orientation. `CalA` takes params `[alpha, l]`
/// and `CalB` takes `[q, eps, j]`.
pub fn build(kind: Family, o: &Orientation, params: &[i64]) -> Result<Mat3, Mat3Error> {
    match kind {
        Family::M => Ok(m_mat(o)),
        Family::H => Ok(h_mat(o)),
        Family::R => Ok(r_mat(o)),
        Family::S => Ok(s_mat(o)),
        Family::W => Ok(w_mat(o)),
        Family::Z => Ok(z_mat(o)),
        Family::ZAdj => Ok(z_mat(o).adjugate()),
        Family::T => Ok(t_mat(o)),
        Family::U => Ok(u_mat(o)),
        Family::UScript => Ok(u_script(o)),
        Family::QScript => Ok(q_script(o)),
        Family::CalA => match params {
            [alpha, l] => cal_a(o.m(), &int(*alpha), &int(*l)),
            _ => Err(Mat3Error::BadParams),
        },
        Family::CalB => match params {
            [q, eps, j] => cal_b(*q, &int(*eps), &int(*j)),
            _ => Err(Mat3Error::BadParams),
        },
    }
}

/// Short human-readable subject tag for an orientation.
pub fn subject(o: &Orientation) -> String {
    use alloc::format;
    format!("M({},{},{})", o.a, o.b, o.c)
}
