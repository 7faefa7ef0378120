//! Data-driven identity catalog: every matrix identity is built with both
//! sides constructed independently, so the whole list can be enumerated,
//! verified with zero residuals, and mutation-tested.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::mat3::{
    a_fac, b_fac, c_fac, cal_a, cal_b, d_fac, exp_nilpotent, f_fac, h_mat, j_cal, k_fac,
    kernel_col, l_fac, m_mat, nilp_normal, nilp_w, q_script, r_mat, rhs_system, rhs_z_adj, s_mat,
    smith_invariants, subject, t_mat, u_mat, u_script, v_mat, w_mat, z_adj_printed, z_mat, Mat3,
};
use crate::profile::{
    factor_inverse_check, frobenius_identities, inverse_formula, native_profiles,
    sigma_quadratic_check, uv_checks,
};
use crate::report::IdentityReport;
use crate::solutions::check_f_polynomial;
use crate::tree::{normal_form_w, r_scaled, MarkoffTriple, Orientation};
use crate::uniqueness::{decompose_transformer, pairs_for_triple, product_identities};
use crate::{int, rat, Int, Rat};

/// One matrix identity instance with independently built sides.
pub struct MatrixCheck {
    pub id: &'static str,
    pub subject: String,
    pub lhs: Mat3,
    pub rhs: Mat3,
}

impl MatrixCheck {
    pub fn report(&self) -> IdentityReport {
        IdentityReport::matrices(self.id, self.subject.clone(), &self.lhs, &self.rhs)
    }
}

fn outer_cma(o: &Orientation) -> Mat3 {
    Mat3::outer(&kernel_col(o), &[rat(o.c), rat(o.m()), rat(o.a)])
}

/// Matrix-equation identities for one orientation; both sides independent.
pub fn matrix_checks(o: &Orientation) -> Vec<MatrixCheck> {
    let sub = subject(o);
    let m = m_mat(o);
    let r = r_mat(o);
    let h = h_mat(o);
    let s = s_mat(o);
    let w = w_mat(o);
    let z = z_mat(o);
    let mm = o.m();
    let mut out = Vec::new();
    let mut push = |id: &'static str, lhs: Mat3, rhs: Mat3| {
        out.push(MatrixCheck {
            id,
            subject: sub.clone(),
            lhs,
            rhs,
        });
    };
    // R^t M + M R = 0
    push("2.1", r.transpose().mul(&m).add(&m.mul(&r)), Mat3::zero());
    // R^adj = R^2 = 4 (c,-b,a)^t (c, ac-b, a)
    push("2.2b", r.adjugate(), outer_cma(o).scale(&rat(4)));
    push("2.2b", r.mul(&r), outer_cma(o).scale(&rat(4)));
    // H = E - R/2 + R^2/8 and R = 3E - 4H + H^2 and S^2 = rank-one
    let half = Rat::new(int(1), int(2));
    let eighth = Rat::new(int(1), int(8));
    push(
        "2.3",
        h.clone(),
        Mat3::identity()
            .sub(&r.scale(&half))
            .add(&r.mul(&r).scale(&eighth)),
    );
    push(
        "2.3",
        r.clone(),
        Mat3::identity()
            .scale(&rat(3))
            .sub(&h.scale(&rat(4)))
            .add(&h.mul(&h)),
    );
    push("2.3", s.mul(&s), outer_cma(o));
    // H R = R H
    push("2.hr", h.mul(&r), r.mul(&h));
    // normal form: W^--1 (R/3) W = [[0,2,1],[0,0,2],[0,0,0]]
    let wn = normal_form_w(o);
    push("2.2-2.3", r_scaled(o).mul(&wn), wn.mul(&nilp_normal()));
    // Jordan chain: S T = T J_low
    let t = t_mat(o);
    let j_low = Mat3::from_i64([[0, 0, 0], [1, 0, 0], [0, 1, 0]]);
    push("3.T", s.mul(&t), t.mul(&j_low));
    push(
        "3.T",
        t.clone(),
        a_fac(o).mul(&b_fac(o)).mul(&c_fac(o)).mul(&d_fac(o)),
    );
    let u = u_mat(o);
    push("3.T", u.clone(), m.mul(&t));
    push(
        "3.T",
        u.clone(),
        v_mat(o).mul(&b_fac(o)).mul(&c_fac(o)).mul(&d_fac(o)),
    );
    // A^{-1} = F K L / m^2 and the printed V^{-1}
    let m2inv = Rat::new(int(1), int(mm) * int(mm));
    push(
        "3.T",
        a_fac(o).inverse().expect("det"),
        f_fac(o).mul(&k_fac(o)).mul(&l_fac(o)).scale(&m2inv),
    );
    push(
        "3.T",
        v_mat(o).inverse().expect("det"),
        crate::mat3::v_inv_printed(o),
    );
    // W^t M W = rhs(m) and the column relations
    push("4.2", w.transpose().mul(&m).mul(&w), rhs_system(mm));
    // W(c,b,a) = J W(a,b,c) diag(1,1,-1)
    let rev = o.reversed();
    let d11m = Mat3::diag(rat(1), rat(1), rat(-1));
    push("4.2", w_mat(&rev), j_cal().mul(&w).mul(&d11m));
    push(
        "4.2",
        w.inverse().expect("det 2m^2").mul(&r).mul(&w),
        nilp_w(mm),
    );
    // printed adjugate of W
    let (a, c) = (o.a as i128, o.c as i128);
    let mm_l = mm as i128;
    let e = |v: i128| Rat::from_integer(Int::from(v));
    push(
        "4.1",
        w.adjugate(),
        Mat3::from_rows([
            [e(mm_l * a - 2 * c), e(0), e(mm_l * c - 2 * a)],
            [e(2 * mm_l * c), e(2 * mm_l * mm_l), e(2 * mm_l * a)],
            [e(-a), e(0), e(c)],
        ]),
    );
    // Z adjugate: printed display and the congruence
    push("4.6", z.adjugate(), z_adj_printed(o));
    push(
        "4.6",
        z.adjugate().transpose().mul(&m).mul(&z.adjugate()),
        rhs_z_adj(mm),
    );
    // Z W product pattern
    push("4.ZW", z.mul(&w), crate::mat3::zw_rhs(mm));
    // orthogonal-basis identity for the symmetrized form
    let us = u_script(o);
    push(
        "4.U",
        us.transpose().mul(&q_script(o)).mul(&us),
        Mat3::diag(rat(-mm) * rat(mm), rat(1), rat(-4) * rat(mm) * rat(mm)),
    );
    // profile-dependent identities
    if let Ok(profiles) = native_profiles(o) {
        let p = &profiles[0];
        let (alpha, l) = (p.k[1].clone(), p.l[1].clone());
        if let Ok(a_cal) = cal_a(mm, &alpha, &l) {
            let zi = z.inverse().expect("det 2m^2");
            let half_skew = crate::mat3::half_skew();
            push(
                "4.23",
                zi.mul(&a_cal).transpose().mul(&m).mul(&zi.mul(&a_cal)),
                half_skew.clone(),
            );
            push(
                "4.25",
                a_cal
                    .transpose()
                    .mul(&rhs_z_adj(mm).scale(&Rat::new(int(1), int(2) * int(mm) * int(mm))))
                    .mul(&a_cal),
                half_skew.scale(&(rat(mm) * rat(mm) * rat(2))),
            );
            let j = (&alpha * &alpha + int(1)) / int(o.m_frak());
            if let Ok(b_cal) = cal_b(mm, &alpha, &j) {
                let bi = b_cal.inverse().expect("det 4q^2");
                push(
                    "4.26",
                    bi.transpose().mul(&rhs_system(mm)).mul(&bi),
                    half_skew.clone(),
                );
                push(
                    "4.27",
                    w.mul(&bi).transpose().mul(&m).mul(&w.mul(&bi)),
                    half_skew.clone(),
                );
            }
            // exponential relations between parameter shifts
            let alpha2 = &alpha + int(o.m_frak());
            let l2 = (&alpha2 * &alpha2 + int(1)) / int(o.m_frak());
            if let Ok(a2_cal) = cal_a(mm, &alpha2, &l2) {
                let x = Rat::new(&alpha - &alpha2, int(mm));
                let gen1 = Mat3::from_i64([[0, 0, 0], [1, 0, 0], [0, 2, 0]]);
                let gen2 = Mat3::from_i64([[0, 0, 0], [mm, 0, 0], [0, 2, 0]]);
                push(
                    "4.28",
                    a_cal.inverse().unwrap().mul(&a2_cal),
                    exp_nilpotent(&x, &gen1).expect("nilpotent"),
                );
                push(
                    "4.28",
                    a2_cal.mul(&a_cal.inverse().unwrap()),
                    exp_nilpotent(&x, &gen2).expect("nilpotent"),
                );
            }
            let eps2 = &alpha + int(mm / 3);
            let j2 = (&eps2 * &eps2 + int(1)) / int(mm / 3);
            if let (Ok(b1), Ok(b2)) = (cal_b(mm, &alpha, &j), cal_b(mm, &eps2, &j2)) {
                let x = Rat::new(&eps2 - &alpha, int(mm));
                let gen1 = Mat3::from_i64([[0, 0, 0], [1, 0, 0], [0, 2, 0]]);
                let gen3 = Mat3::from_i64([[0, 0, 4 * mm], [0, 0, 0], [0, 1, 0]]);
                push(
                    "4.29",
                    b2.mul(&b1.inverse().unwrap()),
                    exp_nilpotent(&x, &gen1).expect("nilpotent"),
                );
                // the transposed-side generator carries the half factor, as in
                // the equivalence-shift identity
                let xh = &x * Rat::new(int(1), int(2));
                push(
                    "4.29",
                    b1.inverse().unwrap().mul(&b2),
                    exp_nilpotent(&xh, &gen3).expect("nilpotent"),
                );
            }
            // Cor 6.9 matrix form
            let third = Rat::new(int(1), int(3));
            let dmat = Mat3::diag(third, rat(1), rat(3));
            if let Some(pinv) = p.matrix().inverse() {
                push("6.9", zi.mul(&a_cal), pinv.mul(&dmat));
            }
        }
        // inverse formula as a matrix identity
        if p.cols[0] != p.cols[2] {
            if let Ok((closed, _, _, _)) = inverse_formula(p) {
                push("6.28", closed.mul(&p.matrix()), Mat3::identity());
            }
        }
    }
    out
}

/// Scalar / flag identities for one orientation.
pub fn flag_checks(o: &Orientation) -> Vec<IdentityReport> {
    let mut out = Vec::new();
    // Smith invariants of R/3
    let sm = smith_invariants(&r_scaled(o));
    out.push(IdentityReport::flag(
        "2.4-smith",
        subject(o),
        sm == Some((int(1), int(4), int(0))),
        String::from("invariant factors (1, 4, 0)"),
    ));
    // det T = -[ac(ac-b)]^3
    let det_t = t_mat(o).det();
    let acm = int(o.a) * int(o.c) * int(o.m());
    let want = -Rat::from_integer(&acm * &acm * &acm);
    out.push(IdentityReport::flag(
        "3.T",
        subject(o),
        det_t == want,
        String::from("det(T) = -[ac(ac-b)]^3"),
    ));
    // normal form column and determinant
    let wn = normal_form_w(o);
    let third = Rat::new(int(1), int(3));
    let col_ok = (0..3).all(|i| wn.0[i][0] == kernel_col(o)[i].clone() * &third);
    out.push(IdentityReport::flag(
        "2.2-2.3",
        subject(o),
        col_ok && wn.det() == rat(-1),
        String::from("first column (c,-b,a)/3, det -1"),
    ));
    // q_script has determinant 1 exactly on Markoff input
    out.push(IdentityReport::flag(
        "4.U",
        subject(o),
        q_script(o).det() == rat(1),
        String::from("det of the symmetrized form"),
    ));
    if let Ok(profiles) = native_profiles(o) {
        for p in &profiles {
            out.push(frobenius_identities(p));
            out.push(uv_checks(p));
            out.push(sigma_quadratic_check(p));
            out.push(factor_inverse_check(p));
            if p.cols[0] != p.cols[2] {
                out.push(crate::qforms::transposed_bracket_check(p));
            }
            if let Ok(pl) = crate::qforms::pipeline(p) {
                out.push(pl.report);
            }
        }
    }
    // F polynomial at the canonical residue values and controls
    let mbb = o.m_bb() as u64;
    for n in crate::arith::sqrt_minus_one(mbb) {
        out.push(check_f_polynomial(n as i64, o));
    }
    out.push(check_f_polynomial(0, o));
    out
}

/// Pair identities for a triple: run on all shared-m orientation pairs.
pub fn pair_checks(t: &MarkoffTriple) -> Vec<IdentityReport> {
    let mut out = Vec::new();
    for p in pairs_for_triple(t) {
        out.push(product_identities(&p));
        out.push(decompose_transformer(&p).report);
    }
    out
}

/// Window and field checks keyed on the dominant member.
pub fn dominant_checks(t: &MarkoffTriple, window: i64) -> Vec<IdentityReport> {
    let mut out = Vec::new();
    let b = t.dominant();
    let (a0, a1) = (t.a.min(t.b), t.a.max(t.b));
    match crate::orbit::uv_sequences(b, a0, a1, window) {
        Ok(seq) => {
            let mut pass = true;
            for n in -window..window {
                let r = crate::orbit::gram_identity(&seq, n);
                pass &= r.pass;
            }
            out.push(IdentityReport::flag(
                "9.gram",
                format!("b={b}"),
                pass,
                format!("window |n| <= {window}"),
            ));
        }
        Err(_) => out.push(IdentityReport::flag(
            "9.gram",
            format!("b={b}"),
            false,
            String::from("seed failure"),
        )),
    }
    match crate::orbit::field_suite(b, 3) {
        Ok(s) => out.push(s.report),
        Err(_) => out.push(IdentityReport::flag(
            "10.7",
            format!("b={b}"),
            false,
            String::from("suite failed to start"),
        )),
    }
    out
}

/// Every catalog report for one triple.
pub fn run_triple(t: &MarkoffTriple) -> Vec<IdentityReport> {
    let mut out = Vec::new();
    for o in t.orientations() {
        for c in matrix_checks(&o) {
            out.push(c.report());
        }
        out.extend(flag_checks(&o));
    }
    out.extend(pair_checks(t));
    out.extend(dominant_checks(t, 8));
    out
}

/// The identity ids the catalog covers.
pub fn catalog_ids() -> Vec<&'static str> {
    vec![
        "2.1",
        "2.2b",
        "2.3",
        "2.hr",
        "2.2-2.3",
        "2.4-smith",
        "3.T",
        "4.1",
        "4.2",
        "4.6",
        "4.ZW",
        "4.U",
        "4.23",
        "4.25",
        "4.26",
        "4.27",
        "4.28",
        "4.29",
        "4.F",
        "5.1-5.3",
        "5.4",
        "6.4",
        "6.uv",
        "6.27",
        "6.28",
        "6.9",
        "7.pipeline",
        "7.r4",
        "9.gram",
        "10.7",
    ]
}

/// Run the checks of one catalog id against a triple.
pub fn verify_identity(
    id: &str,
    t: &MarkoffTriple,
) -> Result<Vec<IdentityReport>, crate::mat3::Mat3Error> {
    if !catalog_ids().contains(&id) {
        return Err(crate::mat3::Mat3Error::UnknownIdentity);
    }
    Ok(run_triple(t).into_iter().filter(|r| r.id == id).collect())
}

/// Corrupt one entry of the left-hand side of a matrix check; the check must
/// flip to fail.
pub fn mutation_flips(check: &MatrixCheck, i: usize, j: usize) -> bool {
    let mut corrupted = check.lhs.clone();
    corrupted.0[i][j] += rat(1);
    let report = IdentityReport::matrices(check.id, check.subject.clone(), &corrupted, &check.rhs);
    !report.pass
}

/// Run the mutation sweep over at least `min_samples` identities drawn from
/// the matrix catalog of the given triples.
pub fn mutation_sweep(triples: &[MarkoffTriple], min_samples: usize) -> (usize, bool) {
    let mut sampled = 0usize;
    let mut all_flip = true;
    'outer: for t in triples {
        for o in t.orientations() {
            for (k, check) in matrix_checks(&o).iter().enumerate() {
                let (i, j) = (k % 3, (k / 3) % 3);
                all_flip &= mutation_flips(check, i, j);
                sampled += 1;
                if sampled >= min_samples && sampled >= matrix_checks(&o).len() {
                    break 'outer;
                }
            }
        }
    }
    (sampled, all_flip)
}

/// Aggregate pass over a whole bound.
pub fn verify_catalog(bound: u64) -> (usize, usize, Vec<IdentityReport>) {
    let mut failures = Vec::new();
    let mut total = 0usize;
    let mut passed = 0usize;
    for t in crate::tree::enumerate(bound) {
        for r in run_triple(&t) {
            total += 1;
            if r.pass {
                passed += 1;
            } else {
                failures.push(r);
            }
        }
    }
    (total, passed, failures)
}

/// Residual of a report for display: zero matrix means pass.
pub fn residual_summary(r: &IdentityReport) -> String {
    match &r.residual {
        Some(m) if m.is_zero() => String::from("0"),
        Some(m) => {
            let mut worst = Int::zero();
            for e in m.0.iter().flatten() {
                let mag = e.numer().magnitude().clone();
                if Int::from_biguint(num_bigint::Sign::Plus, mag.clone()) > worst {
                    worst = Int::from_biguint(num_bigint::Sign::Plus, mag);
                }
            }
            format!("max |entry| numerator {worst}")
        }
        None => r.detail.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::enumerate;

    #[test]
    fn catalog_passes_small_bound() {
        let (total, passed, failures) = verify_catalog(50);
        assert!(total > 100);
        assert_eq!(
            passed,
            total,
            "failures: {:?}",
            failures
                .iter()
                .map(|f| (&f.id, &f.subject, &f.detail))
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn catalog_example_42_value() {
        // explicit right-hand side for a single orientation
        let o = Orientation::new(3, 3, 6).unwrap();
        let checks = matrix_checks(&o);
        let w_check = checks.iter().find(|c| c.id == "4.2").unwrap();
        assert_eq!(
            w_check.rhs,
            Mat3::from_i64([[0, 15, 0], [15, 1, 225], [0, -225, -900]])
        );
    }

    #[test]
    fn negative_controls_flip() {
        let triples = enumerate(30);
        let (sampled, all_flip) = mutation_sweep(&triples, 25);
        assert!(sampled >= 25);
        assert!(all_flip);
    }

    #[test]
    fn unknown_identity_is_not_listed() {
        assert!(!catalog_ids().contains(&"nope"));
        let t = MarkoffTriple::new(1, 2, 5).unwrap();
        assert!(matches!(
            verify_identity("nope", &t),
            Err(crate::mat3::Mat3Error::UnknownIdentity)
        ));
        let rs = verify_identity("2.1", &t).unwrap();
        assert_eq!(rs.len(), 4, "one per orientation");
        assert!(rs.iter().all(|r| r.pass));
    }
}
