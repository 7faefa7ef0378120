//! Markoff triples, the binary tree of MT-matrices, and the unimodular
//! transformers connecting any two of them.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::mat3::{m_mat, p_move, q_move, r_mat, Mat3};
use crate::Rat;

/// A solution of `a^2 + b^2 + c^2 = 3abc` in positive integers, stored sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MarkoffTriple {
    // ordered lexicographically by (c, b, a); field order matters for Ord
    pub c: u64,
    pub b: u64,
    pub a: u64,
}

/// `a^2 + b^2 + c^2 = 3abc`?
pub fn is_markoff(a: u64, b: u64, c: u64) -> bool {
    let (a, b, c) = (a as u128, b as u128, c as u128);
    a > 0 && b > 0 && c > 0 && a * a + b * b + c * c == 3 * a * b * c
}

impl MarkoffTriple {
    pub fn new(a: u64, b: u64, c: u64) -> Option<Self> {
        if !is_markoff(a, b, c) {
            return None;
        }
        let mut v = [a, b, c];
        v.sort_unstable();
        Some(MarkoffTriple {
            a: v[0],
            b: v[1],
            c: v[2],
        })
    }

    pub fn root() -> Self {
        MarkoffTriple { a: 1, b: 1, c: 1 }
    }

    /// Members in increasing order.
    pub fn members(&self) -> [u64; 3] {
        [self.a, self.b, self.c]
    }

    /// The dominant (largest) member.
    pub fn dominant(&self) -> u64 {
        self.c
    }

    /// Scaled members `(3a, 3b, 3c)`.
    pub fn scaled(&self) -> [u64; 3] {
        [3 * self.a, 3 * self.b, 3 * self.c]
    }

    /// Neighbors in the Markoff tree: replace one member x by
    /// 3 (product of the others) - x. Duplicates collapse; results sorted.
    pub fn neighbors(&self) -> Vec<MarkoffTriple> {
        let [a, b, c] = self.members();
        let mut out: Vec<MarkoffTriple> = Vec::new();
        for (x, y, z) in [(a, b, c), (b, a, c), (c, a, b)] {
            let other = 3 * y * z;
            if other > x {
                if let Some(t) = MarkoffTriple::new(other - x, y, z) {
                    out.push(t);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The neighbor closer to the root (smaller dominant), if any.
    pub fn parent(&self) -> Option<MarkoffTriple> {
        if *self == Self::root() {
            return None;
        }
        let [a, b, c] = self.members();
        let down = 3 * a * b;
        debug_assert!(down > c);
        MarkoffTriple::new(a, b, down - c)
    }

    /// The (at most four) MT-matrix orientations of this triple.
    pub fn orientations(&self) -> Vec<Orientation> {
        let [a, b, c] = self.scaled();
        let mut perms = vec![
            [a, b, c],
            [a, c, b],
            [b, a, c],
            [b, c, a],
            [c, a, b],
            [c, b, a],
        ];
        perms.dedup();
        let mut out: Vec<Orientation> = Vec::new();
        for [x, y, z] in perms {
            if let Some(o) = Orientation::new(x as i64, y as i64, z as i64) {
                if !out.contains(&o) {
                    out.push(o);
                }
            }
        }
        out
    }
}

/// Complete, duplicate-free list of triples with dominant member up to
/// `bound`, sorted lexicographically by (c, b, a).
pub fn enumerate(bound: u64) -> Vec<MarkoffTriple> {
    let mut seen: BTreeSet<MarkoffTriple> = BTreeSet::new();
    let mut stack = vec![];
    if bound >= 1 {
        stack.push(MarkoffTriple::root());
    }
    while let Some(t) = stack.pop() {
        if t.dominant() > bound || !seen.insert(t) {
            continue;
        }
        let [a, b, c] = t.members();
        // moves that grow the dominant member
        for (x, y, z) in [(a, b, c), (b, a, c)] {
            let up = 3 * y * z - x;
            if up <= bound {
                if let Some(n) = MarkoffTriple::new(up, y, z) {
                    stack.push(n);
                }
            }
        }
    }
    seen.into_iter().collect()
}

/// Triples of the deformed equation
/// `a^2 + b^2 + c^2 = p a b c + 3 - p`, generated from (1,1,1) by the
/// replace-one-member move, complete up to `bound`.
pub fn p_triples(p: i64, bound: u64) -> Vec<[u64; 3]> {
    let is_sol = |a: i128, b: i128, c: i128| {
        a > 0 && b > 0 && c > 0 && a * a + b * b + c * c == p as i128 * a * b * c + 3 - p as i128
    };
    let mut seen: BTreeSet<[u64; 3]> = BTreeSet::new();
    let mut stack = vec![[1u64, 1, 1]];
    while let Some(t) = stack.pop() {
        let [a, b, c] = t;
        if c > bound || !seen.insert(t) {
            continue;
        }
        for (x, y, z) in [(a, b, c), (b, a, c), (c, a, b)] {
            let up = p as i128 * y as i128 * z as i128 - x as i128;
            if up > 0 && up <= bound as i128 && is_sol(up, y as i128, z as i128) {
                let mut n = [up as u64, y, z];
                n.sort_unstable();
                stack.push(n);
            }
        }
    }
    seen.into_iter().collect()
}

/// Brute-force scan oracle for `p_triples`, by solving the quadratic in the
/// largest member.
pub fn p_triples_scan(p: i64, bound: u64) -> Vec<[u64; 3]> {
    let mut out: BTreeSet<[u64; 3]> = BTreeSet::new();
    for a in 1..=bound as i128 {
        for b in a..=bound as i128 {
            for c in b..=bound as i128 {
                if a * a + b * b + c * c == p as i128 * a * b * c + 3 - p as i128 {
                    out.insert([a as u64, b as u64, c as u64]);
                }
            }
        }
    }
    out.into_iter().collect()
}

/// A scaled ordering `(a, b, c)` of a Markoff triple with
/// `a^2 + b^2 + c^2 = abc` and the largest entry in position a or c.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Orientation {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl Orientation {
    /// A valid MT-matrix ordering, or None.
    pub fn new(a: i64, b: i64, c: i64) -> Option<Self> {
        if a <= 0 || b <= 0 || c <= 0 {
            return None;
        }
        if a % 3 != 0 || b % 3 != 0 || c % 3 != 0 {
            return None;
        }
        if !is_markoff((a / 3) as u64, (b / 3) as u64, (c / 3) as u64) {
            return None;
        }
        let mx = a.max(b).max(c);
        if mx != a && mx != c {
            return None;
        }
        Some(Orientation { a, b, c })
    }

    /// Unchecked constructor for deliberately invalid inputs (error paths).
    pub fn raw(a: i64, b: i64, c: i64) -> Self {
        Orientation { a, b, c }
    }

    /// The reversed ordering `(c, b, a)`, also a valid MT ordering.
    pub fn reversed(&self) -> Orientation {
        Orientation {
            a: self.c,
            b: self.b,
            c: self.a,
        }
    }

    /// `m = ac - b`, the dominant member of the neighbor triple `{a, c, m}`.
    pub fn m(&self) -> i64 {
        self.a * self.c - self.b
    }

    /// Unscaled members.
    pub fn frak(&self) -> (u64, u64, u64) {
        (
            (self.a / 3) as u64,
            (self.b / 3) as u64,
            (self.c / 3) as u64,
        )
    }

    /// Unscaled `m/3`.
    pub fn m_frak(&self) -> i64 {
        self.m() / 3
    }

    /// `m/3` when m odd, `m/6` when m even (the square-free-at-2,3 core).
    pub fn m_bb(&self) -> i64 {
        let m = self.m();
        if m % 2 == 0 {
            m / 6
        } else {
            m / 3
        }
    }

    /// The triple this orientation spells.
    pub fn triple(&self) -> MarkoffTriple {
        let (a, b, c) = self.frak();
        MarkoffTriple::new(a, b, c).expect("orientation encodes a triple")
    }

    /// Whether this is the root orientation `M(3,3,3)`.
    pub fn is_root(&self) -> bool {
        (self.a, self.b, self.c) == (3, 3, 3)
    }
}

/// The MT-matrices of a triple, keyed by their orientations.
pub fn mt_matrices(t: &MarkoffTriple) -> Vec<(Orientation, Mat3)> {
    t.orientations()
        .into_iter()
        .map(|o| (o, m_mat(&o)))
        .collect()
}

/// One edge of the binary MT-matrix tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    /// `P(x)^t M(x, b, c) P(x) = M(x, c, xc - b)`
    P(i64),
    /// `Q(y)^t M(a, b, y) Q(y) = M(ay - b, a, y)`
    Q(i64),
}

impl Move {
    pub fn matrix(&self) -> Mat3 {
        match *self {
            Move::P(x) => p_move(x),
            Move::Q(y) => q_move(y),
        }
    }
}

/// Moves from the root orientation `M(3,3,3)` to a target orientation;
/// replaying them through the two conjugation identities reproduces the
/// target.
#[derive(Debug, Clone)]
pub struct TreePath {
    pub target: Orientation,
    pub moves: Vec<Move>,
}

/// Parent of an MT orientation in the binary MT tree, plus the move whose
/// conjugation identity produces this orientation from the parent.
fn mt_parent(o: &Orientation) -> Option<(Orientation, Move)> {
    if o.is_root() {
        return None;
    }
    let (a, b, c) = (o.a, o.b, o.c);
    let mx = a.max(b).max(c);
    if mx == c && a * b > c {
        // child of (a, ab-c, b) via P(a)
        let p = Orientation::new(a, a * b - c, b)?;
        Some((p, Move::P(a)))
    } else if mx == a && b * c > a {
        // child of (b, bc-a, c) via Q(c)
        let p = Orientation::new(b, b * c - a, c)?;
        Some((p, Move::Q(c)))
    } else {
        None
    }
}

/// Path of moves from the root to `o`.
pub fn path_from_root(o: &Orientation) -> TreePath {
    let mut moves = Vec::new();
    let mut cur = *o;
    while let Some((parent, mv)) = mt_parent(&cur) {
        moves.push(mv);
        cur = parent;
    }
    debug_assert!(cur.is_root());
    moves.reverse();
    TreePath { target: *o, moves }
}

/// Replay a path from the root, checking each conjugation step; returns the
/// final orientation's MT-matrix.
pub fn replay(path: &TreePath) -> Mat3 {
    let root = Orientation::new(3, 3, 3).unwrap();
    let mut m = m_mat(&root);
    for mv in &path.moves {
        let g = mv.matrix();
        m = g.transpose().mul(&m).mul(&g);
    }
    m
}

/// `G(o)` in SL3(Z) with `G(o)^t M(o) G(o) = M(3,3,3)`.
fn to_root_transform(o: &Orientation) -> Mat3 {
    let mut g = Mat3::identity();
    let mut cur = *o;
    while let Some((parent, mv)) = mt_parent(&cur) {
        let inv = mv.matrix().inverse().expect("moves are unimodular");
        g = g.mul(&inv);
        cur = parent;
    }
    // accumulated as inv_k ... inv_1 applied in child-to-root order
    g
}

/// The transformer `N` with `N^t M(dst) N = M(src)`, built from the tree
/// moves; it also carries the two vector identities tying the orientations
/// together.
pub fn transformer(src: &Orientation, dst: &Orientation) -> Mat3 {
    let g_src = to_root_transform(src);
    let g_dst = to_root_transform(dst);
    g_dst.mul(&g_src.inverse().expect("unimodular"))
}

/// The explicit normal-form conjugator for the root orientation.
pub fn w_cal_root() -> Mat3 {
    Mat3::from_i64([[1, -2, 0], [-1, 1, 1], [1, 0, -1]])
}

/// Normal-form conjugator of an orientation: `W(o) = N w_cal_root()` where
/// `N^t M(o) N = M(3,3,3)`. Satisfies
/// `W(o)^{-1} (R(o)/3) W(o) = [[0,2,1],[0,0,2],[0,0,0]]`, has determinant -1
/// and first column `(c, -b, a)/3` of the orientation.
pub fn normal_form_w(o: &Orientation) -> Mat3 {
    let n = transformer(&Orientation::new(3, 3, 3).unwrap(), o);
    n.mul(&w_cal_root())
}

/// Scaled-down nilpotent `R/3`.
pub fn r_scaled(o: &Orientation) -> Mat3 {
    r_mat(o).scale(&Rat::new(crate::int(1), crate::int(3)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat3::{kernel_col, nilp_normal};
    use crate::rat;

    #[test]
    fn is_markoff_examples() {
        assert!(is_markoff(1, 2, 5));
        assert!(!is_markoff(1, 2, 3));
        assert!(is_markoff(2, 5, 29));
    }

    #[test]
    fn neighbors_examples() {
        let t = MarkoffTriple::new(1, 1, 1).unwrap();
        assert_eq!(t.neighbors(), vec![MarkoffTriple::new(1, 1, 2).unwrap()]);
        let t = MarkoffTriple::new(1, 2, 5).unwrap();
        assert_eq!(
            t.neighbors(),
            vec![
                MarkoffTriple::new(1, 1, 2).unwrap(),
                MarkoffTriple::new(1, 5, 13).unwrap(),
                MarkoffTriple::new(2, 5, 29).unwrap(),
            ]
        );
        let t = MarkoffTriple::new(1, 1, 2).unwrap();
        assert_eq!(
            t.neighbors(),
            vec![
                MarkoffTriple::new(1, 1, 1).unwrap(),
                MarkoffTriple::new(1, 2, 5).unwrap(),
            ]
        );
    }

    #[test]
    fn enumerate_small_bounds() {
        let got: Vec<[u64; 3]> = enumerate(5).iter().map(|t| t.members()).collect();
        assert_eq!(got, vec![[1, 1, 1], [1, 1, 2], [1, 2, 5]]);
        let got: Vec<[u64; 3]> = enumerate(30).iter().map(|t| t.members()).collect();
        assert_eq!(
            got,
            vec![[1, 1, 1], [1, 1, 2], [1, 2, 5], [1, 5, 13], [2, 5, 29]]
        );
    }

    /// Brute-force oracle: scan all (a, b) and solve the quadratic in c.
    pub fn enumerate_scan(bound: u64) -> Vec<MarkoffTriple> {
        let mut out = BTreeSet::new();
        for a in 1..=bound {
            for b in a..=bound {
                // c^2 - 3ab c + (a^2 + b^2) = 0
                let disc = (3 * a * b) as i128 * (3 * a * b) as i128
                    - 4 * (a as i128 * a as i128 + b as i128 * b as i128);
                if disc < 0 {
                    continue;
                }
                let s = (disc as u128).isqrt() as i128;
                if s * s != disc {
                    continue;
                }
                for c2 in [(3 * a * b) as i128 - s, (3 * a * b) as i128 + s] {
                    if c2 > 0 && c2 % 2 == 0 {
                        let c = (c2 / 2) as u64;
                        if c >= b && c <= bound {
                            if let Some(t) = MarkoffTriple::new(a, b, c) {
                                out.insert(t);
                            }
                        }
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    #[test]
    fn enumerate_matches_scan_oracle() {
        assert_eq!(enumerate(1000), enumerate_scan(1000));
    }

    #[test]
    fn tree_property_up_to_1e5() {
        for t in enumerate(100_000) {
            for n in t.neighbors() {
                assert!(is_markoff(n.a, n.b, n.c));
            }
            if t != MarkoffTriple::root() {
                let p = t.parent().unwrap();
                assert!(p.dominant() <= t.dominant());
                // parent is unique: exactly one neighbor has a smaller-or-equal sum
                let smaller: Vec<_> = t
                    .neighbors()
                    .into_iter()
                    .filter(|n| n.members().iter().sum::<u64>() < t.members().iter().sum::<u64>())
                    .collect();
                assert_eq!(smaller, vec![p]);
            }
        }
    }

    #[test]
    fn p_triples_examples() {
        let b = 30;
        let m3: Vec<[u64; 3]> = enumerate(b).iter().map(|t| t.members()).collect();
        assert_eq!(p_triples(3, b), m3);
        assert_eq!(p_triples(0, 20), vec![[1, 1, 1]]);
        assert_eq!(p_triples(4, 20), p_triples_scan(4, 20));
        assert_eq!(p_triples(5, 40), p_triples_scan(5, 40));
    }

    #[test]
    fn orientation_counts() {
        let ms = mt_matrices(&MarkoffTriple::new(1, 1, 1).unwrap());
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].1, m_mat(&Orientation::new(3, 3, 3).unwrap()));
        assert_eq!(MarkoffTriple::new(1, 1, 1).unwrap().orientations().len(), 1);
        let o2 = MarkoffTriple::new(1, 1, 2).unwrap().orientations();
        assert_eq!(o2.len(), 2);
        assert!(o2.contains(&Orientation::new(3, 3, 6).unwrap()));
        assert!(o2.contains(&Orientation::new(6, 3, 3).unwrap()));
        assert_eq!(MarkoffTriple::new(1, 2, 5).unwrap().orientations().len(), 4);
        assert_eq!(
            MarkoffTriple::new(1, 5, 13).unwrap().orientations().len(),
            4
        );
    }

    #[test]
    fn transformer_root_cases() {
        let root = Orientation::new(3, 3, 3).unwrap();
        assert_eq!(transformer(&root, &root), Mat3::identity());
        // the transformer conjugating M(3,3,3) into M(3,3,6) is P(3) itself
        let dst = Orientation::new(3, 3, 6).unwrap();
        assert_eq!(transformer(&dst, &root), p_move(3));
        let n = transformer(&root, &dst);
        assert_eq!(n, p_move(3).inverse().unwrap());
        let m_dst = m_mat(&dst);
        let m_src = m_mat(&root);
        assert_eq!(n.transpose().mul(&m_dst).mul(&n), m_src);
        // a composite of two moves, verified by multiplication
        let deep = Orientation::new(3, 6, 15).unwrap();
        let n2 = transformer(&deep, &root);
        assert_eq!(n2.transpose().mul(&m_mat(&root)).mul(&n2), m_mat(&deep));
        assert_eq!(path_from_root(&deep).moves.len(), 2);
    }

    #[test]
    fn transformer_satisfies_both_vector_identities() {
        let all: Vec<Orientation> = enumerate(30)
            .iter()
            .flat_map(|t| t.orientations())
            .collect();
        for src in &all {
            for dst in &all {
                let n = transformer(src, dst);
                assert!(n.is_integral());
                assert!(crate::uniqueness::orthogonal_mod3(&n));
                assert_eq!(n.det(), rat(1));
                assert_eq!(
                    n.transpose().mul(&m_mat(dst)).mul(&n),
                    m_mat(src),
                    "congruence {src:?} -> {dst:?}"
                );
                // N (c1,-b1,a1)^t = (c2,-b2,a2)^t
                assert_eq!(n.apply(&kernel_col(src)), kernel_col(dst));
                // N^t (c2, a2c2-b2, a2)^t = (c1, a1c1-b1, a1)^t
                let e2 = [rat(dst.c), rat(dst.m()), rat(dst.a)];
                let e1 = [rat(src.c), rat(src.m()), rat(src.a)];
                assert_eq!(n.transpose().apply(&e2), e1);
            }
        }
    }

    #[test]
    fn replay_reproduces_target() {
        for t in enumerate(100) {
            for o in t.orientations() {
                let p = path_from_root(&o);
                assert_eq!(replay(&p), m_mat(&o));
            }
        }
    }

    #[test]
    fn normal_form_examples() {
        let root = Orientation::new(3, 3, 3).unwrap();
        let w = normal_form_w(&root);
        assert_eq!(w, w_cal_root());
        assert_eq!(w.det(), rat(-1));
        for t in enumerate(50) {
            for o in t.orientations() {
                let w = normal_form_w(&o);
                assert_eq!(w.det(), rat(-1));
                // conjugation to the integral normal form
                let lhs = w.inverse().unwrap().mul(&r_scaled(&o)).mul(&w);
                assert_eq!(lhs, nilp_normal());
                // first column is (c, -b, a)/3 of the orientation
                let third = Rat::new(crate::int(1), crate::int(3));
                for (i, v) in kernel_col(&o).iter().enumerate() {
                    assert_eq!(w.0[i][0], v * &third);
                }
            }
        }
    }
}
