//! Integer kernels: factorization, square roots of -1 modulo n, two-square
//! decompositions and the symmetric SL2 root of a positive definite
//! determinant-1 matrix.

use alloc::vec;
use alloc::vec::Vec;

use crate::Int;

/// Prime factorization of a positive integer.
///
/// Factors are listed as `(prime, exponent)` with strictly increasing primes
/// and exponents >= 1; the empty list encodes 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub value: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Number of distinct odd prime factors.
    pub fn odd_prime_count(&self) -> usize {
        self.factors.iter().filter(|(p, _)| *p != 2).count()
    }

    pub fn is_divisible_by_4(&self) -> bool {
        self.factors.iter().any(|(p, e)| *p == 2 && *e >= 2)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, valid for all u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Pollard rho with a deterministic sequence of polynomial offsets.
fn pollard_rho(n: u64) -> u64 {
    debug_assert!(n > 1 && !is_prime(n) && n % 2 == 1);
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

const TRIAL_LIMIT: u64 = 1_000_000;

/// Factor a positive integer: trial division up to 10^6, Pollard rho beyond.
pub fn factorize(n: u64) -> Factorization {
    assert!(n >= 1, "factorize requires n >= 1");
    let value = n;
    let mut n = n;
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let push = |p: u64, e: u32, factors: &mut Vec<(u64, u32)>| {
        if e > 0 {
            factors.push((p, e));
        }
    };
    let mut e = 0;
    while n % 2 == 0 {
        n /= 2;
        e += 1;
    }
    push(2, e, &mut factors);
    let mut p = 3u64;
    while p <= TRIAL_LIMIT && p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        push(p, e, &mut factors);
        p += 2;
    }
    // Leftover is 1, a prime, or a product of primes above the trial bound.
    let mut stack = vec![];
    if n > 1 {
        stack.push(n);
    }
    let mut extra: Vec<u64> = Vec::new();
    while let Some(m) = stack.pop() {
        if is_prime(m) {
            extra.push(m);
        } else {
            let d = pollard_rho(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    extra.sort_unstable();
    let mut i = 0;
    while i < extra.len() {
        let p = extra[i];
        let mut e = 0;
        while i < extra.len() && extra[i] == p {
            e += 1;
            i += 1;
        }
        factors.push((p, e));
    }
    factors.sort_unstable();
    Factorization { value, factors }
}

/// All square roots of -1 modulo a prime power `p^e` (odd `p = 1 mod 4`).
fn sqrt_minus_one_prime_power(p: u64, e: u32) -> Vec<u64> {
    debug_assert!(p % 4 == 1);
    let mut r = if p < 10_000 {
        // deterministic search is cheap at this size
        (2..p)
            .find(|&x| mul_mod(x, x, p) == p - 1)
            .expect("root exists for p = 1 mod 4")
    } else {
        tonelli_shanks(p - 1, p)
    };
    // Hensel lift from p^k to p^(k+1): r <- r - (r^2+1)/(2r) computed modulo p^(k+1).
    let mut pk = p;
    for _ in 1..e {
        let pk1 = pk * p;
        let val = (mul_mod(r, r, pk1) + 1) % pk1;
        debug_assert_eq!(val % pk, 0);
        let t = val / pk;
        let inv = pow_mod(mul_mod(2, r, p), p - 2, p);
        let add = mul_mod(t % p, (p - inv) % p, p);
        r = (r + add % p * pk) % pk1;
        debug_assert_eq!((mul_mod(r, r, pk1) + 1) % pk1, 0);
        pk = pk1;
    }
    let other = pk - r;
    let mut out = vec![r, other];
    out.sort_unstable();
    out.dedup();
    out
}

/// Tonelli-Shanks square root of `a` modulo an odd prime `p`, with a
/// deterministic non-residue search.
fn tonelli_shanks(a: u64, p: u64) -> u64 {
    let a = a % p;
    debug_assert_eq!(pow_mod(a, (p - 1) / 2, p), 1, "not a residue");
    if p % 4 == 3 {
        return pow_mod(a, (p + 1) / 4, p);
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q & 1 == 0 {
        q >>= 1;
        s += 1;
    }
    let z = (2..)
        .find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1)
        .unwrap();
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0u32;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    r
}

/// All residues `e` in `[0, n)` with `e^2 = -1 (mod n)`, sorted.
///
/// Empty exactly when 4 divides n or some odd prime factor of n is 3 mod 4;
/// when n is not divisible by 4 the list has `2^l` entries, `l` the number of
/// distinct odd prime factors.
pub fn sqrt_minus_one(n: u64) -> Vec<u64> {
    assert!(n >= 1);
    if n == 1 {
        return vec![0];
    }
    if n == 2 {
        return vec![1];
    }
    let f = factorize(n);
    if f.is_divisible_by_4() {
        return Vec::new();
    }
    if f.factors.iter().any(|(p, _)| *p != 2 && p % 4 == 3) {
        return Vec::new();
    }
    // roots per prime-power component, then CRT
    let mut components: Vec<(u64, Vec<u64>)> = Vec::new();
    for &(p, e) in &f.factors {
        if p == 2 {
            components.push((2, vec![1]));
        } else {
            components.push((p.pow(e), sqrt_minus_one_prime_power(p, e)));
        }
    }
    let mut residues = vec![0u64];
    let mut modulus = 1u64;
    for (pk, roots) in components {
        let mut next = Vec::with_capacity(residues.len() * roots.len());
        for &r in &residues {
            for &s in &roots {
                next.push(crt_pair(r, modulus, s, pk));
            }
        }
        modulus *= pk;
        residues = next;
    }
    residues.sort_unstable();
    residues.dedup();
    residues
}

/// CRT combine `x = a (mod m)`, `x = b (mod n)` for coprime m, n.
fn crt_pair(a: u64, m: u64, b: u64, n: u64) -> u64 {
    // x = a + m * t with t = (b - a) / m mod n
    let minv = pow_mod_general(m % n, n);
    let diff = ((b as i128 - a as i128).rem_euclid(n as i128)) as u64;
    let t = mul_mod(diff, minv, n);
    a + m * t
}

/// Modular inverse by extended Euclid (modulus need not be prime).
fn pow_mod_general(a: u64, n: u64) -> u64 {
    let (mut r0, mut r1) = (n as i128, (a % n) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "not invertible");
    t0.rem_euclid(n as i128) as u64
}

/// All pairs `(x, y)` with `0 <= x <= y` and `x^2 + y^2 = n`, sorted by x.
pub fn two_square_decompositions(n: u64) -> Vec<(u64, u64)> {
    assert!(n >= 1);
    let mut out = Vec::new();
    let mut x = 0u64;
    while 2 * x * x <= n {
        let rest = n - x * x;
        let y = rest.isqrt();
        if y * y == rest {
            out.push((x, y));
        }
        x += 1;
    }
    out
}

/// 2x2 integer matrix.
pub type Mat2 = [[Int; 2]; 2];

pub fn mat2(a: i64, b: i64, c: i64, d: i64) -> Mat2 {
    [[Int::from(a), Int::from(b)], [Int::from(c), Int::from(d)]]
}

pub fn mat2_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    [
        [
            &x[0][0] * &y[0][0] + &x[0][1] * &y[1][0],
            &x[0][0] * &y[0][1] + &x[0][1] * &y[1][1],
        ],
        [
            &x[1][0] * &y[0][0] + &x[1][1] * &y[1][0],
            &x[1][0] * &y[0][1] + &x[1][1] * &y[1][1],
        ],
    ]
}

pub fn mat2_det(x: &Mat2) -> Int {
    &x[0][0] * &x[1][1] - &x[0][1] * &x[1][0]
}

pub fn mat2_transpose(x: &Mat2) -> Mat2 {
    [
        [x[0][0].clone(), x[1][0].clone()],
        [x[0][1].clone(), x[1][1].clone()],
    ]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArithError {
    /// The matrix `[[n,k],[k,l]]` is not positive definite with determinant 1.
    NoSolution,
}

/// The unique non-negative `T` in SL2(Z) with `T T^t = [[n,k],[k,l]]`,
/// given `n l - k^2 = 1` and `n, k, l >= 0`.
pub fn symmetric_sl2_root(n: i64, k: i64, l: i64) -> Result<Mat2, ArithError> {
    if n <= 0 || l <= 0 || k < 0 {
        return Err(ArithError::NoSolution);
    }
    let (n, k, l) = (n as i128, k as i128, l as i128);
    if n * l - k * k != 1 {
        return Err(ArithError::NoSolution);
    }
    // Gaussian reduction of the positive definite form [[n,k],[k,l]] to the
    // identity; the accumulated inverse transform is the root.
    let (mut g11, mut g12, mut g22) = (n, k, l);
    // v accumulates the reducing transform: v * G * v^t = E at the end
    let mut v = [[1i128, 0], [0, 1]];
    loop {
        if g11 == 1 && g22 == 1 && g12 == 0 {
            break;
        }
        if g11 <= g22 {
            // row2 -= t * row1
            let t = div_round(g12, g11);
            if t == 0 && g22 <= g11 {
                break;
            }
            g22 = g22 - 2 * t * g12 + t * t * g11;
            g12 -= t * g11;
            for j in 0..2 {
                v[1][j] -= t * v[0][j];
            }
        } else {
            let t = div_round(g12, g22);
            if t == 0 {
                break;
            }
            g11 = g11 - 2 * t * g12 + t * t * g22;
            g12 -= t * g22;
            for j in 0..2 {
                v[0][j] -= t * v[1][j];
            }
        }
    }
    if !(g11 == 1 && g22 == 1 && g12 == 0) {
        return Err(ArithError::NoSolution);
    }
    // T = v^{-1}, then rotate into the non-negative representative.
    let det = v[0][0] * v[1][1] - v[0][1] * v[1][0];
    debug_assert!(det == 1 || det == -1);
    let inv = if det == 1 {
        [[v[1][1], -v[0][1]], [-v[1][0], v[0][0]]]
    } else {
        [[-v[1][1], v[0][1]], [v[1][0], -v[0][0]]]
    };
    // right multiplication by a rotation keeps T T^t fixed
    let rotations = [
        [[1i128, 0], [0, 1]],
        [[-1, 0], [0, -1]],
        [[0, -1], [1, 0]],
        [[0, 1], [-1, 0]],
    ];
    for r in rotations {
        let cand = [
            [
                inv[0][0] * r[0][0] + inv[0][1] * r[1][0],
                inv[0][0] * r[0][1] + inv[0][1] * r[1][1],
            ],
            [
                inv[1][0] * r[0][0] + inv[1][1] * r[1][0],
                inv[1][0] * r[0][1] + inv[1][1] * r[1][1],
            ],
        ];
        let d = cand[0][0] * cand[1][1] - cand[0][1] * cand[1][0];
        if d == 1 && cand.iter().flatten().all(|&x| x >= 0) {
            return Ok([
                [Int::from(cand[0][0]), Int::from(cand[0][1])],
                [Int::from(cand[1][0]), Int::from(cand[1][1])],
            ]);
        }
    }
    Err(ArithError::NoSolution)
}

fn div_round(a: i128, b: i128) -> i128 {
    // nearest integer to a/b, b > 0
    debug_assert!(b > 0);
    if a >= 0 {
        (2 * a + b) / (2 * b)
    } else {
        -((-2 * a + b) / (2 * b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use proptest::prelude::*;

    fn brute_sqrt_minus_one(n: u64) -> Vec<u64> {
        (0..n)
            .filter(|&e| (e as u128 * e as u128 + 1) % n as u128 == 0)
            .collect()
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(1).factors, vec![]);
        assert_eq!(factorize(12).factors, vec![(2, 2), (3, 1)]);
        assert_eq!(factorize(221).factors, vec![(13, 1), (17, 1)]);
    }

    #[test]
    fn factorize_reconstructs_value() {
        for n in [1u64, 2, 97, 1 << 20, 999_983 * 999_979, 3 * 5 * 5 * 13] {
            let f = factorize(n);
            let prod: u64 = f.factors.iter().map(|(p, e)| p.pow(*e)).product();
            assert_eq!(prod, n);
            for w in f.factors.windows(2) {
                assert!(w[0].0 < w[1].0);
            }
            for (p, _) in &f.factors {
                assert!(is_prime(*p));
            }
        }
    }

    #[test]
    fn sqrt_minus_one_examples() {
        assert_eq!(sqrt_minus_one(5), vec![2, 3]);
        assert_eq!(sqrt_minus_one(2), vec![1]);
        assert_eq!(sqrt_minus_one(3), Vec::<u64>::new());
        let r65 = sqrt_minus_one(65);
        assert_eq!(r65.len(), 4);
        assert_eq!(r65, brute_sqrt_minus_one(65));
    }

    #[test]
    fn sqrt_minus_one_matches_brute_force() {
        for n in 1..=2000u64 {
            assert_eq!(sqrt_minus_one(n), brute_sqrt_minus_one(n), "n = {n}");
        }
    }

    #[test]
    fn sqrt_minus_one_count_is_power_of_two() {
        for n in 1..=2000u64 {
            if n % 4 == 0 {
                continue;
            }
            let r = sqrt_minus_one(n);
            if r.is_empty() {
                continue;
            }
            let l = factorize(n).odd_prime_count();
            assert_eq!(r.len(), 1usize << l, "n = {n}");
        }
    }

    #[test]
    fn sqrt_minus_one_large_prime_uses_tonelli() {
        // 1000117 is prime, 1 mod 4
        let p = 1_000_117u64;
        assert!(is_prime(p));
        let r = sqrt_minus_one(p);
        assert_eq!(r.len(), 2);
        for e in r {
            assert_eq!((e as u128 * e as u128 + 1) % p as u128, 0);
        }
    }

    #[test]
    fn two_squares_examples() {
        assert_eq!(two_square_decompositions(2), vec![(1, 1)]);
        assert_eq!(two_square_decompositions(25), vec![(0, 5), (3, 4)]);
        assert_eq!(two_square_decompositions(221), vec![(5, 14), (10, 11)]);
        assert_eq!(two_square_decompositions(3), vec![]);
    }

    #[test]
    fn symmetric_root_examples() {
        let t = symmetric_sl2_root(1, 0, 1).unwrap();
        assert_eq!(t, mat2(1, 0, 0, 1));
        let t = symmetric_sl2_root(5, 2, 1).unwrap();
        assert_eq!(t, mat2(1, 2, 0, 1));
        let t = symmetric_sl2_root(2, 1, 1).unwrap();
        assert_eq!(t, mat2(1, 1, 0, 1));
        assert_eq!(symmetric_sl2_root(3, 1, 1), Err(ArithError::NoSolution));
    }

    proptest! {
        #[test]
        fn symmetric_root_satisfies_product(p in 0i64..40, q in 0i64..40) {
            // any [[a,b],[c,d]] in SL2 with non-negative entries gives a valid target
            let t0 = mat2(1, p, 0, 1);
            let t1 = mat2_mul(&t0, &mat2(1, 0, q, 1));
            let g = mat2_mul(&t1, &mat2_transpose(&t1));
            let n = i64::try_from(&g[0][0]).unwrap();
            let k = i64::try_from(&g[0][1]).unwrap();
            let l = i64::try_from(&g[1][1]).unwrap();
            prop_assume!(k >= 0);
            let t = symmetric_sl2_root(n, k, l).unwrap();
            let back = mat2_mul(&t, &mat2_transpose(&t));
            prop_assert_eq!(&back, &g);
            prop_assert!(mat2_det(&t).is_one());
        }

        #[test]
        fn two_squares_exhaustive(n in 1u64..5000) {
            let reps = two_square_decompositions(n);
            let brute: Vec<(u64, u64)> = (0..=n.isqrt())
                .filter_map(|x| {
                    let r = n - x * x;
                    let y = r.isqrt();
                    (y * y == r && x <= y).then_some((x, y))
                })
                .collect();
            prop_assert_eq!(reps, brute);
        }
    }
}
