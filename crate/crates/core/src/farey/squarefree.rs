//! Square-free decomposition of 64-bit integers (Miller-Rabin + Pollard-Brent).

use std::collections::BTreeMap;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Deterministic for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in WITNESSES {
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

/// A nontrivial factor of the odd composite `n`.
fn pollard_brent(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| ((x as u128 * x as u128 + c as u128) % n as u128) as u64;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut r = 1u64;
        let mut q = 1u64;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(128.min(r - k)) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn factor_into(n: u64, out: &mut BTreeMap<u64, u32>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        *out.entry(n).or_insert(0) += 1;
        return;
    }
    if n.is_multiple_of(2) {
        *out.entry(2).or_insert(0) += 1;
        factor_into(n / 2, out);
        return;
    }
    let f = pollard_brent(n);
    factor_into(f, out);
    factor_into(n / f, out);
}

/// Prime factorization as `prime -> exponent`.
pub fn factorize(n: u64) -> BTreeMap<u64, u32> {
    let mut out = BTreeMap::new();
    // Small primes by trial division keep Pollard-Brent for the hard part.
    let mut m = n;
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while m > 1 && m.is_multiple_of(p) {
            *out.entry(p).or_insert(0) += 1;
            m /= p;
        }
    }
    factor_into(m, &mut out);
    out
}

/// Writes `n = f^2 * core` with `core` square-free. `n` must be positive.
pub fn squarefree_decompose(n: u64) -> (u64, u64) {
    assert!(n > 0, "square-free decomposition of 0");
    let mut f = 1u64;
    let mut core = 1u64;
    for (p, e) in factorize(n) {
        f *= p.pow(e / 2);
        if e % 2 == 1 {
            core *= p;
        }
    }
    (f, core)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_squarefree(n: u64) -> (u64, u64) {
        let mut f = 1;
        let mut k = 2;
        let mut core = n;
        while k * k <= core {
            while core.is_multiple_of(k * k) {
                core /= k * k;
                f *= k;
            }
            k += 1;
        }
        (f, core)
    }

    #[test]
    fn matches_brute_force_on_small_range() {
        for n in 1..5000u64 {
            assert_eq!(squarefree_decompose(n), brute_squarefree(n), "n = {n}");
        }
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_prime(18446744073709551557));
        assert!(!is_prime(3215031751));
    }

    #[test]
    fn large_semiprimes_and_squares() {
        let p = 4294967291u64; // largest prime below 2^32
        let q = 4294967279u64;
        assert_eq!(
            factorize(p * q).into_iter().collect::<Vec<_>>(),
            vec![(q, 1), (p, 1)]
        );
        assert_eq!(squarefree_decompose(p * p), (p, 1));
        assert_eq!(
            squarefree_decompose(12 * 1_000_003 * 1_000_003),
            (2 * 1_000_003, 3)
        );
    }
}
