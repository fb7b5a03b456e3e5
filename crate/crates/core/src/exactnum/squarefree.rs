//! Square-part extraction for positive integers.
//!
//! Trial division by primes up to 10^6, then a perfect-square test, a
//! Miller-Rabin test and, only for large composite cofactors, Pollard-Brent.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::isqrt;

const TRIAL_LIMIT: u32 = 1_000_000;

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_LIMIT as usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= n {
            if sieve[i] {
                let mut j = i * i;
                while j <= n {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        sieve.iter().enumerate().filter(|(_, &p)| p).map(|(i, _)| i as u32).collect()
    })
}

pub fn is_perfect_square(n: &BigUint) -> bool {
    let r = isqrt(n);
    &r * &r == *n
}

/// Splits `n > 0` as `n = root^2 * core` with `core` squarefree.
/// Returns `(root, core)`. `n = 0` yields `(0, 1)`.
pub fn squarefree_decompose(n: &BigUint) -> (BigUint, BigUint) {
    if n.is_zero() {
        return (BigUint::zero(), BigUint::one());
    }
    let mut root = BigUint::one();
    let mut core = BigUint::one();
    let mut rest = n.clone();
    let mut exhausted = true;

    for &p in small_primes() {
        let small = rest.to_u64();
        let cube = (p as u128).pow(3);
        // Past the cube root: what remains is 1, q, q*r or q^2 with q, r > p.
        let past_cube_root = match small {
            Some(s) => cube > s as u128,
            None => BigUint::from(cube) > rest,
        };
        if past_cube_root {
            exhausted = false;
            break;
        }
        let pb = BigUint::from(p);
        if let Some(small) = small {
            let (r, mut m) = strip_u64(small, p as u64);
            if m % 2 == 1 {
                core *= p;
                m -= 1;
            }
            root *= BigUint::from(p).pow(m / 2);
            rest = BigUint::from(r);
        } else {
            let mut m = 0u32;
            while (&rest % &pb).is_zero() {
                rest /= &pb;
                m += 1;
            }
            if m % 2 == 1 {
                core *= p;
                m -= 1;
            }
            root *= pb.pow(m / 2);
        }
    }

    if rest.is_one() {
        return (root, core);
    }
    if is_perfect_square(&rest) {
        root *= isqrt(&rest);
        return (root, core);
    }
    if !exhausted {
        // cube-root stop: not a square, so a prime or a product of two distinct primes
        return (root, core * rest);
    }
    let mut factors = Vec::new();
    factor_into(rest, &mut factors);
    factors.sort();
    let mut i = 0;
    while i < factors.len() {
        let mut j = i;
        while j < factors.len() && factors[j] == factors[i] {
            j += 1;
        }
        let m = (j - i) as u32;
        root *= factors[i].pow(m / 2);
        if m % 2 == 1 {
            core *= &factors[i];
        }
        i = j;
    }
    (root, core)
}

fn strip_u64(mut n: u64, p: u64) -> (u64, u32) {
    let mut m = 0;
    while n.is_multiple_of(p) {
        n /= p;
        m += 1;
    }
    (n, m)
}

fn factor_into(n: BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if is_probable_prime(&n) {
        out.push(n);
        return;
    }
    if is_perfect_square(&n) {
        let r = isqrt(&n);
        factor_into(r.clone(), out);
        factor_into(r, out);
        return;
    }
    let d = pollard_brent(&n);
    let q = &n / &d;
    factor_into(d, out);
    factor_into(q, out);
}

const WITNESSES: [u32; 20] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71];

/// Miller-Rabin with fixed witnesses. Deterministic (no randomness); proven
/// exact below 3.3 * 10^24 and overwhelmingly reliable above.
pub fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for &w in &WITNESSES {
        let w = BigUint::from(w);
        if *n == w {
            return true;
        }
        if (n % &w).is_zero() {
            return false;
        }
    }
    let n1 = n - 1u32;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s as usize;
    'witness: for &w in &WITNESSES {
        let mut x = BigUint::from(w).modpow(&d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: &BigUint) -> BigUint {
    if n.is_even() {
        return BigUint::from(2u32);
    }
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r: u64 = 1;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..(128.min(r - k)) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += 128;
            }
            r *= 2;
        }
        if g == *n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if g != *n {
            return g;
        }
        c += 1u32;
    }
}
