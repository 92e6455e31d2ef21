//! Small-integer number theory used throughout: sieving, factoring,
//! unit-group generators.

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Primes `<= bound` by the sieve of Eratosthenes.
pub fn primes_up_to(bound: usize) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; bound + 1];
    let mut out = Vec::new();
    for i in 2..=bound {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= bound {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Smallest prime factor table for `0..=bound`.
pub fn smallest_prime_factors(bound: usize) -> Vec<u32> {
    let mut spf = vec![0u32; bound + 1];
    for i in 2..=bound {
        if spf[i] == 0 {
            let mut j = i;
            while j <= bound {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// Prime factorization as (prime, exponent) pairs in ascending order.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
    out.sort_unstable();
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factor(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let mut acc = 1u128;
    let m = modulus as u128;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Multiplicative order of `a` modulo `m`; `a` must be a unit.
pub fn multiplicative_order(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 1;
    }
    let phi = euler_phi(m);
    let mut order = phi;
    for (p, _) in factor(phi) {
        while order % p == 0 && pow_mod(a, order / p, m) == 1 {
            order /= p;
        }
    }
    order
}

/// Smallest generator of the cyclic group (Z/p^e)^x for an odd prime p.
pub fn primitive_root_prime_power(p: u64, e: u32) -> u64 {
    let m = p.pow(e);
    let phi = euler_phi(m);
    (2..m)
        .find(|&g| gcd(g, p) == 1 && multiplicative_order(g, m) == phi)
        .expect("odd prime powers have primitive roots")
}

/// Solve x = r mod m for the CRT system given by (residue, modulus) pairs
/// with pairwise coprime moduli.
pub fn crt(parts: &[(u64, u64)]) -> u64 {
    let total: u64 = parts.iter().map(|&(_, m)| m).product();
    let mut x: u128 = 0;
    for &(r, m) in parts {
        let rest = total / m;
        let inv = mod_inverse(rest % m, m).expect("coprime moduli");
        x = (x + r as u128 * rest as u128 % total as u128 * inv as u128) % total as u128;
    }
    x as u64
}

pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        let spf = smallest_prime_factors(30);
        assert_eq!(spf[28], 2);
        assert_eq!(spf[27], 3);
        assert_eq!(spf[29], 29);
    }

    #[test]
    fn orders_and_roots() {
        assert_eq!(primitive_root_prime_power(5, 1), 2);
        assert_eq!(primitive_root_prime_power(7, 1), 3);
        assert_eq!(primitive_root_prime_power(9, 1), 2);
        assert_eq!(multiplicative_order(4, 5), 2);
        assert_eq!(euler_phi(36), 12);
    }

    #[test]
    fn crt_reconstructs() {
        let x = crt(&[(2, 3), (3, 5), (2, 7)]);
        assert_eq!(x, 23);
        assert_eq!(mod_inverse(3, 7), Some(5));
        assert_eq!(mod_inverse(2, 4), None);
    }
}
