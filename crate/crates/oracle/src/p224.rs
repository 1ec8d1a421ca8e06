//! NIST P-224 arithmetic on `BigUint`, Jacobian coordinates, plain
//! double-and-add (with a fixed-base table for multiples of G).

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};

fn hex(s: &str) -> BigUint {
    BigUint::parse_bytes(s.as_bytes(), 16).expect("valid hex constant")
}

pub fn p() -> BigUint {
    hex("ffffffffffffffffffffffffffffffff000000000000000000000001")
}

pub fn order() -> BigUint {
    hex("ffffffffffffffffffffffffffff16a2e0b8f03e13dd29455c5c2a3d")
}

pub fn b() -> BigUint {
    hex("b4050a850c04b3abf54132565044b0b7d7bfd8ba270b39432355ffb4")
}

pub fn generator() -> (BigUint, BigUint) {
    (
        hex("b70e0cbd6bb4bf7f321390b94a03c1d356c21122343280d6115c1d21"),
        hex("bd376388b5f723fb4c22dfe6cd4375a05a07476444d5819985007e34"),
    )
}

/// True iff (x, y) satisfies y^2 = x^3 - 3x + b over F_p.
pub fn on_curve(x: &BigUint, y: &BigUint) -> bool {
    let p = p();
    let lhs = (y * y) % &p;
    let rhs = (x * x % &p * x + (&p * 3u32) - (x * 3u32 % &p) + b()) % &p;
    lhs == rhs
}

#[derive(Clone, Debug)]
struct Jacobian {
    x: BigUint,
    y: BigUint,
    z: BigUint,
}

fn sub(a: &BigUint, b: &BigUint, p: &BigUint) -> BigUint {
    ((a % p) + p - (b % p)) % p
}

fn double(pt: &Jacobian, p: &BigUint) -> Jacobian {
    if pt.z.is_zero() || pt.y.is_zero() {
        return Jacobian { x: BigUint::one(), y: BigUint::one(), z: BigUint::zero() };
    }
    let delta = &pt.z * &pt.z % p;
    let gamma = &pt.y * &pt.y % p;
    let beta = &pt.x * &gamma % p;
    let alpha = (sub(&pt.x, &delta, p) * ((&pt.x + &delta) % p) % p) * 3u32 % p;
    let x3 = sub(&(&alpha * &alpha % p), &(&beta * 8u32 % p), p);
    let yz = (&pt.y + &pt.z) % p;
    let z3 = sub(&sub(&(&yz * &yz % p), &gamma, p), &delta, p);
    let y3 = sub(
        &(&alpha * sub(&(&beta * 4u32 % p), &x3, p) % p),
        &(&gamma * &gamma % p * 8u32 % p),
        p,
    );
    Jacobian { x: x3, y: y3, z: z3 }
}

fn add(a: &Jacobian, b: &Jacobian, p: &BigUint) -> Jacobian {
    if a.z.is_zero() {
        return b.clone();
    }
    if b.z.is_zero() {
        return a.clone();
    }
    let z1z1 = &a.z * &a.z % p;
    let z2z2 = &b.z * &b.z % p;
    let u1 = &a.x * &z2z2 % p;
    let u2 = &b.x * &z1z1 % p;
    let s1 = &a.y * &b.z % p * &z2z2 % p;
    let s2 = &b.y * &a.z % p * &z1z1 % p;
    let h = sub(&u2, &u1, p);
    let r = sub(&s2, &s1, p);
    if h.is_zero() {
        if r.is_zero() {
            return double(a, p);
        }
        return Jacobian { x: BigUint::one(), y: BigUint::one(), z: BigUint::zero() };
    }
    let hh = &h * &h % p;
    let hhh = &h * &hh % p;
    let v = &u1 * &hh % p;
    let x3 = sub(&sub(&(&r * &r % p), &hhh, p), &(&v * 2u32 % p), p);
    let y3 = sub(&(&r * sub(&v, &x3, p) % p), &(&s1 * &hhh % p), p);
    let z3 = &a.z * &b.z % p * &h % p;
    Jacobian { x: x3, y: y3, z: z3 }
}

/// k * (x, y); `None` for the point at infinity.
pub fn mul(k: &BigUint, point: &(BigUint, BigUint)) -> Option<(BigUint, BigUint)> {
    let p = p();
    let base = Jacobian { x: point.0.clone(), y: point.1.clone(), z: BigUint::one() };
    let mut acc = Jacobian { x: BigUint::one(), y: BigUint::one(), z: BigUint::zero() };
    for i in (0..k.bits()).rev() {
        acc = double(&acc, &p);
        if k.bit(i) {
            acc = add(&acc, &base, &p);
        }
    }
    to_affine(&acc, &p)
}

fn to_affine(acc: &Jacobian, p: &BigUint) -> Option<(BigUint, BigUint)> {
    if acc.z.is_zero() {
        return None;
    }
    let zinv = acc.z.modpow(&(p - 2u32), p);
    let zinv2 = &zinv * &zinv % p;
    Some((&acc.x * &zinv2 % p, &acc.y * &zinv2 % p * &zinv % p))
}

/// `table[w][j] = j * 16^w * G` for the 56 four-bit windows of a scalar.
fn base_table() -> &'static Vec<Vec<Jacobian>> {
    static TABLE: OnceLock<Vec<Vec<Jacobian>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let p = p();
        let (gx, gy) = generator();
        let mut step = Jacobian { x: gx, y: gy, z: BigUint::one() };
        let mut table = Vec::with_capacity(56);
        for _ in 0..56 {
            let mut row = vec![Jacobian { x: BigUint::one(), y: BigUint::one(), z: BigUint::zero() }];
            for j in 1..16 {
                let next = add(&row[j - 1], &step, &p);
                row.push(next);
            }
            step = add(&row[15], &step, &p);
            table.push(row);
        }
        table
    })
}

/// k * G using a fixed-base window table; same result as `mul(k, G)`.
pub fn mul_base(k: &BigUint) -> Option<(BigUint, BigUint)> {
    let p = p();
    let k = k % order();
    let table = base_table();
    let mut acc = Jacobian { x: BigUint::one(), y: BigUint::one(), z: BigUint::zero() };
    for (w, row) in table.iter().enumerate() {
        let mut nibble = 0usize;
        for b in 0..4 {
            if k.bit((4 * w + b) as u64) {
                nibble |= 1 << b;
            }
        }
        if nibble != 0 {
            acc = add(&acc, &row[nibble], &p);
        }
    }
    to_affine(&acc, &p)
}

/// Fixed-width big-endian encoding.
pub fn to_be(n: &BigUint, len: usize) -> Vec<u8> {
    let raw = n.to_bytes_be();
    assert!(raw.len() <= len, "value wider than {len} bytes");
    let mut out = vec![0u8; len - raw.len()];
    out.extend_from_slice(&raw);
    out
}
