//! Master beacon key and the rolling advertisement key chain.
//!
//! For every index `i >= 1`:
//!
//! ```text
//! SK_i       = KDF(SK_{i-1}, "update", 32)
//! (u_i, v_i) = KDF(SK_i, "diversify", 72)       // 36 bytes each
//! d_i        = d_0 * u_i + v_i   (mod q)
//! p_i        = d_i * G
//! ```
//!
//! where KDF is ANSI X9.63 with SHA-256 over NIST P-224. Index 0 is the
//! master itself and is never advertised.

use std::fmt;
use std::sync::OnceLock;

use base64::{engine::general_purpose::STANDARD as BASE64, Engine as _};
use chrono::{DateTime, Utc};
use num_bigint::BigUint;
use p224::elliptic_curve::ff::PrimeField;
use p224::elliptic_curve::point::AffineCoordinates;
use p224::{AffinePoint, FieldBytes, NonZeroScalar, ProjectivePoint, Scalar};
use rand_core::RngCore;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::kdf::x963_sha256;

/// Length of a P-224 scalar or field element in bytes.
pub const SCALAR_LEN: usize = 28;
/// Seconds each advertisement key stays on air.
pub const KEY_WINDOW_SECS: i64 = 900;

const ORDER_HEX: &str = "ffffffffffffffffffffffffffff16a2e0b8f03e13dd29455c5c2a3d";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KeyError {
    #[error("entropy source failed: {0}")]
    Entropy(String),
    #[error("derived private key for index {0} is zero mod q")]
    DegenerateKey(u32),
    #[error("key index must be >= 1")]
    ZeroIndex,
    #[error("time {requested} precedes master key creation at {created}")]
    TimeBeforeCreation { requested: DateTime<Utc>, created: DateTime<Utc> },
    #[error("window start {start} is after end {end}")]
    InvertedWindow { start: DateTime<Utc>, end: DateTime<Utc> },
    #[error("invalid scalar encoding")]
    InvalidScalar,
    #[error("key index overflow")]
    IndexOverflow,
}

/// The fixed curve: NIST P-224 with its standard base point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CurveParams;

impl CurveParams {
    pub const NAME: &'static str = "NIST P-224";

    pub fn p224() -> Self {
        CurveParams
    }

    /// Group order q.
    pub fn order(&self) -> &'static BigUint {
        static Q: OnceLock<BigUint> = OnceLock::new();
        Q.get_or_init(|| BigUint::parse_bytes(ORDER_HEX.as_bytes(), 16).unwrap())
    }

    pub fn generator(&self) -> AffinePoint {
        AffinePoint::GENERATOR
    }
}

/// SHA-256 of an advertised 28-byte X coordinate; the server-side lookup handle.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KeyId(pub [u8; 32]);

impl KeyId {
    pub fn from_x_bytes(x: &[u8; SCALAR_LEN]) -> Self {
        KeyId(Sha256::digest(x).into())
    }

    pub fn to_base64(&self) -> String {
        BASE64.encode(self.0)
    }

    /// `None` unless the input is valid base64 of exactly 32 bytes.
    pub fn from_base64(s: &str) -> Option<Self> {
        let raw = BASE64.decode(s).ok()?;
        Some(KeyId(raw.try_into().ok()?))
    }
}

impl fmt::Debug for KeyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KeyId({})", self.to_base64())
    }
}

impl fmt::Display for KeyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_base64())
    }
}

/// Per-device root secret (d0, p0, SK0). `creation_time` anchors window 1.
#[derive(Clone)]
pub struct MasterBeaconKey {
    d0: NonZeroScalar,
    p0: AffinePoint,
    sk0: [u8; 32],
    creation_time: DateTime<Utc>,
}

impl PartialEq for MasterBeaconKey {
    fn eq(&self, other: &Self) -> bool {
        self.d0_bytes() == other.d0_bytes() && self.sk0 == other.sk0 && self.creation_time == other.creation_time
    }
}

impl Eq for MasterBeaconKey {}

impl fmt::Debug for MasterBeaconKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MasterBeaconKey")
            .field("p0_x", &BASE64.encode(self.p0.x()))
            .field("creation_time", &self.creation_time)
            .finish_non_exhaustive()
    }
}

impl MasterBeaconKey {
    pub fn from_parts(
        d0: &[u8; SCALAR_LEN],
        sk0: [u8; 32],
        creation_time: DateTime<Utc>,
    ) -> Result<Self, KeyError> {
        let d0 = scalar_from_bytes(d0).ok_or(KeyError::InvalidScalar)?;
        let p0 = (ProjectivePoint::GENERATOR * *d0).to_affine();
        Ok(Self { d0, p0, sk0, creation_time })
    }

    pub fn d0_bytes(&self) -> [u8; SCALAR_LEN] {
        self.d0.to_repr().into()
    }

    pub fn p0(&self) -> &AffinePoint {
        &self.p0
    }

    pub fn sk0(&self) -> &[u8; 32] {
        &self.sk0
    }

    pub fn creation_time(&self) -> DateTime<Utc> {
        self.creation_time
    }

    /// 1-based index of the key on air at `t`.
    pub fn window_index(&self, t: DateTime<Utc>) -> Result<u32, KeyError> {
        let elapsed = (t - self.creation_time).num_milliseconds();
        if elapsed < 0 {
            return Err(KeyError::TimeBeforeCreation { requested: t, created: self.creation_time });
        }
        u32::try_from(elapsed / (KEY_WINDOW_SECS * 1000) + 1).map_err(|_| KeyError::IndexOverflow)
    }

    /// Start of the window in which key `index` is advertised.
    pub fn window_start(&self, index: u32) -> DateTime<Utc> {
        self.creation_time + chrono::Duration::seconds(KEY_WINDOW_SECS * (i64::from(index) - 1))
    }
}

/// SK_i together with its index.
#[derive(Clone, PartialEq, Eq)]
pub struct SymmetricRollingKey {
    pub index: u32,
    pub key: [u8; 32],
}

impl fmt::Debug for SymmetricRollingKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymmetricRollingKey").field("index", &self.index).finish_non_exhaustive()
    }
}

impl SymmetricRollingKey {
    pub fn initial(master: &MasterBeaconKey) -> Self {
        Self { index: 0, key: master.sk0 }
    }
}

/// SK_i = KDF(SK_{i-1}, "update", 32).
pub fn roll_symmetric(prev: &SymmetricRollingKey) -> SymmetricRollingKey {
    SymmetricRollingKey { index: prev.index + 1, key: x963_sha256::<32>(&prev.key, b"update") }
}

/// Anti-tracking scalars (u_i, v_i), both in [1, q-1].
#[derive(Clone, Copy)]
pub struct AntiTrackingPair {
    pub u: NonZeroScalar,
    pub v: NonZeroScalar,
}

impl AntiTrackingPair {
    fn repr(&self) -> (FieldBytes, FieldBytes) {
        (self.u.to_repr(), self.v.to_repr())
    }
}

impl PartialEq for AntiTrackingPair {
    fn eq(&self, other: &Self) -> bool {
        self.repr() == other.repr()
    }
}

impl Eq for AntiTrackingPair {}

impl fmt::Debug for AntiTrackingPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("AntiTrackingPair { .. }")
    }
}

impl AntiTrackingPair {
    pub fn from_scalars(u: NonZeroScalar, v: NonZeroScalar) -> Self {
        Self { u, v }
    }
}

/// Big-endian integer reduced into [1, q-1] as `(x mod (q-1)) + 1`.
pub fn reduce_to_scalar(raw: &[u8], params: &CurveParams) -> NonZeroScalar {
    let q_minus_1 = params.order() - 1u32;
    let x = BigUint::from_bytes_be(raw) % q_minus_1 + 1u32;
    let bytes = x.to_bytes_be();
    let mut repr = [0u8; SCALAR_LEN];
    repr[SCALAR_LEN - bytes.len()..].copy_from_slice(&bytes);
    scalar_from_bytes(&repr).expect("reduced value lies in [1, q-1]")
}

/// (u_i, v_i) = KDF(SK_i, "diversify", 72), split 36/36.
pub fn diversify(sk: &SymmetricRollingKey, params: &CurveParams) -> AntiTrackingPair {
    let uv = x963_sha256::<72>(&sk.key, b"diversify");
    AntiTrackingPair { u: reduce_to_scalar(&uv[..36], params), v: reduce_to_scalar(&uv[36..], params) }
}

/// Rolling key pair (d_i, p_i) plus what a finder sees of it.
#[derive(Clone)]
pub struct AdvertisementKeyPair {
    index: u32,
    d: NonZeroScalar,
    p: AffinePoint,
    x: [u8; SCALAR_LEN],
    key_id: KeyId,
}

impl PartialEq for AdvertisementKeyPair {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index && self.d_bytes() == other.d_bytes() && self.x == other.x
    }
}

impl Eq for AdvertisementKeyPair {}

impl fmt::Debug for AdvertisementKeyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AdvertisementKeyPair")
            .field("index", &self.index)
            .field("key_id", &self.key_id)
            .finish_non_exhaustive()
    }
}

impl AdvertisementKeyPair {
    /// Rebuilds a pair from its private scalar, recomputing the public half.
    pub fn from_private(index: u32, d: &[u8; SCALAR_LEN]) -> Result<Self, KeyError> {
        let d = scalar_from_bytes(d).ok_or(KeyError::InvalidScalar)?;
        Ok(Self::from_scalar(index, d))
    }

    fn from_scalar(index: u32, d: NonZeroScalar) -> Self {
        let p = (ProjectivePoint::GENERATOR * *d).to_affine();
        let x: [u8; SCALAR_LEN] = p.x().into();
        Self { index, d, p, x, key_id: KeyId::from_x_bytes(&x) }
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn secret(&self) -> &NonZeroScalar {
        &self.d
    }

    pub fn d_bytes(&self) -> [u8; SCALAR_LEN] {
        self.d.to_repr().into()
    }

    pub fn public(&self) -> &AffinePoint {
        &self.p
    }

    /// Big-endian X coordinate of p_i; the advertised bytes.
    pub fn x_bytes(&self) -> &[u8; SCALAR_LEN] {
        &self.x
    }

    pub fn key_id(&self) -> KeyId {
        self.key_id
    }
}

/// d_i = d0·u + v mod q, p_i = d_i·G.
pub fn derive_pair(
    master: &MasterBeaconKey,
    at: &AntiTrackingPair,
    index: u32,
) -> Result<AdvertisementKeyPair, KeyError> {
    if index == 0 {
        return Err(KeyError::ZeroIndex);
    }
    let d: Scalar = *master.d0 * *at.u + *at.v;
    let d = Option::<NonZeroScalar>::from(NonZeroScalar::new(d)).ok_or(KeyError::DegenerateKey(index))?;
    Ok(AdvertisementKeyPair::from_scalar(index, d))
}

/// Walks the chain from SK0, yielding keys 1, 2, 3, ...
#[derive(Clone)]
pub struct KeyChain<'a> {
    master: &'a MasterBeaconKey,
    sk: SymmetricRollingKey,
}

impl<'a> KeyChain<'a> {
    pub fn new(master: &'a MasterBeaconKey) -> Self {
        Self { master, sk: SymmetricRollingKey::initial(master) }
    }

    /// Advances the symmetric chain without the point multiplication.
    pub fn skip_to(&mut self, index: u32) {
        while self.sk.index + 1 < index {
            self.sk = roll_symmetric(&self.sk);
        }
    }
}

impl Iterator for KeyChain<'_> {
    type Item = Result<AdvertisementKeyPair, KeyError>;

    fn next(&mut self) -> Option<Self::Item> {
        self.sk = roll_symmetric(&self.sk);
        let at = diversify(&self.sk, &CurveParams);
        Some(derive_pair(self.master, &at, self.sk.index))
    }
}

/// Key pair for index `i >= 1`; a pure function of (master, i).
pub fn key_at(master: &MasterBeaconKey, index: u32) -> Result<AdvertisementKeyPair, KeyError> {
    if index == 0 {
        return Err(KeyError::ZeroIndex);
    }
    let mut chain = KeyChain::new(master);
    chain.skip_to(index);
    chain.next().expect("chain is infinite")
}

/// Keys whose windows intersect `[start, end)`, or the single key at `start`
/// when `start == end`.
pub fn keys_in_window(
    master: &MasterBeaconKey,
    start: DateTime<Utc>,
    end: DateTime<Utc>,
) -> Result<Vec<AdvertisementKeyPair>, KeyError> {
    if start > end {
        return Err(KeyError::InvertedWindow { start, end });
    }
    let first = master.window_index(start)?;
    master.window_index(end)?;
    let window_ms = KEY_WINDOW_SECS * 1000;
    let end_ms = (end - master.creation_time).num_milliseconds();
    let last = u32::try_from((end_ms + window_ms - 1) / window_ms)
        .map_err(|_| KeyError::IndexOverflow)?
        .max(first);
    let mut chain = KeyChain::new(master);
    chain.skip_to(first);
    chain.take((last - first + 1) as usize).collect()
}

/// Fresh master key: d0 by rejection sampling over 28-byte strings, then SK0.
pub fn generate_master<R: RngCore + ?Sized>(
    rng: &mut R,
    creation_time: DateTime<Utc>,
) -> Result<MasterBeaconKey, KeyError> {
    let d0 = random_scalar(rng).map_err(|e| KeyError::Entropy(e.to_string()))?;
    let mut sk0 = [0u8; 32];
    rng.try_fill_bytes(&mut sk0).map_err(|e| KeyError::Entropy(e.to_string()))?;
    let p0 = (ProjectivePoint::GENERATOR * *d0).to_affine();
    Ok(MasterBeaconKey { d0, p0, sk0, creation_time })
}

/// Uniform scalar in [1, q-1]: draw 28 bytes, keep if nonzero and below q.
pub(crate) fn random_scalar<R: RngCore + ?Sized>(rng: &mut R) -> Result<NonZeroScalar, rand_core::Error> {
    loop {
        let mut buf = [0u8; SCALAR_LEN];
        rng.try_fill_bytes(&mut buf)?;
        if let Some(s) = scalar_from_bytes(&buf) {
            return Ok(s);
        }
    }
}

pub(crate) fn scalar_from_bytes(bytes: &[u8; SCALAR_LEN]) -> Option<NonZeroScalar> {
    let s: Option<Scalar> = Scalar::from_repr(FieldBytes::clone_from_slice(bytes)).into();
    NonZeroScalar::new(s?).into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;
    use findnet_oracle::{kdf as okdf, keychain as ochain, p224 as op224};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn t0() -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2020, 9, 1, 12, 0, 0).unwrap()
    }

    fn master(seed: u64) -> MasterBeaconKey {
        generate_master(&mut ChaCha20Rng::seed_from_u64(seed), t0()).unwrap()
    }

    fn scalar_big(s: &NonZeroScalar) -> BigUint {
        BigUint::from_bytes_be(&s.to_repr())
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        assert_eq!(master(0), master(0));
        assert_ne!(master(0).d0_bytes(), master(1).d0_bytes());
    }

    #[test]
    fn p0_matches_double_and_add() {
        let m = master(7);
        let (x, y) = op224::mul_base(&BigUint::from_bytes_be(&m.d0_bytes())).unwrap();
        assert_eq!(op224::to_be(&x, 28), m.p0().x().to_vec());
        let encoded = p224::elliptic_curve::sec1::ToEncodedPoint::to_encoded_point(m.p0(), false);
        assert_eq!(&encoded.as_bytes()[29..], op224::to_be(&y, 28).as_slice());
    }

    struct BrokenRng;
    impl rand_core::RngCore for BrokenRng {
        fn next_u32(&mut self) -> u32 {
            unreachable!()
        }
        fn next_u64(&mut self) -> u64 {
            unreachable!()
        }
        fn fill_bytes(&mut self, _: &mut [u8]) {
            unreachable!()
        }
        fn try_fill_bytes(&mut self, _: &mut [u8]) -> Result<(), rand_core::Error> {
            Err(rand_core::Error::new("unplugged"))
        }
    }

    #[test]
    fn entropy_failure_is_reported() {
        assert!(matches!(generate_master(&mut BrokenRng, t0()), Err(KeyError::Entropy(_))));
    }

    #[test]
    fn roll_matches_x963_oracle() {
        let zero = SymmetricRollingKey { index: 0, key: [0; 32] };
        let once = roll_symmetric(&zero);
        assert_eq!(once.index, 1);
        assert_eq!(once.key.to_vec(), okdf::x963_sha256(&[0; 32], b"update", 32));

        let mut expected = vec![0u8; 32];
        let mut sk = zero;
        for _ in 0..3 {
            expected = okdf::x963_sha256(&expected, b"update", 32);
            sk = roll_symmetric(&sk);
        }
        assert_eq!(sk.key.to_vec(), expected);
        assert_eq!(sk.index, 3);
    }

    #[test]
    fn diversify_matches_oracle_reduction() {
        let sk = SymmetricRollingKey { index: 1, key: [0; 32] };
        let at = diversify(&sk, &CurveParams);
        let raw = okdf::x963_sha256(&[0; 32], b"diversify", 72);
        assert_eq!(scalar_big(&at.u), ochain::reduce(&raw[..36]));
        assert_eq!(scalar_big(&at.v), ochain::reduce(&raw[36..]));
    }

    #[test]
    fn reduction_edge_values() {
        let q = CurveParams.order().clone();
        let to36 = |n: &BigUint| {
            let b = n.to_bytes_be();
            let mut out = vec![0u8; 36 - b.len()];
            out.extend_from_slice(&b);
            out
        };
        // (q-1) mod (q-1) + 1 = 1
        assert_eq!(scalar_big(&reduce_to_scalar(&to36(&(&q - 1u32)), &CurveParams)), BigUint::from(1u32));
        // 0 -> 1, q-2 -> q-1, q -> 2
        assert_eq!(scalar_big(&reduce_to_scalar(&[0u8; 36], &CurveParams)), BigUint::from(1u32));
        assert_eq!(scalar_big(&reduce_to_scalar(&to36(&(&q - 2u32)), &CurveParams)), &q - 1u32);
        assert_eq!(scalar_big(&reduce_to_scalar(&to36(&q), &CurveParams)), BigUint::from(2u32));
        // all-ones 36 bytes stays in range
        let top = scalar_big(&reduce_to_scalar(&[0xff; 36], &CurveParams));
        assert!(top >= BigUint::from(1u32) && top < q);
    }

    #[test]
    fn derive_pair_identity_multiplier() {
        let m = master(3);
        let one = NonZeroScalar::new(Scalar::ONE).unwrap();
        let k = derive_pair(&m, &AntiTrackingPair::from_scalars(one, one), 1).unwrap();
        let expected = (BigUint::from_bytes_be(&m.d0_bytes()) + 1u32) % CurveParams.order();
        assert_eq!(BigUint::from_bytes_be(&k.d_bytes()), expected);
    }

    #[test]
    fn derive_pair_signals_degenerate_key() {
        // d0 = q-1, u = 1, v = 1  =>  d = q ≡ 0
        let q1 = op224::to_be(&(CurveParams.order() - 1u32), 28);
        let m = MasterBeaconKey::from_parts(&q1.try_into().unwrap(), [0; 32], t0()).unwrap();
        let one = NonZeroScalar::new(Scalar::ONE).unwrap();
        let err = derive_pair(&m, &AntiTrackingPair::from_scalars(one, one), 9).unwrap_err();
        assert_eq!(err, KeyError::DegenerateKey(9));
    }

    #[test]
    fn derive_pair_matches_point_oracle() {
        let m = master(11);
        let sk = roll_symmetric(&SymmetricRollingKey::initial(&m));
        let at = diversify(&sk, &CurveParams);
        let k = derive_pair(&m, &at, 1).unwrap();
        let d = (BigUint::from_bytes_be(&m.d0_bytes()) * scalar_big(&at.u) + scalar_big(&at.v))
            % CurveParams.order();
        let (x, _) = op224::mul_base(&d).unwrap();
        assert_eq!(k.x_bytes().to_vec(), op224::to_be(&x, 28));
        assert_eq!(k.key_id().0, okdf::sha256(k.x_bytes()));
    }

    #[test]
    fn key_at_unrolls_the_chain() {
        let m = master(5);
        let mut sk = SymmetricRollingKey::initial(&m);
        for _ in 0..5 {
            sk = roll_symmetric(&sk);
        }
        let manual = derive_pair(&m, &diversify(&sk, &CurveParams), 5).unwrap();
        assert_eq!(key_at(&m, 5).unwrap(), manual);
        assert_eq!(key_at(&m, 5).unwrap(), key_at(&m, 5).unwrap());
        assert_eq!(key_at(&m, 0), Err(KeyError::ZeroIndex));
    }

    #[test]
    fn key_at_100_matches_equation_oracle() {
        let m = master(100);
        let o = ochain::derive_one(&m.d0_bytes(), m.sk0(), 100);
        let k = key_at(&m, 100).unwrap();
        assert_eq!(k.d_bytes().to_vec(), o.d);
        assert_eq!(k.x_bytes().to_vec(), o.x);
        assert_eq!(k.key_id().0, o.key_id);
    }

    #[test]
    fn window_counts() {
        let m = master(1);
        let c = m.creation_time();
        let one = keys_in_window(&m, c, c).unwrap();
        assert_eq!(one.iter().map(|k| k.index()).collect::<Vec<_>>(), vec![1]);
        let three = keys_in_window(&m, c, c + chrono::Duration::minutes(45)).unwrap();
        assert_eq!(three.iter().map(|k| k.index()).collect::<Vec<_>>(), vec![1, 2, 3]);
        let week = keys_in_window(&m, c, c + chrono::Duration::days(7)).unwrap();
        assert_eq!(week.len(), 672);
        assert_eq!(week.last().unwrap().index(), 672);
        // mid-window start and end
        let mid = keys_in_window(&m, c + chrono::Duration::minutes(20), c + chrono::Duration::minutes(31))
            .unwrap();
        assert_eq!(mid.iter().map(|k| k.index()).collect::<Vec<_>>(), vec![2, 3]);
    }

    #[test]
    fn window_errors() {
        let m = master(1);
        let c = m.creation_time();
        let early = c - chrono::Duration::seconds(1);
        assert!(matches!(keys_in_window(&m, early, c), Err(KeyError::TimeBeforeCreation { .. })));
        assert!(matches!(
            keys_in_window(&m, c + chrono::Duration::hours(1), c),
            Err(KeyError::InvertedWindow { .. })
        ));
    }

    #[test]
    fn thousand_keys_are_distinct_on_curve_and_in_range() {
        let m = master(42);
        let q = CurveParams.order();
        let mut seen = std::collections::HashSet::new();
        for k in KeyChain::new(&m).take(1000) {
            let k = k.unwrap();
            let d = BigUint::from_bytes_be(&k.d_bytes());
            assert!(d >= BigUint::from(1u32) && &d < q);
            let enc = p224::elliptic_curve::sec1::ToEncodedPoint::to_encoded_point(k.public(), false);
            let x = BigUint::from_bytes_be(&enc.as_bytes()[1..29]);
            let y = BigUint::from_bytes_be(&enc.as_bytes()[29..]);
            assert!(op224::on_curve(&x, &y));
            assert_eq!(k.key_id().0, okdf::sha256(k.x_bytes()));
            assert!(seen.insert(*k.x_bytes()), "duplicate x at index {}", k.index());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn anti_tracking_scalars_in_range(key in proptest::array::uniform32(any::<u8>())) {
            let at = diversify(&SymmetricRollingKey { index: 1, key }, &CurveParams);
            let q = CurveParams.order();
            for s in [at.u, at.v] {
                let n = scalar_big(&s);
                prop_assert!(n >= BigUint::from(1u32) && &n < q);
            }
        }

        #[test]
        fn key_id_round_trips_base64(bytes in proptest::array::uniform32(any::<u8>())) {
            let id = KeyId(bytes);
            prop_assert_eq!(KeyId::from_base64(&id.to_base64()), Some(id));
        }
    }
}
