//! Verifiable-random-function abstraction and binding commitments.
//!
//! The VRF is the simulation construction: the output value is
//! `SHA-256(sk || seed)` interpreted as a 256-bit unsigned integer divided
//! by 2^256, and the proof is a deterministic Ed25519 signature over the
//! seed concatenated with the canonical encoding of the value. A genuine
//! elliptic-curve VRF is drop-in behind the same three functions.

use ed25519_dalek::{Signature, Signer, SigningKey, VerifyingKey};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const PUBLIC_KEY_LEN: usize = 32;
pub const DIGEST_LEN: usize = 32;

/// Name of the 256-bit digest backing commitments and VRF values,
/// recorded in run metadata.
pub const HASH_PRIMITIVE: &str = "SHA-256";

/// Node keypair. The secret half never leaves this struct; the public
/// half is what gets published at registration.
#[derive(Clone)]
pub struct KeyPair {
    signing: SigningKey,
}

impl KeyPair {
    pub fn public_key(&self) -> [u8; PUBLIC_KEY_LEN] {
        self.signing.verifying_key().to_bytes()
    }

    fn secret_bytes(&self) -> [u8; 32] {
        self.signing.to_bytes()
    }
}

impl std::fmt::Debug for KeyPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KeyPair")
            .field("public_key", &hex(&self.public_key()))
            .finish_non_exhaustive()
    }
}

/// VRF output: a value in [0,1) plus a publicly checkable proof.
#[derive(Clone, Debug)]
pub struct VrfOutput {
    pub value: f64,
    pub proof: Vec<u8>,
}

/// Deterministic keypair generation from a 64-bit seed.
pub fn keygen(rng_seed: u64) -> KeyPair {
    let mut h = Sha256::new();
    h.update(b"oracle-sim/keygen/v1");
    h.update(rng_seed.to_be_bytes());
    let sk: [u8; 32] = h.finalize().into();
    KeyPair {
        signing: SigningKey::from_bytes(&sk),
    }
}

/// Interprets a 256-bit digest as an unsigned integer and divides by 2^256.
/// The result lies in [0,1]; the top end is only reachable through f64
/// rounding of near-maximal digests.
pub fn digest_to_unit(digest: &[u8; DIGEST_LEN]) -> f64 {
    digest
        .iter()
        .rev()
        .fold(0.0_f64, |acc, &b| (acc + f64::from(b)) / 256.0)
}

fn vrf_digest(seed: &[u8], key: &KeyPair) -> [u8; DIGEST_LEN] {
    let mut h = Sha256::new();
    h.update(key.secret_bytes());
    h.update(seed);
    h.finalize().into()
}

/// Cheap path: just the VRF value, no proof. Identical to
/// `vrf_evaluate(seed, key)?.value`.
pub fn vrf_value(seed: &[u8], key: &KeyPair) -> Result<f64> {
    if seed.is_empty() {
        return Err(Error::input("vrf seed must be non-empty"));
    }
    Ok(digest_to_unit(&vrf_digest(seed, key)))
}

fn proof_message(seed: &[u8], value: f64) -> Vec<u8> {
    let mut msg = Vec::with_capacity(seed.len() + 8);
    msg.extend_from_slice(seed);
    msg.extend_from_slice(&value.to_bits().to_be_bytes());
    msg
}

/// Evaluates the VRF under the node's secret key.
pub fn vrf_evaluate(seed: &[u8], key: &KeyPair) -> Result<VrfOutput> {
    let value = vrf_value(seed, key)?;
    let sig = key.signing.sign(&proof_message(seed, value));
    Ok(VrfOutput {
        value,
        proof: sig.to_bytes().to_vec(),
    })
}

/// Checks that (value, proof) was produced for `seed` by the holder of
/// `public_key`. Malformed inputs yield `false`, never an error.
pub fn vrf_verify(value: f64, proof: &[u8], seed: &[u8], public_key: &[u8]) -> bool {
    let Ok(pk_bytes) = <[u8; PUBLIC_KEY_LEN]>::try_from(public_key) else {
        return false;
    };
    let Ok(pk) = VerifyingKey::from_bytes(&pk_bytes) else {
        return false;
    };
    let Ok(sig) = Signature::from_slice(proof) else {
        return false;
    };
    pk.verify_strict(&proof_message(seed, value), &sig).is_ok()
}

/// Binding commitment to a price under a public key:
/// `SHA-256(price as 8-byte big-endian IEEE-754 binary64 || public_key)`.
pub fn commit(price: f64, public_key: &[u8]) -> Result<[u8; DIGEST_LEN]> {
    if !price.is_finite() {
        return Err(Error::input("committed price must be finite"));
    }
    let mut h = Sha256::new();
    h.update(price.to_bits().to_be_bytes());
    h.update(public_key);
    Ok(h.finalize().into())
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
