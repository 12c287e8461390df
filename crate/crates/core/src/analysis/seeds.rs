use sha2::{Digest, Sha256};

/// Stable child seed: the first eight bytes (little endian) of
/// `SHA-256(master ‖ path[0] ‖ path[1] ‖ …)` with every integer encoded as
/// eight little-endian bytes.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    for p in path {
        hasher.update(p.to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}
