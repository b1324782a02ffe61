//! Seeded payload synthesis for the workload x group matrix.

use lumos_core::{fnv1a64, PayloadGroup, SplitMix64, WorkloadId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratedPayload {
    Bytes(Vec<u8>),
    IntegerN(u64),
}

impl GeneratedPayload {
    pub fn as_bytes(&self) -> Option<&[u8]> {
        match self {
            GeneratedPayload::Bytes(b) => Some(b),
            GeneratedPayload::IntegerN(_) => None,
        }
    }
}

/// Deterministic payload for (workload, group, seed). Byte-sized workloads
/// get exactly the group's byte count; integer-sized workloads get the
/// group's N. The seed is mixed with the workload name so the same seed
/// yields distinct payloads per workload.
pub fn generate_payload(workload: WorkloadId, group: PayloadGroup, seed: u64) -> GeneratedPayload {
    if workload.is_integer_sized() {
        return GeneratedPayload::IntegerN(group.integer_n());
    }
    let size = group.payload_bytes();
    let mut rng = SplitMix64::new(seed ^ fnv1a64(workload.name().as_bytes()));
    let bytes = match workload {
        WorkloadId::FuzzySearch | WorkloadId::LanguageDetection => printable_text(&mut rng, size),
        _ => {
            let mut buf = vec![0u8; size];
            rng.fill(&mut buf);
            buf
        }
    };
    GeneratedPayload::Bytes(bytes)
}

/// Lowercase pseudo-words of 2..=9 letters separated by single spaces,
/// truncated to exactly `size` bytes.
fn printable_text(rng: &mut SplitMix64, size: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(size + 16);
    while out.len() < size {
        if !out.is_empty() {
            out.push(b' ');
        }
        let word_len = 2 + rng.next_below(8) as usize;
        for _ in 0..word_len {
            out.push(b'a' + rng.next_below(26) as u8);
        }
    }
    out.truncate(size);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_workloads_return_table_n() {
        assert_eq!(
            generate_payload(WorkloadId::Fibonacci, PayloadGroup::G1, 99),
            GeneratedPayload::IntegerN(10_000)
        );
        assert_eq!(
            generate_payload(WorkloadId::PrimeNumbers, PayloadGroup::G3, 0),
            GeneratedPayload::IntegerN(1_000_000)
        );
    }

    #[test]
    fn byte_workloads_return_exact_group_size() {
        let p = generate_payload(WorkloadId::EncryptMessage, PayloadGroup::G3, 7);
        assert_eq!(p.as_bytes().unwrap().len(), 2_097_152);
        let p = generate_payload(WorkloadId::AudioGeneration, PayloadGroup::G1, 7);
        assert_eq!(p.as_bytes().unwrap().len(), 524_288);
    }

    #[test]
    fn same_inputs_byte_identical() {
        for w in [WorkloadId::FuzzySearch, WorkloadId::MandelbrotBitmap] {
            let a = generate_payload(w, PayloadGroup::G1, 42);
            let b = generate_payload(w, PayloadGroup::G1, 42);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn different_seeds_differ() {
        let a = generate_payload(WorkloadId::EncryptMessage, PayloadGroup::G1, 1);
        let b = generate_payload(WorkloadId::EncryptMessage, PayloadGroup::G1, 2);
        assert_ne!(a, b);
    }

    #[test]
    fn text_payloads_are_printable_with_tokens() {
        let p = generate_payload(WorkloadId::FuzzySearch, PayloadGroup::G1, 3);
        let bytes = p.as_bytes().unwrap();
        assert!(bytes
            .iter()
            .all(|&b| b == b' ' || b.is_ascii_lowercase()));
        assert!(bytes.iter().filter(|&&b| b == b' ').count() > 1000);
    }
}
