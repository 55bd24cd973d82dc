use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered set of site indices defining the kept side `A` of a bipartition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsystemMask {
    sites: Vec<usize>,
}

impl SubsystemMask {
    /// Builds a mask from strictly increasing, non-empty site indices.
    pub fn new(sites: Vec<usize>) -> Result<Self> {
        if sites.is_empty() || sites.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMask);
        }
        Ok(Self { sites })
    }

    /// Contiguous window of `len` sites starting at `start` on a ring of
    /// `num_qubits` sites; wraps around the boundary.
    pub fn contiguous(start: usize, len: usize, num_qubits: usize) -> Result<Self> {
        if len == 0 || len > num_qubits || start >= num_qubits {
            return Err(Error::InvalidMask);
        }
        let mut sites: Vec<usize> = (0..len).map(|i| (start + i) % num_qubits).collect();
        sites.sort_unstable();
        Self::new(sites)
    }

    /// All `num_qubits` contiguous windows of `len` sites on the ring.
    pub fn all_windows(len: usize, num_qubits: usize) -> Result<Vec<Self>> {
        (0..num_qubits)
            .map(|s| Self::contiguous(s, len, num_qubits))
            .collect()
    }

    /// All size-`len` subsets of `0..num_qubits` in lexicographic order.
    pub fn all_subsets(len: usize, num_qubits: usize) -> Result<Vec<Self>> {
        if len == 0 || len > num_qubits {
            return Err(Error::InvalidMask);
        }
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..len).collect();
        loop {
            out.push(Self {
                sites: current.clone(),
            });
            // Advance to the next combination.
            let mut i = len;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                if current[i] != i + num_qubits - len {
                    break;
                }
                if i == 0 {
                    return Ok(out);
                }
            }
            current[i] += 1;
            for j in i + 1..len {
                current[j] = current[j - 1] + 1;
            }
        }
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, site: usize) -> bool {
        self.sites.binary_search(&site).is_ok()
    }

    pub fn max_site(&self) -> usize {
        *self.sites.last().unwrap()
    }

    /// Sites of `0..num_qubits` not in this mask.
    pub fn complement(&self, num_qubits: usize) -> Result<Vec<usize>> {
        if self.max_site() >= num_qubits {
            return Err(Error::SiteOutOfRange {
                site: self.max_site(),
                num_qubits,
            });
        }
        Ok((0..num_qubits).filter(|s| !self.contains(*s)).collect())
    }

    /// Position of `site` within the kept subsystem's own register.
    pub fn position_of(&self, site: usize) -> Option<usize> {
        self.sites.binary_search(&site).ok()
    }
}

/// Index plan for a bipartition: spreads reduced-register indices back into
/// full-register basis indices.
///
/// With site 0 as the most significant bit, a full index decomposes as
/// `i = kept_spread[a] | rest_spread[b]` where `a` runs over the kept
/// subsystem's basis (its first site most significant) and `b` over the rest.
pub struct MaskPlan {
    pub num_qubits: usize,
    pub kept: usize,
    pub kept_spread: Vec<usize>,
    pub rest_spread: Vec<usize>,
}

impl MaskPlan {
    pub fn new(mask: &SubsystemMask, num_qubits: usize) -> Result<Self> {
        if mask.max_site() >= num_qubits {
            return Err(Error::SiteOutOfRange {
                site: mask.max_site(),
                num_qubits,
            });
        }
        let kept = mask.len();
        let rest_sites = mask.complement(num_qubits)?;
        let spread = |sites: &[usize]| -> Vec<usize> {
            let k = sites.len();
            (0..1usize << k)
                .map(|idx| {
                    let mut full = 0usize;
                    for (pos, &site) in sites.iter().enumerate() {
                        if (idx >> (k - 1 - pos)) & 1 == 1 {
                            full |= 1 << (num_qubits - 1 - site);
                        }
                    }
                    full
                })
                .collect()
        };
        Ok(Self {
            num_qubits,
            kept,
            kept_spread: spread(mask.sites()),
            rest_spread: spread(&rest_sites),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unsorted_and_empty() {
        assert!(SubsystemMask::new(vec![]).is_err());
        assert!(SubsystemMask::new(vec![2, 1]).is_err());
        assert!(SubsystemMask::new(vec![1, 1]).is_err());
        assert!(SubsystemMask::new(vec![0, 3]).is_ok());
    }

    #[test]
    fn wrapping_window_sorts_sites() {
        let m = SubsystemMask::contiguous(3, 2, 4).unwrap();
        assert_eq!(m.sites(), &[0, 3]);
        let all = SubsystemMask::all_windows(2, 4).unwrap();
        assert_eq!(all.len(), 4);
    }

    #[test]
    fn subsets_enumerate_binomially() {
        let subsets = SubsystemMask::all_subsets(2, 4).unwrap();
        assert_eq!(subsets.len(), 6);
        assert_eq!(subsets[0].sites(), &[0, 1]);
        assert_eq!(subsets[5].sites(), &[2, 3]);
    }

    #[test]
    fn plan_spreads_bits_to_sites() {
        // Keep sites {0, 2} of 3 qubits: kept index bit 0 (MSB of the reduced
        // register) lands on full bit for site 0, i.e. 1 << 2.
        let mask = SubsystemMask::new(vec![0, 2]).unwrap();
        let plan = MaskPlan::new(&mask, 3).unwrap();
        assert_eq!(plan.kept_spread, vec![0b000, 0b001, 0b100, 0b101]);
        assert_eq!(plan.rest_spread, vec![0b000, 0b010]);
    }
}
