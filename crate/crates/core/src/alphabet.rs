//! Quotient/reminder split of byte symbols and the unrepresented-symbol
//! exclusion.

use crate::error::{Error, Result};
use crate::source::{SymbolDistribution, ALPHABET_SIZE};

/// Largest supported shift. At 8 every symbol is stored as a reminder.
pub const MAX_SHIFT: u8 = 8;

#[inline]
pub fn quotient(x: u8, shift: u8) -> u8 {
    ((x as u16) >> shift) as u8
}

#[inline]
pub fn reminder(x: u8, shift: u8) -> u8 {
    ((x as u16) & ((1u16 << shift) - 1)) as u8
}

const NONE: u16 = u16::MAX;

/// Inverse of the split: `(q << S) | r`.
#[inline]
pub fn join(q: u8, r: u8, shift: u8) -> u8 {
    (((q as u16) << shift) | r as u16) as u8
}

/// The represented quotients of a source after shifting and exclusion.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientAlphabet {
    shift: u8,
    /// `(quotient value, probability)` by rank, most probable first.
    quotients: Vec<(u8, f64)>,
    /// Byte symbols whose quotient is not represented.
    excluded: [bool; ALPHABET_SIZE],
    p_escape: f64,
    /// rank by quotient value, `NONE` for unrepresented quotients
    rank_of: [u16; ALPHABET_SIZE],
}

impl QuotientAlphabet {
    /// Assembles an alphabet from quotients already in rank order.
    pub fn from_ranked(shift: u8, quotients: Vec<(u8, f64)>, excluded_quotients: &[u8]) -> Result<Self> {
        if shift > MAX_SHIFT {
            return Err(Error::InvalidParameters(format!("shift {shift} exceeds {MAX_SHIFT}")));
        }
        let q_count = 1usize << (8 - shift);
        if quotients.is_empty() {
            return Err(Error::InvalidParameters("alphabet has no quotients".into()));
        }
        let mut rank_of = [NONE; ALPHABET_SIZE];
        for (rank, &(q, _)) in quotients.iter().enumerate() {
            if q as usize >= q_count || rank_of[q as usize] != NONE {
                return Err(Error::InvalidParameters(format!(
                    "quotient {q} is out of range or repeated"
                )));
            }
            rank_of[q as usize] = rank as u16;
        }
        let mut excluded = [false; ALPHABET_SIZE];
        for &q in excluded_quotients {
            if q as usize >= q_count || rank_of[q as usize] != NONE {
                return Err(Error::InvalidParameters(format!(
                    "excluded quotient {q} is out of range or represented"
                )));
            }
        }
        for (x, slot) in excluded.iter_mut().enumerate() {
            if rank_of[quotient(x as u8, shift) as usize] == NONE {
                *slot = true;
            }
        }
        let total: f64 = quotients.iter().map(|&(_, p)| p).sum();
        Ok(Self {
            shift,
            quotients,
            excluded,
            p_escape: (1.0 - total).max(0.0),
            rank_of,
        })
    }

    pub fn shift(&self) -> u8 {
        self.shift
    }

    /// Number of represented quotients.
    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    pub fn quotients(&self) -> &[(u8, f64)] {
        &self.quotients
    }

    pub fn value_of_rank(&self, rank: usize) -> u8 {
        self.quotients[rank].0
    }

    pub fn rank_of(&self, quotient: u8) -> Option<usize> {
        match self.rank_of[quotient as usize] {
            NONE => None,
            r => Some(r as usize),
        }
    }

    /// The most probable represented quotient; escaped positions are parsed
    /// as this value.
    pub fn placeholder(&self) -> u8 {
        self.quotients[0].0
    }

    pub fn p_escape(&self) -> f64 {
        self.p_escape
    }

    pub fn is_excluded(&self, symbol: u8) -> bool {
        self.excluded[symbol as usize]
    }

    pub fn excluded_mask(&self) -> &[bool; ALPHABET_SIZE] {
        &self.excluded
    }

    /// Byte symbols routed to the escape section.
    pub fn excluded_symbols(&self) -> Vec<u8> {
        (0..ALPHABET_SIZE)
            .filter(|&x| self.excluded[x])
            .map(|x| x as u8)
            .collect()
    }

    /// Quotient values that are not represented.
    pub fn excluded_quotients(&self) -> Vec<u8> {
        let q_count = 1usize << (8 - self.shift);
        (0..q_count)
            .filter(|&q| self.rank_of[q] == NONE)
            .map(|q| q as u8)
            .collect()
    }

    /// Rank of the quotient the parser sees for byte `x` (the placeholder's
    /// rank for escaped symbols).
    pub fn parse_rank(&self, x: u8) -> usize {
        match self.rank_of[quotient(x, self.shift) as usize] {
            NONE => 0,
            r => r as usize,
        }
    }

    /// Per-rank probabilities of the quotient stream the parser actually
    /// sees: escaped positions carry the placeholder.
    pub fn coding_probs(&self) -> Vec<f64> {
        let mut p: Vec<f64> = self.quotients.iter().map(|&(_, p)| p).collect();
        p[0] += self.p_escape;
        let sum: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= sum);
        p
    }

    /// Per-rank parse probabilities and escape mass of another source under
    /// this alphabet's fixed split, ranking and exclusions.
    pub fn reweigh(&self, dist: &SymbolDistribution) -> (Vec<f64>, f64) {
        let mut p = vec![0.0; self.quotients.len()];
        let mut escape = 0.0;
        for (x, &px) in dist.probs().iter().enumerate() {
            if self.excluded[x] {
                escape += px;
            } else {
                p[self.rank_of[quotient(x as u8, self.shift) as usize] as usize] += px;
            }
        }
        p[0] += escape;
        (p, escape)
    }
}

/// Splits `dist` into quotients at shift `shift` and excludes quotients whose
/// probability falls below `threshold`.
pub fn split_alphabet(dist: &SymbolDistribution, shift: u8, threshold: f64) -> Result<QuotientAlphabet> {
    if shift > MAX_SHIFT {
        return Err(Error::InvalidParameters(format!("shift {shift} exceeds {MAX_SHIFT}")));
    }
    if !(0.0..1.0).contains(&threshold) {
        return Err(Error::InvalidParameters(format!(
            "threshold {threshold} outside [0, 1)"
        )));
    }
    let q_count = 1usize << (8 - shift);
    let mut mass = vec![0.0; q_count];
    for (x, &p) in dist.probs().iter().enumerate() {
        mass[quotient(x as u8, shift) as usize] += p;
    }
    let mut represented: Vec<(u8, f64)> = Vec::new();
    let mut excluded = Vec::new();
    for (q, &p) in mass.iter().enumerate() {
        if p < threshold {
            excluded.push(q as u8);
        } else {
            represented.push((q as u8, p));
        }
    }
    if represented.is_empty() {
        return Err(Error::AllExcluded(threshold));
    }
    // stable: equal probabilities keep ascending quotient order
    represented.sort_by(|a, b| b.1.total_cmp(&a.1));
    QuotientAlphabet::from_ranked(shift, represented, &excluded)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotient_and_reminder_of_119() {
        assert_eq!(quotient(119, 3), 14);
        assert_eq!(reminder(119, 3), 7);
        assert_eq!(join(14, 7, 3), 119);
    }

    #[test]
    fn split_inverts_for_every_symbol_and_shift() {
        for shift in 0..=8u8 {
            for x in 0..=255u8 {
                assert_eq!(join(quotient(x, shift), reminder(x, shift), shift), x);
            }
        }
    }

    #[test]
    fn zero_shift_keeps_bytes() {
        let d = SymbolDistribution::uniform();
        let a = split_alphabet(&d, 0, 0.0).unwrap();
        assert_eq!(a.len(), 256);
        assert!(a.excluded_symbols().is_empty());
        assert_eq!(a.p_escape(), 0.0);
    }

    #[test]
    fn rare_symbol_is_excluded() {
        let mut p = vec![0.0; 256];
        p[0] = 0.9;
        p[1] = 0.099;
        p[255] = 0.001;
        let d = SymbolDistribution::new(&p).unwrap();
        let a = split_alphabet(&d, 0, 0.01).unwrap();
        assert_eq!(a.excluded_symbols().last(), Some(&255));
        assert!(a.is_excluded(255) && !a.is_excluded(0) && !a.is_excluded(1));
        assert!((a.p_escape() - 0.001).abs() < 1e-15);
        assert_eq!(a.placeholder(), 0);
        assert_eq!(a.len(), 2);
        let total: f64 = a.quotients().iter().map(|q| q.1).sum::<f64>() + a.p_escape();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn threshold_that_excludes_everything_fails() {
        let d = SymbolDistribution::uniform();
        assert!(matches!(split_alphabet(&d, 0, 0.5), Err(Error::AllExcluded(_))));
    }

    #[test]
    fn full_shift_leaves_a_single_quotient() {
        let a = split_alphabet(&SymbolDistribution::uniform(), 8, 0.0).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a.placeholder(), 0);
    }

    #[test]
    fn escaped_mass_is_parsed_as_the_placeholder() {
        let mut p = vec![0.0; 256];
        p[3] = 0.6;
        p[4] = 0.3;
        p[9] = 0.1;
        let d = SymbolDistribution::new(&p).unwrap();
        let a = split_alphabet(&d, 0, 0.2).unwrap();
        let probs = a.coding_probs();
        assert!((probs[0] - 0.7).abs() < 1e-12);
        assert_eq!(a.parse_rank(9), 0);
        let (re, esc) = a.reweigh(&d);
        assert!((esc - 0.1).abs() < 1e-12);
        assert!((re[0] - 0.7).abs() < 1e-12);
    }
}
