//! Dehn's algorithm for surface groups of genus ≥ 2.
//!
//! The relator `R = ∏[a_i, b_i]` has length `4g` and its pieces have length 1,
//! so any freely reduced word representing a central element contains more
//! than half of a cyclic rotation of `R^{±1}`. Each replacement strictly
//! shortens the word; extracting `R` adds +1 to the central coordinate and
//! extracting `R⁻¹` adds -1.

use super::word::{free_reduce, Letter, SurfaceWord};

pub(crate) struct RelatorTable {
    half: usize,
    /// Every cyclic rotation of `R` (tagged +1) and of `R⁻¹` (tagged -1).
    rotations: Vec<(Vec<Letter>, i64)>,
}

impl RelatorTable {
    pub(crate) fn new(genus: usize) -> Self {
        let r = SurfaceWord::relator(genus);
        let mut rotations = Vec::with_capacity(8 * genus);
        for (word, sign) in [
            (r.letters().to_vec(), 1),
            (r.inverse().letters().to_vec(), -1),
        ] {
            for k in 0..word.len() {
                let mut rot = word[k..].to_vec();
                rot.extend_from_slice(&word[..k]);
                rotations.push((rot, sign));
            }
        }
        RelatorTable {
            half: 2 * genus,
            rotations,
        }
    }

    /// Longest match at `w[i..]` against any rotation, if it exceeds half the relator.
    fn best_match(&self, w: &[Letter], i: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for (idx, (rot, _)) in self.rotations.iter().enumerate() {
            let len = rot.iter().zip(&w[i..]).take_while(|(a, b)| a == b).count();
            if len > self.half && best.is_none_or(|(l, _)| len > l) {
                best = Some((len, idx));
            }
        }
        best
    }

    /// Freely reduces `letters` and applies Dehn replacements until none
    /// apply. Returns the reduced word and the accumulated central shift.
    pub(crate) fn reduce(&self, letters: Vec<Letter>) -> (Vec<Letter>, i64) {
        let mut w = free_reduce(letters);
        let mut shift = 0i64;
        'outer: loop {
            for i in 0..w.len() {
                if let Some((len, idx)) = self.best_match(&w, i) {
                    let (rot, sign) = &self.rotations[idx];
                    let replacement = rot[len..].iter().rev().map(|l| l.inv());
                    let mut next: Vec<Letter> = w[..i].to_vec();
                    next.extend(replacement);
                    next.extend_from_slice(&w[i + len..]);
                    debug_assert!(next.len() < w.len());
                    w = free_reduce(next);
                    shift += sign;
                    continue 'outer;
                }
            }
            return (w, shift);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relator_reduces_to_one_unit_of_area() {
        for g in 2..=4 {
            let table = RelatorTable::new(g);
            let (w, shift) = table.reduce(SurfaceWord::relator(g).letters().to_vec());
            assert!(w.is_empty());
            assert_eq!(shift, 1);
            let (w, shift) = table.reduce(SurfaceWord::relator(g).inverse().letters().to_vec());
            assert!(w.is_empty());
            assert_eq!(shift, -1);
        }
    }

    #[test]
    fn short_words_are_untouched() {
        let table = RelatorTable::new(2);
        let w = SurfaceWord::parse(2, "a1 b1 a1^-1 b1^-1").unwrap();
        assert_eq!(
            table.reduce(w.letters().to_vec()),
            (w.letters().to_vec(), 0)
        );
    }

    #[test]
    fn replacement_uses_the_complement() {
        // Five letters of R: a1 b1 a1^-1 b1^-1 a2 = J · (b2 a2^-1 b2^-1)^-1 = J · b2 a2 b2^-1.
        let table = RelatorTable::new(2);
        let w = SurfaceWord::parse(2, "a1 b1 a1^-1 b1^-1 a2").unwrap();
        let (out, shift) = table.reduce(w.letters().to_vec());
        assert_eq!(SurfaceWord::from_reduced(2, out).to_string(), "b2 a2 b2^-1");
        assert_eq!(shift, 1);
    }
}
