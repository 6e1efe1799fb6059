//! Splitting concatenated address labels into words with a unigram
//! rank lexicon.
//!
//! A lexicon word of 1-based frequency rank `r` costs `ln(r * ln(N))` for a
//! lexicon of `N` words. Characters not covered by lexicon words are kept as
//! unknown pieces costing [`UNKNOWN_CHAR_COST`] per character. The cheapest
//! segmentation wins; ties go to fewer pieces, then to the lexicographically
//! smaller piece list.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::math::ln;

pub const UNKNOWN_CHAR_COST: f64 = 10.0;

/// Ranked word list (most frequent first).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    ranks: BTreeMap<String, usize>,
    max_word_chars: usize,
}

impl Lexicon {
    /// Words are lowercased; a repeated word keeps its first rank.
    pub fn from_ranked<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut ranks = BTreeMap::new();
        let mut max_word_chars = 0;
        let mut next_rank = 1;
        for w in words {
            let w = w.as_ref().trim().to_lowercase();
            if w.is_empty() || ranks.contains_key(&w) {
                continue;
            }
            max_word_chars = max_word_chars.max(w.chars().count());
            ranks.insert(w, next_rank);
            next_rank += 1;
        }
        Self { ranks, max_word_chars }
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn rank(&self, word: &str) -> Option<usize> {
        self.ranks.get(word).copied()
    }

    /// Cost of a lexicon word, `None` if the word is unknown.
    ///
    /// `N` is clamped to at least 2 so that a one-word lexicon still has
    /// finite costs.
    pub fn cost(&self, word: &str) -> Option<f64> {
        let n = self.len().max(2) as f64;
        self.rank(word).map(|r| ln(r as f64 * ln(n)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Piece {
    pub text: String,
    /// Whether the piece is a lexicon word.
    pub known: bool,
}

#[derive(Debug, Clone)]
struct Candidate {
    cost: f64,
    pieces: Vec<Piece>,
}

impl Candidate {
    fn better_than(&self, other: &Candidate) -> bool {
        let ord = self
            .cost
            .total_cmp(&other.cost)
            .then(self.pieces.len().cmp(&other.pieces.len()))
            .then_with(|| {
                let a = self.pieces.iter().map(|p| p.text.as_str());
                let b = other.pieces.iter().map(|p| p.text.as_str());
                a.cmp(b)
            });
        ord == Ordering::Less
    }
}

/// Cheapest segmentation of `address` (lowercased) into pieces.
pub fn segment_address(address: &str, lexicon: &Lexicon) -> Vec<Piece> {
    let chars: Vec<char> = address.chars().flat_map(char::to_lowercase).collect();
    let n = chars.len();
    if n == 0 {
        return Vec::new();
    }
    let mut best: Vec<Option<Candidate>> = (0..=n).map(|_| None).collect();
    best[0] = Some(Candidate { cost: 0.0, pieces: Vec::new() });
    for end in 1..=n {
        let mut winner: Option<Candidate> = None;
        for start in 0..end {
            let Some(prefix) = &best[start] else { continue };
            let text: String = chars[start..end].iter().collect();
            let (cost, known) = match lexicon.cost(&text) {
                Some(c) => (c, true),
                None => (UNKNOWN_CHAR_COST * (end - start) as f64, false),
            };
            let mut pieces = prefix.pieces.clone();
            pieces.push(Piece { text, known });
            let cand = Candidate { cost: prefix.cost + cost, pieces };
            if winner.as_ref().is_none_or(|w| cand.better_than(w)) {
                winner = Some(cand);
            }
        }
        best[end] = winner;
    }
    best[n].take().map(|c| c.pieces).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    fn texts(p: &[Piece]) -> Vec<&str> {
        p.iter().map(|p| p.text.as_str()).collect()
    }

    /// Exhaustive oracle over all 2^(n-1) cut sets.
    fn brute_force(address: &str, lexicon: &Lexicon) -> Vec<Piece> {
        let chars: Vec<char> = address.chars().collect();
        let n = chars.len();
        let mut best: Option<Candidate> = None;
        for mask in 0u32..(1 << (n - 1)) {
            let mut pieces = Vec::new();
            let mut cost = 0.0;
            let mut start = 0;
            for end in 1..=n {
                if end == n || mask & (1 << (end - 1)) != 0 {
                    let text: String = chars[start..end].iter().collect();
                    let (c, known) = match lexicon.cost(&text) {
                        Some(c) => (c, true),
                        None => (UNKNOWN_CHAR_COST * (end - start) as f64, false),
                    };
                    cost += c;
                    pieces.push(Piece { text, known });
                    start = end;
                }
            }
            let cand = Candidate { cost, pieces };
            if best.as_ref().is_none_or(|b| cand.better_than(b)) {
                best = Some(cand);
            }
        }
        best.unwrap().pieces
    }

    #[test]
    fn drugmarket_splits_into_two_words() {
        let lex = Lexicon::from_ranked(["the", "market", "drug", "rug", "mark", "et"]);
        let seg = segment_address("drugmarket", &lex);
        assert_eq!(texts(&seg), vec!["drug", "market"]);
        assert_eq!(seg, brute_force("drugmarket", &lex));
    }

    #[test]
    fn single_letter_word() {
        let lex = Lexicon::from_ranked(["a", "b"]);
        assert_eq!(texts(&segment_address("a", &lex)), vec!["a"]);
    }

    #[test]
    fn unknown_run_kept_whole() {
        let lex = Lexicon::from_ranked(["drug", "shop"]);
        let seg = segment_address("zzzzzz", &lex);
        assert_eq!(seg, vec![Piece { text: "zzzzzz".into(), known: false }]);
        let seg = segment_address("zzdrugqq", &lex);
        assert_eq!(texts(&seg), vec!["zz", "drug", "qq"]);
        assert_eq!(seg.iter().filter(|p| p.known).count(), 1);
    }

    #[test]
    fn empty_address() {
        assert!(segment_address("", &Lexicon::from_ranked(["a"])).is_empty());
    }

    #[test]
    fn matches_exhaustive_oracle() {
        let lex = Lexicon::from_ranked([
            "a", "i", "on", "in", "to", "the", "drug", "drugs", "store", "tor", "market", "mark", "ark", "et", "rug",
            "weed", "shop", "hop", "best", "be", "st", "pill", "ill",
        ]);
        for addr in [
            "drugstore",
            "torshop",
            "bestweedshop",
            "pillmarketxx",
            "onthetor",
            "q7drugsz",
            "illbestrug",
            "aaaaaa",
            "marketed",
        ] {
            assert_eq!(segment_address(addr, &lex), brute_force(addr, &lex), "{addr}");
        }
    }
}
