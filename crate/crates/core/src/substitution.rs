//! Substitutions (non-erasing endomorphisms of a free monoid).

use std::collections::{BTreeSet, HashSet};

use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::IntegerMatrix;
use crate::words::{Alphabet, GroupWord, Letter, MonoidWord, SymbolTable};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Substitution {
    images: Vec<MonoidWord>,
}

/// Least `n` such that all images of the `n`-th power start with `first` and
/// end with `last`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProperWitness {
    pub power: usize,
    pub first: Letter,
    pub last: Letter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AperiodicityReason {
    /// Primitive with incidence determinant ±1.
    PrimitiveUnimodular,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PeriodicityEvidence {
    /// Factor complexity satisfies `p(n) <= n` at `witness_length = n`.
    PeriodicProven {
        period: MonoidWord,
        witness_length: usize,
    },
    AperiodicProven { reason: AperiodicityReason },
    /// `p(n) >= n + 1` was checked for every `n <= bound`.
    AperiodicUpTo { bound: usize },
}

impl PeriodicityEvidence {
    pub fn is_periodic(&self) -> bool {
        matches!(self, PeriodicityEvidence::PeriodicProven { .. })
    }

    pub fn is_conclusive(&self) -> bool {
        !matches!(self, PeriodicityEvidence::AperiodicUpTo { .. })
    }
}

impl Substitution {
    pub fn new(images: Vec<MonoidWord>) -> Result<Self> {
        let alphabet = Alphabet::new(images.len())?;
        for (a, image) in images.iter().enumerate() {
            if image.is_empty() {
                return Err(Error::ErasingImage(a));
            }
            image.check(alphabet)?;
        }
        Ok(Substitution { images })
    }

    /// Builds a substitution from images written over the standard symbols.
    pub fn from_words(images: &[&str]) -> Result<Self> {
        let table = SymbolTable::standard();
        let images = images
            .iter()
            .map(|w| table.parse_monoid(w))
            .collect::<Result<Vec<_>>>()?;
        Substitution::new(images)
    }

    pub fn identity(size: usize) -> Result<Self> {
        Substitution::new((0..size).map(|a| MonoidWord::new(vec![a])).collect())
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.images.len()).expect("non-empty by construction")
    }

    pub fn size(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, letter: Letter) -> &MonoidWord {
        &self.images[letter]
    }

    pub fn images(&self) -> &[MonoidWord] {
        &self.images
    }

    pub fn apply(&self, w: &[Letter]) -> MonoidWord {
        let mut out = Vec::new();
        for &a in w {
            out.extend_from_slice(&self.images[a]);
        }
        MonoidWord::new(out)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Substitution) -> Result<Substitution> {
        if self.size() != other.size() {
            return Err(Error::AlphabetMismatch {
                expected: self.size(),
                found: other.size(),
            });
        }
        Substitution::new(other.images.iter().map(|w| self.apply(w)).collect())
    }

    pub fn power(&self, n: usize) -> Substitution {
        let mut acc = Substitution::identity(self.size()).expect("non-empty");
        for _ in 0..n {
            acc = self.compose(&acc).expect("same alphabet");
        }
        acc
    }

    /// `φ^n(w)` without materialising the power.
    pub fn iterate(&self, w: &[Letter], n: usize) -> MonoidWord {
        let mut cur = MonoidWord::from(w);
        for _ in 0..n {
            cur = self.apply(&cur);
        }
        cur
    }

    pub fn incidence_matrix(&self) -> IntegerMatrix {
        let n = self.size();
        let mut m = IntegerMatrix::zeros(n);
        for (a, image) in self.images.iter().enumerate() {
            for b in 0..n {
                m.set(a, b, image.count(b).into());
            }
        }
        m
    }

    pub fn to_group_images(&self) -> Vec<GroupWord> {
        self.images.iter().map(|w| w.to_group_word()).collect()
    }

    /// Least `n` with every letter occurring in every `φ^n(a)`, searched up to
    /// the Wielandt bound `(|A| - 1)^2 + 1`. `None` if not primitive.
    pub fn primitivity_exponent(&self) -> Option<usize> {
        let n = self.size();
        if n == 1 {
            return (self.images[0].len() > 1).then_some(1);
        }
        let step: Vec<Vec<bool>> = self
            .images
            .iter()
            .map(|w| (0..n).map(|b| w.contains(&b)).collect())
            .collect();
        let mut power = step.clone();
        let bound = (n - 1) * (n - 1) + 1;
        for k in 1..=bound {
            if power.iter().all(|row| row.iter().all(|&x| x)) {
                return Some(k);
            }
            power = bool_mul(&power, &step);
        }
        None
    }

    pub fn is_primitive(&self) -> bool {
        self.primitivity_exponent().is_some()
    }

    pub fn first_letter_map(&self) -> Vec<Letter> {
        self.images.iter().map(|w| w[0]).collect()
    }

    pub fn last_letter_map(&self) -> Vec<Letter> {
        self.images.iter().map(|w| w[w.len() - 1]).collect()
    }

    /// Factors of length exactly `len` of the language, for primitive input.
    pub fn factors_of_length(&self, len: usize) -> Result<HashSet<Vec<Letter>>> {
        if !self.is_primitive() {
            return Err(Error::NotPrimitive);
        }
        let mut seed = MonoidWord::new(vec![0]);
        while seed.len() < len.max(1) {
            seed = self.apply(&seed);
        }
        let mut found: HashSet<Vec<Letter>> = HashSet::new();
        let mut queue: Vec<Vec<Letter>> = Vec::new();
        let add = |w: &[Letter], found: &mut HashSet<Vec<Letter>>, queue: &mut Vec<Vec<Letter>>| {
            if len == 0 {
                found.insert(Vec::new());
                return;
            }
            for window in w.windows(len) {
                if found.insert(window.to_vec()) {
                    queue.push(window.to_vec());
                }
            }
        };
        add(&seed, &mut found, &mut queue);
        // the images of the length-`len` factors of φ^n(a) contain every
        // length-`len` factor of φ^(n+1)(a)
        while let Some(w) = queue.pop() {
            let image = self.apply(&w);
            add(&image, &mut found, &mut queue);
        }
        Ok(found)
    }

    /// All factors of length at most `len` of the language, including the
    /// empty word.
    pub fn language_factors(&self, len: usize) -> Result<BTreeSet<MonoidWord>> {
        let top = self.factors_of_length(len)?;
        let mut out = BTreeSet::new();
        for w in &top {
            for i in 0..=w.len() {
                for j in i..=w.len() {
                    out.insert(MonoidWord::from(&w[i..j]));
                }
            }
        }
        out.insert(MonoidWord::empty());
        Ok(out)
    }

    pub fn is_factor(&self, w: &[Letter]) -> Result<bool> {
        Ok(self.factors_of_length(w.len())?.contains(w))
    }

    /// Properness in the conjunctive sense: some power has all images
    /// starting with one letter and ending with one letter.
    pub fn proper_witness(&self) -> Option<ProperWitness> {
        let first = self.first_letter_map();
        let last = self.last_letter_map();
        let mut f = first.clone();
        let mut l = last.clone();
        // both letter maps are eventually constant, if at all, after |A| steps
        for power in 1..=self.size().max(1) {
            let constant = |m: &[Letter]| m.iter().all(|&x| x == m[0]);
            if constant(&f) && constant(&l) {
                return Some(ProperWitness {
                    power,
                    first: f[0],
                    last: l[0],
                });
            }
            f = f.iter().map(|&a| first[a]).collect();
            l = l.iter().map(|&a| last[a]).collect();
        }
        None
    }

    pub fn is_proper(&self) -> bool {
        self.proper_witness().is_some()
    }

    /// Factor complexity `p(0), ..., p(max_len)`.
    pub fn complexity(&self, max_len: usize) -> Result<Vec<usize>> {
        let top = self.factors_of_length(max_len)?;
        let mut counts = vec![0; max_len + 1];
        counts[0] = 1;
        for n in 1..=max_len {
            let distinct: HashSet<&[Letter]> = top.iter().map(|w| &w[..n]).collect();
            counts[n] = distinct.len();
        }
        Ok(counts)
    }

    pub fn periodicity_evidence(&self, bound: usize) -> Result<PeriodicityEvidence> {
        if !self.is_primitive() {
            return Err(Error::NotPrimitive);
        }
        if self.incidence_matrix().determinant().abs().is_one() {
            return Ok(PeriodicityEvidence::AperiodicProven {
                reason: AperiodicityReason::PrimitiveUnimodular,
            });
        }
        let counts = self.complexity(bound)?;
        let Some(witness_length) = (1..=bound).find(|&n| counts[n] <= n) else {
            return Ok(PeriodicityEvidence::AperiodicUpTo { bound });
        };
        // p(m) = p(m + 1) for some m < witness_length; the Rauzy graph of
        // order m is then a single cycle spelling the period
        let m = (0..witness_length)
            .find(|&m| counts[m] == counts[m + 1])
            .expect("complexity cannot increase strictly past the witness");
        let period = self.rauzy_cycle(m)?;
        Ok(PeriodicityEvidence::PeriodicProven {
            period,
            witness_length,
        })
    }

    fn rauzy_cycle(&self, m: usize) -> Result<MonoidWord> {
        let extended = self.factors_of_length(m + 1)?;
        let start: Vec<Letter> = extended
            .iter()
            .map(|w| w[..m].to_vec())
            .min()
            .ok_or_else(|| Error::Internal("empty factor set".into()))?;
        let mut period = Vec::new();
        let mut cur = start.clone();
        let mut cur_full: Vec<Letter>;
        loop {
            cur_full = extended
                .iter()
                .find(|w| w[..m] == cur[..])
                .cloned()
                .ok_or_else(|| Error::Internal("factor without right extension".into()))?;
            period.push(cur_full[0]);
            cur = cur_full[1..].to_vec();
            if cur == start || period.len() > extended.len() {
                break;
            }
        }
        Ok(MonoidWord::new(period))
    }
}

fn bool_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).any(|k| a[i][k] && b[k][j])).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::mw;

    fn tau() -> Substitution {
        Substitution::from_words(&["01", "10"]).unwrap()
    }

    fn xi() -> Substitution {
        Substitution::from_words(&["001", "02", "301", "320"]).unwrap()
    }

    fn rho() -> Substitution {
        Substitution::from_words(&["01", "00"]).unwrap()
    }

    fn alpha() -> Substitution {
        Substitution::from_words(&["01", "0001"]).unwrap()
    }

    fn periodic() -> Substitution {
        Substitution::from_words(&["02", "21", "10"]).unwrap()
    }

    #[test]
    fn rejects_erasing_and_out_of_range() {
        assert_eq!(Substitution::from_words(&["01", ""]), Err(Error::ErasingImage(1)));
        assert!(matches!(
            Substitution::from_words(&["02", "1"]),
            Err(Error::LetterOutOfRange { letter: 2, .. })
        ));
    }

    #[test]
    fn apply_and_power() {
        assert_eq!(tau().apply(&mw("0")), mw("01"));
        let mut w = mw("1");
        w = w.concat(&xi().iterate(&mw("0"), 2));
        assert_eq!(w, mw("100100102"));
        assert!(tau().apply(&[]).is_empty());
        assert_eq!(tau().power(0), Substitution::identity(2).unwrap());
        assert_eq!(tau().power(2).image(0), &mw("0110"));
        assert_eq!(rho().power(2).image(1), &mw("0101"));
    }

    #[test]
    fn primitivity() {
        assert_eq!(tau().primitivity_exponent(), Some(1));
        assert!(xi().is_primitive());
        assert!(!Substitution::identity(1).unwrap().is_primitive());
        assert_eq!(Substitution::from_words(&["00"]).unwrap().primitivity_exponent(), Some(1));
        assert!(!Substitution::from_words(&["01", "1"]).unwrap().is_primitive());
        assert!(!Substitution::identity(3).unwrap().is_primitive());
    }

    #[test]
    fn factor_sets() {
        let f = tau().language_factors(2).unwrap();
        let expected: BTreeSet<MonoidWord> =
            ["", "0", "1", "00", "01", "10", "11"].iter().map(|w| mw(w)).collect();
        assert_eq!(f, expected);
        let three = periodic().factors_of_length(3).unwrap();
        let expected: HashSet<Vec<Letter>> =
            ["021", "210", "102"].iter().map(|w| mw(w).into_letters()).collect();
        assert_eq!(three, expected);
        assert_eq!(xi().language_factors(0).unwrap().len(), 1);
        assert_eq!(
            Substitution::identity(2).unwrap().language_factors(1),
            Err(Error::NotPrimitive)
        );
    }

    #[test]
    fn factor_sets_are_closed_and_extendable() {
        for s in [tau(), xi(), rho(), alpha()] {
            let len = 6;
            let f = s.language_factors(len).unwrap();
            for w in &f {
                for i in 0..=w.len() {
                    for j in i..=w.len() {
                        assert!(f.contains(&MonoidWord::from(&w[i..j])));
                    }
                }
                if w.len() < len {
                    assert!(f.iter().any(|x| x.len() == w.len() + 1 && x.starts_with(w)));
                }
            }
        }
    }

    #[test]
    fn factors_agree_with_direct_scan() {
        // oracle: windows of a long iterate
        for s in [tau(), xi(), rho(), alpha()] {
            let long = s.iterate(&[0], 9);
            for len in 1..6 {
                let scanned: HashSet<Vec<Letter>> =
                    long.windows(len).map(|w| w.to_vec()).collect();
                assert_eq!(s.factors_of_length(len).unwrap(), scanned);
            }
        }
    }

    #[test]
    fn incidence_matrices() {
        assert_eq!(alpha().incidence_matrix(), IntegerMatrix::from_rows(&[[1, 1], [3, 1]]));
        assert_eq!(Substitution::identity(3).unwrap().incidence_matrix(), IntegerMatrix::identity(3));
        for s in [tau(), xi(), rho(), alpha()] {
            let m = s.incidence_matrix();
            for n in 0..=5u32 {
                assert_eq!(s.power(n as usize).incidence_matrix(), m.pow(n));
            }
        }
    }

    #[test]
    fn determinants() {
        assert_eq!(alpha().incidence_matrix().determinant(), (-2).into());
        assert_eq!(xi().incidence_matrix().determinant(), (-1).into());
        assert_eq!(periodic().incidence_matrix().determinant(), (-2).into());
    }

    #[test]
    fn properness() {
        assert_eq!(
            alpha().proper_witness(),
            Some(ProperWitness { power: 1, first: 0, last: 1 })
        );
        assert!(!tau().is_proper());
        assert!(!xi().is_proper());
        assert!(!rho().is_proper());
    }

    #[test]
    fn letters_appear_early() {
        for s in [tau(), xi(), rho(), alpha()] {
            let k = s.primitivity_exponent().unwrap();
            let f = s.language_factors(s.size() * k).unwrap();
            for b in 0..s.size() {
                assert!(f.contains(&MonoidWord::new(vec![b])));
            }
        }
    }

    #[test]
    fn periodicity() {
        match periodic().periodicity_evidence(50).unwrap() {
            PeriodicityEvidence::PeriodicProven { period, witness_length } => {
                assert_eq!(period, mw("021"));
                assert_eq!(witness_length, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            xi().periodicity_evidence(50).unwrap(),
            PeriodicityEvidence::AperiodicProven { reason: AperiodicityReason::PrimitiveUnimodular }
        );
        assert_eq!(
            rho().periodicity_evidence(30).unwrap(),
            PeriodicityEvidence::AperiodicUpTo { bound: 30 }
        );
        assert_eq!(periodic().complexity(4).unwrap(), vec![1, 3, 3, 3, 3]);
    }
}
