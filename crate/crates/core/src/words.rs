//! Letters, free-monoid words and reduced free-group words.
//!
//! Letters are dense indices `0..n`. A [`SymbolTable`] maps them to the
//! single-character symbols used by the textual format, where an inverse
//! letter is written as its symbol followed by an apostrophe and the empty
//! word is written `e`.

use std::fmt;
use std::ops::{Deref, Mul};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Letter = usize;

/// The alphabet `{0, ..., size - 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet {
    size: usize,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyAlphabet);
        }
        Ok(Alphabet { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn letters(&self) -> std::ops::Range<Letter> {
        0..self.size
    }

    pub fn contains(&self, letter: Letter) -> bool {
        letter < self.size
    }

    pub fn check(&self, letter: Letter) -> Result<()> {
        if self.contains(letter) {
            Ok(())
        } else {
            Err(Error::LetterOutOfRange {
                letter,
                size: self.size,
            })
        }
    }
}

/// A word of the free monoid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonoidWord(Vec<Letter>);

impl MonoidWord {
    pub fn empty() -> Self {
        MonoidWord(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Self {
        MonoidWord(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn concat(&self, other: &MonoidWord) -> MonoidWord {
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        MonoidWord(letters)
    }

    /// Start positions of every occurrence of `pattern`, in increasing order.
    pub fn occurrences(&self, pattern: &[Letter]) -> Vec<usize> {
        occurrences(&self.0, pattern)
    }

    pub fn count(&self, letter: Letter) -> usize {
        self.0.iter().filter(|&&l| l == letter).count()
    }

    pub fn to_group_word(&self) -> GroupWord {
        GroupWord::from_monoid(self)
    }

    pub fn check(&self, alphabet: Alphabet) -> Result<()> {
        self.0.iter().try_for_each(|&l| alphabet.check(l))
    }
}

impl Deref for MonoidWord {
    type Target = [Letter];

    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl From<Vec<Letter>> for MonoidWord {
    fn from(letters: Vec<Letter>) -> Self {
        MonoidWord(letters)
    }
}

impl From<&[Letter]> for MonoidWord {
    fn from(letters: &[Letter]) -> Self {
        MonoidWord(letters.to_vec())
    }
}

impl FromIterator<Letter> for MonoidWord {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        MonoidWord(iter.into_iter().collect())
    }
}

pub fn occurrences(text: &[Letter], pattern: &[Letter]) -> Vec<usize> {
    if pattern.len() > text.len() {
        return Vec::new();
    }
    (0..=text.len() - pattern.len())
        .filter(|&p| &text[p..p + pattern.len()] == pattern)
        .collect()
}

/// A letter or the inverse of a letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gen {
    pub letter: Letter,
    pub inverse: bool,
}

impl Gen {
    pub fn pos(letter: Letter) -> Self {
        Gen {
            letter,
            inverse: false,
        }
    }

    pub fn neg(letter: Letter) -> Self {
        Gen {
            letter,
            inverse: true,
        }
    }

    pub fn inv(self) -> Self {
        Gen {
            letter: self.letter,
            inverse: !self.inverse,
        }
    }

    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }
}

/// A freely reduced word of the free group. Reduction happens at
/// construction, so no value of this type contains a cancelling pair.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupWord(Vec<Gen>);

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord(Vec::new())
    }

    pub fn letter(letter: Letter) -> Self {
        GroupWord(vec![Gen::pos(letter)])
    }

    pub fn gen(g: Gen) -> Self {
        GroupWord(vec![g])
    }

    /// Free reduction of an arbitrary sequence of signed letters.
    pub fn reduce<I: IntoIterator<Item = Gen>>(raw: I) -> Self {
        let mut out: Vec<Gen> = Vec::new();
        for g in raw {
            push_reduced(&mut out, g);
        }
        GroupWord(out)
    }

    /// Like [`GroupWord::reduce`], rejecting letters outside `alphabet`.
    pub fn reduce_checked<I: IntoIterator<Item = Gen>>(alphabet: Alphabet, raw: I) -> Result<Self> {
        let mut out: Vec<Gen> = Vec::new();
        for g in raw {
            alphabet.check(g.letter)?;
            push_reduced(&mut out, g);
        }
        Ok(GroupWord(out))
    }

    pub fn from_monoid(w: &[Letter]) -> Self {
        GroupWord(w.iter().map(|&l| Gen::pos(l)).collect())
    }

    pub fn gens(&self) -> &[Gen] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn invert(&self) -> GroupWord {
        GroupWord(self.0.iter().rev().map(|g| g.inv()).collect())
    }

    /// Reduced product `self * other`.
    pub fn concat(&self, other: &GroupWord) -> GroupWord {
        let mut out = self.0.clone();
        for &g in &other.0 {
            push_reduced(&mut out, g);
        }
        GroupWord(out)
    }

    pub fn pow(&self, n: usize) -> GroupWord {
        (0..n).fold(GroupWord::identity(), |acc, _| acc.concat(self))
    }

    /// Signed number of occurrences of `letter`.
    pub fn signed_count(&self, letter: Letter) -> i64 {
        self.0
            .iter()
            .filter(|g| g.letter == letter)
            .map(|g| g.sign())
            .sum()
    }

    /// The underlying monoid word, if every letter is positive.
    pub fn as_positive(&self) -> Option<MonoidWord> {
        self.0
            .iter()
            .map(|g| if g.inverse { None } else { Some(g.letter) })
            .collect()
    }

    /// Image under the morphism sending letter `a` to `images[a]`.
    ///
    /// Panics if a letter has no image.
    pub fn substitute(&self, images: &[GroupWord]) -> GroupWord {
        let mut out = Vec::new();
        for g in &self.0 {
            let image = &images[g.letter];
            if g.inverse {
                for &h in image.0.iter().rev() {
                    push_reduced(&mut out, h.inv());
                }
            } else {
                for &h in &image.0 {
                    push_reduced(&mut out, h);
                }
            }
        }
        GroupWord(out)
    }

    pub fn max_letter(&self) -> Option<Letter> {
        self.0.iter().map(|g| g.letter).max()
    }

    pub fn check(&self, alphabet: Alphabet) -> Result<()> {
        self.0.iter().try_for_each(|g| alphabet.check(g.letter))
    }
}

fn push_reduced(out: &mut Vec<Gen>, g: Gen) {
    if out.last() == Some(&g.inv()) {
        out.pop();
    } else {
        out.push(g);
    }
}

impl Mul for &GroupWord {
    type Output = GroupWord;

    fn mul(self, rhs: &GroupWord) -> GroupWord {
        self.concat(rhs)
    }
}

impl From<&MonoidWord> for GroupWord {
    fn from(w: &MonoidWord) -> Self {
        GroupWord::from_monoid(w)
    }
}

/// Maps letters to single-character symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolTable {
    symbols: Vec<char>,
}

pub const STANDARD_SYMBOLS: &str = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

/// Position of `c` in the standard 62-symbol ordering.
pub fn standard_rank(c: char) -> Option<usize> {
    STANDARD_SYMBOLS.chars().position(|s| s == c)
}

impl SymbolTable {
    /// Digits, then lowercase, then uppercase letters.
    pub fn standard() -> Self {
        SymbolTable {
            symbols: STANDARD_SYMBOLS.chars().collect(),
        }
    }

    /// The first `size` standard symbols.
    pub fn standard_for(size: usize) -> Self {
        SymbolTable {
            symbols: STANDARD_SYMBOLS.chars().take(size).collect(),
        }
    }

    pub fn from_symbols(symbols: Vec<char>) -> Result<Self> {
        for (i, &c) in symbols.iter().enumerate() {
            if standard_rank(c).is_none() {
                return Err(Error::Parse {
                    line: 0,
                    message: format!("'{c}' is not a valid symbol"),
                });
            }
            if symbols[..i].contains(&c) {
                return Err(Error::Parse {
                    line: 0,
                    message: format!("duplicate symbol '{c}'"),
                });
            }
        }
        Ok(SymbolTable { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn symbol(&self, letter: Letter) -> Option<char> {
        self.symbols.get(letter).copied()
    }

    pub fn letter(&self, c: char) -> Option<Letter> {
        self.symbols.iter().position(|&s| s == c)
    }

    fn letter_or_err(&self, c: char) -> Result<Letter> {
        self.letter(c).ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("unknown symbol '{c}'"),
        })
    }

    fn is_empty_marker(&self, text: &str) -> bool {
        text.is_empty() || (text == "e" && self.letter('e').is_none())
    }

    pub fn parse_monoid(&self, text: &str) -> Result<MonoidWord> {
        let text = text.trim();
        if self.is_empty_marker(text) {
            return Ok(MonoidWord::empty());
        }
        text.chars().map(|c| self.letter_or_err(c)).collect()
    }

    pub fn parse_group(&self, text: &str) -> Result<GroupWord> {
        let text = text.trim();
        if self.is_empty_marker(text) {
            return Ok(GroupWord::identity());
        }
        let mut raw: Vec<Gen> = Vec::new();
        for c in text.chars() {
            if c == '\'' {
                match raw.last_mut() {
                    Some(g) if !g.inverse => g.inverse = true,
                    _ => {
                        return Err(Error::Parse {
                            line: 0,
                            message: format!("misplaced apostrophe in '{text}'"),
                        })
                    }
                }
            } else {
                raw.push(Gen::pos(self.letter_or_err(c)?));
            }
        }
        Ok(GroupWord::reduce(raw))
    }

    fn push_symbol(&self, out: &mut String, letter: Letter) {
        match self.symbol(letter) {
            Some(c) => out.push(c),
            None => {
                out.push('[');
                out.push_str(&letter.to_string());
                out.push(']');
            }
        }
    }

    pub fn render_monoid(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            return "e".to_string();
        }
        let mut out = String::new();
        for &l in w {
            self.push_symbol(&mut out, l);
        }
        out
    }

    pub fn render_group(&self, w: &GroupWord) -> String {
        if w.is_empty() {
            return "e".to_string();
        }
        let mut out = String::new();
        for g in w.gens() {
            self.push_symbol(&mut out, g.letter);
            if g.inverse {
                out.push('\'');
            }
        }
        out
    }
}

impl Default for SymbolTable {
    fn default() -> Self {
        SymbolTable::standard()
    }
}

impl fmt::Display for MonoidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&SymbolTable::standard().render_monoid(&self.0))
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&SymbolTable::standard().render_group(self))
    }
}

impl Serialize for MonoidWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl Serialize for GroupWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Parses a monoid word over the standard symbols (`"0110"`).
pub fn mw(text: &str) -> MonoidWord {
    SymbolTable::standard()
        .parse_monoid(text)
        .unwrap_or_else(|e| panic!("bad monoid word {text:?}: {e}"))
}

/// Parses a group word over the standard symbols (`"02'3"`).
pub fn gw(text: &str) -> GroupWord {
    SymbolTable::standard()
        .parse_group(text)
        .unwrap_or_else(|e| panic!("bad group word {text:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn raw(spec: &[(Letter, bool)]) -> Vec<Gen> {
        spec.iter()
            .map(|&(l, inv)| if inv { Gen::neg(l) } else { Gen::pos(l) })
            .collect()
    }

    #[test]
    fn reduce_cancels_adjacent_pairs() {
        let w = GroupWord::reduce(raw(&[(0, false), (1, false), (1, true), (2, false)]));
        assert_eq!(w, gw("02"));
        let w = GroupWord::reduce(raw(&[(2, true), (2, false)]));
        assert!(w.is_identity());
    }

    #[test]
    fn kernel_element_is_already_reduced() {
        let text = "02'02'31'20'";
        let w = gw(text);
        assert_eq!(w.len(), 8);
        assert_eq!(w.to_string(), text);
        assert_eq!(GroupWord::reduce(w.gens().to_vec()), w);
    }

    #[test]
    fn reduce_checked_rejects_out_of_range() {
        let a = Alphabet::new(2).unwrap();
        assert_eq!(
            GroupWord::reduce_checked(a, raw(&[(0, false), (2, false)])),
            Err(Error::LetterOutOfRange { letter: 2, size: 2 })
        );
        assert!(Alphabet::new(0).is_err());
    }

    #[test]
    fn invert_reverses_and_flips() {
        assert!(GroupWord::identity().invert().is_identity());
        assert_eq!(gw("0").invert(), gw("0'"));
        assert_eq!(gw("01'2").invert(), gw("2'10'"));
    }

    #[test]
    fn concat_examples() {
        assert_eq!(gw("03'").concat(&gw("31'")), gw("01'"));
        assert_eq!(&gw("01") * &gw("1'0'2"), gw("2"));
        let w = gw("01'23'");
        assert!(w.concat(&w.invert()).is_identity());
    }

    #[test]
    fn signed_counts() {
        assert_eq!(GroupWord::identity().signed_count(3), 0);
        let w = gw("02'02'31'20'");
        assert_eq!(w.signed_count(0), 1);
        assert_eq!(w.signed_count(2), -1);
        assert_eq!(w.signed_count(1), -1);
        assert_eq!(w.signed_count(3), 1);
    }

    #[test]
    fn occurrence_scans() {
        assert_eq!(mw("100100102").occurrences(&mw("10")), vec![0, 3, 6]);
        assert_eq!(mw("0101").occurrences(&mw("01")), vec![0, 2]);
        assert!(mw("000").occurrences(&mw("1")).is_empty());
        assert_eq!(mw("01").occurrences(&[]), vec![0, 1, 2]);
    }

    #[test]
    fn text_syntax() {
        let table = SymbolTable::standard_for(4);
        assert_eq!(table.render_group(&GroupWord::identity()), "e");
        assert!(table.parse_group("e").unwrap().is_identity());
        assert_eq!(table.render_monoid(&[]), "e");
        assert!(table.parse_group("0''").is_err());
        assert!(table.parse_group("'0").is_err());
        assert!(table.parse_monoid("0?").is_err());
        assert!(table.parse_monoid("4").is_err());
        assert_eq!(SymbolTable::standard().parse_monoid("e").unwrap(), MonoidWord::new(vec![14]));
        let custom = SymbolTable::from_symbols(vec!['a', 'e']).unwrap();
        assert_eq!(custom.parse_monoid("e").unwrap(), MonoidWord::new(vec![1]));
        assert_eq!(custom.render_group(&gw("01'")), "ae'");
    }

    fn arb_raw() -> impl Strategy<Value = Vec<Gen>> {
        prop::collection::vec((0usize..4, any::<bool>()), 0..24).prop_map(|v| {
            v.into_iter()
                .map(|(l, inv)| Gen { letter: l, inverse: inv })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn reduction_is_idempotent(x in arb_raw()) {
            let once = GroupWord::reduce(x);
            let twice = GroupWord::reduce(once.gens().to_vec());
            prop_assert_eq!(once.clone(), twice);
            for pair in once.gens().windows(2) {
                prop_assert!(pair[0] != pair[1].inv());
            }
        }

        #[test]
        fn inverse_cancels(x in arb_raw()) {
            let u = GroupWord::reduce(x);
            prop_assert!(u.concat(&u.invert()).is_identity());
            prop_assert_eq!(u.invert().invert(), u);
        }

        #[test]
        fn product_is_associative(x in arb_raw(), y in arb_raw(), z in arb_raw()) {
            let (a, b, c) = (GroupWord::reduce(x), GroupWord::reduce(y), GroupWord::reduce(z));
            prop_assert_eq!(a.concat(&b).concat(&c), a.concat(&b.concat(&c)));
        }

        #[test]
        fn signed_count_is_additive(x in arb_raw(), y in arb_raw(), b in 0usize..4) {
            let (u, v) = (GroupWord::reduce(x), GroupWord::reduce(y));
            prop_assert_eq!(u.concat(&v).signed_count(b), u.signed_count(b) + v.signed_count(b));
        }

        #[test]
        fn positive_words_count_plainly(w in prop::collection::vec(0usize..4, 0..20), b in 0usize..4) {
            let m = MonoidWord::new(w);
            prop_assert_eq!(m.to_group_word().signed_count(b), m.count(b) as i64);
        }
    }
}
