//! Endomorphisms of finitely generated free groups.

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::IntegerMatrix;
use crate::stallings::{LabeledFold, StallingsAutomaton};
use crate::substitution::Substitution;
use crate::words::{Alphabet, GroupWord, Letter, SymbolTable};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupEndomorphism {
    alphabet: Alphabet,
    images: Vec<GroupWord>,
}

/// Outcome of an injectivity test. A non-injective endomorphism always comes
/// with a non-trivial kernel element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Injectivity {
    pub image_rank: usize,
    pub kernel_witness: Option<GroupWord>,
}

impl Injectivity {
    pub fn is_injective(&self) -> bool {
        self.kernel_witness.is_none()
    }
}

impl GroupEndomorphism {
    pub fn new(images: Vec<GroupWord>) -> Result<Self> {
        let alphabet = Alphabet::new(images.len())?;
        for w in &images {
            w.check(alphabet)?;
        }
        Ok(GroupEndomorphism { alphabet, images })
    }

    /// Parses images over the standard symbols, e.g. `["1'02'3", ...]`.
    pub fn from_words(images: &[&str]) -> Result<Self> {
        let table = SymbolTable::standard_for(images.len());
        let images = images
            .iter()
            .map(|w| table.parse_group(w))
            .collect::<Result<Vec<_>>>()?;
        Self::new(images)
    }

    pub fn identity(size: usize) -> Result<Self> {
        Self::new((0..size).map(GroupWord::letter).collect())
    }

    pub fn from_substitution(s: &Substitution) -> Self {
        GroupEndomorphism {
            alphabet: s.alphabet(),
            images: s.to_group_images(),
        }
    }

    /// The substitution with the same images, if they are all positive and
    /// non-empty.
    pub fn to_substitution(&self) -> Option<Substitution> {
        let images = self
            .images
            .iter()
            .map(|w| w.as_positive())
            .collect::<Option<Vec<_>>>()?;
        Substitution::new(images).ok()
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn size(&self) -> usize {
        self.alphabet.size()
    }

    pub fn image(&self, letter: Letter) -> &GroupWord {
        &self.images[letter]
    }

    pub fn images(&self) -> &[GroupWord] {
        &self.images
    }

    pub fn apply(&self, w: &GroupWord) -> GroupWord {
        w.substitute(&self.images)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GroupEndomorphism) -> Result<GroupEndomorphism> {
        if self.size() != other.size() {
            return Err(Error::AlphabetMismatch {
                expected: self.size(),
                found: other.size(),
            });
        }
        Ok(GroupEndomorphism {
            alphabet: self.alphabet,
            images: other.images.iter().map(|w| self.apply(w)).collect(),
        })
    }

    pub fn power(&self, n: usize) -> GroupEndomorphism {
        let mut acc = GroupEndomorphism {
            alphabet: self.alphabet,
            images: self.alphabet.letters().map(GroupWord::letter).collect(),
        };
        for _ in 0..n {
            acc = self.compose(&acc).expect("same alphabet");
        }
        acc
    }

    /// `M[a][b]` is the signed number of occurrences of `b` in the image of `a`.
    pub fn incidence_matrix(&self) -> IntegerMatrix {
        let n = self.size();
        let mut m = IntegerMatrix::zeros(n);
        for (a, w) in self.images.iter().enumerate() {
            for b in 0..n {
                m.set(a, b, w.signed_count(b).into());
            }
        }
        m
    }

    /// Folded core of the image subgroup.
    pub fn image_automaton(&self) -> StallingsAutomaton {
        StallingsAutomaton::subgroup(&self.images)
    }

    /// Rank of the image, with a kernel element when it is below `|A|`.
    pub fn injectivity(&self) -> Injectivity {
        let fold = LabeledFold::new(&self.images);
        Injectivity {
            image_rank: fold.automaton().rank(),
            kernel_witness: fold.relations().first().cloned(),
        }
    }

    pub fn is_injective(&self) -> bool {
        self.image_automaton().rank() == self.size()
    }

    /// True iff the image is the whole free group.
    pub fn is_automorphism(&self) -> bool {
        self.image_automaton().is_rose(self.size())
    }

    /// Two-sided inverse, read off the loop labels of the folded image.
    pub fn invert(&self) -> Result<GroupEndomorphism> {
        let fold = LabeledFold::new(&self.images);
        if !fold.automaton().is_rose(self.size()) {
            return Err(Error::NotAnAutomorphism);
        }
        let mut images = vec![GroupWord::identity(); self.size()];
        for (edge, label) in fold.automaton().edges().iter().zip(fold.labels()) {
            images[edge.letter] = label.clone();
        }
        Ok(GroupEndomorphism {
            alphabet: self.alphabet,
            images,
        })
    }

    /// Whether the non-trivial word `w` is sent to the identity.
    pub fn kernel_witness_check(&self, w: &GroupWord) -> Result<bool> {
        if w.is_identity() {
            return Err(Error::TrivialKernelWord);
        }
        w.check(self.alphabet)?;
        Ok(self.apply(w).is_identity())
    }

    /// Images rendered with `symbols`.
    pub fn render(&self, symbols: &SymbolTable) -> Vec<String> {
        self.images.iter().map(|w| symbols.render_group(w)).collect()
    }
}

impl Serialize for GroupEndomorphism {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let table = SymbolTable::standard_for(self.size());
        let mut map = serializer.serialize_map(Some(self.size()))?;
        for (a, w) in self.images.iter().enumerate() {
            map.serialize_entry(&table.render_monoid(&[a]), &table.render_group(w))?;
        }
        map.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::gw;
    use num_bigint::BigInt;
    use num_traits::Signed;
    use proptest::prelude::*;

    fn endo(images: &[&str]) -> GroupEndomorphism {
        GroupEndomorphism::from_words(images).unwrap()
    }

    fn xi() -> GroupEndomorphism {
        endo(&["001", "02", "301", "320"])
    }

    fn xi_inverse() -> GroupEndomorphism {
        endo(&["1'02'3", "3'20'13'20'10", "3'20'11", "20'1'02'3"])
    }

    fn tau01() -> GroupEndomorphism {
        endo(&["0123", "013", "02123", "0213"])
    }

    fn tau010() -> GroupEndomorphism {
        endo(&["01", "023132", "0232", "0131"])
    }

    fn xi_restricted() -> GroupEndomorphism {
        endo(&["00100102", "0014301", "342000102", "3420301001", "4"])
    }

    fn fixtures() -> Vec<GroupEndomorphism> {
        vec![
            xi(),
            xi_inverse(),
            tau01(),
            tau010(),
            xi_restricted(),
            endo(&["01", "0001"]),
            endo(&["01", "10"]),
            endo(&["01'", "1"]),
            GroupEndomorphism::identity(3).unwrap(),
        ]
    }

    #[test]
    fn application() {
        assert!(tau01().apply(&gw("02'02'31'20'")).is_identity());
        let id = GroupEndomorphism::identity(4).unwrap();
        assert_eq!(id.apply(&gw("02'1")), gw("02'1"));
        assert_eq!(xi_inverse().image(0), &gw("1'02'3"));
        assert_eq!(xi().apply(&xi_inverse().apply(&gw("0"))), gw("0"));
    }

    #[test]
    fn composition() {
        let tau = endo(&["01", "10"]);
        assert_eq!(tau.compose(&tau).unwrap().image(0), &gw("0110"));
        let id = GroupEndomorphism::identity(4).unwrap();
        assert_eq!(xi().compose(&id).unwrap(), xi());
        assert_eq!(xi().compose(&xi_inverse()).unwrap(), id);
        assert_eq!(xi_inverse().compose(&xi()).unwrap(), id);
        assert!(matches!(xi().compose(&tau), Err(Error::AlphabetMismatch { .. })));
        // M(f∘g) = M(g) M(f)
        let (f, g) = (tau01(), xi().compose(&xi()).unwrap());
        let g = endo(&["0", "12", "2", "3"]).compose(&g).unwrap();
        assert_eq!(
            f.compose(&g).unwrap().incidence_matrix(),
            g.incidence_matrix().mul(&f.incidence_matrix())
        );
    }

    #[test]
    fn injectivity() {
        let t = tau01().injectivity();
        assert!(!t.is_injective());
        assert_eq!(t.image_rank, 3);
        let w = t.kernel_witness.unwrap();
        assert!(tau01().kernel_witness_check(&w).unwrap());
        assert!(tau010().is_injective());
        assert!(GroupEndomorphism::identity(2).unwrap().is_injective());
        assert!(tau010().injectivity().is_injective());
    }

    #[test]
    fn automorphisms() {
        assert!(xi().is_automorphism());
        assert!(!xi_restricted().is_automorphism());
        assert!(!endo(&["01", "0001"]).is_automorphism());
        assert!(!tau010().is_automorphism());
    }

    #[test]
    fn inversion() {
        let id = GroupEndomorphism::identity(2).unwrap();
        assert_eq!(id.invert().unwrap(), id);
        let e = endo(&["01", "1"]);
        assert_eq!(e.invert().unwrap(), endo(&["01'", "1"]));
        let inv = xi().invert().unwrap();
        let id4 = GroupEndomorphism::identity(4).unwrap();
        assert_eq!(xi().compose(&inv).unwrap(), id4);
        assert_eq!(inv.compose(&xi()).unwrap(), id4);
        assert_eq!(xi_restricted().invert(), Err(Error::NotAnAutomorphism));
    }

    #[test]
    fn kernel_checks() {
        assert!(tau01().kernel_witness_check(&gw("02'02'31'20'")).unwrap());
        let id = GroupEndomorphism::identity(1).unwrap();
        assert!(!id.kernel_witness_check(&gw("0")).unwrap());
        assert_eq!(id.kernel_witness_check(&GroupWord::identity()), Err(Error::TrivialKernelWord));
        assert!(!tau010().kernel_witness_check(&gw("0")).unwrap());
    }

    #[test]
    fn fixture_invariants() {
        for e in fixtures() {
            let automorphism = e.is_automorphism();
            if automorphism {
                assert!(e.incidence_matrix().determinant().abs() == BigInt::from(1));
                assert!(e.is_injective());
                let inv = e.invert().unwrap();
                let id = GroupEndomorphism::identity(e.size()).unwrap();
                assert_eq!(e.compose(&inv).unwrap(), id);
                assert_eq!(inv.compose(&e).unwrap(), id);
            }
            let inj = e.injectivity();
            assert_eq!(inj.is_injective(), e.is_injective());
            if let Some(w) = inj.kernel_witness {
                assert!(e.kernel_witness_check(&w).unwrap());
            }
        }
    }

    #[test]
    fn json_shape() {
        assert_eq!(serde_json::to_string(&endo(&["01'", "1"])).unwrap(), r#"{"0":"01'","1":"1"}"#);
    }

    proptest! {
        #[test]
        fn apply_is_homomorphic(u in "[0-3']{0,8}", v in "[0-3']{0,8}") {
            let parse = |s: &str| SymbolTable::standard_for(4).parse_group(s.trim_start_matches('\''));
            let (Ok(u), Ok(v)) = (parse(&u), parse(&v)) else { return Ok(()) };
            let e = xi();
            prop_assert_eq!(e.apply(&u.concat(&v)), e.apply(&u).concat(&e.apply(&v)));
        }
    }
}
