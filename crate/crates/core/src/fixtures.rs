//! Worked examples: substitutions, return structures, bases and automata,
//! plus a table of checks run by `schutz examples`.

use num_bigint::BigInt;

use crate::endo::GroupEndomorphism;
use crate::matrix::IntegerMatrix;
use crate::presentation::{
    abelian_quotient_mod_p, finite_quotient_witness, freeness_test, omega_presentation_from_substitution,
    restrict, stabilize_restrictions, validate_basis, verify_witness, FiniteGroup, Verdict,
};
use crate::returns::{durand, Connection};
use crate::stallings::{Edge, SpanningTree, StallingsAutomaton};
use crate::substitution::{PeriodicityEvidence, Substitution};
use crate::words::{GroupWord, MonoidWord, SymbolTable};

fn sub(images: &[&str]) -> Substitution {
    Substitution::from_words(images).expect("fixture substitution")
}

fn endo(images: &[&str]) -> GroupEndomorphism {
    GroupEndomorphism::from_words(images).expect("fixture endomorphism")
}

fn group_words(size: usize, words: &[&str]) -> Vec<GroupWord> {
    let table = SymbolTable::standard_for(size);
    words
        .iter()
        .map(|w| table.parse_group(w).expect("fixture word"))
        .collect()
}

fn monoid_words(words: &[&str]) -> Vec<MonoidWord> {
    let table = SymbolTable::standard_for(16);
    words
        .iter()
        .map(|w| table.parse_monoid(w).expect("fixture word"))
        .collect()
}

/// Thue–Morse.
pub fn tau() -> Substitution {
    sub(&["01", "10"])
}

pub fn alpha() -> Substitution {
    sub(&["01", "0001"])
}

/// Period doubling.
pub fn rho() -> Substitution {
    sub(&["01", "00"])
}

/// Primitive invertible substitution with a non-free group.
pub fn xi() -> Substitution {
    sub(&["001", "02", "301", "320"])
}

/// The printed inverse of `ξ`.
pub fn xi_inverse() -> GroupEndomorphism {
    endo(&["1'02'3", "3'20'13'20'10", "3'20'11", "20'1'02'3"])
}

/// Periodic with period `021`, yet `Gp`-invertible for odd `p`.
pub fn periodic() -> Substitution {
    sub(&["02", "21", "10"])
}

pub fn fibonacci() -> Substitution {
    sub(&["01", "0"])
}

pub fn tau_return_01() -> Substitution {
    sub(&["0123", "013", "02123", "0213"])
}

pub fn tau_return_010() -> Substitution {
    sub(&["01", "023132", "0232", "0131"])
}

pub fn rho_return_10() -> Substitution {
    sub(&["010", "01110"])
}

pub fn xi_theta_10() -> Vec<MonoidWord> {
    monoid_words(&[
        "001",
        "02001",
        "02001301",
        "02320001",
        "02001301320301",
        "02320301",
        "001320001",
    ])
}

pub fn xi_return_10() -> Substitution {
    sub(&[
        "00102",
        "00310102",
        "003101040002",
        "003561010102",
        "00310104000461050002",
        "003561050002",
        "0010461010102",
    ])
}

/// Return-word indices of `1 ξ²(Θ(j)) 0`, one row per `j`.
pub fn xi_return_rows() -> Vec<Vec<usize>> {
    xi_return_10().images().iter().map(|w| w.to_vec()).collect()
}

/// Kernel element of `τ'_{0,1}`.
pub fn tau_kernel_word() -> GroupWord {
    group_words(4, &["02'02'31'20'"]).remove(0)
}

/// Basis of `Im(τ'_{0,10})` as printed.
pub fn tau_010_basis_printed() -> Vec<GroupWord> {
    group_words(4, &["03'", "31'", "3232", "2'12'3'"])
}

/// Basis of `Im(τ'_{0,10})` read off the figure's spanning tree.
pub fn tau_010_basis_figure() -> Vec<GroupWord> {
    group_words(4, &["03'", "31", "3232", "2'12'3'"])
}

/// Basis of `Im(τ'_{0,1})` as printed.
pub fn tau_01_basis_printed() -> Vec<GroupWord> {
    group_words(4, &["3'2", "20'", "2'302'1"])
}

/// `τ'_{0,1}|₁` as printed.
pub fn tau_01_restricted_printed() -> GroupEndomorphism {
    endo(&["02110", "10021", "2"])
}

/// Basis `X` of `Im(ξ'_{1,0})`.
pub fn xi_basis() -> Vec<GroupWord> {
    group_words(7, &["00102", "00310'", "2'40002", "2'461010'", "01'54'2"])
}

/// `ξ'_{1,0}|₁` in the basis `X`.
pub fn xi_restricted() -> GroupEndomorphism {
    endo(&["00100102", "0014301", "342000102", "3420301001", "4"])
}

pub fn xi_restricted_matrix() -> IntegerMatrix {
    IntegerMatrix::from_rows(&[
        [5, 2, 1, 0, 0],
        [3, 2, 0, 1, 1],
        [4, 1, 2, 1, 1],
        [4, 2, 1, 2, 1],
        [0, 0, 0, 0, 1],
    ])
}

fn automaton(states: usize, edges: &[(usize, usize, usize)]) -> StallingsAutomaton {
    let edges = edges.iter().map(|&(s, a, d)| Edge::new(s, a, d)).collect();
    StallingsAutomaton::from_edges(states, edges).expect("fixture automaton")
}

/// Stallings automaton of `Im(τ'_{0,10})` with its dashed tree.
pub fn morse_automaton() -> (StallingsAutomaton, SpanningTree) {
    let a = automaton(
        4,
        &[(0, 0, 1), (0, 3, 1), (1, 1, 0), (2, 2, 0), (1, 2, 3), (2, 1, 3), (3, 3, 2)],
    );
    let t = SpanningTree::from_edges(&a, vec![1, 3, 4]).expect("fixture tree");
    (a, t)
}

/// Stallings automaton of `Im(ξ'_{1,0})`; the first nine edges form the
/// dashed tree and the others yield `X` in order.
pub fn return_automaton() -> (StallingsAutomaton, SpanningTree) {
    let a = automaton(
        10,
        &[
            (0, 0, 1),
            (2, 2, 0),
            (1, 0, 3),
            (4, 1, 1),
            (2, 4, 5),
            (6, 0, 2),
            (7, 0, 4),
            (5, 0, 8),
            (5, 6, 9),
            (3, 1, 6),
            (3, 3, 4),
            (8, 0, 6),
            (9, 1, 7),
            (4, 5, 5),
        ],
    );
    let t = SpanningTree::from_edges(&a, (0..9).collect()).expect("fixture tree");
    (a, t)
}

/// Stallings automaton of `Im(ξ'_{1,0}|₁)`.
pub fn restriction_automaton() -> StallingsAutomaton {
    automaton(
        17,
        &[
            (0, 4, 0),
            (0, 0, 1),
            (0, 3, 2),
            (3, 1, 0),
            (4, 2, 0),
            (1, 0, 5),
            (2, 4, 6),
            (7, 0, 3),
            (8, 0, 4),
            (5, 1, 9),
            (6, 2, 10),
            (11, 0, 7),
            (12, 3, 7),
            (13, 1, 8),
            (10, 0, 9),
            (9, 4, 12),
            (9, 0, 14),
            (9, 3, 15),
            (16, 1, 11),
            (14, 0, 13),
            (15, 0, 16),
        ],
    )
}

/// One row of the `examples` table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name,
        passed,
        detail: detail.into(),
    }
}

fn returns_of(s: &Substitution, u: &str, v: &str) -> Option<Substitution> {
    let table = SymbolTable::standard_for(s.size());
    let c = Connection::new(s, table.parse_monoid(u).ok()?, table.parse_monoid(v).ok()?).ok()?;
    durand(s, &c).ok().map(|r| r.return_substitution)
}

fn verdict_of(s: &Substitution) -> Option<Verdict> {
    let (p, _) = omega_presentation_from_substitution(s, 50).ok()?;
    freeness_test(&p, 4).ok().map(|r| r.verdict)
}

/// Every worked example, recomputed.
pub fn example_checks() -> Vec<Check> {
    let mut out = Vec::new();
    out.push(check(
        "tau return substitution at (0,1)",
        returns_of(&tau(), "0", "1") == Some(tau_return_01()),
        "0123 013 02123 0213",
    ));
    out.push(check(
        "tau return substitution at (0,10)",
        returns_of(&tau(), "0", "10") == Some(tau_return_010()),
        "01 023132 0232 0131",
    ));
    out.push(check(
        "rho return substitution at (1,0)",
        returns_of(&rho(), "1", "0") == Some(rho_return_10()),
        "010 01110",
    ));
    let xi_structure = Connection::new(&xi(), MonoidWord::new(vec![1]), MonoidWord::new(vec![0]))
        .and_then(|c| durand(&xi(), &c));
    out.push(check(
        "xi return words and return substitution at (1,0)",
        xi_structure
            .as_ref()
            .is_ok_and(|r| r.theta == xi_theta_10() && r.return_substitution == xi_return_10()),
        "7 return words in leftmost order",
    ));
    out.push(check(
        "xi factorization rows",
        xi_structure.as_ref().is_ok_and(|r| {
            (0..7).all(|j| r.factorize(&xi(), j).ok() == Some(xi_return_rows()[j].clone()))
        }),
        "rows of 1 xi^2(theta(j)) 0",
    ));
    let xi_return = GroupEndomorphism::from_substitution(&xi_return_10());
    let restricted = restrict(&xi_return, 1, Some(&xi_basis()));
    out.push(check(
        "xi' restricted in basis X",
        restricted.as_ref().is_ok_and(|r| r.endo == xi_restricted()),
        "5-letter endomorphism",
    ));
    out.push(check(
        "matrix of xi'|1 and its determinant",
        xi_restricted().incidence_matrix() == xi_restricted_matrix()
            && xi_restricted_matrix().determinant() == BigInt::from(1),
        "det = 1",
    ));
    let (ret_automaton, ret_tree) = return_automaton();
    out.push(check(
        "X is the tree basis of the return automaton",
        ret_automaton.basis_from_tree(&ret_tree).elements == xi_basis()
            && ret_automaton.is_isomorphic(&xi_return.image_automaton()),
        "figure automaton equals the folded image",
    ));
    let ra = restriction_automaton();
    out.push(check(
        "images of xi'|1 accepted, letter 1 rejected",
        xi_restricted().images().iter().all(|w| ra.membership(w))
            && !ra.membership(&GroupWord::letter(1))
            && ra.is_isomorphic(&xi_restricted().image_automaton()),
        "restriction automaton",
    ));
    out.push(check(
        "xi'|1 is not an automorphism",
        !xi_restricted().is_automorphism(),
        "det = 1, not invertible",
    ));
    out.push(check("xi is NotFree", verdict_of(&xi()) == Some(Verdict::NotFree), "det 0, then det 1 and not an automorphism"));
    out.push(check(
        "determinants of alpha, rho', xi",
        alpha().incidence_matrix().determinant() == BigInt::from(-2)
            && rho_return_10().incidence_matrix().determinant() == BigInt::from(4)
            && xi().incidence_matrix().determinant() == BigInt::from(-1),
        "-2, 4, -1",
    ));
    out.push(check(
        "alpha and rho are NotFree",
        verdict_of(&alpha()) == Some(Verdict::NotFree) && verdict_of(&rho()) == Some(Verdict::NotFree),
        "|det| > 1",
    ));
    let xi_endo = GroupEndomorphism::from_substitution(&xi());
    let id4 = GroupEndomorphism::identity(4).expect("identity");
    out.push(check(
        "xi is invertible with the printed inverse",
        xi_endo.is_automorphism()
            && xi_endo.compose(&xi_inverse()).ok() == Some(id4.clone())
            && xi_inverse().compose(&xi_endo).ok() == Some(id4.clone())
            && xi_endo
                .invert()
                .is_ok_and(|inv| xi_endo.compose(&inv).ok() == Some(id4.clone()) && inv.compose(&xi_endo).ok() == Some(id4)),
        "both compositions are the identity",
    ));
    let tau01 = GroupEndomorphism::from_substitution(&tau_return_01());
    let tau010 = GroupEndomorphism::from_substitution(&tau_return_010());
    out.push(check(
        "tau'(0,1) kernel word and non-injectivity",
        tau01.kernel_witness_check(&tau_kernel_word()).unwrap_or(false) && !tau01.is_injective(),
        "02'02'31'20'",
    ));
    out.push(check("tau'(0,10) is injective", tau010.is_injective(), "rank 4"));
    let image = tau010.image_automaton();
    let (morse, morse_tree) = morse_automaton();
    out.push(check(
        "figure automaton of Im tau'(0,10) and its tree basis",
        image.is_isomorphic(&morse) && validate_basis(&image, &tau_010_basis_figure()).is_ok(),
        "03' 31 3232 2'12'3'",
    ));
    let printed = validate_basis(&image, &tau_010_basis_printed());
    out.push(check(
        "printed basis of Im tau'(0,10)",
        printed.is_ok(),
        match printed {
            Ok(_) => "valid".to_string(),
            Err(e) => format!("{e}; the figure's tree gives 31"),
        },
    ));
    out.push(check(
        "tree basis of the figure automaton",
        morse.basis_from_tree(&morse_tree).elements.len() == 4,
        "4 non-tree edges",
    ));
    let printed = restrict(&tau01, 1, Some(&tau_01_basis_printed()));
    out.push(check(
        "tau'(0,1) restricted in the printed basis",
        printed.as_ref().is_ok_and(|r| r.endo == tau_01_restricted_printed()),
        match &printed {
            Ok(r) => format!("got {:?}", r.endo.render(&SymbolTable::standard_for(3))),
            Err(e) => e.to_string(),
        },
    ));
    let ranks = stabilize_restrictions(&tau01, 4);
    out.push(check(
        "tau'(0,1) restriction ranks",
        ranks.as_ref().is_ok_and(|steps| {
            let r: Vec<(usize, bool)> = steps.iter().map(|s| (s.rank, s.injective)).collect();
            r.starts_with(&[(4, false), (3, true), (3, true)])
        }),
        "4, 3, 3",
    ));
    let evidence = periodic().periodicity_evidence(50);
    out.push(check(
        "periodic example",
        matches!(&evidence, Ok(PeriodicityEvidence::PeriodicProven { period, witness_length })
            if *witness_length <= 3 && is_rotation(period, &[0, 2, 1])),
        "period 021",
    ));
    let rho_endo = GroupEndomorphism::from_substitution(&rho_return_10());
    let abelian = abelian_quotient_mod_p(&rho_endo, 3).ok().flatten();
    let exhaustive = FiniteGroup::elementary_abelian(3, 2)
        .ok()
        .and_then(|h| finite_quotient_witness(&rho_endo, &h, 1 << 20).ok().flatten());
    out.push(check(
        "quotient witness of rho' in (Z/3)^2",
        abelian.as_ref().is_some_and(|w| verify_witness(&rho_endo, w))
            && exhaustive.as_ref().is_some_and(|w| verify_witness(&rho_endo, w))
            && abelian == exhaustive,
        "abelian and exhaustive searches agree",
    ));
    out.push(check("fibonacci is Free", verdict_of(&fibonacci()) == Some(Verdict::Free), "automorphism"));
    out
}

/// Whether `w` is a cyclic rotation of `p`.
pub fn is_rotation(w: &[usize], p: &[usize]) -> bool {
    w.len() == p.len() && (0..p.len().max(1)).any(|k| w.iter().zip(p.iter().cycle().skip(k)).all(|(a, b)| a == b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_consistent() {
        assert_eq!(xi_return_rows()[0], vec![0, 0, 1, 0, 2]);
        assert_eq!(xi_return_rows()[5], vec![0, 0, 3, 5, 6, 1, 0, 5, 0, 0, 0, 2]);
        assert_eq!(restriction_automaton().rank(), 5);
        assert_eq!(return_automaton().0.rank(), 5);
        assert_eq!(morse_automaton().0.rank(), 4);
        assert!(is_rotation(&[2, 1, 0], &[0, 2, 1]));
        assert!(!is_rotation(&[0, 1, 2], &[0, 2, 1]));
    }

    #[test]
    fn checks_outside_the_known_mismatches_pass() {
        for c in example_checks() {
            let known = c.name.starts_with("printed basis") || c.name.contains("printed basis");
            assert_eq!(c.passed, !known, "{}: {}", c.name, c.detail);
        }
    }
}
