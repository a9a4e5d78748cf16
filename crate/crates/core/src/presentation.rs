//! Omega-presentations, restriction to images of powers, freeness verdicts,
//! finite quotient witnesses and pseudovariety facts.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::endo::GroupEndomorphism;
use crate::error::{Error, Result};
use crate::matrix::{is_prime, order_mod_p, prime_divisors};
use crate::returns::{durand, find_connection, Connection, ReturnStructure};
use crate::stallings::{LabeledFold, SpanningTree, StallingsAutomaton};
use crate::substitution::{PeriodicityEvidence, Substitution};
use crate::words::{Gen, GroupWord, MonoidWord};

pub const DEFAULT_MAX_RESTRICT: usize = 4;
pub const DEFAULT_MAX_COMPLEXITY: usize = 50;

/// Serializes as a JSON number when it fits in `i64`, otherwise as a string.
pub fn serialize_bigint<S: Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    match n.to_i64() {
        Some(x) => s.serialize_i64(x),
        None => s.serialize_str(&n.to_string()),
    }
}

/// How a definer was obtained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// A proper substitution presents its own group.
    Proper,
    /// Return substitution at a connection.
    ReturnSubstitution { connection: Connection },
    /// Supplied directly.
    Given,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Proper => write!(f, "proper substitution, presents its own group"),
            Provenance::ReturnSubstitution { connection: c } => write!(
                f,
                "return substitution at connection ({}, {}) of order {}",
                c.u, c.v, c.order
            ),
            Provenance::Given => write!(f, "supplied definer"),
        }
    }
}

/// `⟨A | φ^ω(a) = a⟩`, stored through its definer `φ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OmegaPresentation {
    pub definer: GroupEndomorphism,
    pub provenance: Provenance,
    /// Aperiodicity evidence of the substitution the presentation came from.
    pub aperiodicity: Option<PeriodicityEvidence>,
}

impl OmegaPresentation {
    pub fn given(definer: GroupEndomorphism) -> Self {
        OmegaPresentation {
            definer,
            provenance: Provenance::Given,
            aperiodicity: None,
        }
    }

    pub fn generators(&self) -> usize {
        self.definer.size()
    }

    /// True when aperiodicity was only checked up to a bound.
    pub fn is_conditional(&self) -> bool {
        matches!(self.aperiodicity, Some(PeriodicityEvidence::AperiodicUpTo { .. }))
    }
}

/// Presentation of a primitive aperiodic substitution: the substitution
/// itself when proper, else its return substitution at the default
/// connection. The return structure is included in the second case.
pub fn omega_presentation_from_substitution(
    s: &Substitution,
    complexity_bound: usize,
) -> Result<(OmegaPresentation, Option<ReturnStructure>)> {
    let evidence = s.periodicity_evidence(complexity_bound)?;
    if let PeriodicityEvidence::PeriodicProven { period, .. } = &evidence {
        return Err(Error::Periodic(period.clone()));
    }
    if s.is_proper() {
        let p = OmegaPresentation {
            definer: GroupEndomorphism::from_substitution(s),
            provenance: Provenance::Proper,
            aperiodicity: Some(evidence),
        };
        return Ok((p, None));
    }
    let connection = find_connection(s)?;
    omega_presentation_at(s, &connection, evidence)
}

/// Presentation by the return substitution at a chosen connection.
pub fn omega_presentation_at(
    s: &Substitution,
    connection: &Connection,
    evidence: PeriodicityEvidence,
) -> Result<(OmegaPresentation, Option<ReturnStructure>)> {
    let r = durand(s, connection)?;
    let p = OmegaPresentation {
        definer: GroupEndomorphism::from_substitution(&r.return_substitution),
        provenance: Provenance::ReturnSubstitution {
            connection: connection.clone(),
        },
        aperiodicity: Some(evidence),
    };
    Ok((p, Some(r)))
}

/// An endomorphism restricted to the image of one of its powers.
#[derive(Debug, Clone)]
pub struct Restriction {
    /// Folded core of `Im(e^n)`.
    pub automaton: StallingsAutomaton,
    /// Present when the basis comes from a spanning tree.
    pub tree: Option<SpanningTree>,
    pub basis: Vec<GroupWord>,
    /// `b_i ↦ e(b_i)` written over the basis indices.
    pub endo: GroupEndomorphism,
}

/// Restricts `e` to `Im(e^n)`, in the supplied basis or else in the basis of
/// the default spanning tree.
pub fn restrict(e: &GroupEndomorphism, n: usize, basis: Option<&[GroupWord]>) -> Result<Restriction> {
    let automaton = StallingsAutomaton::subgroup(e.power(n).images());
    match basis {
        Some(basis) => {
            let fold = validate_basis(&automaton, basis)?;
            let images = basis
                .iter()
                .map(|b| fold.express(&e.apply(b)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Restriction {
                automaton,
                tree: None,
                basis: basis.to_vec(),
                endo: GroupEndomorphism::new(images)?,
            })
        }
        None => {
            let tree = automaton.spanning_tree();
            let basis = automaton.basis_from_tree(&tree).elements;
            let images = basis
                .iter()
                .map(|b| automaton.express_in_basis(&tree, &e.apply(b)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Restriction {
                endo: GroupEndomorphism::new(images)?,
                automaton,
                tree: Some(tree),
                basis,
            })
        }
    }
}

/// Checks that `basis` freely generates the subgroup of `automaton`.
pub fn validate_basis(automaton: &StallingsAutomaton, basis: &[GroupWord]) -> Result<LabeledFold> {
    if let Some(b) = basis.iter().find(|b| !automaton.membership(b)) {
        return Err(Error::InvalidBasis(format!("{b} is not in the subgroup")));
    }
    if basis.len() != automaton.rank() {
        return Err(Error::InvalidBasis(format!(
            "{} elements for a subgroup of rank {}",
            basis.len(),
            automaton.rank()
        )));
    }
    let fold = LabeledFold::new(basis);
    if !fold.automaton().is_isomorphic(automaton) {
        return Err(Error::InvalidBasis("elements generate a proper subgroup".into()));
    }
    if !fold.is_free_basis() {
        return Err(Error::InvalidBasis("elements are not free".into()));
    }
    Ok(fold)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RankStep {
    pub step: usize,
    pub rank: usize,
    pub injective: bool,
}

/// Iterated restrictions `e|₁`, `e|₁|₁`, ... until the rank repeats or
/// `max_steps` restrictions were taken.
pub fn stabilize_restrictions(e: &GroupEndomorphism, max_steps: usize) -> Result<Vec<RankStep>> {
    let mut current = e.clone();
    let mut steps = vec![RankStep {
        step: 0,
        rank: current.size(),
        injective: current.is_injective(),
    }];
    for step in 1..=max_steps {
        current = restrict(&current, 1, None)?.endo;
        let rank = current.size();
        steps.push(RankStep {
            step,
            rank,
            injective: current.is_injective(),
        });
        if rank == steps[step - 1].rank {
            break;
        }
    }
    Ok(steps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Free,
    NotFree,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Free => "Free",
            Verdict::NotFree => "NotFree",
            Verdict::Inconclusive => "Inconclusive",
        };
        f.write_str(s)
    }
}

/// One checked fact of a freeness certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "fact", rename_all = "snake_case")]
pub enum Fact {
    Determinant {
        step: usize,
        #[serde(serialize_with = "serialize_bigint")]
        value: BigInt,
    },
    /// `|det| > 1`: the matrix is not invertible over the integers.
    NonUnitDeterminant { step: usize },
    Automorphism { step: usize, value: bool },
    Restricted { step: usize, rank: usize },
    /// All determinants in the chain vanish.
    Exhausted { steps: usize },
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fact::Determinant { step, value } => write!(f, "step {step}: det = {value}"),
            Fact::NonUnitDeterminant { step } => {
                write!(f, "step {step}: |det| > 1, so the definer is not an automorphism and the group is not free")
            }
            Fact::Automorphism { step, value: true } => {
                write!(f, "step {step}: det != 0 and the definer is an automorphism, so the group is free")
            }
            Fact::Automorphism { step, value: false } => {
                write!(f, "step {step}: det != 0 and the definer is not an automorphism, so the group is not free")
            }
            Fact::Restricted { step, rank } => {
                write!(f, "step {step}: det = 0, restricted to the image, rank {rank}")
            }
            Fact::Exhausted { steps } => write!(f, "determinant vanished through {steps} restriction steps"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FreenessReport {
    pub verdict: Verdict,
    pub certificate: Vec<Fact>,
    /// Definers tested, starting with the presentation's own.
    pub chain: Vec<GroupEndomorphism>,
    pub aperiodicity: Option<PeriodicityEvidence>,
    /// Set when aperiodicity was only checked up to a bound.
    pub conditional: bool,
}

impl FreenessReport {
    /// Recomputes every fact of the certificate from the chain.
    pub fn replay(&self) -> bool {
        let mut verdict = Verdict::Inconclusive;
        for fact in &self.certificate {
            let ok = match fact {
                Fact::Determinant { step, value } => self
                    .chain
                    .get(*step)
                    .is_some_and(|e| &e.incidence_matrix().determinant() == value),
                Fact::NonUnitDeterminant { step } => {
                    verdict = Verdict::NotFree;
                    self.chain
                        .get(*step)
                        .is_some_and(|e| e.incidence_matrix().determinant().abs() > BigInt::one())
                }
                Fact::Automorphism { step, value } => {
                    verdict = if *value { Verdict::Free } else { Verdict::NotFree };
                    self.chain.get(*step).is_some_and(|e| {
                        !e.incidence_matrix().determinant().is_zero() && e.is_automorphism() == *value
                    })
                }
                Fact::Restricted { step, rank } => match (self.chain.get(*step), self.chain.get(step + 1)) {
                    (Some(e), Some(next)) => {
                        e.incidence_matrix().determinant().is_zero()
                            && restrict(e, 1, None).is_ok_and(|r| &r.endo == next && next.size() == *rank)
                    }
                    _ => false,
                },
                Fact::Exhausted { .. } => self
                    .chain
                    .iter()
                    .all(|e| e.incidence_matrix().determinant().is_zero()),
            };
            if !ok {
                return false;
            }
        }
        verdict == self.verdict
    }
}

/// Determinant test on the definer, restricting to images while the
/// determinant vanishes.
pub fn freeness_test(p: &OmegaPresentation, max_restriction_steps: usize) -> Result<FreenessReport> {
    let mut certificate = Vec::new();
    let mut chain = vec![p.definer.clone()];
    let mut verdict = Verdict::Inconclusive;
    for step in 0..=max_restriction_steps {
        let e = &chain[step];
        let d = e.incidence_matrix().determinant();
        certificate.push(Fact::Determinant { step, value: d.clone() });
        if d.abs() > BigInt::one() {
            certificate.push(Fact::NonUnitDeterminant { step });
            verdict = Verdict::NotFree;
            break;
        }
        if !d.is_zero() {
            let automorphism = e.is_automorphism();
            certificate.push(Fact::Automorphism { step, value: automorphism });
            verdict = if automorphism { Verdict::Free } else { Verdict::NotFree };
            break;
        }
        if step == max_restriction_steps {
            certificate.push(Fact::Exhausted { steps: step });
            break;
        }
        let next = restrict(e, 1, None)?.endo;
        certificate.push(Fact::Restricted { step, rank: next.size() });
        chain.push(next);
    }
    Ok(FreenessReport {
        verdict,
        certificate,
        chain,
        aperiodicity: p.aperiodicity.clone(),
        conditional: p.is_conditional(),
    })
}

/// A finite group on the elements `0..order`, with identity `0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FiniteGroup {
    /// Multiplication table: `table[x][y] = x * y`.
    Table { table: Vec<Vec<usize>> },
    /// `(Z/pZ)^dim`, element `x` having base-`p` digits as coordinates.
    ElementaryAbelian { p: u64, dim: usize },
}

impl FiniteGroup {
    /// Validates a multiplication table with identity `0`.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 || table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(Error::InvalidGroup("table must be square with entries in range".into()));
        }
        for x in 0..n {
            if table[0][x] != x || table[x][0] != x {
                return Err(Error::InvalidGroup("0 is not the identity".into()));
            }
            let mut row: Vec<usize> = table[x].clone();
            row.sort_unstable();
            row.dedup();
            if row.len() != n || !(0..n).any(|y| table[x][y] == 0) {
                return Err(Error::InvalidGroup(format!("{x} has no inverse")));
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if table[table[x][y]][z] != table[x][table[y][z]] {
                        return Err(Error::InvalidGroup("not associative".into()));
                    }
                }
            }
        }
        Ok(FiniteGroup::Table { table })
    }

    pub fn elementary_abelian(p: u64, dim: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FiniteGroup::ElementaryAbelian { p, dim })
    }

    /// Table of the symmetric group on three points.
    pub fn symmetric3() -> Self {
        let perms: [[usize; 3]; 6] = [[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
        let index = |p: [usize; 3]| perms.iter().position(|&q| q == p).expect("permutation");
        let table = (0..6)
            .map(|x| {
                (0..6)
                    .map(|y| index([perms[x][perms[y][0]], perms[x][perms[y][1]], perms[x][perms[y][2]]]))
                    .collect()
            })
            .collect();
        FiniteGroup::Table { table }
    }

    pub fn order(&self) -> usize {
        match self {
            FiniteGroup::Table { table } => table.len(),
            FiniteGroup::ElementaryAbelian { p, dim } => (*p as usize).pow(*dim as u32),
        }
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        match self {
            FiniteGroup::Table { table } => table[x][y],
            FiniteGroup::ElementaryAbelian { p, dim } => {
                let p = *p as usize;
                let (mut x, mut y, mut out, mut place) = (x, y, 0, 1);
                for _ in 0..*dim {
                    out += ((x % p + y % p) % p) * place;
                    x /= p;
                    y /= p;
                    place *= p;
                }
                out
            }
        }
    }

    pub fn inv(&self, x: usize) -> usize {
        match self {
            FiniteGroup::Table { table } => (0..table.len()).find(|&y| table[x][y] == 0).expect("group"),
            FiniteGroup::ElementaryAbelian { p, dim } => {
                let p = *p as usize;
                let (mut x, mut out, mut place) = (x, 0, 1);
                for _ in 0..*dim {
                    out += ((p - x % p) % p) * place;
                    x /= p;
                    place *= p;
                }
                out
            }
        }
    }

    /// Value of `w` at the tuple `t`.
    pub fn evaluate(&self, w: &GroupWord, t: &[usize]) -> usize {
        w.gens().iter().fold(0, |acc, g: &Gen| {
            let x = if g.inverse { self.inv(t[g.letter]) } else { t[g.letter] };
            self.mul(acc, x)
        })
    }

    /// Whether the elements of `t` generate the whole group.
    pub fn generates(&self, t: &[usize]) -> bool {
        let mut seen = HashSet::from([0]);
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &g in t {
                let y = self.mul(x, g);
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen.len() == self.order()
    }
}

/// A tuple `t` generating `H` with `e_H^n(t) = t`, where
/// `e_H(t)(a) = t̂(e(a))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientWitness {
    pub group: FiniteGroup,
    pub tuple: Vec<usize>,
    pub exponent: u64,
}

/// One step of the action `t ↦ (a ↦ t̂(e(a)))`.
pub fn act(e: &GroupEndomorphism, h: &FiniteGroup, t: &[usize]) -> Vec<usize> {
    e.images().iter().map(|w| h.evaluate(w, t)).collect()
}

/// Re-checks generation and the fixed-point equation by direct evaluation.
pub fn verify_witness(e: &GroupEndomorphism, w: &QuotientWitness) -> bool {
    if w.exponent == 0 || w.tuple.len() != e.size() || w.tuple.iter().any(|&x| x >= w.group.order()) {
        return false;
    }
    if !w.group.generates(&w.tuple) {
        return false;
    }
    let mut t = w.tuple.clone();
    for _ in 0..w.exponent {
        t = act(e, &w.group, &t);
    }
    t == w.tuple
}

/// Witness in `(Z/pZ)^A` through the standard basis, when `p` does not divide
/// the determinant; the exponent is the order of the matrix mod `p`.
pub fn abelian_quotient_mod_p(e: &GroupEndomorphism, p: u64) -> Result<Option<QuotientWitness>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let m = e.incidence_matrix();
    if (m.determinant() % BigInt::from(p)).is_zero() {
        return Ok(None);
    }
    let exponent = order_mod_p(&m.mod_p(p), p, u64::MAX).expect("invertible matrices have finite order");
    let p_usize = p as usize;
    let tuple = (0..e.size()).map(|a| p_usize.pow(a as u32)).collect();
    Ok(Some(QuotientWitness {
        group: FiniteGroup::ElementaryAbelian { p, dim: e.size() },
        tuple,
        exponent,
    }))
}

/// Exhaustive search over `H^A` in lexicographic order for a generating
/// tuple lying on a cycle of the action.
pub fn finite_quotient_witness(
    e: &GroupEndomorphism,
    h: &FiniteGroup,
    bound: u128,
) -> Result<Option<QuotientWitness>> {
    let order = h.order();
    let size = (order as u128).checked_pow(e.size() as u32).unwrap_or(u128::MAX);
    if size > bound {
        return Err(Error::SearchBoundExceeded { size, bound });
    }
    let mut tuple = vec![0usize; e.size()];
    loop {
        if h.generates(&tuple) {
            if let Some(exponent) = cycle_through(e, h, &tuple) {
                return Ok(Some(QuotientWitness {
                    group: h.clone(),
                    tuple,
                    exponent,
                }));
            }
        }
        // next tuple, last coordinate fastest
        let mut k = tuple.len();
        loop {
            if k == 0 {
                return Ok(None);
            }
            k -= 1;
            tuple[k] += 1;
            if tuple[k] < order {
                break;
            }
            tuple[k] = 0;
        }
    }
}

/// Least `n >= 1` with `e_H^n(t) = t`, if `t` lies on a cycle.
fn cycle_through(e: &GroupEndomorphism, h: &FiniteGroup, t: &[usize]) -> Option<u64> {
    let mut seen: HashMap<Vec<usize>, u64> = HashMap::new();
    let mut cur = t.to_vec();
    for n in 1.. {
        cur = act(e, h, &cur);
        if cur == t {
            return Some(n);
        }
        if seen.insert(cur.clone(), n).is_some() {
            return None;
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalyzeOptions {
    pub complexity_bound: usize,
    pub max_restrict: usize,
    pub connection: Option<(MonoidWord, MonoidWord)>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            complexity_bound: DEFAULT_MAX_COMPLEXITY,
            max_restrict: DEFAULT_MAX_RESTRICT,
            connection: None,
        }
    }
}

/// Pseudovariety facts read off the incidence determinant `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[allow(non_snake_case)]
pub struct PseudovarietyFacts {
    pub unimodular: bool,
    pub invertible: bool,
    /// `G_p` is contained in `V(φ)` for every prime `p` not dividing `d`.
    pub Gp_contained_for: String,
    pub Gnil_contained: bool,
    /// Relative freeness then coincides with absolute freeness.
    pub V_equals_G: bool,
}

impl PseudovarietyFacts {
    pub fn of(s: &Substitution) -> Self {
        let d = s.incidence_matrix().determinant();
        let unimodular = d.abs().is_one();
        let invertible = GroupEndomorphism::from_substitution(s).is_automorphism();
        let gp_contained_for = if d.is_zero() {
            "no primes".to_string()
        } else if unimodular {
            "all primes".to_string()
        } else {
            let primes: Vec<String> = prime_divisors(&d).iter().map(|p| p.to_string()).collect();
            format!("all primes except {}", primes.join(", "))
        };
        PseudovarietyFacts {
            unimodular,
            invertible,
            Gp_contained_for: gp_contained_for,
            Gnil_contained: unimodular,
            V_equals_G: invertible,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimitivityInfo {
    pub primitive: bool,
    /// Least `n` with a positive `n`-th matrix power.
    pub exponent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub primitivity: PrimitivityInfo,
    pub aperiodicity: PeriodicityEvidence,
    #[serde(serialize_with = "serialize_bigint")]
    pub determinant: BigInt,
    pub proper: bool,
    pub returns: Option<ReturnStructure>,
    pub presentation: Option<OmegaPresentation>,
    pub ranks: Vec<RankStep>,
    pub freeness: Option<FreenessReport>,
    pub pseudovariety_facts: PseudovarietyFacts,
    /// `Some(free)` when relative and absolute freeness coincide.
    pub relatively_free: Option<bool>,
    pub notes: Vec<String>,
}

/// Full pipeline on a substitution.
pub fn analyze(s: &Substitution, options: &AnalyzeOptions) -> Result<AnalysisReport> {
    let primitivity = PrimitivityInfo {
        primitive: s.is_primitive(),
        exponent: s.primitivity_exponent(),
    };
    if !primitivity.primitive {
        return Err(Error::NotPrimitive);
    }
    let aperiodicity = s.periodicity_evidence(options.complexity_bound)?;
    let pseudovariety_facts = PseudovarietyFacts::of(s);
    let mut report = AnalysisReport {
        primitivity,
        aperiodicity: aperiodicity.clone(),
        determinant: s.incidence_matrix().determinant(),
        proper: s.is_proper(),
        returns: None,
        presentation: None,
        ranks: Vec::new(),
        freeness: None,
        pseudovariety_facts,
        relatively_free: None,
        notes: Vec::new(),
    };
    if let PeriodicityEvidence::PeriodicProven { period, .. } = &aperiodicity {
        report
            .notes
            .push(format!("periodic with period {period}: the Schützenberger group is free profinite of rank 1"));
        return Ok(report);
    }
    let (presentation, returns) = match &options.connection {
        Some((u, v)) => {
            let c = Connection::new(s, u.clone(), v.clone())?;
            omega_presentation_at(s, &c, aperiodicity.clone())?
        }
        None => omega_presentation_from_substitution(s, options.complexity_bound)?,
    };
    let freeness = freeness_test(&presentation, options.max_restrict)?;
    report.ranks = stabilize_restrictions(&presentation.definer, options.max_restrict)?;
    if report.pseudovariety_facts.V_equals_G && freeness.verdict != Verdict::Inconclusive {
        let free = freeness.verdict == Verdict::Free;
        report.relatively_free = Some(free);
        report.notes.push(if free {
            "V(φ) is the pseudovariety of all finite groups and the group is free".into()
        } else {
            "V(φ) is the pseudovariety of all finite groups, so the group is not relatively free".into()
        });
    }
    if freeness.conditional {
        report
            .notes
            .push("verdict is conditional on aperiodicity, which was only checked up to the complexity bound".into());
    }
    report.returns = returns;
    report.presentation = Some(presentation);
    report.freeness = Some(freeness);
    Ok(report)
}
