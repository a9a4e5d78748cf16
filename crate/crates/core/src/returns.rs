//! Connections, return words and return substitutions.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_integer::Integer;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::substitution::Substitution;
use crate::words::{occurrences, Letter, MonoidWord};

/// Iteration cap on the seeding loop of [`durand`].
pub const SEEDING_LIMIT: usize = 64;

/// A pair `(u, v)` with `uv` in the language, `φ^k(u)` ending with `u` and
/// `φ^k(v)` starting with `v`, where `k` is the least such positive integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Connection {
    pub u: MonoidWord,
    pub v: MonoidWord,
    #[serde(rename = "k")]
    pub order: usize,
}

impl Connection {
    /// Validates `(u, v)` against `s` and computes its order.
    pub fn new(s: &Substitution, u: MonoidWord, v: MonoidWord) -> Result<Self> {
        match connection_order(s, &u, &v)? {
            Some(order) => Ok(Connection { u, v, order }),
            None => Err(Error::InvalidConnection { u, v, order: 0 }),
        }
    }

    pub fn uv(&self) -> MonoidWord {
        self.u.concat(&self.v)
    }
}

/// Order of `(u, v)` as a connection of `s`, or `None` if it is not one.
pub fn connection_order(s: &Substitution, u: &[Letter], v: &[Letter]) -> Result<Option<usize>> {
    if u.is_empty() || v.is_empty() {
        return Ok(None);
    }
    u.iter().chain(v).try_for_each(|&l| s.alphabet().check(l))?;
    let uv: Vec<Letter> = u.iter().chain(v).copied().collect();
    if !s.is_factor(&uv)? {
        return Ok(None);
    }
    // the length-|u| suffix of φ(w) only depends on the length-|u| suffix of
    // w (images are non-empty), and symmetrically for prefixes, so the pair
    // of boundary words evolves deterministically through a finite set
    let mut suffix = u.to_vec();
    let mut prefix = v.to_vec();
    let mut seen = HashSet::new();
    for k in 1.. {
        let image = s.apply(&suffix);
        suffix = image[image.len() - u.len()..].to_vec();
        let image = s.apply(&prefix);
        prefix = image[..v.len()].to_vec();
        if suffix == u && prefix == v {
            return Ok(Some(k));
        }
        if !seen.insert((suffix.clone(), prefix.clone())) {
            return Ok(None);
        }
    }
    unreachable!()
}

/// True iff `(u, v)` is a connection of `s` of order exactly `k`.
pub fn verify_connection(s: &Substitution, u: &[Letter], v: &[Letter], k: usize) -> bool {
    k > 0 && matches!(connection_order(s, u, v), Ok(Some(order)) if order == k)
}

/// Least period of `a` under the letter map `f`, if `a` is periodic.
fn cycle_length(f: &[Letter], a: Letter) -> Option<usize> {
    let mut x = f[a];
    for n in 1..=f.len() {
        if x == a {
            return Some(n);
        }
        x = f[x];
    }
    None
}

/// A one-letter connection of least order. Ties are broken by preferring
/// distinct letters, then by `(a, b)` lexicographically.
pub fn find_connection(s: &Substitution) -> Result<Connection> {
    let first = s.first_letter_map();
    let last = s.last_letter_map();
    let pairs = s.factors_of_length(2)?;
    let best = pairs
        .iter()
        .filter_map(|ab| {
            let (a, b) = (ab[0], ab[1]);
            let p = cycle_length(&last, a)?;
            let q = cycle_length(&first, b)?;
            Some((p.lcm(&q), a == b, a, b))
        })
        .min()
        .ok_or(Error::NoConnection)?;
    let (order, _, a, b) = best;
    Ok(Connection {
        u: MonoidWord::new(vec![a]),
        v: MonoidWord::new(vec![b]),
        order,
    })
}

/// Return words read between consecutive occurrences of `uv` in `text`, in
/// left-to-right order.
pub fn return_words(text: &[Letter], u: &[Letter], v: &[Letter]) -> Vec<MonoidWord> {
    let uv: Vec<Letter> = u.iter().chain(v).copied().collect();
    let positions = occurrences(text, &uv);
    positions
        .windows(2)
        .map(|p| MonoidWord::from(&text[p[0] + u.len()..p[1] + u.len()]))
        .collect()
}

/// True iff `uv` occurs exactly twice in `u r v`, which is then a return word.
pub fn is_return_word(r: &[Letter], u: &[Letter], v: &[Letter]) -> bool {
    let urv: Vec<Letter> = u.iter().chain(r).chain(v).copied().collect();
    let uv: Vec<Letter> = u.iter().chain(v).copied().collect();
    let occ = occurrences(&urv, &uv);
    occ.len() == 2 && occ[0] == 0 && occ[1] == urv.len() - uv.len()
}

/// The return substitution of a connection together with the bijection
/// `Θ` from its alphabet onto the return set, in leftmost-occurrence order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReturnStructure {
    pub connection: Connection,
    pub theta: Vec<MonoidWord>,
    pub return_substitution: Substitution,
}

impl ReturnStructure {
    pub fn size(&self) -> usize {
        self.theta.len()
    }

    pub fn return_set(&self) -> BTreeSet<MonoidWord> {
        self.theta.iter().cloned().collect()
    }

    /// Extends `Θ` to a monoid morphism.
    pub fn decode(&self, w: &[Letter]) -> MonoidWord {
        let mut out = Vec::new();
        for &i in w {
            out.extend_from_slice(&self.theta[i]);
        }
        MonoidWord::new(out)
    }

    /// `u · φ^k(Θ(j)) · v`.
    pub fn expanded(&self, s: &Substitution, j: Letter) -> MonoidWord {
        let c = &self.connection;
        c.u.concat(&s.iterate(&self.theta[j], c.order)).concat(&c.v)
    }

    /// Return words of `u · φ^k(Θ(j)) · v`, left to right.
    pub fn factorization_row(&self, s: &Substitution, j: Letter) -> Vec<MonoidWord> {
        let c = &self.connection;
        return_words(&self.expanded(s, j), &c.u, &c.v)
    }

    /// Indices of the return words of `u · φ^k(Θ(j)) · v`.
    pub fn factorize(&self, s: &Substitution, j: Letter) -> Result<Vec<Letter>> {
        let index: HashMap<&MonoidWord, Letter> =
            self.theta.iter().enumerate().map(|(i, r)| (r, i)).collect();
        self.factorization_row(s, j)
            .iter()
            .map(|r| {
                index
                    .get(r)
                    .copied()
                    .ok_or_else(|| Error::Internal(format!("{r} is not in the return set")))
            })
            .collect()
    }
}

/// Computes the return substitution of `s` at connection `c` with Durand's
/// algorithm: seed `Θ(0)` with the leftmost return word in `u φ^(nk)(v)`,
/// then factorize `u φ^k(Θ(j)) v` for each defined `j`, numbering unseen
/// return words as they appear.
pub fn durand(s: &Substitution, c: &Connection) -> Result<ReturnStructure> {
    if !s.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    if !verify_connection(s, &c.u, &c.v, c.order) {
        return Err(Error::InvalidConnection {
            u: c.u.clone(),
            v: c.v.clone(),
            order: c.order,
        });
    }
    let uv = c.uv();
    let mut w = c.v.clone();
    let mut seeded = None;
    for _ in 0..SEEDING_LIMIT {
        w = s.iterate(&w, c.order);
        let uw = c.u.concat(&w);
        if occurrences(&uw, &uv).len() >= 2 {
            seeded = return_words(&uw, &c.u, &c.v).into_iter().next();
            break;
        }
    }
    let first = seeded.ok_or(Error::SeedingExhausted(SEEDING_LIMIT))?;

    let mut theta = vec![first];
    let mut index: HashMap<MonoidWord, Letter> = HashMap::new();
    index.insert(theta[0].clone(), 0);
    let mut images = Vec::new();
    let mut j = 0;
    while j < theta.len() {
        let x = c.u.concat(&s.iterate(&theta[j], c.order)).concat(&c.v);
        let mut image = Vec::new();
        for r in return_words(&x, &c.u, &c.v) {
            let next = theta.len();
            let i = *index.entry(r.clone()).or_insert_with(|| {
                theta.push(r);
                next
            });
            image.push(i);
        }
        images.push(MonoidWord::new(image));
        j += 1;
    }
    if theta.len() == 1 {
        return Err(Error::PeriodicWitness {
            return_word: theta.pop().expect("one element"),
        });
    }
    Ok(ReturnStructure {
        connection: c.clone(),
        theta,
        return_substitution: Substitution::new(images)?,
    })
}

/// Sardinas–Patterson test for unique decipherability.
pub fn is_code<'a, I>(words: I) -> bool
where
    I: IntoIterator<Item = &'a MonoidWord>,
{
    let code: HashSet<&[Letter]> = words.into_iter().map(|w| w.letters()).collect();
    if code.contains(&[][..]) {
        return false;
    }
    // dangling suffixes y with x y in C for x in S, or x in C with x y in S
    let quotients = |left: &HashSet<Vec<Letter>>, right: &HashSet<Vec<Letter>>| {
        let mut out = HashSet::new();
        for x in left {
            for w in right {
                if w.len() > x.len() && w.starts_with(x) {
                    out.insert(w[x.len()..].to_vec());
                }
            }
        }
        out
    };
    let c: HashSet<Vec<Letter>> = code.iter().map(|w| w.to_vec()).collect();
    let mut current = quotients(&c, &c);
    let mut seen: HashSet<Vec<Vec<Letter>>> = HashSet::new();
    loop {
        if current.iter().any(|y| c.contains(y)) {
            return false;
        }
        if current.is_empty() {
            return true;
        }
        let mut key: Vec<Vec<Letter>> = current.iter().cloned().collect();
        key.sort();
        if !seen.insert(key) {
            return true;
        }
        let mut next = quotients(&c, &current);
        next.extend(quotients(&current, &c));
        current = next;
    }
}

impl Serialize for ReturnStructure {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(3))?;
        map.serialize_entry("connection", &self.connection)?;
        map.serialize_entry("theta", &self.theta)?;
        let images: Vec<(String, String)> = self
            .return_substitution
            .images()
            .iter()
            .enumerate()
            .map(|(i, w)| (MonoidWord::new(vec![i]).to_string(), w.to_string()))
            .collect();
        map.serialize_entry("return_substitution", &OrderedMap(&images))?;
        map.end()
    }
}

struct OrderedMap<'a>(&'a [(String, String)]);

impl Serialize for OrderedMap<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::mw;

    fn sub(images: &[&str]) -> Substitution {
        Substitution::from_words(images).unwrap()
    }

    fn tau() -> Substitution {
        sub(&["01", "10"])
    }

    fn xi() -> Substitution {
        sub(&["001", "02", "301", "320"])
    }

    fn rho() -> Substitution {
        sub(&["01", "00"])
    }

    fn words(ws: &[&str]) -> Vec<MonoidWord> {
        ws.iter().map(|w| mw(w)).collect()
    }

    #[test]
    fn connections_found() {
        for (s, a, b) in [(tau(), "0", "1"), (rho(), "1", "0"), (xi(), "1", "0")] {
            let c = find_connection(&s).unwrap();
            assert_eq!((c.u, c.v, c.order), (mw(a), mw(b), 2));
        }
    }

    #[test]
    fn connection_verification() {
        assert!(verify_connection(&tau(), &mw("0"), &mw("10"), 2));
        assert!(!verify_connection(&tau(), &mw("0"), &mw("1"), 1));
        assert!(!verify_connection(&tau(), &mw("0"), &mw("1"), 0));
        assert!(!verify_connection(&tau(), &mw("0"), &mw("1"), 4));
        assert!(!verify_connection(&tau(), &mw(""), &mw("1"), 2));
        // 000 is not a factor of Thue-Morse
        assert!(!verify_connection(&tau(), &mw("00"), &mw("0"), 2));
    }

    #[test]
    fn thue_morse_return_substitutions() {
        let c = Connection::new(&tau(), mw("0"), mw("1")).unwrap();
        let r = durand(&tau(), &c).unwrap();
        assert_eq!(r.return_substitution.images(), &words(&["0123", "013", "02123", "0213"])[..]);
        assert_eq!(r.factorize(&tau(), 0).unwrap(), vec![0, 1, 2, 3]);

        let c = Connection::new(&tau(), mw("0"), mw("10")).unwrap();
        let r = durand(&tau(), &c).unwrap();
        assert_eq!(r.return_substitution.images(), &words(&["01", "023132", "0232", "0131"])[..]);
    }

    #[test]
    fn period_doubling_return_substitution() {
        let c = Connection::new(&rho(), mw("1"), mw("0")).unwrap();
        let r = durand(&rho(), &c).unwrap();
        assert_eq!(r.return_substitution.images(), &words(&["010", "01110"])[..]);
    }

    #[test]
    fn xi_return_structure() {
        let c = Connection::new(&xi(), mw("1"), mw("0")).unwrap();
        let r = durand(&xi(), &c).unwrap();
        let theta = words(&[
            "001",
            "02001",
            "02001301",
            "02320001",
            "02001301320301",
            "02320301",
            "001320001",
        ]);
        assert_eq!(r.theta, theta);
        let images = words(&[
            "00102",
            "00310102",
            "003101040002",
            "003561010102",
            "00310104000461050002",
            "003561050002",
            "0010461010102",
        ]);
        assert_eq!(r.return_substitution.images(), &images[..]);
        assert_eq!(r.factorize(&xi(), 0).unwrap(), vec![0, 0, 1, 0, 2]);
        assert_eq!(r.factorize(&xi(), 5).unwrap(), vec![0, 0, 3, 5, 6, 1, 0, 5, 0, 0, 0, 2]);
    }

    #[test]
    fn periodic_substitution_has_singleton_return_set() {
        let s = sub(&["02", "21", "10"]);
        let c = find_connection(&s).unwrap();
        assert_eq!(
            durand(&s, &c),
            Err(Error::PeriodicWitness { return_word: mw("021") })
        );
    }

    #[test]
    fn durand_rejects_bad_input() {
        let bogus = Connection { u: mw("0"), v: mw("1"), order: 1 };
        assert!(matches!(durand(&tau(), &bogus), Err(Error::InvalidConnection { .. })));
        let id = Substitution::identity(2).unwrap();
        assert_eq!(durand(&id, &bogus), Err(Error::NotPrimitive));
    }

    #[test]
    fn codes() {
        assert!(!is_code(&words(&["0", "01", "10"])));
        assert!(is_code(&words(&["0"])));
        assert!(is_code(&words(&["0", "01", "11"])));
        assert!(!is_code(&words(&["0", ""])));
        assert!(!is_code(&words(&["01", "0", "1"])));
        let c = Connection::new(&xi(), mw("1"), mw("0")).unwrap();
        let r = durand(&xi(), &c).unwrap();
        assert!(is_code(&r.theta));
    }

    fn fixtures() -> Vec<(Substitution, Connection)> {
        let mut out = Vec::new();
        for (s, u, v) in [
            (tau(), "0", "1"),
            (tau(), "0", "10"),
            (rho(), "1", "0"),
            (xi(), "1", "0"),
            (sub(&["01", "0001"]), "1", "0"),
            (sub(&["01", "0"]), "1", "0"),
        ] {
            let c = Connection::new(&s, mw(u), mw(v)).unwrap();
            out.push((s, c));
        }
        out
    }

    #[test]
    fn defining_relation_on_short_words() {
        for (s, c) in fixtures() {
            let r = durand(&s, &c).unwrap();
            let phi = &r.return_substitution;
            let n = r.size();
            let mut ws: Vec<Vec<Letter>> = vec![vec![]];
            for len in 1..=3 {
                let prev: Vec<Vec<Letter>> = ws.iter().filter(|w| w.len() == len - 1).cloned().collect();
                for w in prev {
                    for a in 0..n {
                        let mut x = w.clone();
                        x.push(a);
                        ws.push(x);
                    }
                }
            }
            for w in ws {
                assert_eq!(r.decode(&phi.apply(&w)), s.iterate(&r.decode(&w), c.order));
            }
        }
    }

    #[test]
    fn theta_entries_are_return_words_in_leftmost_order() {
        for (s, c) in fixtures() {
            let r = durand(&s, &c).unwrap();
            let mut factors_checked = false;
            for t in &r.theta {
                assert!(is_return_word(t, &c.u, &c.v));
                let urv: Vec<Letter> = c.u.iter().chain(t.iter()).chain(c.v.iter()).copied().collect();
                if urv.len() <= 12 {
                    assert!(s.is_factor(&urv).unwrap());
                    factors_checked = true;
                }
            }
            assert!(factors_checked);
            assert_eq!(r.return_set().len(), r.size());
            // leftmost occurrences in u φ^(nk)(v) for n large enough
            let mut w = c.v.clone();
            let mut order = Vec::new();
            for _ in 0..8 {
                w = s.iterate(&w, c.order);
                let uw = c.u.concat(&w);
                order.clear();
                for rw in return_words(&uw, &c.u, &c.v) {
                    if !order.contains(&rw) {
                        order.push(rw);
                    }
                }
                if order.len() == r.size() || uw.len() > 200_000 {
                    break;
                }
            }
            assert_eq!(order, r.theta);
        }
    }

    #[test]
    fn return_substitutions_are_primitive_and_proper() {
        for (s, c) in fixtures() {
            let r = durand(&s, &c).unwrap();
            assert!(r.return_substitution.is_primitive());
            assert!(r.return_substitution.is_proper());
            assert!(is_code(&r.theta));
        }
    }

    #[test]
    fn json_shape() {
        let c = Connection::new(&rho(), mw("1"), mw("0")).unwrap();
        let r = durand(&rho(), &c).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(
            json,
            r#"{"connection":{"u":"1","v":"0","k":2},"theta":["01","0001"],"return_substitution":{"0":"010","1":"01110"}}"#
        );
    }
}
