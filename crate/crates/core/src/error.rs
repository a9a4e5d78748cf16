use thiserror::Error;

use crate::words::{GroupWord, Letter, MonoidWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("letter {letter} is outside an alphabet of size {size}")]
    LetterOutOfRange { letter: Letter, size: usize },

    #[error("alphabet must contain at least one letter")]
    EmptyAlphabet,

    #[error("alphabet mismatch: expected {expected} letters, found {found}")]
    AlphabetMismatch { expected: usize, found: usize },

    #[error("image of letter {0} is empty; substitutions must be non-erasing")]
    ErasingImage(Letter),

    #[error("substitution is not primitive")]
    NotPrimitive,

    #[error("({u}, {v}) is not a connection of order {order}")]
    InvalidConnection {
        u: MonoidWord,
        v: MonoidWord,
        order: usize,
    },

    #[error("no connection found")]
    NoConnection,

    #[error("uv did not occur twice after {0} iterations of the seeding loop")]
    SeedingExhausted(usize),

    #[error("return set is the singleton {{{return_word}}}: the substitution is periodic")]
    PeriodicWitness { return_word: MonoidWord },

    #[error("substitution is periodic with period word {0}")]
    Periodic(MonoidWord),

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("{0} is not a member of the subgroup")]
    NotAMember(GroupWord),

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("invalid spanning tree: {0}")]
    InvalidTree(String),

    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),

    #[error("endomorphism is not an automorphism")]
    NotAnAutomorphism,

    #[error("the empty word is trivially in every kernel")]
    TrivialKernelWord,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("invalid group table: {0}")]
    InvalidGroup(String),

    #[error("search space of {size} tuples exceeds the bound {bound}")]
    SearchBoundExceeded { size: u128, bound: u128 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
