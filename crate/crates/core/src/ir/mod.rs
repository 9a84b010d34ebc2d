//! Typed term representation: sorts, the datatype signature, and the
//! hash-consed term store.

mod normal;
mod signature;
mod term;

pub use normal::{child_depth_terms, NormalTerm, SelectorChain};
pub use signature::{
    AdtDecl, AdtDef, AdtSignature, CtorDecl, CtorDef, Declarations, FunDecl, SelDef,
    SignatureError,
};
pub use term::{Node, Op, TermStore, VarDecl};

use core::fmt;

macro_rules! id_type {
    ($($(#[$meta:meta])* $name:ident;)*) => {$(
        $(#[$meta])*
        #[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize
            }

            #[inline]
            pub(crate) fn from_index(index: usize) -> Self {
                Self(index as u32)
            }
        }
    )*};
}

id_type! {
    /// A declared algebraic data type.
    AdtId;
    /// A constructor. Its tester is identified by the same id.
    CtorId;
    /// A selector.
    SelId;
    /// A user-declared uninterpreted sort.
    SortId;
    /// A user-declared uninterpreted function of arity ≥ 1.
    FunId;
    /// A variable (a nullary uninterpreted constant).
    VarId;
    /// An interned term.
    TermId;
}

/// The sort of a term.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Sort {
    Bool,
    Uninterpreted(SortId),
    Adt(AdtId),
}

impl Sort {
    pub fn adt(self) -> Option<AdtId> {
        match self {
            Sort::Adt(a) => Some(a),
            _ => None,
        }
    }
}

impl fmt::Display for AdtId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "adt#{}", self.0)
    }
}
