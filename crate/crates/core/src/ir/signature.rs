use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};
use thiserror::Error;

use super::{AdtId, CtorId, FunId, SelId, Sort, SortId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdtDef {
    pub name: String,
    pub ctors: Vec<CtorId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtorDef {
    pub name: String,
    pub adt: AdtId,
    pub selectors: Vec<SelId>,
}

impl CtorDef {
    pub fn arity(&self) -> usize {
        self.selectors.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelDef {
    pub name: String,
    pub ctor: CtorId,
    /// Position of the selected argument, 0-based.
    pub index: usize,
    pub sort: Sort,
}

/// One datatype of a declaration block, before validation.
///
/// Field sorts may reference `Sort::Adt` ids of the block being declared:
/// the i-th datatype of a block receives id `adt_count() + i`.
#[derive(Clone, Debug)]
pub struct AdtDecl {
    pub name: String,
    pub ctors: Vec<CtorDecl>,
}

#[derive(Clone, Debug)]
pub struct CtorDecl {
    pub name: String,
    pub fields: Vec<(String, Sort)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("datatype `{0}` has no constructors")]
    NoConstructors(String),
    #[error("symbol `{0}` is declared twice")]
    Duplicate(String),
    #[error("datatype `{0}` is not inhabited (no finite normal term)")]
    Uninhabited(String),
    #[error("field `{field}` refers to an undeclared datatype")]
    DanglingSort { field: String },
}

/// The declared datatypes: constructors, their selectors, and the implicit
/// testers (one per constructor, addressed by the constructor's id).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AdtSignature {
    adts: Vec<AdtDef>,
    ctors: Vec<CtorDef>,
    sels: Vec<SelDef>,
}

impl AdtSignature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn adt_count(&self) -> usize {
        self.adts.len()
    }

    pub fn adt(&self, id: AdtId) -> &AdtDef {
        &self.adts[id.index()]
    }

    pub fn ctor(&self, id: CtorId) -> &CtorDef {
        &self.ctors[id.index()]
    }

    pub fn sel(&self, id: SelId) -> &SelDef {
        &self.sels[id.index()]
    }

    pub fn adt_ids(&self) -> impl ExactSizeIterator<Item = AdtId> + '_ {
        (0..self.adts.len()).map(AdtId::from_index)
    }

    pub fn ctor_ids(&self) -> impl ExactSizeIterator<Item = CtorId> + '_ {
        (0..self.ctors.len()).map(CtorId::from_index)
    }

    pub fn sel_ids(&self) -> impl ExactSizeIterator<Item = SelId> + '_ {
        (0..self.sels.len()).map(SelId::from_index)
    }

    pub fn find_adt(&self, name: &str) -> Option<AdtId> {
        self.adts
            .iter()
            .position(|a| a.name == name)
            .map(AdtId::from_index)
    }

    pub fn find_ctor(&self, name: &str) -> Option<CtorId> {
        self.ctors
            .iter()
            .position(|c| c.name == name)
            .map(CtorId::from_index)
    }

    pub fn find_sel(&self, name: &str) -> Option<SelId> {
        self.sels
            .iter()
            .position(|s| s.name == name)
            .map(SelId::from_index)
    }

    /// Argument sorts of a constructor, in selector order.
    pub fn ctor_fields(&self, id: CtorId) -> impl ExactSizeIterator<Item = Sort> + '_ {
        self.ctor(id).selectors.iter().map(|&s| self.sel(s).sort)
    }

    /// Nullary constructors of `adt`.
    pub fn constants(&self, adt: AdtId) -> impl Iterator<Item = CtorId> + '_ {
        self.adt(adt)
            .ctors
            .iter()
            .copied()
            .filter(|&c| self.ctor(c).arity() == 0)
    }

    pub fn max_arity(&self) -> usize {
        self.ctors.iter().map(CtorDef::arity).max().unwrap_or(0)
    }

    /// Validates and appends a block of (possibly mutually recursive)
    /// datatypes. Nothing is added on error.
    pub fn declare_block(&mut self, block: Vec<AdtDecl>) -> Result<Vec<AdtId>, SignatureError> {
        let base = self.adts.len();
        let limit = base + block.len();
        self.validate_block(&block, limit)?;

        let mut candidate = self.clone();
        let mut ids = Vec::with_capacity(block.len());
        for decl in block {
            let adt = AdtId::from_index(candidate.adts.len());
            ids.push(adt);
            let mut ctor_ids = Vec::with_capacity(decl.ctors.len());
            for ctor in decl.ctors {
                let cid = CtorId::from_index(candidate.ctors.len());
                let mut sel_ids = Vec::with_capacity(ctor.fields.len());
                for (index, (name, sort)) in ctor.fields.into_iter().enumerate() {
                    sel_ids.push(SelId::from_index(candidate.sels.len()));
                    candidate.sels.push(SelDef {
                        name,
                        ctor: cid,
                        index,
                        sort,
                    });
                }
                candidate.ctors.push(CtorDef {
                    name: ctor.name,
                    adt,
                    selectors: sel_ids,
                });
                ctor_ids.push(cid);
            }
            candidate.adts.push(AdtDef {
                name: decl.name,
                ctors: ctor_ids,
            });
        }

        let inhabited = candidate.inhabited();
        if let Some(bad) = candidate.adt_ids().find(|a| !inhabited[a.index()]) {
            return Err(SignatureError::Uninhabited(candidate.adt(bad).name.clone()));
        }
        *self = candidate;
        Ok(ids)
    }

    fn validate_block(&self, block: &[AdtDecl], limit: usize) -> Result<(), SignatureError> {
        let mut seen: HashSet<&str> = self.names().collect();
        for decl in block {
            if !seen.insert(&decl.name) {
                return Err(SignatureError::Duplicate(decl.name.clone()));
            }
            if decl.ctors.is_empty() {
                return Err(SignatureError::NoConstructors(decl.name.clone()));
            }
        }
        for decl in block {
            for ctor in &decl.ctors {
                if !seen.insert(&ctor.name) {
                    return Err(SignatureError::Duplicate(ctor.name.clone()));
                }
                for (field, sort) in &ctor.fields {
                    if !seen.insert(field) {
                        return Err(SignatureError::Duplicate(field.clone()));
                    }
                    if let Sort::Adt(a) = sort {
                        if a.index() >= limit {
                            return Err(SignatureError::DanglingSort {
                                field: field.clone(),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Least-fixpoint inhabitation: an ADT is inhabited iff one of its
    /// constructors has only inhabited argument sorts.
    pub fn inhabited(&self) -> Vec<bool> {
        let mut inhabited = alloc::vec![false; self.adts.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for adt in self.adt_ids() {
                if inhabited[adt.index()] {
                    continue;
                }
                let ok = self.adt(adt).ctors.iter().any(|&c| {
                    self.ctor_fields(c).all(|s| match s {
                        Sort::Adt(b) => inhabited[b.index()],
                        _ => true,
                    })
                });
                if ok {
                    inhabited[adt.index()] = true;
                    changed = true;
                }
            }
        }
        inhabited
    }

    fn names(&self) -> impl Iterator<Item = &str> {
        self.adts
            .iter()
            .map(|a| a.name.as_str())
            .chain(self.ctors.iter().map(|c| c.name.as_str()))
            .chain(self.sels.iter().map(|s| s.name.as_str()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunDecl {
    pub name: String,
    pub params: Vec<Sort>,
    pub ret: Sort,
}

/// Everything a query may mention besides variables: datatypes,
/// uninterpreted sorts and uninterpreted functions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Declarations {
    pub adts: AdtSignature,
    pub sorts: Vec<String>,
    pub funs: Vec<FunDecl>,
}

impl Declarations {
    pub fn sort_name(&self, sort: Sort) -> &str {
        match sort {
            Sort::Bool => "Bool",
            Sort::Uninterpreted(s) => &self.sorts[s.index()],
            Sort::Adt(a) => &self.adts.adt(a).name,
        }
    }

    pub fn fun(&self, id: FunId) -> &FunDecl {
        &self.funs[id.index()]
    }

    pub fn add_sort(&mut self, name: String) -> SortId {
        self.sorts.push(name);
        SortId::from_index(self.sorts.len() - 1)
    }

    pub fn add_fun(&mut self, decl: FunDecl) -> FunId {
        self.funs.push(decl);
        FunId::from_index(self.funs.len() - 1)
    }

    /// Name → sort table for sort lookups while parsing.
    pub fn sort_table(&self) -> HashMap<&str, Sort> {
        let mut table = HashMap::new();
        table.insert("Bool", Sort::Bool);
        for (i, name) in self.sorts.iter().enumerate() {
            table.insert(name.as_str(), Sort::Uninterpreted(SortId::from_index(i)));
        }
        for adt in self.adts.adt_ids() {
            table.insert(self.adts.adt(adt).name.as_str(), Sort::Adt(adt));
        }
        table
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn ctor(name: &str, fields: &[(&str, Sort)]) -> CtorDecl {
        CtorDecl {
            name: name.to_string(),
            fields: fields.iter().map(|(n, s)| (n.to_string(), *s)).collect(),
        }
    }

    #[test]
    fn tower_is_inhabited() {
        let mut sig = AdtSignature::new();
        let block = Sort::Adt(AdtId(0));
        let tower = Sort::Adt(AdtId(1));
        let ids = sig
            .declare_block(vec![
                AdtDecl {
                    name: "block".into(),
                    ctors: vec![ctor("A", &[]), ctor("B", &[])],
                },
                AdtDecl {
                    name: "tower".into(),
                    ctors: vec![
                        ctor("Empty", &[]),
                        ctor("Stack", &[("top", block), ("rest", tower)]),
                    ],
                },
            ])
            .unwrap();
        assert_eq!(ids, vec![AdtId(0), AdtId(1)]);
        let stack = sig.find_ctor("Stack").unwrap();
        assert_eq!(sig.ctor(stack).arity(), 2);
        assert_eq!(sig.constants(AdtId(1)).count(), 1);
    }

    #[test]
    fn loop_without_base_is_rejected() {
        let mut sig = AdtSignature::new();
        let bad = Sort::Adt(AdtId(0));
        let err = sig
            .declare_block(vec![AdtDecl {
                name: "bad".into(),
                ctors: vec![ctor("Loop", &[("next", bad)])],
            }])
            .unwrap_err();
        assert_eq!(err, SignatureError::Uninhabited("bad".into()));
        assert_eq!(sig.adt_count(), 0);
    }

    #[test]
    fn duplicate_selector_names_are_rejected() {
        let mut sig = AdtSignature::new();
        let err = sig
            .declare_block(vec![AdtDecl {
                name: "p".into(),
                ctors: vec![ctor("mk", &[("x", Sort::Bool), ("x", Sort::Bool)])],
            }])
            .unwrap_err();
        assert_eq!(err, SignatureError::Duplicate("x".into()));
    }

    #[test]
    fn forward_reference_past_block_is_dangling() {
        let mut sig = AdtSignature::new();
        let err = sig
            .declare_block(vec![AdtDecl {
                name: "p".into(),
                ctors: vec![ctor("mk", &[("x", Sort::Adt(AdtId(3)))])],
            }])
            .unwrap_err();
        assert!(matches!(err, SignatureError::DanglingSort { .. }));
    }
}
