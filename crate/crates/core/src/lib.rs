//! Builds the signature of elementary set theory from the membership
//! predicate: formula construction by production rules, bounded model
//! checking, extensional recognition of derived notions and a typed
//! semantic net over everything constructed.

pub mod formula;
pub mod rules;
pub mod semantics;
pub mod recognition;
pub mod net;
pub mod enumerate;
pub mod theory;
pub mod arbitrary;
