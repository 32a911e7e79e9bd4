//! The candidate-filtering solver: every type variable starts with the
//! knowledge base's candidates for its simple name (or everything, when
//! nothing names it), then constraints delete candidates until nothing
//! changes. Candidate sets only ever shrink, so the fixpoint exists.
//!
//! A variable whose set would empty keeps its last non-empty set and is
//! marked unsatisfied; a variable left with several candidates commits to
//! the lexicographically least, in variable order.

use std::collections::BTreeSet;

use crate::kb::{KbType, KnowledgeBase, MemberKind, MemberSig};
use crate::syntax::Primitive;

use super::{Constraint, Extraction, LitClass};

/// A type variable's current candidates. `Top` is the unconstrained state:
/// any type at all, which no finite set can enumerate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Candidates {
    Top,
    Set(BTreeSet<KbType>),
}

impl Candidates {
    fn finite(&self) -> Option<&BTreeSet<KbType>> {
        match self {
            Candidates::Top => None,
            Candidates::Set(set) => Some(set),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Assignment {
    sets: Vec<Candidates>,
    unsatisfied: BTreeSet<usize>,
}

impl Assignment {
    pub fn candidates(&self, tv: usize) -> &Candidates {
        &self.sets[tv]
    }

    pub fn is_unsatisfied(&self, tv: usize) -> bool {
        self.unsatisfied.contains(&tv)
    }

    pub fn unsatisfied(&self) -> impl Iterator<Item = usize> + '_ {
        self.unsatisfied.iter().copied()
    }

    /// The single class this variable solved to, if it did.
    pub fn solved_class(&self, tv: usize) -> Option<&crate::fqn::Fqn> {
        if self.is_unsatisfied(tv) {
            return None;
        }
        let set = self.sets[tv].finite()?;
        if set.len() != 1 {
            return None;
        }
        set.iter().next().and_then(KbType::as_class)
    }

    /// Shrinks a variable to `keep`; on an empty result the old set stays
    /// and the variable is marked unsatisfied. Returns whether anything
    /// changed.
    fn shrink(&mut self, tv: usize, keep: BTreeSet<KbType>) -> bool {
        if self.unsatisfied.contains(&tv) {
            return false;
        }
        if keep.is_empty() {
            self.unsatisfied.insert(tv);
            return true;
        }
        let changed = match &self.sets[tv] {
            Candidates::Top => true,
            Candidates::Set(old) => *old != keep,
        };
        if changed {
            debug_assert!(match &self.sets[tv] {
                Candidates::Top => true,
                Candidates::Set(old) => keep.is_subset(old),
            });
            self.sets[tv] = Candidates::Set(keep);
        }
        changed
    }
}

/// Whether a value of type `a` can appear where `b` is expected. Unknown
/// class-to-class relations count as compatible, so this never over-prunes;
/// only primitive mismatches rule candidates out.
fn assignable(a: &KbType, b: &KbType) -> bool {
    match (a, b) {
        (KbType::Class(_), KbType::Class(_)) => true,
        (KbType::Primitive(x), KbType::Primitive(y)) => widens(*x, *y),
        (KbType::Void, KbType::Void) => true,
        _ => false,
    }
}

/// Java's widening primitive conversions, plus identity.
fn widens(from: Primitive, to: Primitive) -> bool {
    use Primitive::*;
    if from == to {
        return true;
    }
    match from {
        Byte => matches!(to, Short | Int | Long | Float | Double),
        Short | Char => matches!(to, Int | Long | Float | Double),
        Int => matches!(to, Long | Float | Double),
        Long => matches!(to, Float | Double),
        Float => matches!(to, Double),
        Double | Boolean => false,
    }
}

struct Solver<'a> {
    kb: &'a KnowledgeBase,
    assignment: Assignment,
}

impl<'a> Solver<'a> {
    /// One candidate type can fill the slot the set describes.
    fn accepts(&self, value: &KbType, slot: usize) -> bool {
        match self.assignment.candidates(slot).finite() {
            None => true,
            Some(set) => set.iter().any(|b| assignable(value, b)),
        }
    }

    /// Some member of the slot's set can be passed for `param`.
    fn supplies(&self, slot: usize, param: &KbType) -> bool {
        match self.assignment.candidates(slot).finite() {
            None => true,
            Some(set) => set.iter().any(|a| assignable(a, param)),
        }
    }

    fn member_matches(&self, member: &MemberSig, kind: MemberKind, name: &str, args: &[usize]) -> bool {
        member.kind == kind
            && member.name == name
            && member.params.len() == args.len()
            && member
                .params
                .iter()
                .zip(args)
                .all(|(param, &arg)| self.supplies(arg, param))
    }

    /// Filters a receiver's candidates down to those whose member table
    /// (own or inherited) satisfies the lookup, and narrows the result
    /// variable to the surviving members' return types.
    fn filter_members(
        &mut self,
        recv: usize,
        kind: MemberKind,
        name: &str,
        args: &[usize],
        result: Option<usize>,
    ) -> bool {
        let Some(candidates) = self.assignment.candidates(recv).finite() else {
            return false;
        };
        let mut keep = BTreeSet::new();
        let mut returns = BTreeSet::new();
        for candidate in candidates.clone() {
            let KbType::Class(fqn) = &candidate else {
                continue;
            };
            let mut any = false;
            for entry in self.kb.chain(fqn.as_str()) {
                for member in &entry.members {
                    if self.member_matches(member, kind, name, args)
                        && result.map_or(true, |r| self.accepts(&member.returns, r))
                    {
                        any = true;
                        returns.insert(member.returns.clone());
                    }
                }
            }
            if any {
                keep.insert(candidate);
            }
        }
        let mut changed = self.assignment.shrink(recv, keep);
        if let Some(result) = result {
            if !self.assignment.is_unsatisfied(recv) {
                let narrowed = match self.assignment.candidates(result).finite() {
                    None => returns,
                    Some(set) => set.intersection(&returns).cloned().collect(),
                };
                changed |= self.assignment.shrink(result, narrowed);
            }
        }
        changed
    }

    fn filter_constructors(&mut self, tv: usize, args: &[usize]) -> bool {
        let Some(candidates) = self.assignment.candidates(tv).finite() else {
            return false;
        };
        let mut keep = BTreeSet::new();
        for candidate in candidates.clone() {
            let KbType::Class(fqn) = &candidate else {
                continue;
            };
            let Some(entry) = self.kb.lookup_fqn(fqn.as_str()) else {
                continue;
            };
            let matches = entry.constructors().into_iter().any(|params| {
                params.len() == args.len()
                    && params
                        .iter()
                        .zip(args)
                        .all(|(param, &arg)| self.supplies(arg, param))
            });
            if matches {
                keep.insert(candidate);
            }
        }
        self.assignment.shrink(tv, keep)
    }

    fn filter_assignable(&mut self, sub: usize, sup: usize) -> bool {
        let (Some(sub_set), Some(sup_set)) = (
            self.assignment.candidates(sub).finite(),
            self.assignment.candidates(sup).finite(),
        ) else {
            return false;
        };
        let keep_sub: BTreeSet<KbType> = sub_set
            .iter()
            .filter(|a| sup_set.iter().any(|b| assignable(a, b)))
            .cloned()
            .collect();
        let keep_sup: BTreeSet<KbType> = sup_set
            .iter()
            .filter(|b| sub_set.iter().any(|a| assignable(a, b)))
            .cloned()
            .collect();
        let changed = self.assignment.shrink(sub, keep_sub);
        changed | self.assignment.shrink(sup, keep_sup)
    }

    fn apply(&mut self, constraint: &Constraint) -> bool {
        match constraint {
            Constraint::SimpleName { tv, name } => {
                let candidates: BTreeSet<KbType> = self
                    .kb
                    .lookup_simple(name)
                    .into_iter()
                    .map(|entry| KbType::Class(entry.fqn.clone()))
                    .collect();
                let narrowed = match self.assignment.candidates(*tv).finite() {
                    None => candidates,
                    Some(set) => set.intersection(&candidates).cloned().collect(),
                };
                self.assignment.shrink(*tv, narrowed)
            }
            Constraint::IsLiteral { tv, lit } => {
                let ty = match lit {
                    LitClass::Prim(p) => KbType::Primitive(*p),
                    LitClass::Str => KbType::string(),
                };
                let narrowed = match self.assignment.candidates(*tv).finite() {
                    None => BTreeSet::from([ty]),
                    Some(set) => set.iter().filter(|&t| *t == ty).cloned().collect(),
                };
                self.assignment.shrink(*tv, narrowed)
            }
            Constraint::HasMethod {
                recv,
                name,
                args,
                result,
            } => self.filter_members(*recv, MemberKind::Method, name, args, Some(*result)),
            Constraint::HasStaticMethod {
                recv,
                name,
                args,
                result,
            } => self.filter_members(*recv, MemberKind::StaticMethod, name, args, Some(*result)),
            Constraint::HasField { recv, name, result } => {
                self.filter_members(*recv, MemberKind::Field, name, &[], Some(*result))
            }
            Constraint::HasConstructor { tv, args } => self.filter_constructors(*tv, args),
            Constraint::AssignableTo { sub, sup } => self.filter_assignable(*sub, *sup),
        }
    }

    fn fixpoint(&mut self, constraints: &[Constraint]) {
        loop {
            let mut changed = false;
            for constraint in constraints {
                changed |= self.apply(constraint);
            }
            if !changed {
                break;
            }
        }
    }
}

/// Filters candidates to a fixpoint, then commits remaining ties.
pub fn solve(extraction: &Extraction, kb: &KnowledgeBase) -> Assignment {
    let mut solver = Solver {
        kb,
        assignment: Assignment {
            sets: vec![Candidates::Top; extraction.tvs.len()],
            unsatisfied: BTreeSet::new(),
        },
    };
    solver.fixpoint(&extraction.constraints);
    loop {
        let tied = (0..extraction.tvs.len()).find(|&tv| {
            !solver.assignment.is_unsatisfied(tv)
                && solver
                    .assignment
                    .candidates(tv)
                    .finite()
                    .is_some_and(|set| set.len() > 1)
        });
        let Some(tv) = tied else { break };
        let least = solver.assignment.sets[tv]
            .finite()
            .and_then(|set| set.iter().next())
            .cloned()
            .expect("tied variable has candidates");
        solver.assignment.sets[tv] = Candidates::Set(BTreeSet::from([least]));
        solver.fixpoint(&extraction.constraints);
    }
    solver.assignment
}

/// Re-checks every constraint against a finished assignment, reporting the
/// ones the satisfied variables still violate. Constraints touching an
/// unsatisfied or unconstrained variable are skipped: they were given up
/// on, not solved.
pub fn check(extraction: &Extraction, assignment: &Assignment, kb: &KnowledgeBase) -> Vec<String> {
    let finite = |tv: usize| -> Option<&BTreeSet<KbType>> {
        if assignment.is_unsatisfied(tv) {
            None
        } else {
            assignment.candidates(tv).finite()
        }
    };
    let holds_for_some = |set: Option<&BTreeSet<KbType>>, pred: &dyn Fn(&KbType) -> bool| -> bool {
        match set {
            None => true,
            Some(set) => set.iter().any(pred),
        }
    };
    let mut violations = Vec::new();
    for constraint in &extraction.constraints {
        let ok = match constraint {
            Constraint::SimpleName { tv, name } => holds_for_some(finite(*tv), &|t| {
                t.as_class().is_some_and(|f| f.simple_name() == *name)
            }),
            Constraint::IsLiteral { tv, lit } => {
                let expect = match lit {
                    LitClass::Prim(p) => KbType::Primitive(*p),
                    LitClass::Str => KbType::string(),
                };
                holds_for_some(finite(*tv), &|t| *t == expect)
            }
            Constraint::HasMethod {
                recv, name, args, ..
            }
            | Constraint::HasStaticMethod {
                recv, name, args, ..
            } => {
                let kind = if matches!(constraint, Constraint::HasMethod { .. }) {
                    MemberKind::Method
                } else {
                    MemberKind::StaticMethod
                };
                let arity = args.len();
                holds_for_some(finite(*recv), &|t| {
                    t.as_class().is_some_and(|f| {
                        kb.chain(f.as_str()).iter().any(|entry| {
                            entry.members.iter().any(|m| {
                                m.kind == kind && m.name == *name && m.params.len() == arity
                            })
                        })
                    })
                })
            }
            Constraint::HasField { recv, name, .. } => holds_for_some(finite(*recv), &|t| {
                t.as_class().is_some_and(|f| {
                    kb.chain(f.as_str()).iter().any(|entry| {
                        entry
                            .members
                            .iter()
                            .any(|m| m.kind == MemberKind::Field && m.name == *name)
                    })
                })
            }),
            Constraint::HasConstructor { tv, args } => {
                let arity = args.len();
                holds_for_some(finite(*tv), &|t| {
                    t.as_class().is_some_and(|f| {
                        kb.lookup_fqn(f.as_str())
                            .is_some_and(|e| e.constructors().iter().any(|p| p.len() == arity))
                    })
                })
            }
            Constraint::AssignableTo { sub, sup } => match (finite(*sub), finite(*sup)) {
                (Some(a), Some(b)) => a
                    .iter()
                    .any(|x| b.iter().any(|y| assignable(x, y))),
                _ => true,
            },
        };
        if !ok {
            violations.push(constraint.to_string());
        }
    }
    violations
}
