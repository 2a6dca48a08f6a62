use std::collections::VecDeque;

use crate::lang::{line_col, Ast, NodeId};
use crate::operators::{mutations_at, Mutation, OperatorContext, OperatorKind};

use super::edit::Undo;
use super::{
    assign_muid, ContractViolation, MutagenError, MutationPoint, MutationRecord, SeededStream,
};

struct Pending {
    point: MutationPoint,
    file: String,
    line: usize,
    column: usize,
    queue: VecDeque<(Mutation, String, String)>,
    next_ordinal: u32,
}

/// Walks the mutations of one operator point by point, applying each one
/// in-tree and reverting it on `restore`.
///
/// Call order per point: `add_point`, then `mutate`/`restore` pairs while
/// `has_mutations` holds. Anything else is a [`ContractViolation`].
pub struct OperatorIterator<'c> {
    kind: OperatorKind,
    ctx: &'c OperatorContext,
    stream: SeededStream,
    stride: u32,
    pending: Option<Pending>,
    applied: Option<Undo>,
}

impl<'c> OperatorIterator<'c> {
    pub fn new(kind: OperatorKind, ctx: &'c OperatorContext, seed: u64, stride: u32) -> Self {
        Self {
            kind,
            ctx,
            stream: SeededStream::new(seed, kind.acronym()),
            stride,
            pending: None,
            applied: None,
        }
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn stream(&self) -> &SeededStream {
        &self.stream
    }

    /// Prepares the mutations of this operator at `site`, which belongs to
    /// `point`. Ordinals continue from `first_ordinal`.
    pub fn add_point(
        &mut self,
        tree: &Ast,
        text: &str,
        file: &str,
        point: MutationPoint,
        site: NodeId,
        first_ordinal: u32,
    ) -> Result<(), MutagenError> {
        if self.applied.is_some() {
            return Err(ContractViolation("addPoint while a mutation is applied").into());
        }
        let mutations = mutations_at(self.kind, tree, site, self.ctx, &mut self.stream)?;
        let span = tree.node(site).map(|n| n.span()).unwrap_or_default();
        let mut queue = VecDeque::with_capacity(mutations.len());
        for m in mutations {
            let (original, replacement) = m
                .edit
                .texts(tree)
                .ok_or(ContractViolation("edit does not match the tree"))?;
            queue.push_back((m, original, replacement));
        }
        let (line, column) = line_col(text, span.start);
        self.pending = Some(Pending {
            point,
            file: file.to_string(),
            line,
            column,
            queue,
            next_ordinal: first_ordinal,
        });
        Ok(())
    }

    pub fn has_mutations(&self) -> bool {
        self.applied.is_none() && self.pending.as_ref().is_some_and(|p| !p.queue.is_empty())
    }

    pub fn mutation_point(&self) -> Result<MutationPoint, ContractViolation> {
        self.pending
            .as_ref()
            .map(|p| p.point)
            .ok_or(ContractViolation("mutationPoint before addPoint"))
    }

    /// Applies the next mutation to `tree` and describes it.
    pub fn mutate(&mut self, tree: &mut Ast) -> Result<MutationRecord, MutagenError> {
        if self.applied.is_some() {
            return Err(ContractViolation("mutate before restore").into());
        }
        let pending = self
            .pending
            .as_mut()
            .ok_or(ContractViolation("mutate before addPoint"))?;
        let (m, original, replacement) = pending
            .queue
            .pop_front()
            .ok_or(ContractViolation("mutate with no mutations left"))?;
        let ordinal = pending.next_ordinal;
        let muid = assign_muid(ordinal, pending.point.index, self.stride)?;
        let undo = m
            .edit
            .apply(tree)
            .ok_or(ContractViolation("edit does not match the tree"))?;
        pending.next_ordinal += 1;
        self.applied = Some(undo);
        Ok(MutationRecord {
            muid,
            operator: self.kind,
            point: pending.point,
            ordinal,
            file: pending.file.clone(),
            line: pending.line,
            column: pending.column,
            original,
            replacement,
            args: m.args,
            edit: m.edit,
        })
    }

    /// Reverts the last `mutate`.
    pub fn restore(&mut self, tree: &mut Ast) -> Result<(), ContractViolation> {
        let undo = self
            .applied
            .take()
            .ok_or(ContractViolation("restore without mutate"))?;
        if undo.revert(tree) {
            Ok(())
        } else {
            Err(ContractViolation("restore on a different tree"))
        }
    }

    /// Ordinal the next mutation at the current point would get.
    pub fn next_ordinal(&self) -> Option<u32> {
        self.pending.as_ref().map(|p| p.next_ordinal)
    }
}
