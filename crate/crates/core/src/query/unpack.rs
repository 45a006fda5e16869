use super::QueryError;
use crate::graph::{ArcId, INVALID};
use crate::topocore::{ArcRef, CorePrep};

/// Expands shortcuts recursively into input arc ids.
///
/// The sequence must be contiguous in search ids; an error names the first
/// offending position.
pub fn unpack_path(prep: &CorePrep, refs: &[ArcRef]) -> Result<Vec<ArcId>, QueryError> {
    let mut prev_head = INVALID;
    for (i, &r) in refs.iter().enumerate() {
        let Some((u, v)) = prep.endpoints(r) else {
            return Err(QueryError::MalformedPath(format!(
                "reference {r} at position {i} is neither an arc nor a shortcut"
            )));
        };
        if i > 0 && u != prev_head {
            return Err(QueryError::MalformedPath(format!(
                "position {i} starts at {u} but the previous arc ends at {prev_head}"
            )));
        }
        prev_head = v;
    }

    let m = prep.input_arc_count() as ArcRef;
    let shortcuts = prep.shortcuts();
    let mut out = Vec::with_capacity(refs.len());
    let mut stack: Vec<ArcRef> = refs.iter().rev().copied().collect();
    while let Some(r) = stack.pop() {
        if r < m {
            out.push(r);
        } else {
            stack.extend(shortcuts.unpack((r - m) as usize).iter().rev());
        }
    }
    Ok(out)
}
