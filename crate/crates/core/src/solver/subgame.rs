//! Two-player graph with explicit predecessor lists, shared by the
//! ω-regular solvers that repeatedly restrict play to subarenas.

use std::collections::VecDeque;

use crate::model::Owner;

pub(crate) struct TurnGraph {
    owners: Vec<Owner>,
    succs: Vec<Vec<u32>>,
    preds: Vec<Vec<u32>>,
}

impl TurnGraph {
    pub fn new(owners: Vec<Owner>) -> TurnGraph {
        let n = owners.len();
        TurnGraph {
            owners,
            succs: vec![Vec::new(); n],
            preds: vec![Vec::new(); n],
        }
    }

    pub fn add_edge(&mut self, from: u32, to: u32) {
        self.succs[from as usize].push(to);
        self.preds[to as usize].push(from);
    }

    pub fn len(&self) -> usize {
        self.owners.len()
    }
}

/// Attractor of `player` to `targets` inside the subgame on `active`: the
/// least superset of the active targets closed under single-edge moves of
/// the player and forced moves of the opponent, by backward counting.
pub(crate) fn attractor_within(
    gr: &TurnGraph,
    player: Owner,
    targets: &[bool],
    active: &[bool],
) -> Vec<bool> {
    let n = gr.len();
    let mut outdeg = vec![0u32; n];
    for v in 0..n {
        if active[v] {
            outdeg[v] = gr.succs[v].iter().filter(|&&w| active[w as usize]).count() as u32;
        }
    }
    let mut attr = vec![false; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for v in 0..n {
        if active[v] && targets[v] {
            attr[v] = true;
            queue.push_back(v);
        }
    }
    while let Some(x) = queue.pop_front() {
        for &p in &gr.preds[x] {
            let p = p as usize;
            if !active[p] || attr[p] {
                continue;
            }
            let pull = if gr.owners[p] == player {
                true
            } else {
                outdeg[p] -= 1;
                outdeg[p] == 0
            };
            if pull {
                attr[p] = true;
                queue.push_back(p);
            }
        }
    }
    attr
}
