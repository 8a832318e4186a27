//! Synthetic model families for scaling experiments.
//!
//! Both families grow exponentially with the level count, which is
//! what makes them useful: brute-force witness search dies early while
//! the SAT strategies keep going.

use crate::formula::{BooleanFormula, VarId};
use crate::model::CausalModel;

fn node(i: usize) -> VarId {
    VarId::new(&format!("n_{i}")).expect("generated names are valid")
}

fn node_var(i: usize) -> BooleanFormula {
    BooleanFormula::var(node(i))
}

/// A complete binary tree of OR gates with `levels` levels, named
/// `BT<levels>`: `2^levels - 1` endogenous variables in heap order
/// (`n_0` is the root, `n_i` has children `n_{2i+1}` and `n_{2i+2}`).
/// Each of the `2^(levels-1)` leaves copies its own exogenous input
/// `n_<i>_exo`. The root fires iff some leaf input does.
///
/// Panics when `levels` is 0.
pub fn generate_binary_tree(levels: u32) -> CausalModel {
    let (exogenous, equations) = tree_parts(levels);
    CausalModel::new(format!("BT{levels}"), exogenous, equations)
}

fn tree_parts(levels: u32) -> (Vec<VarId>, Vec<(VarId, BooleanFormula)>) {
    assert!(levels >= 1, "a tree needs at least one level");
    assert!(levels <= 32, "2^{levels} variables will not fit in memory");
    let nodes = (1usize << levels) - 1;
    let first_leaf = nodes / 2;
    let mut exogenous = Vec::with_capacity(nodes - first_leaf);
    let mut equations = Vec::with_capacity(nodes);
    for i in 0..nodes {
        if i < first_leaf {
            let children = BooleanFormula::or([node_var(2 * i + 1), node_var(2 * i + 2)]);
            equations.push((node(i), children));
        } else {
            let input = VarId::new(&format!("n_{i}_exo")).expect("generated names are valid");
            exogenous.push(input.clone());
            equations.push((node(i), BooleanFormula::var(input)));
        }
    }
    (exogenous, equations)
}

/// The binary tree of [`generate_binary_tree`] with a backup gadget
/// bolted onto the root, named `ABT<levels>`.
///
/// An armed backup (`b`, from the extra input `B_exo`) watches the
/// tree output `t`: `both` fires when tree and backup are active,
/// `late` when the backup is armed but the tree stays quiet, and the
/// sink `I` collects either path. With the backup armed, silencing a
/// single leaf no longer silences `I` on its own: the `late` path
/// steps in unless it is frozen at its actual value. Single-leaf
/// causes therefore have nonempty witness sets, which exercises the
/// witness machinery at scale.
pub fn generate_abt(levels: u32) -> CausalModel {
    let (mut exogenous, mut equations) = tree_parts(levels);
    let v = |name: &str| VarId::new(name).expect("generated names are valid");
    let fv = |name: &str| BooleanFormula::var(v(name));

    exogenous.push(v("B_exo"));
    equations.push((v("t"), node_var(0)));
    equations.push((v("b"), fv("B_exo")));
    equations.push((v("arm"), fv("b")));
    equations.push((v("both"), BooleanFormula::and([fv("t"), fv("arm")])));
    equations.push((
        v("late"),
        BooleanFormula::and([fv("arm"), BooleanFormula::not(fv("t"))]),
    ));
    equations.push((v("impact"), BooleanFormula::or([fv("both"), fv("late")])));
    equations.push((v("relay"), fv("impact")));
    equations.push((v("I"), BooleanFormula::or([fv("relay"), fv("t")])));
    CausalModel::new(format!("ABT{levels}"), exogenous, equations)
}
