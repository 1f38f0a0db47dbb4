//! Small reference models.

use crate::format::parse_model;
use crate::model::CtmgModel;

/// Two-location decision process: from `A`, action `a` goes to `B` at rate 4
/// and action `b` goes straight to the goal `C` at rate 2; `B` reaches `C` at
/// rate 4. The optimal scheduler plays `a` early and switches to `b` at
/// `1 - ln(2)/2`.
pub const FIG1_DOCUMENT: &str = "\
ctmg
time-bound 1
location A continuous reach
location B continuous reach
location C continuous reach goal
rate A a B 4
rate A b C 2
rate B a C 4
init A 1
";

pub fn fig1() -> CtmgModel {
    parse_model(FIG1_DOCUMENT).expect("reference model is valid")
}
