//! Small named diagrams used by tests, the CLI and the shipped corpus.

use crate::link::{generate_braid_closure, parse_pd, LinkDiagram};

/// Figure-eight knot. Crossings 0..4 are A, B, C, D of the standard
/// skein-template walk-through (signs `+ - - +`), arcs 1..8 become ids 0..7.
pub const FIGURE_EIGHT_PD: &str = "\
# figure-eight knot
X(4,2,5,1)  # A
X(2,7,3,8)  # B
X(6,3,7,4)  # C
X(8,6,1,5)  # D
";

/// Whitehead link, oriented so that its writhe is -1.
pub const WHITEHEAD_PD: &str = "\
X(6,1,7,2)
X(10,7,5,8)
X(4,5,1,6)
X(2,10,3,9)
X(8,4,9,3)
";

/// One-crossing unknot with a positive curl, entered on the over strand
/// from arc 1.
pub const POSITIVE_TWIST_PD: &str = "X(2,2,1,1)\n";

/// One-crossing unknot with a negative curl.
pub const NEGATIVE_TWIST_PD: &str = "X(1,2,2,1)\n";

pub fn figure_eight() -> LinkDiagram {
    parse_pd(FIGURE_EIGHT_PD).expect("fixture parses")
}

pub fn whitehead() -> LinkDiagram {
    parse_pd(WHITEHEAD_PD).expect("fixture parses")
}

pub fn positive_twist() -> LinkDiagram {
    parse_pd(POSITIVE_TWIST_PD).expect("fixture parses")
}

pub fn negative_twist() -> LinkDiagram {
    parse_pd(NEGATIVE_TWIST_PD).expect("fixture parses")
}

/// Closure of `σ1^3`.
pub fn trefoil() -> LinkDiagram {
    generate_braid_closure(&[1, 1, 1], 2).expect("valid word")
}

/// Closure of `σ1^2`.
pub fn hopf() -> LinkDiagram {
    generate_braid_closure(&[1, 1], 2).expect("valid word")
}

/// Every named fixture with a file-friendly name.
pub fn all() -> Vec<(&'static str, LinkDiagram)> {
    vec![
        ("unknot_twist_pos", positive_twist()),
        ("unknot_twist_neg", negative_twist()),
        ("unknot_2crossing", generate_braid_closure(&[1, -2], 3).expect("valid word")),
        ("unlink_2crossing", generate_braid_closure(&[1, -1], 2).expect("valid word")),
        ("trefoil_right", trefoil()),
        ("trefoil_left", generate_braid_closure(&[-1, -1, -1], 2).expect("valid word")),
        ("figure_eight", figure_eight()),
        ("hopf_pos", hopf()),
        ("hopf_neg", generate_braid_closure(&[-1, -1], 2).expect("valid word")),
        ("whitehead", whitehead()),
        ("cinquefoil", generate_braid_closure(&[1, 1, 1, 1, 1], 2).expect("valid word")),
        ("borromean", generate_braid_closure(&[1, -2, 1, -2, 1, -2], 3).expect("valid word")),
    ]
}
