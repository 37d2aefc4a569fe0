//! Published mean ± std values for the four CSP scenarios, used only to
//! print deltas next to reproduced numbers.

use crate::transfer::FreezeLevel;

pub const CSP_SCENARIOS: [&str; 4] = [
    "CSP-2010",
    "CSP-MZN",
    "CSP-Minizinc-Obj",
    "CSP-Minizinc-Time",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceCell {
    pub target: &'static str,
    /// `None` for normal training.
    pub source: Option<(&'static str, FreezeLevel)>,
    pub acc: (f64, f64),
    pub loss: (f64, f64),
}

const fn normal(target: &'static str, acc: (f64, f64), loss: (f64, f64)) -> ReferenceCell {
    ReferenceCell {
        target,
        source: None,
        acc,
        loss,
    }
}

const fn xfer(
    target: &'static str,
    source: &'static str,
    freeze: FreezeLevel,
    acc: (f64, f64),
    loss: (f64, f64),
) -> ReferenceCell {
    ReferenceCell {
        target,
        source: Some((source, freeze)),
        acc,
        loss,
    }
}

use FreezeLevel::{Both as H2, First as H1, None as H0};

pub const REFERENCE_TABLE: [ReferenceCell; 40] = [
    normal("CSP-2010", (0.87, 0.01), (0.64, 0.15)),
    xfer("CSP-2010", "CSP-MZN", H0, (0.88, 0.01), (0.56, 0.12)),
    xfer("CSP-2010", "CSP-MZN", H1, (0.87, 0.01), (0.84, 0.08)),
    xfer("CSP-2010", "CSP-MZN", H2, (0.87, 0.01), (1.01, 0.06)),
    xfer(
        "CSP-2010",
        "CSP-Minizinc-Obj",
        H0,
        (0.87, 0.01),
        (0.65, 0.15),
    ),
    xfer(
        "CSP-2010",
        "CSP-Minizinc-Obj",
        H1,
        (0.86, 0.01),
        (0.90, 0.04),
    ),
    xfer(
        "CSP-2010",
        "CSP-Minizinc-Obj",
        H2,
        (0.87, 0.01),
        (1.01, 0.09),
    ),
    xfer(
        "CSP-2010",
        "CSP-Minizinc-Time",
        H0,
        (0.87, 0.01),
        (0.65, 0.17),
    ),
    xfer(
        "CSP-2010",
        "CSP-Minizinc-Time",
        H1,
        (0.86, 0.01),
        (1.00, 0.06),
    ),
    xfer(
        "CSP-2010",
        "CSP-Minizinc-Time",
        H2,
        (0.85, 0.01),
        (1.07, 0.09),
    ),
    normal("CSP-MZN", (0.71, 0.01), (1.23, 0.19)),
    xfer("CSP-MZN", "CSP-2010", H0, (0.71, 0.01), (1.27, 0.22)),
    xfer("CSP-MZN", "CSP-2010", H1, (0.70, 0.01), (1.71, 0.07)),
    xfer("CSP-MZN", "CSP-2010", H2, (0.71, 0.01), (1.95, 0.07)),
    xfer(
        "CSP-MZN",
        "CSP-Minizinc-Obj",
        H0,
        (0.71, 0.01),
        (1.25, 0.21),
    ),
    xfer(
        "CSP-MZN",
        "CSP-Minizinc-Obj",
        H1,
        (0.71, 0.01),
        (1.71, 0.08),
    ),
    xfer(
        "CSP-MZN",
        "CSP-Minizinc-Obj",
        H2,
        (0.72, 0.01),
        (1.98, 0.08),
    ),
    xfer(
        "CSP-MZN",
        "CSP-Minizinc-Time",
        H0,
        (0.71, 0.01),
        (1.18, 0.18),
    ),
    xfer(
        "CSP-MZN",
        "CSP-Minizinc-Time",
        H1,
        (0.72, 0.01),
        (1.63, 0.11),
    ),
    xfer(
        "CSP-MZN",
        "CSP-Minizinc-Time",
        H2,
        (0.71, 0.01),
        (1.92, 0.06),
    ),
    normal("CSP-Minizinc-Obj", (0.91, 0.02), (0.77, 0.06)),
    xfer(
        "CSP-Minizinc-Obj",
        "CSP-2010",
        H0,
        (0.87, 0.04),
        (1.01, 0.16),
    ),
    xfer(
        "CSP-Minizinc-Obj",
        "CSP-2010",
        H1,
        (0.90, 0.00),
        (1.37, 0.11),
    ),
    xfer(
        "CSP-Minizinc-Obj",
        "CSP-2010",
        H2,
        (0.90, 0.00),
        (1.55, 0.06),
    ),
    xfer(
        "CSP-Minizinc-Obj",
        "CSP-MZN",
        H0,
        (0.66, 0.02),
        (3.26, 0.06),
    ),
    xfer(
        "CSP-Minizinc-Obj",
        "CSP-MZN",
        H1,
        (0.70, 0.00),
        (3.30, 0.01),
    ),
    xfer(
        "CSP-Minizinc-Obj",
        "CSP-MZN",
        H2,
        (0.70, 0.00),
        (3.27, 0.01),
    ),
    xfer(
        "CSP-Minizinc-Obj",
        "CSP-Minizinc-Time",
        H0,
        (0.90, 0.00),
        (0.79, 0.11),
    ),
    xfer(
        "CSP-Minizinc-Obj",
        "CSP-Minizinc-Time",
        H1,
        (0.90, 0.00),
        (1.01, 0.10),
    ),
    xfer(
        "CSP-Minizinc-Obj",
        "CSP-Minizinc-Time",
        H2,
        (0.90, 0.00),
        (1.37, 0.15),
    ),
    normal("CSP-Minizinc-Time", (0.65, 0.00), (4.11, 0.60)),
    xfer(
        "CSP-Minizinc-Time",
        "CSP-2010",
        H0,
        (0.65, 0.01),
        (3.78, 0.92),
    ),
    xfer(
        "CSP-Minizinc-Time",
        "CSP-2010",
        H1,
        (0.65, 0.00),
        (5.24, 0.18),
    ),
    xfer(
        "CSP-Minizinc-Time",
        "CSP-2010",
        H2,
        (0.65, 0.00),
        (5.59, 0.04),
    ),
    xfer(
        "CSP-Minizinc-Time",
        "CSP-MZN",
        H0,
        (0.67, 0.03),
        (3.27, 0.30),
    ),
    xfer(
        "CSP-Minizinc-Time",
        "CSP-MZN",
        H1,
        (0.70, 0.00),
        (3.81, 0.10),
    ),
    xfer(
        "CSP-Minizinc-Time",
        "CSP-MZN",
        H2,
        (0.73, 0.02),
        (4.04, 0.03),
    ),
    xfer(
        "CSP-Minizinc-Time",
        "CSP-Minizinc-Obj",
        H0,
        (0.70, 0.00),
        (3.87, 0.74),
    ),
    xfer(
        "CSP-Minizinc-Time",
        "CSP-Minizinc-Obj",
        H1,
        (0.70, 0.00),
        (4.54, 0.07),
    ),
    xfer(
        "CSP-Minizinc-Time",
        "CSP-Minizinc-Obj",
        H2,
        (0.70, 0.00),
        (4.60, 0.02),
    ),
];

pub fn lookup(target: &str, source: Option<(&str, FreezeLevel)>) -> Option<&'static ReferenceCell> {
    REFERENCE_TABLE.iter().find(|c| {
        c.target == target
            && match (c.source, source) {
                (None, None) => true,
                (Some((s, f)), Some((t, g))) => s == t && f == g,
                _ => false,
            }
    })
}
