//! Published SQA values of the two-server table, used as regression targets.

/// One table cell: `(s, rho, [E Q1, sd Q1, E Q2, sd Q2])`.
pub type Cell = (u32, f64, [f64; 4]);

/// SQA column of the published table.
pub const TABLE2_SQA: [Cell; 4] = [
    (2, 0.7, [0.9077, 1.0462, 2.0329, 2.0484]),
    (2, 0.9, [3.2188, 3.2161, 6.6424, 6.4091]),
    (4, 0.7, [0.4741, 0.6655, 2.5866, 2.5457]),
    (4, 0.9, [1.8813, 1.9566, 8.3642, 7.7692]),
];

/// `(s, rho, [(mean, sd); 4])`, metrics ordered as in [`Cell`].
pub type ExpCell = (u32, f64, [(f64, f64); 4]);

/// Simulated exponential-case column of the published table (mean over 50
/// replications of 2e6 departures), with the sample standard deviation.
pub const TABLE2_EXP: [ExpCell; 4] = [
    (
        2,
        0.7,
        [(0.9232, 0.0030), (1.0505, 0.0050), (2.0289, 0.0061), (2.0465, 0.0106)],
    ),
    (
        2,
        0.9,
        [(3.2797, 0.0336), (3.2716, 0.0723), (6.7915, 0.0674), (6.5288, 0.1453)],
    ),
    (
        4,
        0.7,
        [(0.4747, 0.0017), (0.6730, 0.0026), (2.5507, 0.0069), (2.5179, 0.0115)],
    ),
    (
        4,
        0.9,
        [(1.8793, 0.0145), (1.9539, 0.0314), (8.2773, 0.0597), (7.7507, 0.1264)],
    ),
];

pub const METRICS: [&str; 4] = ["E[Q1]", "sd(Q1)", "E[Q2]", "sd(Q2)"];
