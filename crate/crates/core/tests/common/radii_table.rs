//! Radii evaluated at 50 digits, rounded to the nearest double; regenerate with `tests/oracles/radii_mpmath.py`.

pub const NODES: usize = 20;
pub const SIGMA_NORM: f64 = 1.3;

/// (delta, n, rho1, rho2) with c0 = c1 = c2 = 1.
pub const TABLE: [(f64, usize, f64, f64); 25] = [
    (0.001, 10, 11.875760238776357, 339.4864418478594),
    (0.001, 30, 6.856473370688984, 154.334915971627),
    (0.001, 80, 4.198715298292167, 80.99942316579273),
    (0.001, 500, 1.6794861193168669, 27.277050328480506),
    (0.001, 10000, 0.37554451300598374, 5.506441322302549),
    (0.01, 10, 7.917173492517571, 205.8870839629846),
    (0.01, 30, 4.570982247125989, 98.62270091061629),
    (0.01, 80, 2.7991435321947784, 53.82883576061264),
    (0.01, 500, 1.1196574128779113, 19.042412510255705),
    (0.01, 10000, 0.2503630086706558, 3.969927240276301),
    (0.05, 10, 5.1502400973205615, 134.113092692016),
    (0.05, 30, 2.9734925065792304, 67.61596356141617),
    (0.05, 80, 1.8208848487771168, 38.22380983655903),
    (0.05, 500, 0.7283539395108467, 14.082935559304568),
    (0.05, 10000, 0.1628648920426023, 3.0093921606410774),
    (0.1, 10, 3.9585867462587854, 108.74406731447411),
    (0.1, 30, 2.2854911235629944, 56.31087388700267),
    (0.1, 80, 1.3995717660973892, 32.38446117766619),
    (0.1, 500, 0.5598287064389557, 12.15803527926502),
    (0.1, 10000, 0.1251815043353279, 2.626521023060533),
    (0.13, 10, 3.507532101992646, 100.01908341997162),
    (0.13, 30, 2.025074603276708, 52.3575788362006),
    (0.13, 80, 1.2400998672742525, 30.315091491497267),
    (0.13, 500, 0.49603994690970105, 11.463566278932959),
    (0.13, 10000, 0.11091790408454782, 2.4866584461239096),
];
