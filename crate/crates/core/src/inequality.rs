//! Randomised checks of the matrix inequalities the speed-limit derivation
//! relies on: the von Neumann trace chain, the absolute trace inequality and
//! the commutator inequality `‖AB − BA‖_op ≤ ½‖A‖_Δ‖B‖_Δ` for positive `A, B`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::{
    commutator, hs_norm, operator_norm, random, singular_values, spread_norm, trace_of_product, ComplexMatrix,
    DensityMatrix,
};

/// Slack allowed before a comparison counts as a violation.
pub const VIOLATION_TOL: f64 = 1e-10;

/// One instance of `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub lhs: f64,
    pub rhs: f64,
}

impl Comparison {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + VIOLATION_TOL * self.rhs.abs().max(1.0)
    }

    pub fn ratio(&self) -> f64 {
        if self.rhs == 0.0 {
            if self.lhs.abs() <= VIOLATION_TOL {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.lhs / self.rhs
        }
    }
}

/// The three links of `Tr{ρ1ρ2} ≤ Σσ1σ2 ≤ √Σσ1²·√Σσ2² ≤ ‖ρ2‖_HS`.
pub fn von_neumann_chain(rho1: &DensityMatrix, rho2: &DensityMatrix) -> [Comparison; 3] {
    let tr = trace_of_product(rho1.matrix(), rho2.matrix()).expect("equal dims").re;
    let s1 = singular_values(rho1.matrix());
    let s2 = singular_values(rho2.matrix());
    let paired: f64 = s1.iter().zip(&s2).map(|(a, b)| a * b).sum();
    let n1 = s1.iter().map(|x| x * x).sum::<f64>().sqrt();
    let n2 = s2.iter().map(|x| x * x).sum::<f64>().sqrt();
    [
        Comparison { lhs: tr, rhs: paired },
        Comparison {
            lhs: paired,
            rhs: n1 * n2,
        },
        Comparison {
            lhs: n1 * n2,
            rhs: hs_norm(rho2.matrix()),
        },
    ]
}

/// `|Tr{AB}| ≤ min{σ1^A Σσ^B, σ1^B Σσ^A}`.
pub fn absolute_trace(a: &ComplexMatrix, b: &ComplexMatrix) -> Comparison {
    let sa = singular_values(a);
    let sb = singular_values(b);
    let ta: f64 = sa.iter().sum();
    let tb: f64 = sb.iter().sum();
    Comparison {
        lhs: trace_of_product(a, b).expect("equal dims").norm(),
        rhs: (sa[0] * tb).min(sb[0] * ta),
    }
}

/// `‖AB − BA‖_op ≤ ½‖A‖_Δ‖B‖_Δ`.
pub fn commutator_bound(a: &ComplexMatrix, b: &ComplexMatrix) -> Comparison {
    let c = commutator(a, b).expect("equal dims");
    Comparison {
        lhs: operator_norm(&c),
        rhs: 0.5 * spread_norm(a).expect("square") * spread_norm(b).expect("square"),
    }
}

/// `A = diag(2, 1)`, `B = ½[[1, 1], [1, 1]]`: the commutator inequality holds with equality.
pub fn sharpness_witness() -> (ComplexMatrix, ComplexMatrix, Comparison) {
    let a = ComplexMatrix::from_real_rows(&[[2.0, 0.0], [0.0, 1.0]]);
    let b = ComplexMatrix::from_real_rows(&[[0.5, 0.5], [0.5, 0.5]]);
    let cmp = commutator_bound(&a, &b);
    (a, b, cmp)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityStats {
    pub name: &'static str,
    pub trials: usize,
    pub violations: usize,
    /// Largest observed `lhs / rhs`.
    pub tightest_ratio: f64,
}

impl InequalityStats {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            trials: 0,
            violations: 0,
            tightest_ratio: 0.0,
        }
    }

    fn record(&mut self, c: Comparison) {
        self.trials += 1;
        if !c.holds() {
            self.violations += 1;
        }
        let r = c.ratio();
        if r > self.tightest_ratio {
            self.tightest_ratio = r;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignReport {
    pub seed: u64,
    pub max_dim: usize,
    pub stats: Vec<InequalityStats>,
    pub witness: Comparison,
}

impl CampaignReport {
    pub fn total_violations(&self) -> usize {
        self.stats.iter().map(|s| s.violations).sum()
    }
}

/// Runs `trials` random instances of every inequality with dimensions drawn
/// uniformly from `2..=max_dim`. Deterministic for a given seed.
pub fn run_campaign(trials: usize, max_dim: usize, seed: u64) -> CampaignReport {
    let max_dim = max_dim.max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chain = [
        InequalityStats::new("von_neumann_trace"),
        InequalityStats::new("cauchy_schwarz"),
        InequalityStats::new("hs_norm_cap"),
    ];
    let mut abs_trace = InequalityStats::new("absolute_trace");
    let mut comm = InequalityStats::new("commutator");

    for _ in 0..trials {
        let n = rng.gen_range(2..=max_dim);
        let r1 = random::density_matrix(n, &mut rng);
        let r2 = if rng.gen_bool(0.25) {
            random::pure_state(n, &mut rng)
        } else {
            random::density_matrix(n, &mut rng)
        };
        for (s, c) in chain.iter_mut().zip(von_neumann_chain(&r1, &r2)) {
            s.record(c);
        }

        let n = rng.gen_range(2..=max_dim);
        let a = random::complex_gaussian(n, n, &mut rng);
        let b = random::complex_gaussian(n, n, &mut rng);
        abs_trace.record(absolute_trace(&a, &b));

        let n = rng.gen_range(2..=max_dim);
        let a = random::positive_semidefinite(n, &mut rng);
        let b = random::positive_semidefinite(n, &mut rng);
        comm.record(commutator_bound(&a, &b));
    }

    let mut stats: Vec<InequalityStats> = chain.into_iter().collect();
    stats.push(abs_trace);
    stats.push(comm);
    CampaignReport {
        seed,
        max_dim,
        stats,
        witness: sharpness_witness().2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_is_sharp() {
        let (_, _, c) = sharpness_witness();
        assert!((c.lhs - 0.5).abs() < 1e-12);
        assert!((c.rhs - 0.5).abs() < 1e-7);
        assert!((c.ratio() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn small_campaign_has_no_violations() {
        let r = run_campaign(50, 5, 1);
        assert_eq!(r.total_violations(), 0);
        assert!(r.stats.iter().all(|s| s.trials == 50));
        assert!(r.stats.iter().all(|s| s.tightest_ratio <= 1.0 + 1e-9));
    }

    #[test]
    fn campaign_is_deterministic() {
        assert_eq!(run_campaign(5, 4, 99), run_campaign(5, 4, 99));
    }

    #[test]
    fn violated_comparison_is_flagged() {
        let c = Comparison { lhs: 1.1, rhs: 1.0 };
        assert!(!c.holds());
        assert!(Comparison { lhs: 1.0, rhs: 1.0 }.holds());
    }
}
