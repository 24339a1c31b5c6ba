//! Nonsmooth benchmark problems.
//!
//! Ten classic test functions with exact subgradient oracles, standard
//! starting points, and reference optimal values. At kinks the oracle picks
//! a deterministic subgradient: max-type terms take the first index
//! achieving the maximum (in natural order), and absolute values at zero
//! contribute zero. Every oracle is a pure function of the point.

use crate::oracle::{Evaluation, ObjectiveOracle};

/// sign(t) with the kink convention sign(0) = 0.
fn sgn(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Index of the first maximal element.
fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    MaxQ,
    MxHilb,
    ChainedLq,
    ChainedCb3I,
    ChainedCb3Ii,
    ActiveFaces,
    Brown2,
    Mifflin2,
    CrescentI,
    CrescentIi,
}

/// One benchmark instance: oracle, dimension, start, reference optimum.
#[derive(Clone, Debug)]
pub struct Problem {
    name: &'static str,
    dim: usize,
    f_star: f64,
    kind: Kind,
}

impl Problem {
    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn f_star(&self) -> f64 {
        self.f_star
    }

    /// Standard starting point.
    pub fn x0(&self) -> Vec<f64> {
        let n = self.dim;
        match self.kind {
            Kind::MaxQ => (0..n)
                .map(|i| if i < n / 2 { (i + 1) as f64 } else { -((i + 1) as f64) })
                .collect(),
            Kind::MxHilb => vec![1.0; n],
            Kind::ChainedLq => vec![-0.5; n],
            Kind::ChainedCb3I | Kind::ChainedCb3Ii => vec![2.0; n],
            Kind::ActiveFaces => vec![1.0; n],
            Kind::Brown2 => (0..n).map(|i| if i % 2 == 0 { -1.0 } else { 1.0 }).collect(),
            Kind::Mifflin2 => vec![-1.0; n],
            Kind::CrescentI | Kind::CrescentIi => {
                (0..n).map(|i| if i % 2 == 0 { -1.5 } else { 2.0 }).collect()
            }
        }
    }

    /// The full suite in its usual order.
    pub fn all() -> Vec<Problem> {
        let sqrt2 = std::f64::consts::SQRT_2;
        vec![
            Problem { name: "maxq", dim: 20, f_star: 0.0, kind: Kind::MaxQ },
            Problem { name: "mxhilb", dim: 50, f_star: 0.0, kind: Kind::MxHilb },
            Problem { name: "chained_lq", dim: 2, f_star: -sqrt2, kind: Kind::ChainedLq },
            Problem { name: "chained_cb3_i", dim: 20, f_star: 38.0, kind: Kind::ChainedCb3I },
            Problem { name: "chained_cb3_ii", dim: 20, f_star: 38.0, kind: Kind::ChainedCb3Ii },
            Problem { name: "active_faces", dim: 2, f_star: 0.0, kind: Kind::ActiveFaces },
            Problem { name: "brown2", dim: 2, f_star: 0.0, kind: Kind::Brown2 },
            Problem { name: "mifflin2", dim: 50, f_star: -34.795, kind: Kind::Mifflin2 },
            Problem { name: "crescent_i", dim: 2, f_star: 0.0, kind: Kind::CrescentI },
            Problem { name: "crescent_ii", dim: 2, f_star: 0.0, kind: Kind::CrescentIi },
        ]
    }

    pub fn by_name(name: &str) -> Option<Problem> {
        Problem::all().into_iter().find(|p| p.name == name)
    }
}

/// Relative distance of the best found value from the reference optimum
/// (absolute when the optimum is zero).
pub fn error_measure(f_min: f64, f_star: f64) -> f64 {
    if f_star != 0.0 {
        ((f_min - f_star) / f_star).abs()
    } else {
        f_min.abs()
    }
}

/// A run counts as successful when its error measure is below 0.1.
pub const SOLVED_THRESHOLD: f64 = 1e-1;

pub fn is_solved(f_min: f64, f_star: f64) -> bool {
    error_measure(f_min, f_star) < SOLVED_THRESHOLD
}

impl ObjectiveOracle for Problem {
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, x: &[f64]) -> Evaluation {
        assert_eq!(x.len(), self.dim, "{}: wrong dimension", self.name);
        let n = self.dim;
        let mut g = vec![0.0; n];
        let value = match self.kind {
            Kind::MaxQ => {
                // max_i x_i^2
                let squares: Vec<f64> = x.iter().map(|v| v * v).collect();
                let j = argmax_first(&squares);
                g[j] = 2.0 * x[j];
                squares[j]
            }
            Kind::MxHilb => {
                // max_i |sum_j x_j / (i + j - 1)| over a Hilbert-type matrix
                let mut best = f64::NEG_INFINITY;
                let mut besti = 0;
                let mut besth = 0.0;
                for i in 0..n {
                    let mut h = 0.0;
                    for (j, &xj) in x.iter().enumerate() {
                        h += xj / ((i + j + 1) as f64);
                    }
                    if h.abs() > best {
                        best = h.abs();
                        besti = i;
                        besth = h;
                    }
                }
                let s = sgn(besth);
                for (j, gj) in g.iter_mut().enumerate() {
                    *gj = s / ((besti + j + 1) as f64);
                }
                best
            }
            Kind::ChainedLq => {
                let mut f = 0.0;
                for i in 0..n - 1 {
                    let a = -x[i] - x[i + 1];
                    let b = a + (x[i] * x[i] + x[i + 1] * x[i + 1] - 1.0);
                    if a >= b {
                        f += a;
                        g[i] += -1.0;
                        g[i + 1] += -1.0;
                    } else {
                        f += b;
                        g[i] += -1.0 + 2.0 * x[i];
                        g[i + 1] += -1.0 + 2.0 * x[i + 1];
                    }
                }
                f
            }
            Kind::ChainedCb3I => {
                let mut f = 0.0;
                for i in 0..n - 1 {
                    let (u, v) = (x[i], x[i + 1]);
                    let t1 = u.powi(4) + v * v;
                    let t2 = (2.0 - u).powi(2) + (2.0 - v).powi(2);
                    let t3 = 2.0 * (-u + v).exp();
                    if t1 >= t2 && t1 >= t3 {
                        f += t1;
                        g[i] += 4.0 * u.powi(3);
                        g[i + 1] += 2.0 * v;
                    } else if t2 >= t3 {
                        f += t2;
                        g[i] += -2.0 * (2.0 - u);
                        g[i + 1] += -2.0 * (2.0 - v);
                    } else {
                        f += t3;
                        g[i] += -t3;
                        g[i + 1] += t3;
                    }
                }
                f
            }
            Kind::ChainedCb3Ii => {
                // Same three ingredients, but the max is taken over the sums.
                let (mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0);
                for i in 0..n - 1 {
                    let (u, v) = (x[i], x[i + 1]);
                    s1 += u.powi(4) + v * v;
                    s2 += (2.0 - u).powi(2) + (2.0 - v).powi(2);
                    s3 += 2.0 * (-u + v).exp();
                }
                let pick = argmax_first(&[s1, s2, s3]);
                for i in 0..n - 1 {
                    let (u, v) = (x[i], x[i + 1]);
                    match pick {
                        0 => {
                            g[i] += 4.0 * u.powi(3);
                            g[i + 1] += 2.0 * v;
                        }
                        1 => {
                            g[i] += -2.0 * (2.0 - u);
                            g[i + 1] += -2.0 * (2.0 - v);
                        }
                        _ => {
                            let e = 2.0 * (-u + v).exp();
                            g[i] += -e;
                            g[i + 1] += e;
                        }
                    }
                }
                [s1, s2, s3][pick]
            }
            Kind::ActiveFaces => {
                // max{ ln(|-sum x| + 1), max_i ln(|x_i| + 1) }
                let total: f64 = -x.iter().sum::<f64>();
                let mut cands = Vec::with_capacity(n + 1);
                cands.push((total.abs() + 1.0).ln());
                for &xi in x {
                    cands.push((xi.abs() + 1.0).ln());
                }
                let pick = argmax_first(&cands);
                if pick == 0 {
                    let dg = sgn(total) / (total.abs() + 1.0);
                    for gj in g.iter_mut() {
                        *gj = -dg;
                    }
                } else {
                    let xi = x[pick - 1];
                    g[pick - 1] = sgn(xi) / (xi.abs() + 1.0);
                }
                cands[pick]
            }
            Kind::Brown2 => {
                let mut f = 0.0;
                for i in 0..n - 1 {
                    let (u, v) = (x[i], x[i + 1]);
                    let p = v * v + 1.0; // exponent on |u|
                    let q = u * u + 1.0; // exponent on |v|
                    let au = u.abs();
                    let av = v.abs();
                    f += au.powf(p) + av.powf(q);
                    // d|u|^p/du, zero at u = 0 for every p >= 1
                    if u != 0.0 {
                        g[i] += p * au.powf(p - 1.0) * sgn(u);
                        g[i + 1] += au.powf(p) * au.ln() * 2.0 * v;
                    }
                    if v != 0.0 {
                        g[i + 1] += q * av.powf(q - 1.0) * sgn(v);
                        g[i] += av.powf(q) * av.ln() * 2.0 * u;
                    }
                }
                f
            }
            Kind::Mifflin2 => {
                let mut f = 0.0;
                for i in 0..n - 1 {
                    let t = x[i] * x[i] + x[i + 1] * x[i + 1] - 1.0;
                    f += -x[i] + 2.0 * t + 1.75 * t.abs();
                    let c = 2.0 + 1.75 * sgn(t);
                    g[i] += -1.0 + c * 2.0 * x[i];
                    g[i + 1] += c * 2.0 * x[i + 1];
                }
                f
            }
            Kind::CrescentI => {
                let (u, v) = (x[0], x[1]);
                let t1 = u * u + (v - 1.0) * (v - 1.0) + v - 1.0;
                let t2 = -u * u - (v - 1.0) * (v - 1.0) + v + 1.0;
                if t1 >= t2 {
                    g[0] = 2.0 * u;
                    g[1] = 2.0 * (v - 1.0) + 1.0;
                    t1
                } else {
                    g[0] = -2.0 * u;
                    g[1] = -2.0 * (v - 1.0) + 1.0;
                    t2
                }
            }
            Kind::CrescentIi => {
                let mut f = 0.0;
                for i in 0..n - 1 {
                    let (u, v) = (x[i], x[i + 1]);
                    let t1 = u * u + (v - 1.0) * (v - 1.0) + v - 1.0;
                    let t2 = -u * u - (v - 1.0) * (v - 1.0) + v + 1.0;
                    if t1 >= t2 {
                        f += t1;
                        g[i] += 2.0 * u;
                        g[i + 1] += 2.0 * (v - 1.0) + 1.0;
                    } else {
                        f += t2;
                        g[i] += -2.0 * u;
                        g[i + 1] += -2.0 * (v - 1.0) + 1.0;
                    }
                }
                f
            }
        };
        Evaluation { value, subgradient: g }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn registry_matches_the_reference_table() {
        let expected: Vec<(&str, usize, f64)> = vec![
            ("maxq", 20, 0.0),
            ("mxhilb", 50, 0.0),
            ("chained_lq", 2, -std::f64::consts::SQRT_2),
            ("chained_cb3_i", 20, 38.0),
            ("chained_cb3_ii", 20, 38.0),
            ("active_faces", 2, 0.0),
            ("brown2", 2, 0.0),
            ("mifflin2", 50, -34.795),
            ("crescent_i", 2, 0.0),
            ("crescent_ii", 2, 0.0),
        ];
        let all = Problem::all();
        assert_eq!(all.len(), expected.len());
        for (p, (name, dim, fs)) in all.iter().zip(&expected) {
            assert_eq!(p.name(), *name);
            assert_eq!(p.dim(), *dim);
            assert_eq!(p.f_star(), *fs);
            assert_eq!(p.x0().len(), *dim);
        }
        assert!(Problem::by_name("maxq").is_some());
        assert!(Problem::by_name("nope").is_none());
    }

    #[test]
    fn starting_points_match_their_patterns() {
        let maxq = Problem::by_name("maxq").unwrap().x0();
        assert_eq!(maxq[0], 1.0);
        assert_eq!(maxq[9], 10.0);
        assert_eq!(maxq[10], -11.0);
        assert_eq!(maxq[19], -20.0);
        assert_eq!(Problem::by_name("brown2").unwrap().x0(), vec![-1.0, 1.0]);
        assert_eq!(Problem::by_name("crescent_i").unwrap().x0(), vec![-1.5, 2.0]);
        assert_eq!(Problem::by_name("chained_lq").unwrap().x0(), vec![-0.5, -0.5]);
    }

    #[test]
    fn known_minimizers_attain_f_star() {
        // Closed-form minimizers; mifflin2 has none, so it is skipped.
        let sqrt2 = std::f64::consts::SQRT_2;
        let cases: Vec<(&str, Vec<f64>)> = vec![
            ("maxq", vec![0.0; 20]),
            ("mxhilb", vec![0.0; 50]),
            ("chained_lq", vec![1.0 / sqrt2; 2]),
            ("chained_cb3_i", vec![1.0; 20]),
            ("chained_cb3_ii", vec![1.0; 20]),
            ("active_faces", vec![0.0; 2]),
            ("brown2", vec![0.0; 2]),
            ("crescent_i", vec![0.0; 2]),
            ("crescent_ii", vec![0.0; 2]),
        ];
        for (name, xstar) in cases {
            let p = Problem::by_name(name).unwrap();
            let f = p.evaluate(&xstar).value;
            assert!(
                (f - p.f_star()).abs() <= 1e-6,
                "{name}: f(x*) = {f}, expected {}",
                p.f_star()
            );
        }
    }

    #[test]
    fn values_at_starting_points_are_finite() {
        for p in Problem::all() {
            let ev = p.evaluate(&p.x0());
            assert!(ev.value.is_finite(), "{}: f(x0) not finite", p.name());
            assert!(
                ev.subgradient.iter().all(|v| v.is_finite()),
                "{}: g(x0) not finite",
                p.name()
            );
        }
    }

    /// Central finite difference of the objective value.
    fn fd_gradient(p: &Problem, x: &[f64], h: f64) -> Vec<f64> {
        (0..x.len())
            .map(|i| {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[i] += h;
                xm[i] -= h;
                (p.evaluate(&xp).value - p.evaluate(&xm).value) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn subgradients_match_finite_differences_at_smooth_points() {
        // Random points stay away from kinks almost surely; the seed is
        // fixed so the check is reproducible.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for p in Problem::all() {
            for _ in 0..100 {
                let x: Vec<f64> = (0..p.dim()).map(|_| rng.random_range(-2.0..2.0)).collect();
                let g = p.evaluate(&x).subgradient;
                let fd = fd_gradient(&p, &x, 1e-6);
                for i in 0..p.dim() {
                    let scale = 1.0_f64.max(g[i].abs());
                    assert!(
                        (g[i] - fd[i]).abs() <= 1e-5 * scale,
                        "{}: component {i} analytic {} vs fd {} at {:?}",
                        p.name(),
                        g[i],
                        fd[i],
                        x
                    );
                }
            }
        }
    }

    #[test]
    fn convex_problems_satisfy_the_subgradient_inequality() {
        // f(y) >= f(x) + g(x)'(y - x) for convex f; maxq and mxhilb are
        // convex by construction.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for name in ["maxq", "mxhilb"] {
            let p = Problem::by_name(name).unwrap();
            for _ in 0..100 {
                let x: Vec<f64> = (0..p.dim()).map(|_| rng.random_range(-3.0..3.0)).collect();
                let y: Vec<f64> = (0..p.dim()).map(|_| rng.random_range(-3.0..3.0)).collect();
                let ex = p.evaluate(&x);
                let fy = p.evaluate(&y).value;
                let lin: f64 =
                    ex.subgradient.iter().zip(x.iter().zip(&y)).map(|(gi, (xi, yi))| gi * (yi - xi)).sum();
                assert!(
                    fy >= ex.value + lin - 1e-12,
                    "{name}: subgradient inequality violated"
                );
            }
        }
    }

    #[test]
    fn error_measure_handles_zero_and_nonzero_optima() {
        let e = error_measure(-1.4, -std::f64::consts::SQRT_2);
        assert!((e - 0.010050506338833596).abs() < 1e-12);
        assert_eq!(error_measure(0.05, 0.0), 0.05);
        assert!(is_solved(0.05, 0.0));
        assert!(!is_solved(0.2, 0.0));
        // Exactly at the threshold does not count.
        assert!(!is_solved(0.1, 0.0));
    }

    #[test]
    fn kink_subgradients_are_deterministic() {
        // maxq at the origin: every square ties at 0, the first index wins
        // and its contribution is zero.
        let p = Problem::by_name("maxq").unwrap();
        let g = p.evaluate(&vec![0.0; 20]).subgradient;
        assert!(g.iter().all(|&v| v == 0.0));
        // crescent_i where both pieces tie: the first is chosen.
        let p = Problem::by_name("crescent_i").unwrap();
        let ev = p.evaluate(&[0.0, 0.0]);
        assert_eq!(ev.value, 0.0);
        assert_eq!(ev.subgradient, vec![0.0, -1.0]);
    }
}
