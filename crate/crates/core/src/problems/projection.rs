//! Euclidean projections and the normal-cone resolvents built from them.

use crate::linalg::{self, RealVec};
use crate::operator::Resolvent;

/// Projection onto the unit simplex `{x ≥ 0, Σx = 1}` by sort-and-threshold.
pub fn project_simplex(y: &[f64]) -> RealVec {
    let mut sorted = y.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite input"));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if u - t > 0.0 {
            tau = t;
        } else {
            break;
        }
    }
    y.iter().map(|&v| (v - tau).max(0.0)).collect()
}

/// Projection onto `{v ≥ 0, ‖v‖₂ ≤ R}`: clamp, then rescale.
pub fn project_nonneg_ball(y: &[f64], radius: f64) -> RealVec {
    let mut out: RealVec = y.iter().map(|&v| v.max(0.0)).collect();
    let nrm = linalg::norm(&out);
    if nrm > radius {
        let f = radius / nrm;
        out.iter_mut().for_each(|v| *v *= f);
    }
    out
}

fn in_simplex(x: &[f64], tol: f64) -> bool {
    x.iter().all(|&v| v >= -tol) && (x.iter().sum::<f64>() - 1.0).abs() <= tol * x.len() as f64
}

/// Normal cone of a product of unit simplexes with the given block sizes.
#[derive(Debug, Clone)]
pub struct SimplexProduct {
    blocks: Vec<usize>,
}

impl SimplexProduct {
    pub fn new(blocks: Vec<usize>) -> Self {
        Self { blocks }
    }

    fn ranges(&self) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        self.blocks.iter().scan(0usize, |start, &len| {
            let r = *start..*start + len;
            *start += len;
            Some(r)
        })
    }
}

impl Resolvent for SimplexProduct {
    fn apply(&self, _eta: f64, u: &[f64]) -> RealVec {
        let mut out = Vec::with_capacity(u.len());
        for r in self.ranges() {
            out.extend(project_simplex(&u[r]));
        }
        out
    }

    fn contains_zero_at(&self, x: &[f64]) -> bool {
        self.ranges().all(|r| in_simplex(&x[r], 1e-12))
    }

    fn normal_cone_gap(&self, x: &[f64], v: &[f64]) -> Option<f64> {
        // the support function of a simplex is attained at a vertex
        let gap = self
            .ranges()
            .map(|r| {
                let vmax = v[r.clone()].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                vmax - linalg::dot(&v[r.clone()], &x[r])
            })
            .sum();
        Some(gap)
    }
}

/// Normal cone of `B⁺(0, R) × Δ_rest`: a nonnegative ball block of size
/// `ball_dim` followed by a single simplex.
#[derive(Debug, Clone)]
pub struct BallSimplex {
    pub ball_dim: usize,
    pub radius: f64,
}

impl Resolvent for BallSimplex {
    fn apply(&self, _eta: f64, u: &[f64]) -> RealVec {
        let mut out = project_nonneg_ball(&u[..self.ball_dim], self.radius);
        out.extend(project_simplex(&u[self.ball_dim..]));
        out
    }

    fn contains_zero_at(&self, x: &[f64]) -> bool {
        let (v, mu) = x.split_at(self.ball_dim);
        v.iter().all(|&a| a >= 0.0)
            && linalg::norm(v) <= self.radius * (1.0 + 1e-12)
            && in_simplex(mu, 1e-12)
    }

    fn normal_cone_gap(&self, x: &[f64], w: &[f64]) -> Option<f64> {
        let (v, mu) = x.split_at(self.ball_dim);
        let (wv, wmu) = w.split_at(self.ball_dim);
        let pos: Vec<f64> = wv.iter().map(|&a| a.max(0.0)).collect();
        let ball = self.radius * linalg::norm(&pos) - linalg::dot(wv, v);
        let vmax = wmu.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Some(ball + vmax - linalg::dot(wmu, mu))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    /// Enumerate every support set and keep the closest feasible KKT candidate.
    fn simplex_oracle(y: &[f64]) -> Vec<f64> {
        let p = y.len();
        let mut best: Option<(f64, Vec<f64>)> = None;
        for mask in 1u32..(1 << p) {
            let idx: Vec<usize> = (0..p).filter(|i| mask & (1 << i) != 0).collect();
            let tau = (idx.iter().map(|&i| y[i]).sum::<f64>() - 1.0) / idx.len() as f64;
            let mut x = vec![0.0; p];
            let mut ok = true;
            for &i in &idx {
                x[i] = y[i] - tau;
                if x[i] < 0.0 {
                    ok = false;
                }
            }
            if ok {
                let d = linalg::dist(&x, y);
                if best.as_ref().map_or(true, |(bd, _)| d < *bd) {
                    best = Some((d, x));
                }
            }
        }
        best.unwrap().1
    }

    /// Dykstra alternating projections between the orthant and the ball.
    fn nonneg_ball_oracle(y: &[f64], r: f64) -> Vec<f64> {
        let p = y.len();
        let mut x = y.to_vec();
        let (mut pa, mut qa) = (vec![0.0; p], vec![0.0; p]);
        for _ in 0..200_000 {
            let a: Vec<f64> = (0..p).map(|i| (x[i] + pa[i]).max(0.0)).collect();
            for i in 0..p {
                pa[i] = x[i] + pa[i] - a[i];
            }
            let t: Vec<f64> = (0..p).map(|i| a[i] + qa[i]).collect();
            let nt = linalg::norm(&t);
            let b: Vec<f64> = if nt > r { t.iter().map(|v| v * r / nt).collect() } else { t.clone() };
            for i in 0..p {
                qa[i] = t[i] - b[i];
            }
            let change = linalg::dist(&b, &x);
            x = b;
            if change < 1e-15 {
                break;
            }
        }
        x
    }

    #[test]
    fn simplex_fixed_points_and_vertices() {
        let y = [0.2, 0.3, 0.5];
        let p = project_simplex(&y);
        for (a, b) in p.iter().zip(&y) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(project_simplex(&[2.0, 0.0]), vec![1.0, 0.0]);
    }

    #[test]
    fn simplex_matches_enumeration_oracle() {
        let mut rng = Rng::new(11);
        for _ in 0..50 {
            let y: Vec<f64> = (0..6).map(|_| 2.0 * rng.normal()).collect();
            let fast = project_simplex(&y);
            let slow = simplex_oracle(&y);
            assert!(linalg::dist(&fast, &slow) < 1e-10, "{fast:?} vs {slow:?}");
        }
    }

    #[test]
    fn ball_cases() {
        assert_eq!(project_nonneg_ball(&[0.3, 0.4], 1.0), vec![0.3, 0.4]);
        assert_eq!(project_nonneg_ball(&[-1.0; 4], 2.0), vec![0.0; 4]);
        let mut rng = Rng::new(5);
        for _ in 0..50 {
            let y: Vec<f64> = (0..5).map(|_| 3.0 * rng.normal()).collect();
            let r = 0.5 + rng.uniform() * 2.0;
            let fast = project_nonneg_ball(&y, r);
            let slow = nonneg_ball_oracle(&y, r);
            assert!(linalg::dist(&fast, &slow) < 1e-8, "{fast:?} vs {slow:?}");
        }
    }

    #[test]
    fn normal_cone_gap_signs() {
        let sp = SimplexProduct::new(vec![3]);
        let x = [1.0, 0.0, 0.0];
        // v = (1, 0, 0) pushes toward the vertex itself: inside the normal cone
        assert!(sp.normal_cone_gap(&x, &[1.0, 0.0, 0.0]).unwrap() <= 0.0);
        assert!(sp.normal_cone_gap(&x, &[0.0, 1.0, 0.0]).unwrap() > 0.0);
    }
}
