use serde::{Deserialize, Serialize};

use super::SaddleProblem;
use crate::error::{Error, Result};
use crate::space::{FeasibleSet, Iterate, RngStream};

/// Stream id reserved for instance generation, disjoint from worker ids.
pub const PROBLEM_STREAM: u64 = u64::MAX;

pub const PROBLEM_FORMAT: &str = "localadaseg/bilinear";
pub const PROBLEM_FORMAT_VERSION: u32 = 1;

/// Below this scale the generator redraws `b` and `c`.
const DEGENERATE_SCALE: f64 = 1e-12;

/// Stochastic bilinear game over the box `[-1, 1]^n × [-1, 1]^n`:
///
/// `F(x, y) = E[xᵀ A y + (b + ξ)ᵀ x + (c + ξ)ᵀ y]`, `ξ ~ N(0, s² I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearProblem {
    n: usize,
    /// Row-major `n × n`.
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    sigma: f64,
    noise_scale_is_std: bool,
    seed: Option<u64>,
    set: FeasibleSet,
}

impl BilinearProblem {
    /// Builds an instance from an explicit matrix. `sigma` is the per-coordinate
    /// noise standard deviation.
    pub fn new(a: Vec<f64>, b: Vec<f64>, c: Vec<f64>, sigma: f64) -> Result<Self> {
        let n = b.len();
        if n == 0 {
            return Err(Error::Config("bilinear problem needs n >= 1".into()));
        }
        if c.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: c.len(),
            });
        }
        if a.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                got: a.len(),
            });
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::Config(format!(
                "sigma must be finite and >= 0, got {sigma}"
            )));
        }
        if a.iter().chain(&b).chain(&c).any(|v| !v.is_finite()) {
            return Err(Error::Config("problem data must be finite".into()));
        }
        Ok(Self {
            n,
            a,
            b,
            c,
            sigma,
            noise_scale_is_std: true,
            seed: None,
            set: FeasibleSet::cube(2 * n, -1.0, 1.0)?,
        })
    }

    /// Applies the dataset normalization `A = Ā / max(|b|_max, |c|_max)`.
    pub fn normalized(a_bar: Vec<f64>, b: Vec<f64>, c: Vec<f64>, sigma: f64) -> Result<Self> {
        let scale = max_abs(&b).max(max_abs(&c));
        if scale.is_nan() || scale <= 0.0 {
            return Err(Error::Domain(
                "cannot normalize by a zero vector scale".into(),
            ));
        }
        let a = a_bar.into_iter().map(|v| v / scale).collect();
        Self::new(a, b, c, sigma)
    }

    /// Draws an instance: `b, c ~ U[-1, 1]^n`, a symmetric `Ā` with uniform
    /// entries (upper triangle mirrored), then the normalization above.
    pub fn generate(n: usize, sigma: f64, stream: &mut RngStream) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("bilinear problem needs n >= 1".into()));
        }
        let (b, c) = loop {
            let b = stream.uniform_draw(n, -1.0, 1.0);
            let c = stream.uniform_draw(n, -1.0, 1.0);
            if max_abs(&b).max(max_abs(&c)) >= DEGENERATE_SCALE {
                break (b, c);
            }
        };
        let upper = stream.uniform_draw(n * (n + 1) / 2, -1.0, 1.0);
        let mut a_bar = vec![0.0; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                a_bar[i * n + j] = upper[k];
                a_bar[j * n + i] = upper[k];
                k += 1;
            }
        }
        let mut p = Self::normalized(a_bar, b, c, sigma)?;
        p.seed = Some(stream.master_seed());
        Ok(p)
    }

    /// Generates from a seed on the reserved problem stream.
    pub fn generate_seeded(n: usize, sigma: f64, seed: u64) -> Result<Self> {
        Self::generate(n, sigma, &mut RngStream::new(seed, PROBLEM_STREAM))
    }

    /// When false, `sigma` is read as a variance and the noise std is `√sigma`.
    pub fn with_noise_scale_is_std(mut self, is_std: bool) -> Self {
        self.noise_scale_is_std = is_std;
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn a_at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn noise_scale_is_std(&self) -> bool {
        self.noise_scale_is_std
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Per-coordinate standard deviation of `ξ`.
    pub fn noise_std(&self) -> f64 {
        if self.noise_scale_is_std {
            self.sigma
        } else {
            self.sigma.sqrt()
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.a_at(i, j) == self.a_at(j, i)))
    }

    /// `A·y + b`.
    pub fn x_gradient(&self, y: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| {
                let row = &self.a[i * n..(i + 1) * n];
                row.iter().zip(y).map(|(a, v)| a * v).sum::<f64>() + self.b[i]
            })
            .collect()
    }

    /// `Aᵀ·x + c`.
    pub fn y_gradient(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = self.c.clone();
        for (i, xi) in x.iter().enumerate() {
            let row = &self.a[i * n..(i + 1) * n];
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * xi;
            }
        }
        out
    }

    /// Expected objective `xᵀAy + bᵀx + cᵀy`.
    pub fn objective(&self, z: &Iterate) -> f64 {
        let ay = self.x_gradient(z.y());
        z.x().iter().zip(&ay).map(|(x, v)| x * v).sum::<f64>()
            + z.y().iter().zip(&self.c).map(|(y, c)| y * c).sum::<f64>()
    }

    pub fn to_file(&self) -> ProblemFile {
        ProblemFile {
            format: PROBLEM_FORMAT.to_string(),
            version: PROBLEM_FORMAT_VERSION,
            n: self.n,
            sigma: self.sigma,
            noise_scale_is_std: self.noise_scale_is_std,
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.clone(),
            seed: self.seed,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("problem file serializes")
    }

    /// Parses and validates a serialized instance.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ProblemFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("problem file: {e}")))?;
        Self::from_file(file)
    }

    pub fn from_file(file: ProblemFile) -> Result<Self> {
        if file.format != PROBLEM_FORMAT {
            return Err(Error::Parse(format!(
                "unknown problem format {:?}",
                file.format
            )));
        }
        if file.version != PROBLEM_FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported problem format version {}",
                file.version
            )));
        }
        if file.b.len() != file.n {
            return Err(Error::Dimension {
                expected: file.n,
                got: file.b.len(),
            });
        }
        let mut p = Self::new(file.a, file.b, file.c, file.sigma)?;
        p.noise_scale_is_std = file.noise_scale_is_std;
        p.seed = file.seed;
        Ok(p)
    }
}

/// Versioned on-disk form of a [`BilinearProblem`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub format: String,
    pub version: u32,
    pub n: usize,
    pub sigma: f64,
    pub noise_scale_is_std: bool,
    /// Row-major.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub seed: Option<u64>,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

impl SaddleProblem for BilinearProblem {
    fn feasible_set(&self) -> &FeasibleSet {
        &self.set
    }

    fn x_dim(&self) -> usize {
        self.n
    }

    fn y_dim(&self) -> usize {
        self.n
    }

    fn operator(&self, z: &Iterate) -> Iterate {
        let gx = self.x_gradient(z.y());
        let mut gy = self.y_gradient(z.x());
        for v in &mut gy {
            *v = -*v;
        }
        Iterate::new(gx, gy)
    }

    fn oracle(&self, z: &Iterate, stream: &mut RngStream) -> Iterate {
        self.oracle_batch(z, stream, 1)
    }

    /// One shared `ξ` per draw perturbs both blocks: `(Ay + b + ξ, −(Aᵀx + c + ξ))`.
    fn oracle_batch(&self, z: &Iterate, stream: &mut RngStream, batch: usize) -> Iterate {
        assert!(batch >= 1);
        let mut g = self.operator(z);
        let std = self.noise_std();
        let mut xi = vec![0.0; self.n];
        let mut xi_sum = vec![0.0; self.n];
        for _ in 0..batch {
            stream.gaussian_fill(&mut xi, std);
            for (s, v) in xi_sum.iter_mut().zip(&xi) {
                *s += v;
            }
        }
        if batch > 1 {
            let inv = 1.0 / batch as f64;
            for s in &mut xi_sum {
                *s *= inv;
            }
        }
        for (v, e) in g.x_mut().iter_mut().zip(&xi_sum) {
            *v += e;
        }
        for (v, e) in g.y_mut().iter_mut().zip(&xi_sum) {
            *v -= e;
        }
        g
    }

    /// `√2·√n·(max row ℓ1 norm of A + max(|b|_max, |c|_max) + 3·std)`; loose,
    /// only used by diagnostics.
    fn gradient_bound_hint(&self) -> Option<f64> {
        let n = self.n;
        let row_max = (0..n)
            .map(|i| {
                self.a[i * n..(i + 1) * n]
                    .iter()
                    .map(|v| v.abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max);
        let shift = max_abs(&self.b).max(max_abs(&self.c));
        let root_n = (n as f64).sqrt();
        Some(2f64.sqrt() * root_n * (row_max + shift + 3.0 * self.noise_std()))
    }

    fn kkt_residual(&self, z: &Iterate) -> f64 {
        super::kkt_residual(self, z)
    }

    fn duality_gap(&self, z: &Iterate) -> Result<f64> {
        super::duality_gap(self, z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn xy_game(sigma: f64) -> BilinearProblem {
        BilinearProblem::new(vec![1.0], vec![0.0], vec![0.0], sigma).unwrap()
    }

    #[test]
    fn generated_matrix_is_symmetric() {
        for seed in 0..20 {
            let p = BilinearProblem::generate_seeded(7, 0.1, seed).unwrap();
            assert!(p.is_symmetric());
            assert_eq!(p.a().len(), 49);
        }
    }

    #[test]
    fn generated_shapes_for_n10() {
        let p = BilinearProblem::generate_seeded(10, 0.1, 1).unwrap();
        assert_eq!(p.b().len(), 10);
        assert_eq!(p.c().len(), 10);
        assert_eq!(p.a().len(), 100);
        assert!(p.b().iter().chain(p.c()).all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn generation_is_reproducible() {
        let a = BilinearProblem::generate_seeded(5, 0.5, 99).unwrap();
        let b = BilinearProblem::generate_seeded(5, 0.5, 99).unwrap();
        assert_eq!(a, b);
        let c = BilinearProblem::generate_seeded(5, 0.5, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn normalization_divides_by_largest_shift() {
        let p = BilinearProblem::normalized(vec![0.4], vec![0.8], vec![-0.5], 0.0).unwrap();
        assert_eq!(p.a(), &[0.5]);
        let p = BilinearProblem::normalized(
            vec![0.4, 0.1, 0.1, -0.2],
            vec![0.8, 0.1],
            vec![0.3, -0.5],
            0.0,
        )
        .unwrap();
        assert_eq!(p.a_at(0, 0), 0.4 / 0.8);
        assert_eq!(p.a_at(1, 1), -0.2 / 0.8);
    }

    #[test]
    fn generated_normalization_holds() {
        let n = 6;
        let mut stream = RngStream::new(4, PROBLEM_STREAM);
        let p = BilinearProblem::generate(n, 0.0, &mut stream).unwrap();
        let scale = max_abs(p.b()).max(max_abs(p.c()));
        // Rescaled A stays within [-1/scale, 1/scale].
        assert!(p.a().iter().all(|v| v.abs() <= 1.0 / scale + 1e-15));
    }

    #[test]
    fn noiseless_oracle_equals_operator() {
        let p = BilinearProblem::generate_seeded(4, 0.0, 3).unwrap();
        let z = Iterate::new(vec![0.1, -0.2, 0.3, 0.4], vec![0.5, 0.0, -1.0, 0.2]);
        let mut s = RngStream::new(1, 0);
        assert_eq!(p.oracle(&z, &mut s), p.operator(&z));
    }

    #[test]
    fn scalar_game_operator() {
        let p = xy_game(0.0);
        let g = p.operator(&Iterate::new(vec![1.0], vec![1.0]));
        assert_eq!(g, Iterate::new(vec![1.0], vec![-1.0]));
    }

    #[test]
    fn oracle_shares_noise_across_blocks() {
        let p = xy_game(0.3);
        let z = Iterate::new(vec![0.2], vec![-0.4]);
        let det = p.operator(&z);
        let mut s = RngStream::new(8, 1);
        for _ in 0..20 {
            let g = p.oracle(&z, &mut s);
            let dx = g.x()[0] - det.x()[0];
            let dy = g.y()[0] - det.y()[0];
            assert!((dx + dy).abs() < 1e-15);
        }
    }

    #[test]
    fn variance_reading_of_sigma() {
        let p = xy_game(0.25).with_noise_scale_is_std(false);
        assert_eq!(p.noise_std(), 0.5);
    }

    #[test]
    fn json_round_trip() {
        let p = BilinearProblem::generate_seeded(3, 0.1, 12).unwrap();
        let back = BilinearProblem::from_json(&p.to_json()).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn json_rejects_bad_files() {
        let p = BilinearProblem::generate_seeded(2, 0.1, 12).unwrap();
        let mut f = p.to_file();
        f.version = 9;
        let text = serde_json::to_string(&f).unwrap();
        assert!(BilinearProblem::from_json(&text).is_err());

        let mut f = p.to_file();
        f.a.pop();
        let text = serde_json::to_string(&f).unwrap();
        assert!(matches!(
            BilinearProblem::from_json(&text),
            Err(Error::Dimension { .. })
        ));

        assert!(BilinearProblem::from_json("{").is_err());
        assert!(BilinearProblem::from_json("{\"format\":1}").is_err());
    }

    #[test]
    fn gradient_hint_bounds_operator() {
        let p = BilinearProblem::generate_seeded(5, 0.0, 2).unwrap();
        let g_max = p.gradient_bound_hint().unwrap();
        for corner in 0..(1u32 << 10) {
            let v: Vec<f64> = (0..10)
                .map(|k| if corner >> k & 1 == 1 { 1.0 } else { -1.0 })
                .collect();
            let z = Iterate::from_flat(v, 5).unwrap();
            assert!(p.operator(&z).norm() <= g_max);
        }
    }
}
