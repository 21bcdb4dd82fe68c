//! Root-of-unity data for the purified U_q(sl2) category: quantum integers,
//! admissibility, quantum dimensions, the rank, and normalized 6j-symbols.
//!
//! Colors are integers in `0..=r-2` (twice the spin). All simple objects are
//! self-dual and every multiplicity module is one dimensional, so 6j-symbols
//! are plain complex numbers.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

/// Largest color set for which the full 6j table is precomputed.
const TABLE_MAX_COLORS: usize = 9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("level r must be at least 2, got {0}")]
    LevelTooSmall(u32),
    #[error("root exponent {c} is not coprime to 4r = {four_r}")]
    RootNotPrimitive { c: i64, four_r: u32 },
    #[error("color {color} outside 0..={max}")]
    ColorOutOfRange { color: usize, max: usize },
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
}

/// The six colors of a tetrahedron in the order (AB, BC, AC, CD, AD, BD).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SixJKey(pub [usize; 6]);

impl SixJKey {
    /// The four face triples (ABC, ABD, BCD, ACD).
    pub fn faces(&self) -> [[usize; 3]; 4] {
        let [i, j, k, l, m, n] = self.0;
        [[i, j, k], [i, m, n], [j, l, n], [k, l, m]]
    }

    /// Key of the same tetrahedron read with its vertices relabelled:
    /// `order[x]` is the old vertex (0=A .. 3=D) that plays role `x`.
    pub fn relabelled(&self, order: [usize; 4]) -> SixJKey {
        let mut col = [[0usize; 4]; 4];
        let [i, j, k, l, m, n] = self.0;
        for &(a, b, c) in &[(0, 1, i), (1, 2, j), (0, 2, k), (2, 3, l), (0, 3, m), (1, 3, n)] {
            col[a][b] = c;
            col[b][a] = c;
        }
        let e = |a: usize, b: usize| col[order[a]][order[b]];
        SixJKey([e(0, 1), e(1, 2), e(0, 2), e(2, 3), e(0, 3), e(1, 3)])
    }
}

/// The 24 vertex orders of a tetrahedron.
pub fn tetrahedral_orders() -> Vec<[usize; 4]> {
    crate::perm::Perm4::all()
        .map(|p| {
            let im = p.images();
            [im[0] as usize, im[1] as usize, im[2] as usize, im[3] as usize]
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct QuantumParams {
    r: u32,
    root_exponent: i64,
    tol: f64,
    a: Complex64,
    qint: Vec<Complex64>,
    qfact: Vec<Complex64>,
    rank_squared: Complex64,
    // normalization square roots, keyed by sorted triple
    sqrt_choices: HashMap<[usize; 3], Complex64>,
    table: Option<Vec<Complex64>>,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl QuantumParams {
    /// Level `r`, root `a = exp(2πi c / 4r)`, relative tolerance `tol`.
    pub fn new(r: u32, root_exponent: i64, tol: f64) -> Result<Self, AlgebraError> {
        if r < 2 {
            return Err(AlgebraError::LevelTooSmall(r));
        }
        if gcd(root_exponent, 4 * r as i64) != 1 {
            return Err(AlgebraError::RootNotPrimitive {
                c: root_exponent,
                four_r: 4 * r,
            });
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(AlgebraError::BadTolerance(tol));
        }
        let theta = 2.0 * PI * root_exponent as f64 / (4.0 * r as f64);
        let a = Complex64::from_polar(1.0, theta);
        let a2 = a * a;
        let denom = a2 - a2.inv();
        let max_n = 2 * r as usize + 2;
        let qint: Vec<Complex64> = (0..=max_n)
            .map(|n| {
                if n % r as usize == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    (a2.powi(n as i32) - a2.powi(-(n as i32))) / denom
                }
            })
            .collect();
        let mut qfact = vec![Complex64::new(1.0, 0.0); max_n + 1];
        for n in 1..=max_n {
            qfact[n] = qfact[n - 1] * qint[n];
        }
        let rank_squared = Complex64::new(-2.0 * r as f64, 0.0) / (denom * denom);
        let mut p = QuantumParams {
            r,
            root_exponent,
            tol,
            a,
            qint,
            qfact,
            rank_squared,
            sqrt_choices: HashMap::new(),
            table: None,
        };
        p.warm_up();
        Ok(p)
    }

    /// Level `r` with root exponent 1 and tolerance 1e-9.
    pub fn level(r: u32) -> Result<Self, AlgebraError> {
        Self::new(r, 1, 1e-9)
    }

    fn warm_up(&mut self) {
        let nc = self.num_colors();
        for i in 0..nc {
            for j in i..nc {
                for k in j..nc {
                    if self.admissible(i, j, k) {
                        let g = self.gamma(i, j, k);
                        self.sqrt_choices.insert([i, j, k], g.sqrt());
                    }
                }
            }
        }
        if nc <= TABLE_MAX_COLORS {
            let mut table = vec![Complex64::new(0.0, 0.0); nc.pow(6)];
            for (idx, slot) in table.iter_mut().enumerate() {
                let mut key = [0usize; 6];
                let mut rest = idx;
                for x in key.iter_mut().rev() {
                    *x = rest % nc;
                    rest /= nc;
                }
                *slot = self.sixj_direct(&SixJKey(key));
            }
            self.table = Some(table);
        }
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn root_exponent(&self) -> i64 {
        self.root_exponent
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// The primitive 4r-th root of unity `a`.
    pub fn root(&self) -> Complex64 {
        self.a
    }

    /// Size of the color set `I = {0, …, r-2}`.
    pub fn num_colors(&self) -> usize {
        self.r as usize - 1
    }

    /// Quantum integer `[n] = (a^{2n} - a^{-2n}) / (a^2 - a^{-2})`.
    pub fn qint(&self, n: i64) -> Complex64 {
        if n >= 0 && (n as usize) < self.qint.len() {
            return self.qint[n as usize];
        }
        if n % self.r as i64 == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let a2 = self.a * self.a;
        (a2.powi(n as i32) - a2.powi(-(n as i32))) / (a2 - a2.inv())
    }

    /// Quantum factorial `[n]! = [1][2]⋯[n]`, `[0]! = 1`.
    pub fn qfact(&self, n: usize) -> Complex64 {
        if n < self.qfact.len() {
            return self.qfact[n];
        }
        (1..=n).fold(Complex64::new(1.0, 0.0), |acc, k| acc * self.qint(k as i64))
    }

    fn check_color(&self, i: usize) -> Result<(), AlgebraError> {
        if i >= self.num_colors() {
            Err(AlgebraError::ColorOutOfRange {
                color: i,
                max: self.num_colors() - 1,
            })
        } else {
            Ok(())
        }
    }

    /// Quantum dimension `(-1)^i [i+1]`.
    pub fn qdim(&self, i: usize) -> Result<Complex64, AlgebraError> {
        self.check_color(i)?;
        Ok(self.qdim_unchecked(i))
    }

    pub(crate) fn qdim_unchecked(&self, i: usize) -> Complex64 {
        let q = self.qint[i + 1];
        if i % 2 == 0 {
            q
        } else {
            -q
        }
    }

    /// `D² = -2r (a² - a⁻²)⁻²`.
    pub fn rank_squared(&self) -> Complex64 {
        self.rank_squared
    }

    /// Strict admissibility: even sum, triangle inequality, sum ≤ 2r-4.
    pub fn admissible(&self, i: usize, j: usize, k: usize) -> bool {
        let sum = i + j + k;
        sum % 2 == 0
            && sum <= 2 * self.r as usize - 4
            && i.abs_diff(j) <= k
            && k <= i + j
    }

    /// `Γ(i,j,k)` of an admissible triple.
    fn gamma(&self, i: usize, j: usize, k: usize) -> Complex64 {
        let s = (i + j + k) / 2;
        let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
        sign * self.qfact(s + 1) * self.qfact(s - k) * self.qfact(s - j) * self.qfact(s - i)
            / (self.qfact(i) * self.qfact(j) * self.qfact(k))
    }

    /// The cached square root of `Γ` chosen for an admissible triple.
    pub fn gamma_sqrt(&self, i: usize, j: usize, k: usize) -> Option<Complex64> {
        let mut key = [i, j, k];
        key.sort_unstable();
        self.sqrt_choices.get(&key).copied()
    }

    /// `⟨i,j,k⟩` of an admissible triple.
    fn bracket(&self, i: usize, j: usize, k: usize) -> Complex64 {
        let s = (i + j + k) / 2;
        self.qfact(s - k) * self.qfact(s - j) * self.qfact(s - i)
            / self.gamma_sqrt(i, j, k).expect("admissible triple is cached")
    }

    /// Normalized 6j-symbol; zero unless all four face triples are strictly
    /// admissible.
    pub fn sixj(&self, key: &SixJKey) -> Result<Complex64, AlgebraError> {
        for &c in &key.0 {
            self.check_color(c)?;
        }
        Ok(self.sixj_unchecked(key))
    }

    pub(crate) fn sixj_unchecked(&self, key: &SixJKey) -> Complex64 {
        match &self.table {
            Some(table) => {
                let nc = self.num_colors();
                let idx = key.0.iter().fold(0usize, |acc, &c| acc * nc + c);
                table[idx]
            }
            None => self.sixj_direct(key),
        }
    }

    fn sixj_direct(&self, key: &SixJKey) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        let faces = key.faces();
        if !faces.iter().all(|f| self.admissible(f[0], f[1], f[2])) {
            return zero;
        }
        let [i, j, k, l, m, n] = key.0;
        let mut pre = Complex64::new(1.0, 0.0);
        for f in &faces {
            pre *= self.bracket(f[0], f[1], f[2]);
        }
        for &c in &key.0 {
            pre /= self.qfact(c);
        }
        let half: Vec<usize> = faces.iter().map(|f| (f[0] + f[1] + f[2]) / 2).collect();
        let quads = [(i + j + l + m) / 2, (j + k + m + n) / 2, (i + k + l + n) / 2];
        let lo = *half.iter().max().expect("four faces");
        let hi = *quads.iter().min().expect("three quads");
        let mut sum = zero;
        for z in lo..=hi {
            let num = self.qfact(z + 1);
            if num == zero {
                continue;
            }
            let mut den = Complex64::new(1.0, 0.0);
            for &a in &half {
                den *= self.qfact(z - a);
            }
            for &b in &quads {
                den *= self.qfact(b - z);
            }
            let term = num / den;
            if z % 2 == 0 {
                sum += term;
            } else {
                sum -= term;
            }
        }
        pre * sum
    }

    /// Relative comparison `|x - y| <= tol * max(|x|, |y|, 1)`.
    pub fn approx_eq(&self, x: Complex64, y: Complex64) -> bool {
        relative_deviation(x, y) <= self.tol
    }
}

/// `|x - y| / max(|x|, |y|, 1)`.
pub fn relative_deviation(x: Complex64, y: Complex64) -> f64 {
    (x - y).norm() / x.norm().max(y.norm()).max(1.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct PentagonReport {
    pub samples: usize,
    /// Samples whose outer faces were all admissible.
    pub nontrivial: usize,
    pub max_deviation: f64,
}

/// Colors of the ten edges among apexes `A`, `E` and triangle `B, C, D`
/// used by the 2-3 identity check, indexed by vertex (A=0, B=1, C=2, D=3,
/// E=4).
#[derive(Clone, Copy, Debug)]
pub struct TwoThreeConfig {
    pub colors: [[usize; 5]; 5],
}

impl TwoThreeConfig {
    fn key(&self, v: [usize; 4]) -> SixJKey {
        let c = |a: usize, b: usize| self.colors[v[a]][v[b]];
        SixJKey([c(0, 1), c(1, 2), c(0, 2), c(2, 3), c(0, 3), c(1, 3)])
    }

    fn with_axis(&self, x: usize) -> TwoThreeConfig {
        let mut out = *self;
        out.colors[0][4] = x;
        out.colors[4][0] = x;
        out
    }

    /// Two tetrahedra ABCD and EBCD sharing face BCD.
    pub fn two_side(&self, p: &QuantumParams) -> Complex64 {
        p.sixj_unchecked(&self.key([0, 1, 2, 3])) * p.sixj_unchecked(&self.key([4, 1, 2, 3]))
    }

    /// Three tetrahedra around the new edge AE, summed over its color.
    pub fn three_side(&self, p: &QuantumParams) -> Complex64 {
        (0..p.num_colors())
            .map(|x| {
                let c = self.with_axis(x);
                p.qdim_unchecked(x)
                    * p.sixj_unchecked(&c.key([0, 4, 1, 2]))
                    * p.sixj_unchecked(&c.key([0, 4, 1, 3]))
                    * p.sixj_unchecked(&c.key([0, 4, 2, 3]))
            })
            .sum()
    }
}

/// Checks the 2-3 move identity on random boundary colorings, preferring
/// colorings whose outer faces are admissible.
pub fn verify_pentagon(p: &QuantumParams, samples: usize, seed: u64) -> PentagonReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nc = p.num_colors();
    let outer = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [4, 1, 2], [4, 1, 3], [4, 2, 3]];
    let mut max_dev: f64 = 0.0;
    let mut nontrivial = 0;
    for _ in 0..samples {
        let mut cfg = TwoThreeConfig { colors: [[0; 5]; 5] };
        let mut ok = false;
        for _ in 0..1000 {
            for a in 0..5 {
                for b in a + 1..5 {
                    let c = if (a, b) == (0, 4) { 0 } else { rng.gen_range(0..nc) };
                    cfg.colors[a][b] = c;
                    cfg.colors[b][a] = c;
                }
            }
            ok = outer.iter().all(|f| {
                p.admissible(cfg.colors[f[0]][f[1]], cfg.colors[f[1]][f[2]], cfg.colors[f[0]][f[2]])
            });
            if ok {
                break;
            }
        }
        if ok {
            nontrivial += 1;
        }
        let dev = relative_deviation(cfg.two_side(p), cfg.three_side(p));
        max_dev = max_dev.max(dev);
    }
    PentagonReport {
        samples,
        nontrivial,
        max_deviation: max_dev,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub r: u32,
    pub root: i64,
    pub rank_squared: [f64; 2],
    pub sum_qdim_squared: [f64; 2],
    pub rank_deviation: f64,
    pub gate_keys_checked: usize,
    pub gate_failures: usize,
    pub symmetry_keys_checked: usize,
    pub symmetry_max_deviation: f64,
    pub pentagon: PentagonReport,
    pub passed: bool,
}

/// Runs the identity suite: rank against Σ qdim², the admissibility gate,
/// tetrahedral symmetry and the 2-3 identity.
pub fn check_identities(p: &QuantumParams, samples: usize, seed: u64) -> IdentityReport {
    let nc = p.num_colors();
    let sum: Complex64 = (0..nc).map(|i| p.qdim_unchecked(i).powi(2)).sum();
    let rank_dev = relative_deviation(p.rank_squared(), sum);

    let mut gate_keys = 0;
    let mut gate_failures = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exhaustive = nc.pow(6) <= 100_000;
    let total = if exhaustive { nc.pow(6) } else { 20_000 };
    for idx in 0..total {
        let key = if exhaustive {
            let mut key = [0usize; 6];
            let mut rest = idx;
            for x in key.iter_mut().rev() {
                *x = rest % nc;
                rest /= nc;
            }
            SixJKey(key)
        } else {
            SixJKey(std::array::from_fn(|_| rng.gen_range(0..nc)))
        };
        gate_keys += 1;
        let adm = key.faces().iter().all(|f| p.admissible(f[0], f[1], f[2]));
        let val = p.sixj_unchecked(&key);
        if adm == (val == Complex64::new(0.0, 0.0)) {
            gate_failures += 1;
        }
    }

    let orders = tetrahedral_orders();
    let mut sym_keys = 0;
    let mut sym_dev: f64 = 0.0;
    let mut attempts = 0;
    while sym_keys < samples && attempts < 1000 * samples.max(1) {
        attempts += 1;
        let key = SixJKey(std::array::from_fn(|_| rng.gen_range(0..nc)));
        if !key.faces().iter().all(|f| p.admissible(f[0], f[1], f[2])) {
            continue;
        }
        sym_keys += 1;
        let base = p.sixj_unchecked(&key);
        for o in &orders {
            sym_dev = sym_dev.max(relative_deviation(base, p.sixj_unchecked(&key.relabelled(*o))));
        }
    }
    let pentagon = verify_pentagon(p, samples, seed.wrapping_add(1));
    let passed = rank_dev <= p.tol()
        && gate_failures == 0
        && sym_dev <= p.tol()
        && pentagon.max_deviation <= p.tol();
    IdentityReport {
        r: p.r(),
        root: p.root_exponent(),
        rank_squared: [p.rank_squared().re, p.rank_squared().im],
        sum_qdim_squared: [sum.re, sum.im],
        rank_deviation: rank_dev,
        gate_keys_checked: gate_keys,
        gate_failures,
        symmetry_keys_checked: sym_keys,
        symmetry_max_deviation: sym_dev,
        pentagon,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-9;

    fn close(x: Complex64, y: Complex64) -> bool {
        relative_deviation(x, y) < TOL
    }

    #[test]
    fn quantum_integers() {
        let p = QuantumParams::level(3).unwrap();
        assert_eq!(p.qint(0), Complex64::new(0.0, 0.0));
        assert!(close(p.qint(1), Complex64::new(1.0, 0.0)));
        // [2] = a² + a⁻² = 2 cos 60°
        assert!(close(p.qint(2), Complex64::new(1.0, 0.0)));
        for r in 3..=8 {
            let p = QuantumParams::level(r).unwrap();
            assert!(p.qint(r as i64).norm() < TOL);
            // a^{4r} = 1 and a^{2r} = -1
            assert!(close(p.root().powi(4 * r as i32), Complex64::new(1.0, 0.0)));
            assert!(close(p.root().powi(2 * r as i32), Complex64::new(-1.0, 0.0)));
        }
    }

    #[test]
    fn quantum_dimensions_and_rank() {
        let p = QuantumParams::level(3).unwrap();
        assert!(close(p.qdim(0).unwrap(), Complex64::new(1.0, 0.0)));
        assert!(close(p.qdim(1).unwrap(), Complex64::new(-1.0, 0.0)));
        assert!(close(p.rank_squared(), Complex64::new(2.0, 0.0)));
        assert_eq!(
            p.qdim(2).unwrap_err(),
            AlgebraError::ColorOutOfRange { color: 2, max: 1 }
        );
        let p2 = QuantumParams::level(2).unwrap();
        assert!(close(p2.rank_squared(), Complex64::new(1.0, 0.0)));
        for r in 2..=8 {
            let p = QuantumParams::level(r).unwrap();
            let sum: Complex64 = (0..p.num_colors()).map(|i| p.qdim(i).unwrap().powi(2)).sum();
            assert!(close(p.rank_squared(), sum), "r={r}");
        }
    }

    #[test]
    fn parameter_errors() {
        assert_eq!(QuantumParams::new(1, 1, TOL).unwrap_err(), AlgebraError::LevelTooSmall(1));
        assert!(matches!(
            QuantumParams::new(3, 2, TOL),
            Err(AlgebraError::RootNotPrimitive { .. })
        ));
        assert!(matches!(QuantumParams::new(3, 1, 0.0), Err(AlgebraError::BadTolerance(_))));
    }

    #[test]
    fn admissibility() {
        let p = QuantumParams::level(3).unwrap();
        assert!(p.admissible(0, 0, 0));
        assert!(!p.admissible(1, 1, 1));
        assert!(p.admissible(1, 1, 0));
        assert!(p.admissible(0, 1, 1));
        assert!(!p.admissible(1, 0, 0));
        let p5 = QuantumParams::level(5).unwrap();
        assert!(p5.admissible(2, 2, 2));
        assert!(!p5.admissible(3, 3, 2));
        assert!(!p5.admissible(3, 0, 1));
    }

    #[test]
    fn sixj_basic_values() {
        let p = QuantumParams::level(3).unwrap();
        assert!(close(p.sixj(&SixJKey([0; 6])).unwrap(), Complex64::new(1.0, 0.0)));
        assert_eq!(p.sixj(&SixJKey([1, 0, 0, 0, 0, 0])).unwrap(), Complex64::new(0.0, 0.0));
        assert!(p.sixj(&SixJKey([2, 0, 0, 0, 0, 0])).is_err());
    }

    #[test]
    fn sixj_is_deterministic_within_a_session() {
        let p = QuantumParams::level(6).unwrap();
        let key = SixJKey([2, 2, 2, 2, 2, 2]);
        let x = p.sixj(&key).unwrap();
        let y = p.sixj(&key).unwrap();
        assert_eq!(x.re.to_bits(), y.re.to_bits());
        assert_eq!(x.im.to_bits(), y.im.to_bits());
        assert_eq!(p.sixj_direct(&key), x);
    }

    #[test]
    fn pentagon_small_levels() {
        for r in [3, 4, 5] {
            let p = QuantumParams::level(r).unwrap();
            let rep = verify_pentagon(&p, 50, 7);
            assert!(rep.max_deviation < TOL, "r={r}: {rep:?}");
        }
    }

    #[test]
    fn pentagon_trivial_sample() {
        let p = QuantumParams::level(4).unwrap();
        let cfg = TwoThreeConfig { colors: [[0; 5]; 5] };
        let l = cfg.two_side(&p);
        let r = cfg.three_side(&p);
        // the 3-tet side sums over the axis color; only color 0 survives
        assert!(close(l, Complex64::new(1.0, 0.0)));
        assert!(close(r, Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn identity_suite_passes_for_other_roots() {
        for (r, c) in [(5, 3), (6, 5), (7, 9)] {
            let p = QuantumParams::new(r, c, TOL).unwrap();
            let rep = check_identities(&p, 30, 11);
            assert!(rep.passed, "r={r} c={c}: {rep:?}");
        }
    }
}
