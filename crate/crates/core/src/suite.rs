//! The classical 23-function benchmark suite (F1..F23).
//!
//! `f_min` is the optimality target each function is scored against. For a
//! few fixed-dimension entries the conventional target is a rounded figure
//! (Foxholes is listed as 1, Hartmann-3 as -3.86); the exact minimum and a
//! minimizer are kept alongside in [`KnownOptimum`].

use std::f64::consts::{E, PI};
use std::fmt::Write as _;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::objective::{Bounds, Objective};

/// Bumped whenever a definition, bound or target in this module changes.
pub const SUITE_VERSION: &str = "classical-23/1";

/// Default dimensionality of the scalable functions F1..F13.
pub const DEFAULT_SCALABLE_DIM: usize = 30;

/// Per-dimension target of Schwefel's F8.
pub const SCHWEFEL_F8_PER_DIM: f64 = -418.9829;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Unimodal,
    Multimodal,
    FixedDimMultimodal,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Unimodal => "unimodal",
            Family::Multimodal => "multimodal",
            Family::FixedDimMultimodal => "fixed-dim-multimodal",
        }
    }
}

/// A minimizer and the exact minimum value at it.
#[derive(Debug, Clone, PartialEq)]
pub struct KnownOptimum {
    pub argmin: Vec<f64>,
    pub value: f64,
}

type Formula = fn(&[f64]) -> f64;

/// A registered benchmark function at a concrete dimensionality.
#[derive(Debug, Clone)]
pub struct SuiteEntry {
    id: &'static str,
    title: &'static str,
    family: Family,
    dim: usize,
    bounds: Bounds,
    f_min: f64,
    optimum: Option<KnownOptimum>,
    noisy: bool,
    formula: Formula,
}

impl SuiteEntry {
    pub fn id(&self) -> &'static str {
        self.id
    }

    pub fn title(&self) -> &'static str {
        self.title
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn default_dim(&self) -> usize {
        match self.family {
            Family::FixedDimMultimodal => self.dim,
            _ => DEFAULT_SCALABLE_DIM,
        }
    }

    pub fn is_scalable(&self) -> bool {
        self.family != Family::FixedDimMultimodal
    }

    pub fn optimum(&self) -> Option<&KnownOptimum> {
        self.optimum.as_ref()
    }

    /// True for F7, whose value carries additive uniform noise.
    pub fn is_noisy(&self) -> bool {
        self.noisy
    }

    /// Re-instantiates a scalable function at `dim` dimensions.
    pub fn with_dim(&self, dim: usize) -> Result<SuiteEntry> {
        if dim == self.dim {
            return Ok(self.clone());
        }
        if !self.is_scalable() {
            return Err(Error::Usage(format!(
                "{} has fixed dimension {}, cannot use {dim}",
                self.id, self.dim
            )));
        }
        if dim == 0 {
            return Err(Error::Usage("dimension must be at least 1".into()));
        }
        Ok(build(self.id, dim).expect("registered id"))
    }

    /// The noise-free value (F7 without its random term).
    pub fn value(&self, x: &[f64]) -> f64 {
        (self.formula)(x)
    }

    /// Evaluates with a dimensionality check; noise for F7 comes from `rng`.
    pub fn evaluate_checked(&self, x: &[f64], rng: &mut dyn RngCore) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::Usage(format!(
                "{} expects {} coordinates, got {}",
                self.id,
                self.dim,
                x.len()
            )));
        }
        Ok(self.evaluate(x, rng))
    }
}

impl Objective for SuiteEntry {
    fn name(&self) -> &str {
        self.id
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn f_min(&self) -> f64 {
        self.f_min
    }

    fn evaluate(&self, x: &[f64], rng: &mut dyn RngCore) -> f64 {
        let v = (self.formula)(x);
        if self.noisy {
            v + rng.random::<f64>()
        } else {
            v
        }
    }
}

pub const IDS: [&str; 23] = [
    "F1", "F2", "F3", "F4", "F5", "F6", "F7", "F8", "F9", "F10", "F11", "F12", "F13", "F14",
    "F15", "F16", "F17", "F18", "F19", "F20", "F21", "F22", "F23",
];

/// Looks up an entry at its default dimensionality. Ids are case-insensitive.
pub fn lookup(id: &str) -> Result<SuiteEntry> {
    let canonical = IDS
        .iter()
        .find(|known| known.eq_ignore_ascii_case(id.trim()))
        .ok_or_else(|| Error::UnknownFunction(id.to_string()))?;
    let dim = fixed_dim(canonical).unwrap_or(DEFAULT_SCALABLE_DIM);
    Ok(build(canonical, dim).expect("registered id"))
}

/// All 23 entries at their default dimensionality.
pub fn registry() -> Vec<SuiteEntry> {
    IDS.iter().map(|id| lookup(id).expect("registered id")).collect()
}

/// Expands a function selector such as `F1-F7`, `F1..F23`, `F3,F9` or `all`.
pub fn parse_selection(selection: &str) -> Result<Vec<&'static str>> {
    let selection = selection.trim();
    if selection.eq_ignore_ascii_case("all") {
        return Ok(IDS.to_vec());
    }
    let mut out: Vec<&'static str> = Vec::new();
    for part in selection.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let range = part
            .split_once("..")
            .or_else(|| part.split_once('-'));
        match range {
            Some((a, b)) => {
                let lo = index_of(a)?;
                let hi = index_of(b)?;
                if lo > hi {
                    return Err(Error::Usage(format!("empty function range `{part}`")));
                }
                out.extend(&IDS[lo..=hi]);
            }
            None => out.push(IDS[index_of(part)?]),
        }
    }
    if out.is_empty() {
        return Err(Error::Usage("no functions selected".into()));
    }
    let mut seen = std::collections::HashSet::new();
    out.retain(|id| seen.insert(*id));
    Ok(out)
}

fn index_of(id: &str) -> Result<usize> {
    IDS.iter()
        .position(|known| known.eq_ignore_ascii_case(id.trim()))
        .ok_or_else(|| Error::UnknownFunction(id.trim().to_string()))
}

/// Registry metadata as CSV: `id,family,dim,lower,upper,f_min`.
///
/// Per-dimension bounds that differ across axes are joined with `;`.
pub fn registry_csv() -> String {
    let mut out = String::from("id,family,dim,lower,upper,f_min\n");
    for e in registry() {
        let join = |v: &[f64]| {
            if v.iter().all(|x| *x == v[0]) {
                format!("{}", v[0])
            } else {
                v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
            }
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            e.id,
            e.family.as_str(),
            e.dim,
            join(&e.bounds.lower),
            join(&e.bounds.upper),
            e.f_min
        );
    }
    out
}

fn fixed_dim(id: &str) -> Option<usize> {
    match id {
        "F14" | "F16" | "F17" | "F18" => Some(2),
        "F19" => Some(3),
        "F15" | "F21" | "F22" | "F23" => Some(4),
        "F20" => Some(6),
        _ => None,
    }
}

fn build(id: &str, dim: usize) -> Option<SuiteEntry> {
    use Family::*;
    let scalable = |id: &'static str,
                    title: &'static str,
                    family: Family,
                    range: f64,
                    argmin: f64,
                    formula: Formula| SuiteEntry {
        id,
        title,
        family,
        dim,
        bounds: Bounds::uniform(dim, -range, range),
        f_min: 0.0,
        optimum: Some(KnownOptimum {
            argmin: vec![argmin; dim],
            value: 0.0,
        }),
        noisy: false,
        formula,
    };
    let fixed = |id: &'static str,
                 title: &'static str,
                 bounds: Bounds,
                 f_min: f64,
                 argmin: Vec<f64>,
                 value: f64,
                 formula: Formula| SuiteEntry {
        id,
        title,
        family: FixedDimMultimodal,
        dim: bounds.dim(),
        bounds,
        f_min,
        optimum: Some(KnownOptimum { argmin, value }),
        noisy: false,
        formula,
    };

    let entry = match id {
        "F1" => scalable("F1", "Sphere", Unimodal, 100.0, 0.0, sphere),
        "F2" => scalable("F2", "Schwefel 2.22", Unimodal, 10.0, 0.0, schwefel_2_22),
        "F3" => scalable("F3", "Schwefel 1.2", Unimodal, 100.0, 0.0, schwefel_1_2),
        "F4" => scalable("F4", "Schwefel 2.21", Unimodal, 100.0, 0.0, schwefel_2_21),
        "F5" => scalable("F5", "Rosenbrock", Unimodal, 30.0, 1.0, rosenbrock),
        "F6" => scalable("F6", "Step", Unimodal, 100.0, 0.0, step),
        "F7" => SuiteEntry {
            noisy: true,
            ..scalable("F7", "Quartic with noise", Unimodal, 1.28, 0.0, quartic)
        },
        "F8" => SuiteEntry {
            f_min: SCHWEFEL_F8_PER_DIM * dim as f64,
            optimum: Some(KnownOptimum {
                argmin: vec![SCHWEFEL_ARGMIN; dim],
                value: schwefel(&vec![SCHWEFEL_ARGMIN; dim]),
            }),
            ..scalable("F8", "Schwefel", Multimodal, 500.0, SCHWEFEL_ARGMIN, schwefel)
        },
        "F9" => scalable("F9", "Rastrigin", Multimodal, 5.12, 0.0, rastrigin),
        "F10" => scalable("F10", "Ackley", Multimodal, 32.0, 0.0, ackley),
        "F11" => scalable("F11", "Griewank", Multimodal, 600.0, 0.0, griewank),
        "F12" => scalable("F12", "Penalized 1", Multimodal, 50.0, -1.0, penalized_1),
        "F13" => scalable("F13", "Penalized 2", Multimodal, 50.0, 1.0, penalized_2),
        "F14" => fixed(
            "F14",
            "Shekel's Foxholes",
            Bounds::uniform(2, -65.536, 65.536),
            1.0,
            vec![-31.978_335, -31.978_328_5],
            0.998_003_837_794_45,
            foxholes,
        ),
        "F15" => fixed(
            "F15",
            "Kowalik",
            Bounds::uniform(4, -5.0, 5.0),
            0.000_30,
            vec![0.192_833_5, 0.190_836_2, 0.123_117_3, 0.135_766],
            0.000_307_485_987_805_6,
            kowalik,
        ),
        "F16" => fixed(
            "F16",
            "Six-Hump Camel",
            Bounds::uniform(2, -5.0, 5.0),
            -1.0316,
            vec![0.089_842, -0.712_656_4],
            -1.031_628_453_489_877_6,
            six_hump_camel,
        ),
        "F17" => fixed(
            "F17",
            "Branin",
            Bounds::new(vec![-5.0, 0.0], vec![10.0, 15.0]).expect("static bounds"),
            0.398,
            vec![PI, 2.275],
            0.397_887_357_729_738_16,
            branin,
        ),
        "F18" => fixed(
            "F18",
            "Goldstein-Price",
            Bounds::uniform(2, -2.0, 2.0),
            3.0,
            vec![0.0, -1.0],
            3.0,
            goldstein_price,
        ),
        "F19" => fixed(
            "F19",
            "Hartmann 3",
            Bounds::uniform(3, 0.0, 1.0),
            -3.86,
            vec![0.114_614_3, 0.555_648_9, 0.852_547],
            -3.862_782_147_820_755,
            hartmann_3,
        ),
        "F20" => fixed(
            "F20",
            "Hartmann 6",
            Bounds::uniform(6, 0.0, 1.0),
            -3.32,
            vec![
                0.201_689_5,
                0.150_010_7,
                0.476_874,
                0.275_332_4,
                0.311_651_6,
                0.657_300_5,
            ],
            -3.322_368_011_415_515,
            hartmann_6,
        ),
        "F21" => fixed(
            "F21",
            "Shekel 5",
            Bounds::uniform(4, 0.0, 10.0),
            -10.1532,
            vec![4.000_037_2, 4.000_133_3, 4.000_037_2, 4.000_133_3],
            -10.153_199_679_058_229,
            shekel_5,
        ),
        "F22" => fixed(
            "F22",
            "Shekel 7",
            Bounds::uniform(4, 0.0, 10.0),
            -10.4028,
            vec![4.000_572_9, 4.000_689_4, 3.999_489_7, 3.999_606_2],
            -10.402_940_566_818_662,
            shekel_7,
        ),
        "F23" => fixed(
            "F23",
            "Shekel 10",
            Bounds::uniform(4, 0.0, 10.0),
            -10.5363,
            vec![4.000_746_5, 4.000_592_9, 3.999_663_4, 3.999_509_8],
            -10.536_409_816_692_046,
            shekel_10,
        ),
        _ => return None,
    };
    Some(entry)
}

const SCHWEFEL_ARGMIN: f64 = 420.968_746;

fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn schwefel_2_22(x: &[f64]) -> f64 {
    let sum: f64 = x.iter().map(|v| v.abs()).sum();
    let prod: f64 = x.iter().map(|v| v.abs()).product();
    sum + prod
}

fn schwefel_1_2(x: &[f64]) -> f64 {
    let mut prefix = 0.0;
    let mut total = 0.0;
    for v in x {
        prefix += v;
        total += prefix * prefix;
    }
    total
}

fn schwefel_2_21(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (w[0] - 1.0).powi(2))
        .sum()
}

fn step(x: &[f64]) -> f64 {
    x.iter().map(|v| (v + 0.5).floor().powi(2)).sum()
}

fn quartic(x: &[f64]) -> f64 {
    x.iter()
        .enumerate()
        .map(|(i, v)| (i + 1) as f64 * v.powi(4))
        .sum()
}

fn schwefel(x: &[f64]) -> f64 {
    x.iter().map(|v| -v * v.abs().sqrt().sin()).sum()
}

fn rastrigin(x: &[f64]) -> f64 {
    x.iter()
        .map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0)
        .sum()
}

fn ackley(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sq: f64 = x.iter().map(|v| v * v).sum::<f64>() / n;
    let cos: f64 = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
    -20.0 * (-0.2 * sq.sqrt()).exp() - cos.exp() + 20.0 + E
}

fn griewank(x: &[f64]) -> f64 {
    let sum: f64 = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
    let prod: f64 = x
        .iter()
        .enumerate()
        .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
        .product();
    sum - prod + 1.0
}

fn penalty(x: f64, a: f64, k: f64, m: i32) -> f64 {
    if x > a {
        k * (x - a).powi(m)
    } else if x < -a {
        k * (-x - a).powi(m)
    } else {
        0.0
    }
}

fn penalized_1(x: &[f64]) -> f64 {
    let n = x.len();
    let y: Vec<f64> = x.iter().map(|v| 1.0 + (v + 1.0) / 4.0).collect();
    let mut body = 10.0 * (PI * y[0]).sin().powi(2);
    for i in 0..n - 1 {
        body += (y[i] - 1.0).powi(2) * (1.0 + 10.0 * (PI * y[i + 1]).sin().powi(2));
    }
    body += (y[n - 1] - 1.0).powi(2);
    PI / n as f64 * body + x.iter().map(|&v| penalty(v, 10.0, 100.0, 4)).sum::<f64>()
}

fn penalized_2(x: &[f64]) -> f64 {
    let n = x.len();
    let mut body = (3.0 * PI * x[0]).sin().powi(2);
    for i in 0..n - 1 {
        body += (x[i] - 1.0).powi(2) * (1.0 + (3.0 * PI * x[i + 1]).sin().powi(2));
    }
    body += (x[n - 1] - 1.0).powi(2) * (1.0 + (2.0 * PI * x[n - 1]).sin().powi(2));
    0.1 * body + x.iter().map(|&v| penalty(v, 5.0, 100.0, 4)).sum::<f64>()
}

fn foxholes(x: &[f64]) -> f64 {
    const GRID: [f64; 5] = [-32.0, -16.0, 0.0, 16.0, 32.0];
    let mut inv = 1.0 / 500.0;
    for j in 0..25 {
        let a0 = GRID[j % 5];
        let a1 = GRID[j / 5];
        inv += 1.0 / ((j + 1) as f64 + (x[0] - a0).powi(6) + (x[1] - a1).powi(6));
    }
    1.0 / inv
}

fn kowalik(x: &[f64]) -> f64 {
    const A: [f64; 11] = [
        0.1957, 0.1947, 0.1735, 0.1600, 0.0844, 0.0627, 0.0456, 0.0342, 0.0323, 0.0235, 0.0246,
    ];
    const B_INV: [f64; 11] = [0.25, 0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0];
    A.iter()
        .zip(B_INV)
        .map(|(a, b_inv)| {
            let b = 1.0 / b_inv;
            let model = x[0] * (b * b + b * x[1]) / (b * b + b * x[2] + x[3]);
            (a - model).powi(2)
        })
        .sum()
}

fn six_hump_camel(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    4.0 * a * a - 2.1 * a.powi(4) + a.powi(6) / 3.0 + a * b - 4.0 * b * b + 4.0 * b.powi(4)
}

fn branin(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    (b - 5.1 / (4.0 * PI * PI) * a * a + 5.0 / PI * a - 6.0).powi(2)
        + 10.0 * (1.0 - 1.0 / (8.0 * PI)) * a.cos()
        + 10.0
}

fn goldstein_price(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    let left = 1.0
        + (a + b + 1.0).powi(2)
            * (19.0 - 14.0 * a + 3.0 * a * a - 14.0 * b + 6.0 * a * b + 3.0 * b * b);
    let right = 30.0
        + (2.0 * a - 3.0 * b).powi(2)
            * (18.0 - 32.0 * a + 12.0 * a * a + 48.0 * b - 36.0 * a * b + 27.0 * b * b);
    left * right
}

const HARTMANN_C: [f64; 4] = [1.0, 1.2, 3.0, 3.2];

fn hartmann<const N: usize>(x: &[f64], a: &[[f64; N]; 4], p: &[[f64; N]; 4]) -> f64 {
    -(0..4)
        .map(|i| {
            let inner: f64 = (0..N).map(|j| a[i][j] * (x[j] - p[i][j]).powi(2)).sum();
            HARTMANN_C[i] * (-inner).exp()
        })
        .sum::<f64>()
}

fn hartmann_3(x: &[f64]) -> f64 {
    const A: [[f64; 3]; 4] = [
        [3.0, 10.0, 30.0],
        [0.1, 10.0, 35.0],
        [3.0, 10.0, 30.0],
        [0.1, 10.0, 35.0],
    ];
    const P: [[f64; 3]; 4] = [
        [0.3689, 0.1170, 0.2673],
        [0.4699, 0.4387, 0.7470],
        [0.1091, 0.8732, 0.5547],
        [0.038150, 0.5743, 0.8828],
    ];
    hartmann(x, &A, &P)
}

fn hartmann_6(x: &[f64]) -> f64 {
    const A: [[f64; 6]; 4] = [
        [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
        [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
        [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
        [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
    ];
    const P: [[f64; 6]; 4] = [
        [0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886],
        [0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991],
        [0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650],
        [0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381],
    ];
    hartmann(x, &A, &P)
}

const SHEKEL_A: [[f64; 4]; 10] = [
    [4.0, 4.0, 4.0, 4.0],
    [1.0, 1.0, 1.0, 1.0],
    [8.0, 8.0, 8.0, 8.0],
    [6.0, 6.0, 6.0, 6.0],
    [3.0, 7.0, 3.0, 7.0],
    [2.0, 9.0, 2.0, 9.0],
    [5.0, 5.0, 3.0, 3.0],
    [8.0, 1.0, 8.0, 1.0],
    [6.0, 2.0, 6.0, 2.0],
    [7.0, 3.6, 7.0, 3.6],
];
const SHEKEL_C: [f64; 10] = [0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3, 0.7, 0.5, 0.5];

fn shekel(x: &[f64], m: usize) -> f64 {
    -(0..m)
        .map(|i| {
            let sq: f64 = (0..4).map(|j| (x[j] - SHEKEL_A[i][j]).powi(2)).sum();
            1.0 / (sq + SHEKEL_C[i])
        })
        .sum::<f64>()
}

fn shekel_5(x: &[f64]) -> f64 {
    shekel(x, 5)
}

fn shekel_7(x: &[f64]) -> f64 {
    shekel(x, 7)
}

fn shekel_10(x: &[f64]) -> f64 {
    shekel(x, 10)
}
