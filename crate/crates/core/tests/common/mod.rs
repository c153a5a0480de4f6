#![allow(dead_code)]

use copdyn::symbol::SymbolExpr;
use num_complex::Complex64;
use proptest::prelude::*;

pub fn sym(s: &str) -> SymbolExpr {
    SymbolExpr::parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

/// `|a − b| <= rel·|b| + abs`.
pub fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    (a - b).abs() <= rel * b.abs() + abs
}

/// Centred difference of order `k` on the complex circle `|z − x| = r`.
///
/// With `N` equally spaced nodes `x + r·ωʲ` the stencil
/// `k!/(N rᵏ) Σ f(x + r ωʲ) ω^{−jk}` is exact for polynomials of degree
/// `< N` and converges geometrically for functions analytic on a disc
/// wider than `r`. Real-axis stencils lose too many digits at order 5.
pub fn circle_derivative(f: &dyn Fn(Complex64) -> Complex64, x: f64, k: usize, r: f64) -> f64 {
    const N: usize = 64;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..N {
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / N as f64);
        acc += f(x + r * w) * w.powi(-(k as i32));
    }
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    acc.re * fact / (N as f64 * r.powi(k as i32))
}

/// A smooth function as both an expression and a plain closure.
#[derive(Clone, Debug)]
pub struct Sample {
    pub text: String,
    pub kind: u8,
    pub a: f64,
    pub b: f64,
}

impl Sample {
    pub fn expr(&self) -> SymbolExpr {
        sym(&self.text)
    }

    /// Independent evaluation through `std` floating-point functions.
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_complex(Complex64::new(x, 0.0)).re
    }

    /// The same formula over ℂ.
    pub fn eval_complex(&self, x: Complex64) -> Complex64 {
        let (a, b) = (self.a, self.b);
        match self.kind {
            0 => (a * x + b).sin(),
            1 => (a * x).exp() + b,
            2 => (a * x).tanh() + b * x,
            3 => a * x * x * x + b * x * x - x,
            4 => b * (a * x).cos(),
            5 => (1.0 + a * a * x * x).ln(),
            6 => x + b + a * x.sin(),
            7 => a * x + b,
            8 => b / (x * x + a),
            _ => unreachable!(),
        }
    }

    /// Kinds `0..9`; see [`Sample::eval_complex`].
    pub fn new(kind: u8, a: f64, b: f64) -> Sample {
        let a = if kind == 8 { 1.0 + a.abs() } else { a };
        let (fa, fb) = (fmt(a), fmt(b));
        let text = match kind {
            0 => format!("sin({fa}*x+{fb})"),
            1 => format!("exp({fa}*x)+{fb}"),
            2 => format!("tanh({fa}*x)+{fb}*x"),
            3 => format!("{fa}*x^3+{fb}*x^2-x"),
            4 => format!("{fb}*cos({fa}*x)"),
            5 => format!("log(1+{fa}^2*x^2)"),
            6 => format!("x+{fb}+{fa}*sin(x)"),
            7 => format!("{fa}*x+{fb}"),
            8 => format!("{fb}/(x^2+{fa})"),
            _ => panic!("no sample kind {kind}"),
        };
        Sample { text, kind, a, b }
    }

    /// Kinds whose orbits from `[−2, 2]` stay bounded or grow at most
    /// linearly, after damping `b` (kind 2) or `a` (kind 7).
    pub fn tame(kind: u8, a: f64, b: f64) -> Sample {
        match kind {
            2 => Sample::new(2, a, b * 0.5),
            7 => Sample::new(7, a * 0.6, b),
            0 | 4 | 6 => Sample::new(kind, a, b),
            _ => panic!("kind {kind} is not tame"),
        }
    }
}

fn coef() -> impl Strategy<Value = f64> {
    (-150i32..=150).prop_map(|k| k as f64 / 100.0)
}

fn fmt(v: f64) -> String {
    format!("({v})")
}

/// Smooth test functions with moderate derivatives on `[−2, 2]`.
pub fn smooth_function() -> impl Strategy<Value = Sample> {
    (0u8..9, coef(), coef()).prop_map(|(kind, a, b)| Sample::new(kind, a, b))
}

/// Symbols whose orbits stay bounded or grow at most linearly from `[−2, 2]`.
pub fn tame_symbol() -> impl Strategy<Value = Sample> {
    (prop::sample::select(vec![0u8, 2, 4, 6, 7]), coef(), coef()).prop_map(|(kind, a, b)| Sample::tame(kind, a, b))
}

/// The documented command-line examples, keyed by golden-file name.
pub const CLI_EXAMPLES: &[(&str, &[&str])] = &[
    ("classify_half_affine_oM", &["classify", "--symbol", "0.5*x+1", "--space", "oM"]),
    ("classify_translation_om2", &["classify", "--symbol", "x+1", "--space", "om:2"]),
    ("classify_syntax_error", &["classify", "--symbol", "x^^2"]),
    ("orbit_square_plus_one", &["orbit", "--symbol", "x^2+1", "--x0", "0", "--n", "5"]),
    ("cesaro_identity", &["cesaro", "--symbol", "x", "--x0", "4", "--n", "3"]),
    ("orbit_doubling_overflow", &["orbit", "--symbol", "2*x", "--x0", "1", "--n", "600"]),
    ("seminorm_constant", &["seminorm", "--function", "1", "--order", "0", "--weight", "1"]),
    ("seminorm_identity", &["seminorm", "--function", "x", "--order", "0", "--weight", "1"]),
    ("seminorm_exp", &["seminorm", "--function", "exp(x)", "--order", "0", "--weight", "1"]),
    ("counterexamples_bump", &["counterexamples", "--which", "bump", "--p", "1", "--n", "1..8"]),
    ("counterexamples_sinsq", &["counterexamples", "--which", "sinsq", "--n0", "1", "--k", "1..6"]),
    ("counterexamples_bump_no_claim", &["counterexamples", "--which", "bump", "--p", "9", "--n", "1..3"]),
];

/// Exit code and captured streams of one run of the built binary.
#[derive(Debug, PartialEq, Eq)]
pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    /// The byte layout stored in golden files.
    pub fn transcript(&self) -> String {
        format!("exit: {}\n--- stdout\n{}--- stderr\n{}", self.code, self.stdout, self.stderr)
    }
}

pub fn run_cli(args: &[&str]) -> Run {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_copdyn"))
        .args(args)
        .env_remove("COPDYN_XMAX")
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

pub fn golden_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}
