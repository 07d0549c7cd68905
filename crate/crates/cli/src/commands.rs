//! Subcommand definitions and their computations.

use butterfly_core::bands::JDeltaVariant;
use butterfly_core::experiments::{
    box_counting_dimension, butterfly_generate, geometric_scales, measure_decay, ThetaMode,
    BUTTERFLY_QMAX_GUARD,
};
use butterfly_core::interpolation::{
    build_intermediate_branch, green_comparison, trace_margin_check, window_check, Branch,
    IntermediatePotential, DEFAULT_CTILDE, DEFAULT_ETA_C,
};
use butterfly_core::{
    construct_alpha, green_identities_check, lyapunov, product_growth, random_admissible_chain,
    sminus, sminus_points, spectral_union_s, spectrum_bands, surace_deviation, OperatorSpec,
    ReducedRational, SpectralSet, Verdict,
};
use clap::{Args, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{Plot, Table};
use crate::suites::{run_suite, unimodular_offset, SUITES};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments; exit status 2.
    Usage(String),
    /// The computation failed; exit status 1.
    Compute(String),
}

impl From<butterfly_core::Error> for CliError {
    fn from(e: butterfly_core::Error) -> Self {
        CliError::Compute(e.to_string())
    }
}

type Outcome<T> = Result<T, CliError>;

fn require(cond: bool, msg: impl FnOnce() -> String) -> Outcome<()> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Usage(msg()))
    }
}

/// What a command produced.
#[derive(Default)]
pub struct Output {
    pub results: Value,
    pub failures: Vec<String>,
    pub table: Option<Table>,
    pub plot: Option<Plot>,
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("serializable result")
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Band rows for every reduced p/q up to a denominator.
    Butterfly(ButterflyArgs),
    /// The q bands at one rational frequency and phase.
    Bands(BandsArgs),
    /// Intersection over phases of the spectra.
    Sminus(SminusArgs),
    /// Lyapunov exponent at one energy or along a grid.
    Lyapunov(LyapunovArgs),
    /// Half-line Green function identities.
    GreenCheck(GreenArgs),
    /// Deviation of the Lyapunov exponent off the real axis.
    Surace(SuraceArgs),
    /// Growth certificates for random hyperbolic chains.
    ProductCheck(ProductArgs),
    /// The interpolating potential and its Green comparison.
    InterpCheck(InterpArgs),
    /// Measure of the fine spectrum inside J_delta along approximants.
    MeasureDecay(DecayArgs),
    /// Box-counting dimension of the union spectrum.
    Dimension(DimensionArgs),
    /// Continued fraction meeting the growth conditions.
    AlphaConstruct(AlphaArgs),
    /// Seeded invariant suites.
    Verify(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Butterfly(_) => "butterfly",
            Command::Bands(_) => "bands",
            Command::Sminus(_) => "sminus",
            Command::Lyapunov(_) => "lyapunov",
            Command::GreenCheck(_) => "green-check",
            Command::Surace(_) => "surace",
            Command::ProductCheck(_) => "product-check",
            Command::InterpCheck(_) => "interp-check",
            Command::MeasureDecay(_) => "measure-decay",
            Command::Dimension(_) => "dimension",
            Command::AlphaConstruct(_) => "alpha-construct",
            Command::Verify(_) => "verify",
        }
    }

    /// The arguments as a JSON object.
    pub fn config(&self) -> Value {
        match to_value(self) {
            Value::Object(m) => m.into_iter().next().map(|(_, v)| v).unwrap_or(Value::Null),
            other => other,
        }
    }

    pub fn has_plot(&self) -> bool {
        matches!(self, Command::Butterfly(_) | Command::Bands(_) | Command::Sminus(_) | Command::Dimension(_))
    }

    pub fn run(&self, seed: u64) -> Outcome<Output> {
        match self {
            Command::Butterfly(a) => a.run(),
            Command::Bands(a) => a.run(),
            Command::Sminus(a) => a.run(),
            Command::Lyapunov(a) => a.run(),
            Command::GreenCheck(a) => a.run(),
            Command::Surace(a) => a.run(),
            Command::ProductCheck(a) => a.run(seed),
            Command::InterpCheck(a) => a.run(),
            Command::MeasureDecay(a) => a.run(),
            Command::Dimension(a) => a.run(),
            Command::AlphaConstruct(a) => a.run(),
            Command::Verify(a) => a.run(seed),
        }
    }
}

/// A rational frequency `p/q` with `q >= 1`.
#[derive(Args, Debug, Serialize)]
pub struct Frequency {
    #[arg(long, allow_negative_numbers = true)]
    pub p: i64,
    #[arg(long)]
    pub q: i64,
}

impl Frequency {
    fn alpha(&self) -> Outcome<ReducedRational> {
        require(self.q >= 1, || format!("--q must be at least 1, got {}", self.q))?;
        Ok(ReducedRational::from_i64(self.p, self.q))
    }
}

fn check_lambda(lambda: f64) -> Outcome<()> {
    require(lambda.is_finite() && lambda >= 0.0, || format!("--lambda must be finite and nonnegative, got {lambda}"))
}

fn check_positive(name: &str, x: f64) -> Outcome<()> {
    require(x.is_finite() && x > 0.0, || format!("--{name} must be positive and finite, got {x}"))
}

fn check_finite(name: &str, x: f64) -> Outcome<()> {
    require(x.is_finite(), || format!("--{name} must be finite, got {x}"))
}

fn band_table(set: &SpectralSet) -> Table {
    let mut t = Table::new(&["band", "lo", "hi"]);
    for (i, b) in set.bands.iter().enumerate() {
        t.push(vec![(i + 1).into(), b.lo.into(), b.hi.into()]);
    }
    t
}

fn band_plot(set: &SpectralSet, alpha: f64) -> Plot {
    Plot {
        x_label: "energy",
        y_label: "alpha",
        rows: set.bands.iter().map(|b| (alpha, b.lo, b.hi)).collect(),
    }
}

#[derive(Args, Debug, Serialize)]
pub struct ButterflyArgs {
    /// Largest denominator.
    #[arg(long)]
    pub qmax: u64,
    #[arg(long, default_value_t = 2.0)]
    pub lambda: f64,
    /// Draw the spectrum at this phase instead of the union over phases.
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, default_value_t = BUTTERFLY_QMAX_GUARD)]
    pub qmax_guard: u64,
}

impl ButterflyArgs {
    fn run(&self) -> Outcome<Output> {
        check_lambda(self.lambda)?;
        require(self.qmax >= 1 && self.qmax <= self.qmax_guard, || {
            format!("--qmax must lie in [1, {}], got {}", self.qmax_guard, self.qmax)
        })?;
        let mode = match self.theta {
            Some(theta) => {
                check_finite("theta", theta)?;
                ThetaMode::Fixed { theta }
            }
            None => ThetaMode::Union,
        };
        let ds = butterfly_generate(self.qmax, self.lambda, mode, self.qmax_guard)?;
        let mut table = Table::new(&["p", "q", "band", "lo", "hi"]);
        for r in &ds.rows {
            table.push(vec![r.p.into(), r.q.into(), r.band.into(), r.lo.into(), r.hi.into()]);
        }
        let plot = Plot {
            x_label: "energy",
            y_label: "alpha",
            rows: ds.rows.iter().map(|r| (r.p as f64 / r.q as f64, r.lo, r.hi)).collect(),
        };
        let failures = ds.failures.iter().map(|f| format!("{}/{}: {}", f.p, f.q, f.error)).collect();
        Ok(Output { results: to_value(&ds), failures, table: Some(table), plot: Some(plot) })
    }
}

#[derive(Args, Debug, Serialize)]
pub struct BandsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub freq: Frequency,
    #[arg(long, default_value_t = 2.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta: f64,
}

impl BandsArgs {
    fn run(&self) -> Outcome<Output> {
        let alpha = self.freq.alpha()?;
        check_lambda(self.lambda)?;
        check_finite("theta", self.theta)?;
        let set = spectrum_bands(&OperatorSpec::almost_mathieu(alpha.clone(), self.lambda, self.theta)?)?;
        let results = json!({ "alpha": alpha, "measure": set.measure(), "bands": set });
        Ok(Output {
            results,
            failures: Vec::new(),
            table: Some(band_table(&set)),
            plot: Some(band_plot(&set, alpha.to_f64())),
        })
    }
}

#[derive(Args, Debug, Serialize)]
pub struct SminusArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub freq: Frequency,
    #[arg(long, default_value_t = 2.0)]
    pub lambda: f64,
}

impl SminusArgs {
    fn run(&self) -> Outcome<Output> {
        let alpha = self.freq.alpha()?;
        check_lambda(self.lambda)?;
        let set = sminus(&alpha, self.lambda)?;
        let union = spectral_union_s(&alpha, self.lambda)?;
        let zeros = if self.lambda == 2.0 { Some(sminus_points(&alpha)?.energies) } else { None };
        let results = json!({
            "alpha": alpha,
            "lambda": self.lambda,
            "sminus": set,
            "sminus_measure": set.measure(),
            "zeros": zeros,
            "union_measure": union.measure(),
        });
        let (table, plot) = match &zeros {
            Some(z) => {
                let pts = SpectralSet::from_intervals(z.iter().map(|&e| (e, e)));
                (band_table(&pts), band_plot(&pts, alpha.to_f64()))
            }
            None => (band_table(&set), band_plot(&set, alpha.to_f64())),
        };
        Ok(Output { results, failures: Vec::new(), table: Some(table), plot: Some(plot) })
    }
}

#[derive(Args, Debug, Serialize)]
pub struct LyapunovArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub freq: Frequency,
    #[arg(long, default_value_t = 2.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta: f64,
    /// A single energy; otherwise a grid over the spectral window.
    #[arg(long, allow_negative_numbers = true)]
    pub energy: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub emin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub emax: Option<f64>,
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    /// Imaginary part of the spectral parameter.
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
}

impl LyapunovArgs {
    fn run(&self) -> Outcome<Output> {
        let alpha = self.freq.alpha()?;
        check_lambda(self.lambda)?;
        check_finite("theta", self.theta)?;
        require(self.epsilon.is_finite() && self.epsilon >= 0.0, || {
            format!("--epsilon must be finite and nonnegative, got {}", self.epsilon)
        })?;
        let spec = OperatorSpec::almost_mathieu(alpha, self.lambda, self.theta)?;
        let energies: Vec<f64> = match self.energy {
            Some(e) => {
                check_finite("energy", e)?;
                vec![e]
            }
            None => {
                let (wlo, whi) = spec.spectral_window();
                let (lo, hi) = (self.emin.unwrap_or(wlo), self.emax.unwrap_or(whi));
                require(lo.is_finite() && hi.is_finite() && lo < hi, || format!("need emin < emax, got [{lo}, {hi}]"))?;
                require(self.points >= 2, || "--points must be at least 2".into())?;
                let n = self.points - 1;
                (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
            }
        };
        let rows: Vec<(f64, _)> = energies
            .par_iter()
            .map(|&e| (e, lyapunov(&spec, Complex64::new(e, self.epsilon))))
            .collect();
        let mut table = Table::new(&["energy", "gamma", "bloch_k"]);
        for (e, v) in &rows {
            table.push(vec![(*e).into(), v.gamma.into(), v.bloch_k.into()]);
        }
        let results = Value::Array(
            rows.iter()
                .map(|(e, v)| json!({ "energy": e, "gamma": v.gamma, "bloch_k": v.bloch_k }))
                .collect(),
        );
        Ok(Output { results, failures: Vec::new(), table: Some(table), plot: None })
    }
}

#[derive(Args, Debug, Serialize)]
pub struct GreenArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub freq: Frequency,
    #[arg(long, default_value_t = 2.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta: f64,
    /// Real part of z.
    #[arg(long, allow_negative_numbers = true)]
    pub re: f64,
    /// Imaginary part of z.
    #[arg(long)]
    pub im: f64,
    /// Number of periods in the power identity.
    #[arg(long, default_value_t = 2)]
    pub m: usize,
}

impl GreenArgs {
    fn run(&self) -> Outcome<Output> {
        let alpha = self.freq.alpha()?;
        check_lambda(self.lambda)?;
        check_finite("theta", self.theta)?;
        check_finite("re", self.re)?;
        check_positive("im", self.im)?;
        require(self.m >= 1, || "--m must be at least 1".into())?;
        let spec = OperatorSpec::almost_mathieu(alpha, self.lambda, self.theta)?;
        let r = green_identities_check(&spec, Complex64::new(self.re, self.im), self.m)?;
        let mut table = Table::new(&[
            "m",
            "factorization_residual",
            "power_residual",
            "power_modulus_residual",
            "l2_sum",
            "l2_bound",
            "floquet_residual",
            "pass",
        ]);
        table.push(vec![
            r.m.into(),
            r.factorization_residual.into(),
            r.power_residual.into(),
            r.power_modulus_residual.into(),
            r.l2_sum.into(),
            r.l2_bound.into(),
            r.floquet_residual.into(),
            r.pass.into(),
        ]);
        let failures = if r.pass { Vec::new() } else { vec!["green identities outside tolerance".into()] };
        Ok(Output { results: to_value(&r), failures, table: Some(table), plot: None })
    }
}

#[derive(Args, Debug, Serialize)]
pub struct SuraceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub freq: Frequency,
    #[arg(long, default_value_t = 2.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta: f64,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub eta: f64,
    #[arg(long, default_value_t = 4000)]
    pub points: usize,
}

impl SuraceArgs {
    fn run(&self) -> Outcome<Output> {
        let alpha = self.freq.alpha()?;
        check_lambda(self.lambda)?;
        check_finite("theta", self.theta)?;
        check_positive("epsilon", self.epsilon)?;
        check_positive("eta", self.eta)?;
        require(self.points >= 2, || "--points must be at least 2".into())?;
        let spec = OperatorSpec::almost_mathieu(alpha, self.lambda, self.theta)?;
        let r = surace_deviation(&spec, self.epsilon, self.eta, self.points)?;
        let mut table = Table::new(&["epsilon", "eta", "measured", "slack", "bound", "within_bound"]);
        table.push(vec![
            r.epsilon.into(),
            r.eta.into(),
            r.measured.into(),
            r.slack.into(),
            r.bound.into(),
            r.within_bound.into(),
        ]);
        let failures = if r.within_bound { Vec::new() } else { vec!["deviation set exceeds pi eps / eta".into()] };
        Ok(Output { results: to_value(&r), failures, table: Some(table), plot: None })
    }
}

#[derive(Args, Debug, Serialize)]
pub struct ProductArgs {
    #[arg(long, default_value_t = 100)]
    pub chains: usize,
    /// Largest chain length; each chain draws its length from 1..=n.
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
}

impl ProductArgs {
    fn run(&self, seed: u64) -> Outcome<Output> {
        require(self.n >= 1, || "--n must be at least 1".into())?;
        require(self.beta > 0.0 && self.beta < 1.0, || format!("--beta must lie in (0, 1), got {}", self.beta))?;
        let certs = (0..self.chains)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                let n = rng.gen_range(1..=self.n);
                product_growth(&random_admissible_chain(&mut rng, n, self.beta), self.beta)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut table = Table::new(&["chain", "n", "gamma_sum", "ln_norm", "ln_lower", "ln_upper", "verdict"]);
        let mut rows = Vec::new();
        let mut failures = Vec::new();
        for (i, c) in certs.iter().enumerate() {
            let verdict = to_value(&c.verdict);
            if c.verdict != Verdict::Pass {
                failures.push(format!("chain {i}: {verdict}"));
            }
            table.push(vec![
                i.into(),
                c.factors.len().into(),
                c.gamma_sum.into(),
                c.ln_norm_final.into(),
                c.ln_lower.into(),
                c.ln_upper.into(),
                verdict["status"].as_str().unwrap_or("").to_string().into(),
            ]);
            rows.push(json!({
                "chain": i,
                "n": c.factors.len(),
                "gamma_sum": c.gamma_sum,
                "ln_norm_final": c.ln_norm_final,
                "ln_lower": c.ln_lower,
                "ln_upper": c.ln_upper,
                "verdict": verdict,
            }));
        }
        let passed = certs.len() - failures.len();
        let results = json!({ "chains": rows, "passed": passed, "total": certs.len() });
        Ok(Output { results, failures, table: Some(table), plot: None })
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchArg {
    Negative,
    Positive,
}

#[derive(Args, Debug, Serialize)]
pub struct InterpArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub freq: Frequency,
    /// Numerator of the fine frequency.
    #[arg(long)]
    pub pt: i64,
    /// Denominator of the fine frequency.
    #[arg(long)]
    pub qt: i64,
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
    #[arg(long, default_value_t = DEFAULT_CTILDE)]
    pub ctilde: f64,
    /// Explicit drift length in base periods, overriding the ctilde rule.
    #[arg(long)]
    pub l0: Option<u64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub energy: f64,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value_t = BranchArg::Negative)]
    pub branch: BranchArg,
    #[arg(long, default_value_t = DEFAULT_ETA_C)]
    pub eta_c: f64,
}

impl InterpArgs {
    fn run(&self) -> Outcome<Output> {
        let base = self.freq.alpha()?;
        require(self.qt >= 1, || format!("--qt must be at least 1, got {}", self.qt))?;
        let fine = ReducedRational::from_i64(self.pt, self.qt);
        check_positive("delta", self.delta)?;
        check_positive("ctilde", self.ctilde)?;
        check_positive("epsilon", self.epsilon)?;
        check_positive("eta-c", self.eta_c)?;
        check_finite("energy", self.energy)?;
        let branch = match self.branch {
            BranchArg::Negative => Branch::Negative,
            BranchArg::Positive => Branch::Positive,
        };
        let ip = match self.l0 {
            Some(l0) => IntermediatePotential::with_l0(base, fine, self.delta, l0, branch)?,
            None => build_intermediate_branch(&base, &fine, self.delta, self.ctilde, branch)?,
        };
        let window = window_check(&ip, self.energy)?;
        let trace = trace_margin_check(&ip, self.energy, self.epsilon);
        let cmp = green_comparison(&ip, self.energy, self.epsilon)?;
        let mut failures = Vec::new();
        if !cmp.step_i_holds() {
            failures.push(format!("step (i): {:e} > {:e}", cmp.lhs_i, cmp.rhs_i));
        }
        if !cmp.step_ii_holds() {
            failures.push(format!("step (ii): {:e} > {:e}", cmp.lhs_ii, cmp.rhs_ii));
        }
        if !cmp.final_holds() {
            failures.push(format!("final bound: {:e} > {:e}", cmp.final_lhs, cmp.final_rhs));
        }
        let mut table = Table::new(&[
            "l0", "lhs_i", "rhs_i", "lhs_ii", "rhs_ii", "c_prime", "final_lhs", "final_rhs", "window_ok", "trace_ok",
        ]);
        table.push(vec![
            cmp.l0.into(),
            cmp.lhs_i.into(),
            cmp.rhs_i.into(),
            cmp.lhs_ii.into(),
            cmp.rhs_ii.into(),
            cmp.c_prime.into(),
            cmp.final_lhs.into(),
            cmp.final_rhs.into(),
            cmp.window_ok.into(),
            cmp.trace_ok.into(),
        ]);
        let results = json!({
            "potential": ip,
            "eta": ip.eta(self.eta_c),
            "within_eta": ip.within_eta(self.eta_c),
            "window": window,
            "trace": trace,
            "comparison": cmp,
        });
        Ok(Output { results, failures, table: Some(table), plot: None })
    }
}

#[derive(Args, Debug, Serialize)]
pub struct DecayArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub freq: Frequency,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    /// 1: level set of Delta; 2: distance to the critical points.
    #[arg(long, default_value_t = 1)]
    pub variant: u8,
    #[arg(long, default_value_t = 3)]
    pub kmin: u64,
    #[arg(long, default_value_t = 40)]
    pub kmax: u64,
    /// Comma-separated approximants `a/b`, replacing the `(kp+a)/(kq+b)` family.
    #[arg(long, value_delimiter = ',')]
    pub approximants: Option<Vec<String>>,
    #[arg(long, default_value_t = DEFAULT_ETA_C)]
    pub eta_c: f64,
}

fn parse_rational(s: &str) -> Outcome<ReducedRational> {
    let bad = || CliError::Usage(format!("expected a/b with b >= 1, got {s:?}"));
    let (a, b) = s.trim().split_once('/').ok_or_else(bad)?;
    let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if b < 1 {
        return Err(bad());
    }
    Ok(ReducedRational::from_i64(a, b))
}

impl DecayArgs {
    fn run(&self) -> Outcome<Output> {
        let base = self.freq.alpha()?;
        check_positive("delta", self.delta)?;
        check_positive("eta-c", self.eta_c)?;
        let variant = JDeltaVariant::try_from(self.variant).map_err(|e| CliError::Usage(e.to_string()))?;
        let family: Vec<ReducedRational> = match &self.approximants {
            Some(list) => list.iter().map(|s| parse_rational(s)).collect::<Outcome<_>>()?,
            None => {
                require(1 <= self.kmin && self.kmin <= self.kmax, || {
                    format!("need 1 <= kmin <= kmax, got {}..{}", self.kmin, self.kmax)
                })?;
                let (p, q) = base.small().ok_or_else(|| CliError::Usage("base frequency too large".into()))?;
                let (a, b) = unimodular_offset(p as u64, q as u64);
                (self.kmin..=self.kmax)
                    .map(|k| ReducedRational::from_i64(k as i64 * p + a, k as i64 * q + b))
                    .collect()
            }
        };
        require(!family.is_empty(), || "no approximants".into())?;
        let r = measure_decay(&base, self.delta, variant, &family, self.eta_c)?;
        let mut table = Table::new(&["approximant", "qt", "measure", "admissible"]);
        for row in &r.rows {
            table.push(vec![row.approximant.to_string().into(), row.qt.into(), row.measure.into(), row.admissible.into()]);
        }
        let failures = r
            .rows
            .iter()
            .filter_map(|row| row.error.as_ref().map(|e| format!("{}: {e}", row.approximant)))
            .collect();
        Ok(Output { results: to_value(&r), failures, table: Some(table), plot: None })
    }
}

#[derive(Args, Debug, Serialize)]
pub struct DimensionArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub freq: Frequency,
    #[arg(long, default_value_t = 2.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1e-1)]
    pub scale_hi: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub scale_lo: f64,
    #[arg(long, default_value_t = 21)]
    pub scales: usize,
}

impl DimensionArgs {
    fn run(&self) -> Outcome<Output> {
        let alpha = self.freq.alpha()?;
        check_lambda(self.lambda)?;
        check_positive("scale-hi", self.scale_hi)?;
        check_positive("scale-lo", self.scale_lo)?;
        require(self.scale_lo < self.scale_hi, || "need scale-lo < scale-hi".into())?;
        require(self.scales >= 2, || "--scales must be at least 2".into())?;
        let set = spectral_union_s(&alpha, self.lambda)?;
        let bc = box_counting_dimension(&set, &geometric_scales(self.scale_hi, self.scale_lo, self.scales))?;
        let mut table = Table::new(&["scale", "boxes"]);
        for &(s, n) in &bc.counts {
            table.push(vec![s.into(), n.into()]);
        }
        let results = json!({
            "alpha": alpha,
            "lambda": self.lambda,
            "measure": set.measure(),
            "pieces": set.len(),
            "estimate": bc.estimate,
            "r_squared": bc.r_squared,
            "counts": bc.counts,
        });
        let plot = band_plot(&set, alpha.to_f64());
        Ok(Output { results, failures: Vec::new(), table: Some(table), plot: Some(plot) })
    }
}

#[derive(Args, Debug, Serialize)]
pub struct AlphaArgs {
    #[arg(long, default_value_t = 10.0)]
    pub c: f64,
    /// Last level to certify; must be odd.
    #[arg(long, default_value_t = 3)]
    pub jmax: usize,
}

impl AlphaArgs {
    fn run(&self) -> Outcome<Output> {
        check_positive("c", self.c)?;
        require(self.jmax % 2 == 1, || format!("--jmax must be odd, got {}", self.jmax))?;
        let (cf, cert) = construct_alpha(self.c, self.jmax)?;
        let mut table = Table::new(&[
            "j", "q_j", "q_next", "cond1", "cond2", "cond3a", "cond3b", "log10_margin1", "log10_margin3a", "log10_margin3b",
        ]);
        for l in &cert.levels {
            table.push(vec![
                l.j.into(),
                l.q_j.to_string().into(),
                l.q_next.to_string().into(),
                l.cond1.holds.into(),
                l.cond2.holds.into(),
                l.cond3a.holds.into(),
                l.cond3b.holds.into(),
                l.cond1.log10_ratio.into(),
                l.cond3a.log10_ratio.into(),
                l.cond3b.log10_ratio.into(),
            ]);
        }
        let failures = cert
            .levels
            .iter()
            .filter(|l| !l.holds())
            .map(|l| format!("level {} fails", l.j))
            .collect();
        let results = json!({ "continued_fraction": cf, "certificate": cert });
        Ok(Output { results, failures, table: Some(table), plot: None })
    }
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    /// `all` or one suite name.
    #[arg(long, default_value = "all")]
    pub suite: String,
}

impl VerifyArgs {
    fn run(&self, seed: u64) -> Outcome<Output> {
        let names: Vec<&str> = if self.suite == "all" {
            SUITES.to_vec()
        } else {
            require(SUITES.contains(&self.suite.as_str()), || {
                format!("unknown suite {:?}; expected all or one of {}", self.suite, SUITES.join(", "))
            })?;
            vec![self.suite.as_str()]
        };
        let results: Vec<_> = names.iter().map(|n| run_suite(n, seed).expect("known suite")).collect();
        let mut table = Table::new(&["suite", "cases", "passed", "worst_ratio"]);
        let mut failures = Vec::new();
        for r in &results {
            table.push(vec![r.suite.to_string().into(), r.cases.into(), r.passed.into(), r.worst_ratio.into()]);
            failures.extend(r.failures.iter().map(|f| format!("{}: {f}", r.suite)));
            if !r.ok() && r.failures.is_empty() {
                failures.push(format!("{}: {} of {} cases failed", r.suite, r.cases - r.passed, r.cases));
            }
        }
        let total: usize = results.iter().map(|r| r.cases).sum();
        let passed: usize = results.iter().map(|r| r.passed).sum();
        let results = json!({ "suites": results, "cases": total, "passed": passed });
        Ok(Output { results, failures, table: Some(table), plot: None })
    }
}
