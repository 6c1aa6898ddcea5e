//! Acceptance suite. Every tolerance is pinned here, independent of the
//! defaults in `verify`; each criterion prints one PASS/FAIL line.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use monad_hym::flow::{self, eig2, FlowConfig};
use monad_hym::verify::{locked, run_suite, RunConfig, SuiteReport};

const SEED: u64 = 7;

struct Outcome {
    failures: Vec<String>,
    summary: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            failures: Vec::new(),
            summary: Vec::new(),
        }
    }

    fn require(&mut self, ok: bool, what: String) {
        if ok {
            self.summary.push(what);
        } else {
            self.failures.push(what);
        }
    }

    fn measured(r: &SuiteReport, name: &str) -> f64 {
        r.checks
            .iter()
            .find(|c| c.name == name)
            .unwrap_or_else(|| panic!("suite {} has no check {name}", r.suite))
            .measured
    }

    fn at_most(&mut self, r: &SuiteReport, name: &str, limit: f64) {
        let v = Self::measured(r, name);
        self.require(v <= limit, format!("{name}={v:.4e}≤{limit:e}"));
    }

    fn at_least(&mut self, r: &SuiteReport, name: &str, limit: f64) {
        let v = Self::measured(r, name);
        self.require(v >= limit, format!("{name}={v:.4e}≥{limit:e}"));
    }

    fn near(&mut self, r: &SuiteReport, name: &str, target: f64, tol: f64) {
        let v = Self::measured(r, name);
        self.require((v - target).abs() <= tol, format!("{name}={v:.5}≈{target}±{tol}"));
    }

    fn within(&mut self, label: &str, elapsed: Duration, limit_s: f64) {
        let s = elapsed.as_secs_f64();
        self.require(s < limit_s, format!("{label} {s:.1}s<{limit_s}s"));
    }

    fn print(&self, id: usize, title: &str) -> bool {
        let pass = self.failures.is_empty();
        let detail = if pass { self.summary.join(", ") } else { self.failures.join(", ") };
        println!("{} [{id:>2}] {title}: {detail}", if pass { "PASS" } else { "FAIL" });
        pass
    }
}

fn suite(name: &str, seed: u64) -> (SuiteReport, Duration) {
    let t = Instant::now();
    let r = run_suite(
        name,
        &RunConfig {
            seed,
            ..RunConfig::default()
        },
    )
    .unwrap_or_else(|e| panic!("suite {name} aborted: {e}"));
    (r, t.elapsed())
}

fn flow_criterion() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    let cfg = FlowConfig {
        steps: 10_000,
        ..FlowConfig::default()
    };
    assert_eq!(cfg.resolution, 7);
    let (domain, mut state) = match flow::setup(&cfg) {
        Ok(v) => v,
        Err(e) => {
            o.require(false, format!("setup failed: {e}"));
            return o;
        }
    };
    let report = match flow::run(&domain, &mut state, &cfg) {
        Ok(r) => r,
        Err(e) => {
            o.require(false, format!("flow aborted: {e}"));
            return o;
        }
    };
    let at_2000 = state
        .history
        .iter()
        .find(|r| r.step == 2000)
        .map(|r| r.sup_mean_curvature / report.initial_sup)
        .unwrap_or(f64::NAN);
    o.require(report.non_increasing, "non-increasing after step 10".into());
    o.require(at_2000 <= 0.5, format!("ratio@2000={at_2000:.3e}≤0.5"));
    o.require(report.ratio <= 0.1, format!("ratio@10⁴={:.3e}≤0.1", report.ratio));
    let boundary_exact = (0..domain.len())
        .filter(|&n| domain.boundary[n])
        .all(|n| state.h[n] == domain.h0[n]);
    o.require(boundary_exact && report.boundary_exact, "boundary bit-exact".into());
    let min_eig = state.h.iter().map(|h| eig2(h)[0]).fold(f64::INFINITY, f64::min);
    o.require(min_eig > 0.0, format!("min eigenvalue {min_eig:.3e}>0"));
    let b = report.barrier.as_ref().expect("barrier nodes prepared");
    o.require(
        b.pass && b.c == locked::BARRIER_C && b.nodes > 0,
        format!("barrier C={} on {} nodes (required {:.3e})", b.c, b.nodes, b.required_c),
    );
    o.within("runtime", t.elapsed(), 600.0);
    o
}

fn main() -> ExitCode {
    let (adhm, t_adhm) = suite("adhm", SEED);
    let (ansatz, t_ansatz) = suite("ansatz", SEED);
    let (potential, t_potential) = suite("potential", SEED);
    let (cone, _) = suite("cone", SEED);
    let (growth, _) = suite("growth", SEED);
    let mut all = true;

    let mut o = Outcome::new();
    o.at_most(&adhm, "asd_analytic", 1e-9);
    o.at_most(&adhm, "asd_fd", 1e-6);
    o.within("suite", t_adhm, 10.0);
    all &= o.print(1, "ADHM data are ASD");

    let mut o = Outcome::new();
    o.near(&adhm, "charge_unit", 1.0, 0.02);
    o.within("suite", t_adhm, 30.0);
    all &= o.print(2, "charge of (1,0,0,1)");

    let mut o = Outcome::new();
    for m in ["ansatz", "twisted", "cone", "adhm"] {
        let r = &ansatz;
        o.at_most(r, &format!("oracle_{m}_relative"), 1e-3);
        o.near(r, &format!("oracle_{m}_order"), 2.0, 0.2);
    }
    all &= o.print(3, "curvature formula vs finite differences");

    let mut o = Outcome::new();
    o.near(&ansatz, "mean_curvature_sup", 2.0, 0.2);
    o.at_most(&ansatz, "mean_curvature_reseed", 0.1);
    all &= o.print(4, "mean-curvature bound");

    let mut o = Outcome::new();
    o.near(&ansatz, "cancellation_slope", 0.0, 0.1);
    o.near(&ansatz, "cancellation_lhs_1", -0.41421, 1e-5);
    o.near(&ansatz, "cancellation_rhs_1", 0.5, 1e-5);
    all &= o.print(5, "cancellation");

    let mut o = Outcome::new();
    o.near(&ansatz, "decay_generic_slope", -3.0, 0.1);
    o.near(&ansatz, "decay_origin_slope", -2.0, 0.15);
    o.within("suite", t_ansatz, 10.0);
    all &= o.print(6, "decay slopes");

    let mut o = Outcome::new();
    o.at_most(&ansatz, "bubbling_scaled_spread", 2.0);
    o.at_most(&ansatz, "fueter_root_independence", 1e-9);
    o.at_most(&adhm, "fueter_root_independence", 1e-9);
    all &= o.print(7, "bubbling comparison");

    let mut o = Outcome::new();
    for c in ["planar", "axis", "mixed"] {
        o.near(&potential, &format!("weak_laplacian_{c}"), 1.0, 0.1);
        o.at_most(&potential, &format!("weak_laplacian_{c}_stderr"), 0.05);
    }
    o.near(&potential, "envelope_sup", locked::ENVELOPE_SUP, 0.15 * locked::ENVELOPE_SUP);
    o.at_most(&potential, "envelope_reseed", 0.15);
    let g_min = Outcome::measured(&potential, "g_min");
    o.require(g_min > 0.0, format!("g_min={g_min:.4e}>0"));
    o.within("suite", t_potential, 60.0);
    all &= o.print(8, "potential");

    all &= flow_criterion().print(9, "heat flow on the default box");

    let mut o = Outcome::new();
    o.at_most(&cone, "cone_mean_curvature", 1e-8);
    o.at_least(&cone, "flat_control", 0.01);
    all &= o.print(10, "conical HYM");

    let mut o = Outcome::new();
    o.near(&growth, "t3_degree_origin", 1.0, 0.05);
    o.near(&growth, "t3_degree_infinity", 0.0, 0.05);
    o.near(&growth, "filtrations_differ", 1.0, 0.0);
    o.near(&growth, "degree_shift_z", 1.0, 0.07);
    o.near(&growth, "degree_shift_z2", 2.0, 0.07);
    o.at_least(&growth, "convexity_t3_margin", -1e-10);
    o.at_most(&growth, "convexity_homogeneous_relative", 1e-10);
    o.at_least(&growth, "convexity_mixed_sigma", 2.0);
    all &= o.print(11, "growth filtration");

    if all {
        println!("acceptance: all 11 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
