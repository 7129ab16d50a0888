//! One function per subcommand. Each resolves its defaults into the run
//! spec, runs the library and returns the result as JSON plus a CSV body and
//! a one-line summary.

use std::fmt::Write as _;

use pointopt::asymptotics::{strong_limit_check, weak_expansion_check, ExpansionRow, STRONG_ALPHA_MIN, WEAK_ALPHA_MAX};
use pointopt::configurations::{sharp_sphere, spherical_design_strength, SharpName};
use pointopt::optimizer::{conjecture_scan, maximize_lambda1, minimize_surface_energy, verify_theorem, Search};
use pointopt::spectral::{alpha_crit, ground_state};
use pointopt::{fmt_f64, Error, Result, Setting, SpectralResult};
use serde::Serialize;
use serde_json::{json, Value};

use crate::spec::{alpha_grid, require, resolve_config, Common, ObjectiveArg, RunSpec};

pub struct Output {
    pub result: Value,
    pub csv: String,
    pub summary: String,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("results serialize")
}

const VERIFY_TRIALS: usize = 200;
const SCAN_TRIALS: usize = 50;
const SCAN_ALPHAS: [f64; 4] = [0.1, 1.0, 10.0, 50.0];
const WEAK_GRID_STEPS: usize = 10;
const STRONG_GRID: [f64; 3] = [10.0, 100.0, 1000.0];
const DESIGN_MAX_DEGREE: u32 = 8;

#[derive(Serialize)]
struct SpectrumRow {
    alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    ground_state: Option<SpectralResult>,
    no_bound_state: bool,
}

pub fn spectrum(a: &Common, spec: &mut RunSpec) -> Result<Output> {
    let (config, source) = resolve_config(a, None, "spectrum")?;
    spec.setting = Some(config.setting());
    spec.n = Some(config.len());
    spec.config = Some(source);
    let grid = match (a.alpha, alpha_grid(a)?) {
        (Some(_), Some(_)) => return Err(Error::Argument("give either --alpha or an alpha grid, not both".into())),
        (Some(alpha), None) => {
            spec.alpha = Some(alpha);
            vec![alpha]
        }
        (None, Some(grid)) => {
            spec.alpha_grid = Some(grid.clone());
            grid
        }
        (None, None) => return Err(Error::Argument("spectrum needs --alpha or an alpha grid".into())),
    };
    let single = spec.alpha.is_some();
    let mut rows = Vec::with_capacity(grid.len());
    for &alpha in &grid {
        match ground_state(alpha, &config) {
            Ok(r) => rows.push(SpectrumRow {
                alpha,
                ground_state: Some(r),
                no_bound_state: false,
            }),
            Err(Error::NoBoundState { .. }) if !single => rows.push(SpectrumRow {
                alpha,
                ground_state: None,
                no_bound_state: true,
            }),
            Err(e) => return Err(e),
        }
    }
    let crit = if config.setting().nu() == 3 {
        Some(alpha_crit(&config)?)
    } else {
        None
    };

    let mut csv = String::from("alpha,lambda1,residual,method,multiplicity,evaluations\n");
    for r in &rows {
        match &r.ground_state {
            Some(g) => {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    fmt_f64(r.alpha),
                    fmt_f64(g.lambda1),
                    fmt_f64(g.residual),
                    to_value(&g.method).as_str().unwrap_or_default(),
                    g.multiplicity,
                    g.evaluations
                );
            }
            None => {
                let _ = writeln!(csv, "{},,,none,0,0", fmt_f64(r.alpha));
            }
        }
    }
    let summary = match (single, rows[0].ground_state.as_ref()) {
        (true, Some(g)) => format!(
            "spectrum {} N={} α={}: λ₁ = {:.12e} ({:?}, residual {:.1e})",
            config.setting(),
            config.len(),
            g.alpha,
            g.lambda1,
            g.method,
            g.residual
        ),
        _ => format!(
            "spectrum {} N={}: {} couplings, {} without bound state",
            config.setting(),
            config.len(),
            rows.len(),
            rows.iter().filter(|r| r.no_bound_state).count()
        ),
    };
    let mut result = json!({ "configuration": config, "rows": rows });
    if let Some(c) = crit {
        result["alpha_crit"] = json!(c);
    }
    Ok(Output { result, csv, summary })
}

pub fn optimize(a: &Common, spec: &mut RunSpec) -> Result<Output> {
    let n = require(a.n, "n", "optimize")?;
    spec.n = Some(n);
    spec.objective = Some(a.objective);
    let report = match a.objective {
        ObjectiveArg::Lambda1 => {
            let setting = require(a.setting, "setting", "optimize")?;
            let alpha = require(a.alpha, "alpha", "optimize")?;
            let mut search = Search::default_for(setting, a.seed);
            if let Some(s) = a.starts {
                search.starts = s;
            }
            spec.setting = Some(setting);
            spec.alpha = Some(alpha);
            spec.starts = Some(search.starts);
            maximize_lambda1(setting, alpha, n, &search)?
        }
        ObjectiveArg::SurfaceEnergy => {
            if let Some(s) = a.setting.filter(|&s| s != Setting::Sphere) {
                return Err(Error::Argument(format!(
                    "the surface energy is a sphere objective, got {s}"
                )));
            }
            if a.alpha.is_some() {
                return Err(Error::Argument("the surface energy takes --kappa, not --alpha".into()));
            }
            let kappa = require(a.kappa, "kappa", "optimize --objective surface-energy")?;
            let mut search = Search::default_for(Setting::Sphere, a.seed);
            if let Some(s) = a.starts {
                search.starts = s;
            }
            spec.setting = Some(Setting::Sphere);
            spec.kappa = Some(kappa);
            spec.starts = Some(search.starts);
            minimize_surface_energy(kappa, n, &search)?
        }
    };
    let summary = format!(
        "optimize {:?} {} N={}: best {:.12e}, {}/{} converged starts congruent to canonical, matched canonical: {}",
        report.objective,
        report.setting,
        report.n,
        report.best_value,
        report.congruent_starts,
        report.converged_starts,
        report.matched_canonical
    );
    Ok(Output {
        csv: report.to_csv(),
        result: to_value(&report),
        summary,
    })
}

pub fn verify(a: &Common, spec: &mut RunSpec) -> Result<Output> {
    let setting = require(a.setting, "setting", "verify")?;
    let alpha = require(a.alpha, "alpha", "verify")?;
    let n = require(a.n, "n", "verify")?;
    let trials = a.trials.unwrap_or(VERIFY_TRIALS);
    spec.setting = Some(setting);
    spec.alpha = Some(alpha);
    spec.n = Some(n);
    spec.trials = Some(trials);
    let report = verify_theorem(setting, alpha, n, trials, a.seed)?;
    let summary = format!(
        "verify {setting} α={alpha} N={n}: {trials} trials, violations: {}, min gap {}",
        report.violations,
        report.min_gap.map_or("n/a".into(), |g| format!("{g:.3e}"))
    );
    Ok(Output {
        csv: report.to_csv(),
        result: to_value(&report),
        summary,
    })
}

pub fn conjecture_scan_cmd(a: &Common, spec: &mut RunSpec) -> Result<Output> {
    if let Some(s) = a.setting.filter(|&s| s != Setting::Loop) {
        return Err(Error::Argument(format!("the repulsive scan runs on the loop, got {s}")));
    }
    if a.alpha.is_some() {
        return Err(Error::Argument(
            "conjecture-scan takes an alpha grid, not --alpha".into(),
        ));
    }
    let n = require(a.n, "n", "conjecture-scan")?;
    let grid = alpha_grid(a)?.unwrap_or_else(|| SCAN_ALPHAS.to_vec());
    let trials = a.trials.unwrap_or(SCAN_TRIALS);
    spec.setting = Some(Setting::Loop);
    spec.n = Some(n);
    spec.alpha_grid = Some(grid.clone());
    spec.trials = Some(trials);
    let report = conjecture_scan(n, &grid, trials, a.seed)?;
    let summary = format!(
        "conjecture-scan N={n}: {} couplings × {trials} trials, violations: {}",
        grid.len(),
        report.total_violations()
    );
    Ok(Output {
        csv: report.to_csv(),
        result: to_value(&report),
        summary,
    })
}

pub fn design_check(a: &Common, spec: &mut RunSpec) -> Result<Output> {
    if let Some(s) = a.setting.filter(|&s| s != Setting::Sphere) {
        return Err(Error::Argument(format!("design strength is a sphere notion, got {s}")));
    }
    let (config, sharp) = match &a.config {
        None => {
            let n = require(a.n, "n", "design-check")?;
            spec.config = to_value(&SharpName::for_n(n)?).as_str().map(str::to_string);
            let (c, s) = sharp_sphere(n)?;
            (c, Some(s))
        }
        Some(_) => {
            let (c, source) = resolve_config(a, Some(Setting::Sphere), "design-check")?;
            spec.config = Some(source);
            let sharp = SharpName::from_name(spec.config.as_deref().unwrap_or_default())
                .map(|name| sharp_sphere(name.n()).map(|(_, s)| s))
                .transpose()?;
            (c, sharp)
        }
    };
    spec.setting = Some(Setting::Sphere);
    spec.n = Some(config.len());
    let strength = spherical_design_strength(&config, DESIGN_MAX_DEGREE)?;
    let consistent = sharp.as_ref().map(|s| strength as usize >= s.design_strength);
    let summary = match &sharp {
        Some(s) => format!(
            "design-check N={}: design_strength {strength} (sharp: {} inner products, needs ≥ {})",
            config.len(),
            s.m,
            s.design_strength
        ),
        None => format!("design-check N={}: design_strength {strength}", config.len()),
    };
    let mut csv = String::from("N,design_strength,max_degree,inner_products,required_strength\n");
    let _ = writeln!(
        csv,
        "{},{strength},{DESIGN_MAX_DEGREE},{},{}",
        config.len(),
        sharp.as_ref().map_or(String::new(), |s| s.m.to_string()),
        sharp.as_ref().map_or(String::new(), |s| s.design_strength.to_string())
    );
    Ok(Output {
        result: json!({
            "configuration": config,
            "design_strength": strength,
            "max_degree": DESIGN_MAX_DEGREE,
            "sharp": sharp,
            "consistent": consistent,
        }),
        csv,
        summary,
    })
}

pub fn asymptotics(a: &Common, spec: &mut RunSpec) -> Result<Output> {
    if let Some(s) = a.setting.filter(|&s| s != Setting::Loop) {
        return Err(Error::Argument(format!(
            "the coupling expansions are for the loop, got {s}"
        )));
    }
    if a.alpha.is_some() {
        return Err(Error::Argument("asymptotics takes an alpha grid, not --alpha".into()));
    }
    let (config, source) = resolve_config(a, Some(Setting::Loop), "asymptotics")?;
    spec.setting = Some(Setting::Loop);
    spec.n = Some(config.len());
    spec.config = Some(source);
    let (weak, strong) = match alpha_grid(a)? {
        Some(grid) => {
            if let Some(x) = grid
                .iter()
                .find(|&&x| !(x > 0.0 && x <= WEAK_ALPHA_MAX || x >= STRONG_ALPHA_MIN))
            {
                return Err(Error::Argument(format!(
                    "asymptotic couplings must lie in (0, {WEAK_ALPHA_MAX}] or [{STRONG_ALPHA_MIN}, ∞), got {x}"
                )));
            }
            spec.alpha_grid = Some(grid.clone());
            grid.iter().partition::<Vec<f64>, _>(|&&x| x <= WEAK_ALPHA_MAX)
        }
        None => {
            let weak: Vec<f64> = (1..=WEAK_GRID_STEPS).map(|i| 0.01 * i as f64).collect();
            let grid: Vec<f64> = weak.iter().chain(&STRONG_GRID).copied().collect();
            spec.alpha_grid = Some(grid);
            (weak, STRONG_GRID.to_vec())
        }
    };
    let weak = if weak.is_empty() {
        None
    } else {
        Some(weak_expansion_check(&config, &weak)?)
    };
    let strong = if strong.is_empty() {
        None
    } else {
        Some(strong_limit_check(&config, &strong)?)
    };

    let mut csv = String::from("regime,alpha,lambda1,model_value,residual\n");
    let mut push = |regime: &str, rows: &[ExpansionRow]| {
        for r in rows {
            let _ = writeln!(
                csv,
                "{regime},{},{},{},{}",
                fmt_f64(r.alpha),
                fmt_f64(r.lambda1),
                fmt_f64(r.model_value),
                fmt_f64(r.residual)
            );
        }
    };
    let mut parts = Vec::new();
    if let Some(w) = &weak {
        push("weak", &w.rows);
        parts.push(format!(
            "c₁ {:.6} (recovered {:.6}), c₂ {:.6}, remainder exponent {:.2}",
            w.expansion.c1, w.c1_recovered, w.expansion.c2_closed, w.exponent
        ));
    }
    if let Some(s) = &strong {
        push("strong", &s.rows);
        parts.push(format!(
            "λ_D {:.6}, increasing {}, below λ_D {}, c ≈ {:.6}",
            s.dirichlet, s.increasing, s.below_dirichlet, s.c_estimate
        ));
    }
    Ok(Output {
        result: json!({ "configuration": config, "weak": weak, "strong": strong }),
        csv,
        summary: format!("asymptotics loop N={}: {}", config.len(), parts.join("; ")),
    })
}
