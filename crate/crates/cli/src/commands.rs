//! Subcommands and their execution.

use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::Subcommand;
use gcalc::faceoperad::{check_d_squared, leibniz_quotient_check};
use gcalc::graphs::{enumerate_classes, enumerate_graphs, wheel, DecoratedGraph, Direction};
use gcalc::integrator::{
    analytic_weight_appendix4, appendix4_graphs, mc_weight_cn, mc_weight_cn0, parse_circle_form,
    stokes_identity_residual, wheel_weight_closed_form, zeta_box_integral, WeightEstimate,
    WheelVariant,
};
use gcalc::numbers::zeta;
use gcalc::polyfields::random::{random_with_psi, RandomShape};
use gcalc::polyfields::{phi, schouten, Grading, HSeries, PolyField};
use gcalc::propagators::{MapMode, Propagator};
use gcalc::theory::{
    build_morphism, build_mu, duflo_exponent_coefficient, duflo_transform, duflo_wheel_route,
    linear_stokes_solutions, omega0_table, so3_bivector, so3_casimir, tetrahedron_terms, transform_mc,
    wheel_contraction, DufloVariant, WeightKind, WeightTable,
};
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use num_traits::{ToPrimitive, Zero};
use serde::Deserialize;
use serde_json::Value;

use crate::config::Settings;
use crate::report::{put_estimate, Report, Row};

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate a graph family with n vertices and the given number of edges.
    Graphs {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        edges: usize,
        /// labeled, classes or undirected.
        #[arg(long, default_value = "classes")]
        family: String,
        /// Leave out classes equal to their own negative.
        #[arg(long)]
        skip_odd: bool,
    },
    /// Check that the face-complex differential squares to zero.
    OperadDdcheck {
        #[arg(long, default_value_t = 5)]
        max_arity: usize,
    },
    /// Weight of one graph.
    Weight {
        #[arg(long)]
        graph: String,
        /// Propagator (cn0) or boundary form such as kontsevich-outer (cn).
        #[arg(long, default_value = "kontsevich")]
        propagator: String,
        /// cn: plane configurations; cn0: upper half plane.
        #[arg(long, default_value = "cn0")]
        space: String,
        #[arg(long, default_value = "renormalized")]
        map: String,
        /// Use the closed form (four-vertex plane graphs only).
        #[arg(long)]
        analytic: bool,
    },
    /// Weights of every class of a family.
    WeightTable {
        #[arg(long)]
        n: usize,
        /// Defaults to 2n-3 on cn and 2n-2 on cn0.
        #[arg(long)]
        edges: Option<usize>,
        #[arg(long, default_value = "kontsevich")]
        propagator: String,
        #[arg(long, default_value = "cn0")]
        space: String,
        #[arg(long, default_value = "renormalized")]
        map: String,
    },
    /// Schouten bracket of two fields.
    Schouten {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// The operator of a graph applied to fields (one --arg per vertex).
    Phi {
        #[arg(long)]
        graph: String,
        #[arg(long = "arg", required = true)]
        args: Vec<String>,
    },
    /// Homotopy Lie operation mu_n on the given fields.
    Mu {
        #[arg(long = "arg", required = true)]
        args: Vec<String>,
        /// omega0 or a JSON table file.
        #[arg(long, default_value = "omega0")]
        table: String,
        /// in or out weights.
        #[arg(long, default_value = "out")]
        kind: String,
    },
    /// Morphism component F_n on the given fields.
    Morphism {
        #[arg(long = "arg", required = true)]
        args: Vec<String>,
        /// stokes or a JSON table file.
        #[arg(long, default_value = "stokes")]
        table: String,
        /// Value of weights left free by the Stokes identities.
        #[arg(long, default_value = "0")]
        free_value: String,
    },
    /// Action on a Maurer-Cartan element, truncated in hbar.
    Transform {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[arg(long, default_value = "stokes")]
        table: String,
        #[arg(long, default_value = "0")]
        free_value: String,
    },
    /// Duflo transform of an invariant polynomial by the trace series and by wheels.
    Duflo {
        /// Linear bivector (default: so(3)).
        #[arg(long)]
        gamma2: Option<String>,
        /// Invariant polynomial (default: x1^2 + x2^2 + x3^2).
        #[arg(long)]
        gamma0: Option<String>,
        #[arg(long, default_value = "bernoulli")]
        variant: String,
        #[arg(long, default_value_t = 4)]
        order: usize,
    },
    /// Tetrahedral flow of a bivector.
    Flow {
        #[arg(long)]
        alpha: String,
        /// Only the first (fully cyclic) term.
        #[arg(long)]
        first_only: bool,
    },
    /// Box integral of 1 / (1 - x_1 ... x_n), equal to zeta(n).
    Zeta {
        #[arg(long)]
        n: usize,
    },
    /// Stokes identities of the dArg theory.
    VerifyStokes {
        #[arg(long, default_value_t = 4)]
        max_n: usize,
    },
    /// Closed-form and Monte Carlo weights of the six four-vertex test graphs.
    VerifyAppendix4,
    /// Wheel weights by both closed forms, and wheel operators against their contraction.
    VerifyWheels,
}

fn field(g: &Grading, s: &str) -> Result<PolyField> {
    PolyField::parse(g, s).with_context(|| format!("parsing field `{}`", s))
}

fn graph(s: &str) -> Result<DecoratedGraph> {
    s.parse::<DecoratedGraph>().with_context(|| format!("parsing graph `{}`", s))
}

fn rational(s: &str) -> Result<BigRational> {
    s.trim().parse::<BigRational>().map_err(|_| anyhow::anyhow!("bad rational `{}`", s))
}

#[derive(Debug, Deserialize)]
struct TableFile {
    #[serde(default)]
    fallback: Option<String>,
    entries: Vec<TableFileEntry>,
}

#[derive(Debug, Deserialize)]
struct TableFileEntry {
    kind: String,
    graph: String,
    value: String,
    #[serde(default)]
    provenance: Option<String>,
}

/// Table file: `{"fallback": "0", "entries": [{"kind": "morphism", "graph": "...", "value": "1/3"}]}`.
fn load_table(path: &Path) -> Result<WeightTable<BigRational>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: TableFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let mut t = WeightTable::new();
    for e in &file.entries {
        let kind: WeightKind = e.kind.parse()?;
        t.insert(kind, &graph(&e.graph)?, rational(&e.value)?, e.provenance.as_deref().unwrap_or("file"))?;
    }
    Ok(match file.fallback {
        Some(f) => t.with_fallback(rational(&f)?),
        None => t,
    })
}

fn morphism_table(spec: &str, max_n: usize, free_value: &str) -> Result<WeightTable<BigRational>> {
    if spec == "stokes" {
        let v = rational(free_value)?;
        Ok(linear_stokes_solutions(max_n, |_, _| v.clone())?)
    } else {
        load_table(Path::new(spec))
    }
}

fn series_json(s: &HSeries) -> Value {
    Value::Array(s.coeffs().iter().map(|c| Value::String(c.to_string())).collect())
}

fn estimate_weight(g: &DecoratedGraph, propagator: &str, space: &str, map: &str, st: &Settings) -> Result<WeightEstimate> {
    match space {
        "cn" => Ok(mc_weight_cn(g, &parse_circle_form(propagator)?, &st.mc())?),
        "cn0" => {
            let p: Propagator = propagator.parse()?;
            let m: MapMode = map.parse()?;
            Ok(mc_weight_cn0(g, &p, m, &st.mc())?)
        }
        other => bail!("unknown space `{}` (cn or cn0)", other),
    }
}

pub fn execute(cmd: &Command, st: &Settings) -> Result<Report> {
    let g = &st.grading;
    match cmd {
        Command::Graphs { n, edges, family, skip_odd } => {
            let list = match family.as_str() {
                "labeled" => enumerate_graphs(*n, *edges, Direction::Directed),
                "classes" => enumerate_classes(*n, *edges, Direction::Directed),
                "undirected" => enumerate_classes(*n, *edges, Direction::Undirected),
                other => bail!("unknown family `{}` (labeled, classes, undirected)", other),
            };
            let mut r = Report::new("graphs");
            r.set("n", *n);
            r.set("edges", *edges);
            r.set("family", family.as_str());
            let mut count = 0usize;
            for c in list {
                let odd = c.is_odd();
                if odd && *skip_odd {
                    continue;
                }
                count += 1;
                let mut row = Row::new();
                row.insert("graph".into(), c.representative.to_string().into());
                row.insert("odd".into(), odd.into());
                row.insert("automorphisms".into(), c.representative.automorphism_count(family != "labeled").into());
                r.push(row);
            }
            r.set("count", count);
            Ok(r)
        }
        Command::OperadDdcheck { max_arity } => {
            let rep = check_d_squared(*max_arity)?;
            let q = leibniz_quotient_check();
            let mut r = Report::new("operad-ddcheck");
            r.set("max_arity", *max_arity);
            r.set("generators_checked", rep.checked.len());
            r.set("d_squared_zero", rep.passed());
            if let Some((gen, term)) = &rep.failure {
                r.set("failing_generator", gen.as_str());
                r.set("failing_term", term.as_str());
            }
            r.set("leibniz_quotient", q.passed());
            r.verdict(rep.passed() && q.passed());
            Ok(r)
        }
        Command::Weight { graph: gs, propagator, space, map, analytic } => {
            let gr = graph(gs)?;
            let mut r = Report::new("weight");
            r.set("graph", gr.to_string());
            if *analytic {
                let v = analytic_weight_appendix4(&gr)?;
                r.set("exact", v.to_string());
                r.estimate(&WeightEstimate::analytic_real(v.to_f64().unwrap_or(f64::NAN)));
            } else {
                r.set("propagator", propagator.as_str());
                r.set("space", space.as_str());
                if space == "cn0" {
                    r.set("map", map.as_str());
                }
                r.set("transform", format!("{:?}", st.transform).to_lowercase());
                r.estimate(&estimate_weight(&gr, propagator, space, map, st)?);
            }
            Ok(r)
        }
        Command::WeightTable { n, edges, propagator, space, map } => {
            let l = match (edges, space.as_str()) {
                (Some(l), _) => *l,
                (None, "cn") => 2 * n - 3,
                (None, _) => 2 * n - 2,
            };
            let mut r = Report::new("weight-table");
            r.set("n", *n);
            r.set("edges", l);
            r.set("propagator", propagator.as_str());
            r.set("space", space.as_str());
            for c in enumerate_classes(*n, l, Direction::Directed) {
                if c.is_odd() {
                    continue;
                }
                let mut row = Row::new();
                row.insert("graph".into(), c.representative.to_string().into());
                put_estimate(&mut row, &estimate_weight(&c.representative, propagator, space, map, st)?);
                r.push(row);
            }
            Ok(r)
        }
        Command::Schouten { a, b } => {
            let (fa, fb) = (field(g, a)?, field(g, b)?);
            let mut r = Report::new("schouten");
            r.set("result", schouten(&fa, &fb).to_string());
            Ok(r)
        }
        Command::Phi { graph: gs, args } => {
            let gr = graph(gs)?;
            let fs = args.iter().map(|a| field(g, a)).collect::<Result<Vec<_>>>()?;
            let mut r = Report::new("phi");
            r.set("graph", gr.to_string());
            r.set("result", phi(&gr, &fs)?.to_string());
            Ok(r)
        }
        Command::Mu { args, table, kind } => {
            let fs = args.iter().map(|a| field(g, a)).collect::<Result<Vec<_>>>()?;
            let t = if table == "omega0" { omega0_table() } else { load_table(Path::new(table))? };
            let mu = build_mu(&t, kind.parse()?, fs.len().max(2))?;
            let mut r = Report::new("mu");
            r.set("arity", fs.len());
            r.set("result", mu.apply(&fs)?.to_string());
            Ok(r)
        }
        Command::Morphism { args, table, free_value } => {
            let fs = args.iter().map(|a| field(g, a)).collect::<Result<Vec<_>>>()?;
            let t = morphism_table(table, fs.len().max(2), free_value)?;
            let m = build_morphism(&t, fs.len().max(2))?;
            let mut r = Report::new("morphism");
            r.set("arity", fs.len());
            r.set("result", m.apply(&fs)?.to_string());
            Ok(r)
        }
        Command::Transform { alpha, order, table, free_value } => {
            let a = field(g, alpha)?;
            let t = morphism_table(table, order + 1, free_value)?;
            let f = transform_mc(&t, &HSeries::constant(a, *order), *order)?;
            let bracket = gcalc::polyfields::schouten_series(&f, &f);
            let mut r = Report::new("transform");
            r.set("order", *order);
            r.set("coefficients", series_json(&f));
            r.set("bracket_vanishes", bracket.is_zero());
            Ok(r)
        }
        Command::Duflo { gamma2, gamma0, variant, order } => {
            let g3 = Grading::even(3);
            let g2 = match gamma2 {
                Some(s) => field(&g3, s)?,
                None => so3_bivector(),
            };
            let g0 = match gamma0 {
                Some(s) => field(&g3, s)?,
                None => so3_casimir(1),
            };
            let v: DufloVariant = variant.parse()?;
            let trace = duflo_transform(&g2, &g0, v, *order)?;
            let wheels = duflo_wheel_route(&g2, &g0, v, *order)?;
            let mut r = Report::new("duflo");
            r.set("variant", variant.as_str());
            r.set("order", *order);
            r.set("exponent_c2", duflo_exponent_coefficient(2, v).map(|c| c.to_string()).unwrap_or_default());
            r.set("trace_route", series_json(&trace));
            r.set("wheel_route", series_json(&wheels));
            r.verdict(trace == wheels);
            Ok(r)
        }
        Command::Flow { alpha, first_only } => {
            let a = field(g, alpha)?;
            let (t1, t2) = tetrahedron_terms(&a)?;
            let flow = if *first_only { t1.clone() } else { &t1 + &t2 };
            let mut r = Report::new("flow");
            r.set("first_term", t1.to_string());
            r.set("second_term", t2.to_string());
            r.set("flow", flow.to_string());
            r.set("bracket_with_alpha_vanishes", schouten(&a, &flow).is_zero());
            Ok(r)
        }
        Command::Zeta { n } => {
            let e = zeta_box_integral(*n, &st.mc())?;
            let oracle = zeta(*n as u32)?;
            let mut r = Report::new("zeta");
            r.set("n", *n);
            r.estimate(&e);
            r.set("series_oracle", oracle);
            r.set("within_tolerance", (e.value.re - oracle).abs() <= st.tolerance * e.std_error_re + 1e-12);
            Ok(r)
        }
        Command::VerifyStokes { max_n } => {
            let t = omega0_table();
            let mut r = Report::new("verify-stokes");
            let mut ok = true;
            for n in 3..=*max_n {
                for c in enumerate_classes(n, 2 * n - 4, Direction::Directed) {
                    if c.is_odd() {
                        continue;
                    }
                    let res = stokes_identity_residual(&c.representative, &t)?;
                    ok &= res.is_zero();
                    let mut row = Row::new();
                    row.insert("graph".into(), c.representative.to_string().into());
                    row.insert("residual".into(), res.to_string().into());
                    r.push(row);
                }
            }
            r.set("max_n", *max_n);
            r.set("graphs_checked", r.row_count());
            r.verdict(ok);
            Ok(r)
        }
        Command::VerifyAppendix4 => {
            let form = parse_circle_form("kontsevich-outer")?;
            let mut r = Report::new("verify-appendix4");
            let mut ok = true;
            for (gr, expected) in appendix4_graphs() {
                let exact = analytic_weight_appendix4(&gr)?;
                let e = mc_weight_cn(&gr, &form, &st.mc())?;
                let target = expected.to_f64().unwrap_or(f64::NAN);
                let slack = if expected.is_zero() {
                    st.tolerance * e.std_error
                } else {
                    (0.02 * target.abs()).max(st.tolerance * e.std_error)
                };
                let pass = exact == expected && (e.value - target).norm() <= slack + 1e-12;
                ok &= pass;
                let mut row = Row::new();
                row.insert("graph".into(), gr.to_string().into());
                row.insert("exact".into(), exact.to_string().into());
                put_estimate(&mut row, &e);
                row.insert("pass".into(), pass.into());
                r.push(row);
            }
            r.verdict(ok);
            Ok(r)
        }
        Command::VerifyWheels => {
            let mut r = Report::new("verify-wheels");
            let mut ok = true;
            for n in [2usize, 4, 6] {
                let z = wheel_weight_closed_form(n, WheelVariant::HalfK)?.to_complex();
                let b = wheel_weight_closed_form(n, WheelVariant::BernoulliEven)?;
                let diff = (z - b.to_complex()).norm();
                let pass = diff < 1e-12;
                ok &= pass;
                let mut row = Row::new();
                row.insert("check".into(), format!("closed forms n={}", n).into());
                row.insert("value".into(), b.to_string().into());
                row.insert("difference".into(), diff.into());
                row.insert("pass".into(), pass.into());
                r.push(row);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(st.seed);
            let shape = RandomShape { max_terms: 3, max_x_power: 2, max_coeff: 3 };
            for n in 2..=3 {
                let gam = random_with_psi(g, 2, &mut rng, &shape);
                let pass = phi(&wheel(n)?, &vec![gam.clone(); n + 1])? == wheel_contraction(&gam, n)?;
                ok &= pass;
                let mut row = Row::new();
                row.insert("check".into(), format!("operator n={}", n).into());
                row.insert("value".into(), gam.to_string().into());
                row.insert("difference".into(), Value::Null);
                row.insert("pass".into(), pass.into());
                r.push(row);
            }
            r.verdict(ok);
            Ok(r)
        }
    }
}
