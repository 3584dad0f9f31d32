use crate::args::{elements_file, group as parse_group, lattice as parse_lattice, rational, ActionArgs};
use crate::cert::Certificate;
use crate::covers::load_cover;
use crate::{CliError, Ctx};
use boxdim_core::chains::DEFAULT_INDEX_CAP;
use boxdim_core::decay::{cover_to_decay, sup_shift};
use boxdim_core::dynamics::{
    build_amdim_witness_folner, build_amdim_witness_product, build_towers, build_towers_lattice,
    interval_growth_certificate, marker_search, nilpotent_growth, verify_towers, verify_witness,
    witness_to_simplicial_map, FiniteAction, GrowthCertificate,
};
use boxdim_core::group::{word_ball, Element, GroupSpec, DEFAULT_CAP};
use boxdim_core::json::frac_value;
use boxdim_core::report::Check;
use boxdim_core::{Decay, Rational, Towers, Witness};
use clap::{Args, Subcommand};
use serde_json::json;

#[derive(Subcommand, Debug)]
pub enum RokhlinCmd {
    /// Exact towers f_ḡ = indicator of the fibre over ḡ ∈ G/G_n.
    Odometer {
        #[command(flatten)]
        action: ActionArgs,
        /// Stage n of the same chain giving the tower base G/G_n.
        #[arg(long)]
        subgroup_stage: Option<usize>,
        /// G_n by lattice divisors instead.
        #[arg(long)]
        subgroup_lattice: Option<String>,
        /// Replace one tower value: `l,coset,point,p/q`.
        #[arg(long)]
        perturb: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum AmdimCmd {
    /// Towers times a decay family with the same period.
    Product {
        #[command(flatten)]
        action: ActionArgs,
        /// Decay family file, or a cover file / `demo` to derive one from.
        #[arg(long, default_value = "demo")]
        decay: String,
        /// Window for deriving the family from a cover.
        #[arg(long, default_value_t = 40)]
        window_radius: u32,
    },
    /// Følner-averaged witness on a free ℤ-action.
    Folner {
        #[command(flatten)]
        action: ActionArgs,
        /// J = [0, j).
        #[arg(long, default_value_t = 8)]
        j: i64,
    },
}

#[derive(Args, Debug)]
pub struct GrowthArgs {
    #[arg(long, default_value = "z")]
    group: String,
    /// M = B_R(1) instead of the generators.
    #[arg(long)]
    ball: Option<u32>,
    /// M from a file of elements.
    #[arg(long)]
    elements: Option<String>,
    /// The direct interval certificate for M = [0, W) in ℤ.
    #[arg(long)]
    interval: Option<i64>,
}

#[derive(Args, Debug)]
pub struct MarkerArgs {
    #[command(flatten)]
    action: ActionArgs,
    /// F = [0, K) in ℤ.
    #[arg(long)]
    interval: Option<i64>,
    /// F from a file of elements.
    #[arg(long)]
    f: Option<String>,
    /// Translators g_0 = 1, g_1, … from a file.
    #[arg(long)]
    translators: Option<String>,
}

fn action_inputs(ctx: &Ctx, args: &ActionArgs, a: &FiniteAction, params: serde_json::Value) -> serde_json::Value {
    let mut prov = args.provenance();
    prov["group"] = a.group.to_json();
    prov["generators"] = json!(a.group.generators());
    prov["points"] = json!(a.size());
    prov["parameters"] = params;
    ctx.inputs(prov)
}

pub fn rokhlin(cmd: RokhlinCmd, ctx: &Ctx) -> Result<Certificate, CliError> {
    let RokhlinCmd::Odometer { action, subgroup_stage, subgroup_lattice, perturb } = cmd;
    let a = action.build(ctx.cap_or(DEFAULT_INDEX_CAP))?;
    let mut ts: Towers = match (subgroup_stage, &subgroup_lattice) {
        (Some(n), None) => build_towers(&a, n)?,
        (None, Some(l)) => build_towers_lattice(&a, &parse_lattice(&a.group, l, "--subgroup-lattice")?)?,
        _ => return Err(CliError::Usage("give --subgroup-stage or --subgroup-lattice".into())),
    };
    if let Some(p) = &perturb {
        let parts: Vec<&str> = p.split(',').collect();
        let bad = || CliError::Usage(format!("--perturb: {p:?}: expected l,coset,point,p/q"));
        if parts.len() != 4 {
            return Err(bad());
        }
        let idx = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
        let (l, g, x) = (idx(parts[0])?, idx(parts[1])?, idx(parts[2])?);
        if l >= ts.functions.len() || g >= ts.functions[l].len() || x >= a.size() {
            return Err(CliError::Usage(format!("--perturb: {p:?}: index out of range")));
        }
        ts = ts.perturbed(l, g, x, rational(parts[3], "--perturb")?);
    }
    let rep = verify_towers(&ts, &[], a.group.generators())?;
    let params = json!({"subgroup_stage": subgroup_stage, "subgroup_lattice": subgroup_lattice, "perturb": perturb});
    let inputs = action_inputs(ctx, &action, &a, params);
    let result = json!({
        "measured_eps": rep.eps,
        "r": ts.r(),
        "towers": ts.quotient.index(),
        "subgroup": ts.quotient.lattice(),
        "system": ts.to_json(),
    });
    Ok(Certificate::new("tower.exact", inputs, rep.checks, result))
}

fn load_family(spec: &str, window_radius: u32, cap: usize) -> Result<Decay, CliError> {
    if spec != "demo" {
        let v = crate::args::read_json(spec)?;
        if v.get("functions").is_some() {
            return Decay::from_json(&v).map_err(|e| crate::args::in_file(spec, e));
        }
    }
    let c = load_cover(spec)?;
    let w = word_ball(&c.group, &c.group.identity(), window_radius, cap)?;
    let f: Decay = cover_to_decay(&c, &w, cap)?;
    let (shift, _) = sup_shift(&f, &w, c.group.generators())?;
    Ok(f.with_tolerance(shift))
}

fn witness_certificate(inputs: serde_json::Value, w: &Witness, extra: Vec<Check>) -> Result<Certificate, CliError> {
    let rep = verify_witness(w)?;
    let simp = witness_to_simplicial_map(w)?;
    let mut checks = simp.checks.clone();
    checks.extend(extra);
    let result = json!({
        "am_d": rep.am_d,
        "claimed_eps": frac_value(&w.eps),
        "measured_eps": frac_value(&rep.measured_eps),
        "sum_eps": frac_value(&rep.sum_eps),
        "simplicial": {"vertices": simp.vertices, "measured": frac_value(&simp.measured), "bound": frac_value(&simp.bound)},
        "bookkeeping": w.bookkeeping,
        "witness": w.to_json(),
    });
    Ok(Certificate::new("amdim.witness", inputs, checks, result))
}

pub fn amdim(cmd: AmdimCmd, ctx: &Ctx) -> Result<Certificate, CliError> {
    match cmd {
        AmdimCmd::Product { action, decay, window_radius } => {
            let a = action.build(ctx.cap_or(DEFAULT_INDEX_CAP))?;
            let fam = load_family(&decay, window_radius, ctx.cap_or(DEFAULT_CAP))?;
            let ts: Towers = build_towers_lattice(&a, &fam.period.lattice)?;
            let w = build_amdim_witness_product(&ts, &fam)?;
            let (s, r) = (fam.s(), ts.r());
            let count = Check::new("family-count", w.am_d() + 1 <= (s + 1) * (r + 1))
                .measured(json!({"families": w.am_d() + 1, "bound": (s + 1) * (r + 1)}));
            let params = json!({"decay": decay, "window_radius": window_radius, "s": s, "r": r,
                                "decay_shift": frac_value(&fam.tolerance_eps)});
            let inputs = action_inputs(ctx, &action, &a, params);
            witness_certificate(inputs, &w, vec![count])
        }
        AmdimCmd::Folner { action, j } => {
            let a = action.build(ctx.cap_or(DEFAULT_INDEX_CAP))?;
            if !a.group.is_free_abelian() || a.group.dim() != 1 {
                return Err(CliError::Usage("amdim folner: the action must be of ℤ".into()));
            }
            if j < 1 {
                return Err(CliError::Usage("--j: must be positive".into()));
            }
            let growth = interval_growth_certificate(&a.group, j)?;
            let rho = growth.f_set.len().saturating_sub(1) as u32;
            let free = a.freeness_audit(rho, ctx.cap_or(DEFAULT_CAP))?;
            let markers = marker_search(&a, &growth.f_set, &[], ctx.seed)?;
            let jset: Vec<Element> = (0..j).map(|i| Element::from_i64s(&[i])).collect();
            let mut extra = vec![free, growth.check.clone()];
            extra.extend(markers.checks.clone());
            let params = json!({"J": [0, j], "F_size": growth.f_set.len(), "seed": ctx.seed, "markers": markers.z});
            let inputs = action_inputs(ctx, &action, &a, params);
            if !markers.pass() || !extra.iter().all(|c| c.pass) {
                return Ok(Certificate::new("amdim.witness", inputs, extra, json!({"markers": markers.z, "residue": markers.residue})));
            }
            let w: Witness = build_amdim_witness_folner(&a, &growth, &markers, &jset)?;
            witness_certificate(inputs, &w, extra)
        }
    }
}

fn growth_result(c: &GrowthCertificate, expected: Option<usize>) -> (Vec<Check>, serde_json::Value) {
    let mut checks = vec![c.check.clone()];
    if let Some(e) = expected {
        let mut k = Check::new("translator-count", c.translators.len() == e)
            .measured(json!({"translators": c.translators.len(), "expected": e}));
        if c.translators.len() != e {
            k = k.witness(json!({"translators": c.translators}));
        }
        checks.push(k);
    }
    (checks, c.to_json())
}

pub fn growth(args: GrowthArgs, ctx: &Ctx) -> Result<Certificate, CliError> {
    let g: GroupSpec = parse_group(&args.group)?;
    let (cert, expected, m_desc) = if let Some(w) = args.interval {
        (interval_growth_certificate(&g, w)?, None, json!({"interval": w}))
    } else {
        let m: Vec<Element> = match (&args.ball, &args.elements) {
            (Some(r), None) => word_ball(&g, &g.identity(), *r, ctx.cap_or(DEFAULT_CAP))?.points().cloned().collect(),
            (None, Some(p)) => elements_file(&g, p)?,
            (None, None) => g.generators().to_vec(),
            _ => return Err(CliError::Usage("give at most one of --ball and --elements".into())),
        };
        let c = nilpotent_growth(&g, &m)?;
        let e = 3usize.checked_pow(c.hirsch as u32);
        (c, e, json!({"ball": args.ball, "elements": args.elements}))
    };
    let (checks, result) = growth_result(&cert, expected);
    let inputs = ctx.inputs(json!({"group": g.to_json(), "generators": g.generators(), "parameters": m_desc}));
    Ok(Certificate::new("growth.certificate", inputs, checks, result))
}

pub fn marker(args: MarkerArgs, ctx: &Ctx) -> Result<Certificate, CliError> {
    let a = args.action.build(ctx.cap_or(DEFAULT_INDEX_CAP))?;
    let f: Vec<Element> = match (args.interval, &args.f) {
        (Some(k), None) if a.group.dim() == 1 && a.group.is_free_abelian() && k >= 1 => {
            (0..k).map(|i| Element::from_i64s(&[i])).collect()
        }
        (Some(_), None) => return Err(CliError::Usage("--interval: needs an action of ℤ and K ≥ 1".into())),
        (None, Some(p)) => elements_file(&a.group, p)?,
        _ => return Err(CliError::Usage("give one of --interval and --f".into())),
    };
    let t = match &args.translators {
        Some(p) => elements_file(&a.group, p)?,
        None => vec![],
    };
    let m = marker_search(&a, &f, &t, ctx.seed)?;
    let params = json!({"F": f, "translators": m.translators, "seed": ctx.seed});
    let inputs = action_inputs(ctx, &args.action, &a, params);
    let labels: Vec<serde_json::Value> = m.z.iter().map(|&x| boxdim_core::dynamics::point_label(&a, x)).collect();
    let result = json!({"z": m.z, "z_points": labels, "residue": m.residue,
                        "density": frac_value(&Rational::new(m.z.len().into(), a.size().max(1).into()))});
    Ok(Certificate::new("marker.set", inputs, m.checks, result))
}
