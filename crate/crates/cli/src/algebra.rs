use crate::args::{chain as parse_chain, element, group as parse_group};
use crate::cert::Certificate;
use crate::{CliError, Ctx};
use boxdim_core::chains::{
    box_window, coset_space, dominates, injective_radius_stage, isometry_radius_check, quotient_distance, Domination,
    InjectiveOutcome, IsometryOutcome, DEFAULT_INDEX_CAP, DEFAULT_TABLE_CAP,
};
use boxdim_core::group::{scaling_endomorphism, word_ball, word_distance, DEFAULT_CAP};
use boxdim_core::report::Check;
use clap::{Args, Subcommand};
use num_bigint::BigInt;
use serde_json::json;

#[derive(Subcommand, Debug)]
pub enum GroupCmd {
    /// Generators, coordinates and Hirsch length.
    Info {
        #[arg(long, default_value = "z")]
        group: String,
    },
    /// a·b.
    Multiply {
        #[arg(long, default_value = "z")]
        group: String,
        a: String,
        b: String,
    },
    /// a⁻¹.
    Invert {
        #[arg(long, default_value = "z")]
        group: String,
        a: String,
    },
    /// Word-metric ball B_R(center).
    Ball {
        #[arg(long, default_value = "z")]
        group: String,
        #[arg(long)]
        radius: u32,
        #[arg(long)]
        center: Option<String>,
    },
    /// d(a, b) = |a·b⁻¹|.
    Distance {
        #[arg(long, default_value = "z")]
        group: String,
        a: String,
        b: String,
    },
    /// α_r(a).
    Scale {
        #[arg(long, default_value = "z")]
        group: String,
        #[arg(long)]
        r: BigInt,
        a: String,
    },
}

#[derive(Args, Debug, Clone)]
pub struct ChainSel {
    #[arg(long, default_value = "z")]
    pub group: String,
    /// factorial, scaled, congruence, constant:D,… or a chain file.
    #[arg(long)]
    pub chain: String,
    /// First materialized stage.
    #[arg(long, default_value_t = 0)]
    pub first: usize,
}

#[derive(Subcommand, Debug)]
pub enum ChainCmd {
    /// Enumerate G/G_n.
    Cosets {
        #[command(flatten)]
        sel: ChainSel,
        #[arg(long)]
        stage: usize,
        /// Include the adjacency list and representatives.
        #[arg(long)]
        dump: bool,
    },
    /// Schreier distance between the cosets of x and y, with a brute-force
    /// cross-check.
    Qdist {
        #[command(flatten)]
        sel: ChainSel,
        #[arg(long)]
        stage: usize,
        x: String,
        y: String,
    },
    /// Least stage on which the quotient map is injective on R-balls.
    Injective {
        #[command(flatten)]
        sel: ChainSel,
        #[arg(long)]
        last: usize,
        #[arg(long)]
        radius: u32,
        #[arg(long, default_value_t = 0)]
        conjugator_radius: u32,
    },
    /// The isometry-radius check at a point.
    Isometry {
        #[command(flatten)]
        sel: ChainSel,
        #[arg(long)]
        stage: usize,
        #[arg(long)]
        point: String,
        #[arg(long)]
        radius: u32,
    },
    /// For each stage of one chain, the first stage of another inside it.
    Dominates {
        #[command(flatten)]
        sel: ChainSel,
        /// The second chain.
        #[arg(long)]
        other: String,
        #[arg(long)]
        horizon: usize,
    },
}

#[derive(Args, Debug)]
pub struct BoxdistArgs {
    #[command(flatten)]
    sel: ChainSel,
    /// Last stage of the window.
    #[arg(long)]
    last: usize,
    /// Stage of the first point.
    n: usize,
    x: String,
    /// Stage of the second point.
    m: usize,
    y: String,
}

pub fn group(cmd: GroupCmd, ctx: &Ctx) -> Result<Certificate, CliError> {
    match cmd {
        GroupCmd::Info { group } => {
            let g = parse_group(&group)?;
            let inputs = ctx.inputs(json!({"group": g.to_json(), "generators": g.generators()}));
            Ok(Certificate::new(
                "group.info",
                inputs,
                vec![],
                json!({"dim": g.dim(), "levels": g.levels(), "hirsch_length": g.hirsch_length(), "abelian": g.is_abelian()}),
            ))
        }
        GroupCmd::Multiply { group, a, b } => {
            let g = parse_group(&group)?;
            let (a, b) = (element(&g, &a, "a")?, element(&g, &b, "b")?);
            let p = g.multiply(&a, &b);
            let law = g.invert(&p) == g.multiply(&g.invert(&b), &g.invert(&a));
            let inputs = ctx.inputs(json!({"group": g.to_json(), "generators": g.generators(), "parameters": {"a": a, "b": b}}));
            Ok(Certificate::new("group.multiply", inputs, vec![Check::new("inverse-of-product", law)], json!({"product": p})))
        }
        GroupCmd::Invert { group, a } => {
            let g = parse_group(&group)?;
            let a = element(&g, &a, "a")?;
            let i = g.invert(&a);
            let ok = g.multiply(&a, &i).is_identity() && g.multiply(&i, &a).is_identity();
            let inputs = ctx.inputs(json!({"group": g.to_json(), "generators": g.generators(), "parameters": {"a": a}}));
            Ok(Certificate::new("group.invert", inputs, vec![Check::new("two-sided-inverse", ok)], json!({"inverse": i})))
        }
        GroupCmd::Ball { group, radius, center } => {
            let g = parse_group(&group)?;
            let c = match center {
                Some(s) => element(&g, &s, "--center")?,
                None => g.identity(),
            };
            let b = word_ball(&g, &c, radius, ctx.cap_or(DEFAULT_CAP))?;
            let mut spheres = vec![0usize; radius as usize + 1];
            for (_, d) in &b.elements {
                spheres[*d as usize] += 1;
            }
            let inputs = ctx.inputs(json!({"group": g.to_json(), "generators": g.generators(), "window": {"center": c, "radius": radius}}));
            Ok(Certificate::new("group.ball", inputs, vec![], json!({"size": b.len(), "spheres": spheres})))
        }
        GroupCmd::Distance { group, a, b } => {
            let g = parse_group(&group)?;
            let (a, b) = (element(&g, &a, "a")?, element(&g, &b, "b")?);
            let cap = ctx.cap_or(DEFAULT_CAP);
            let d = word_distance(&g, &a, &b, cap)?;
            let sym = word_distance(&g, &b, &a, cap)? == d;
            let inputs = ctx.inputs(json!({"group": g.to_json(), "generators": g.generators(), "parameters": {"a": a, "b": b}}));
            Ok(Certificate::new("group.distance", inputs, vec![Check::new("symmetry", sym)], json!({"distance": d})))
        }
        GroupCmd::Scale { group, r, a } => {
            let g = parse_group(&group)?;
            let a = element(&g, &a, "a")?;
            let s = scaling_endomorphism(&g, &r, &a)?;
            let inputs = ctx.inputs(json!({"group": g.to_json(), "generators": g.generators(), "parameters": {"r": r.to_string(), "a": a}}));
            Ok(Certificate::new("group.scale", inputs, vec![], json!({"image": s})))
        }
    }
}

pub fn chain(cmd: ChainCmd, ctx: &Ctx) -> Result<Certificate, CliError> {
    let cap = ctx.cap_or(DEFAULT_INDEX_CAP);
    match cmd {
        ChainCmd::Cosets { sel, stage, dump } => {
            let g = parse_group(&sel.group)?;
            let c = parse_chain(&g, &sel.chain, sel.first.min(stage), stage)?;
            let cs = coset_space(&c, stage, cap)?;
            let lattice = c.stage(stage)?;
            let expected = lattice.index();
            let ok = BigInt::from(cs.index()) == expected;
            let check = Check::new("index", ok).measured(json!({"enumerated": cs.index(), "expected": expected.to_string()}));
            let mut result = json!({
                "index": cs.index(),
                "diameter": cs.diameter(),
                "divisors": lattice,
                "normal": c.is_normal(stage)?,
            });
            if dump {
                result["dump"] = cs.dump();
            }
            let inputs = ctx.inputs(json!({"group": g.to_json(), "generators": g.generators(), "chain": c, "stages": [stage]}));
            Ok(Certificate::new("chain.cosets", inputs, vec![check], result))
        }
        ChainCmd::Qdist { sel, stage, x, y } => {
            let g = parse_group(&sel.group)?;
            let c = parse_chain(&g, &sel.chain, sel.first.min(stage), stage)?;
            let (x, y) = (element(&g, &x, "x")?, element(&g, &y, "y")?);
            let cs = coset_space(&c, stage, cap)?;
            let d = quotient_distance(&cs, &x, &y)?;
            // least |w| with x⁻¹·w·y ∈ G_n, over the ball of radius d
            let lattice = c.stage(stage)?;
            let xi = g.invert(&x);
            let ball = word_ball(&g, &g.identity(), d, ctx.cap_or(DEFAULT_CAP))?;
            let brute = ball
                .elements
                .iter()
                .filter(|(w, _)| lattice.contains(&g.multiply(&g.multiply(&xi, w), &y)))
                .map(|(_, l)| *l)
                .min();
            let check = Check::new("brute-force-oracle", brute == Some(d)).measured(json!({"schreier": d, "brute_force": brute}));
            let inputs = ctx.inputs(json!({"group": g.to_json(), "generators": g.generators(), "chain": c, "stages": [stage], "parameters": {"x": x, "y": y}}));
            Ok(Certificate::new("chain.quotient-distance", inputs, vec![check], json!({"distance": d})))
        }
        ChainCmd::Injective { sel, last, radius, conjugator_radius } => {
            let g = parse_group(&sel.group)?;
            let c = parse_chain(&g, &sel.chain, sel.first, last)?;
            let out = injective_radius_stage(&c, radius, conjugator_radius, ctx.cap_or(DEFAULT_CAP))?;
            let mut check = Check::new("injective-radius", matches!(out, InjectiveOutcome::Stage { .. }));
            if let InjectiveOutcome::Failure { stage, g1, g2, k } = &out {
                check = check.witness(json!({"stage": stage, "g1": g1, "g2": g2, "k": k}));
            }
            let inputs = ctx.inputs(json!({
                "group": g.to_json(), "generators": g.generators(), "chain": c, "stages": [sel.first, last],
                "parameters": {"R": radius, "conjugator_radius": conjugator_radius},
            }));
            Ok(Certificate::new("chain.injective-radius", inputs, vec![check], serde_json::to_value(&out).expect("serializable")))
        }
        ChainCmd::Isometry { sel, stage, point, radius } => {
            let g = parse_group(&sel.group)?;
            let c = parse_chain(&g, &sel.chain, sel.first.min(stage), stage)?;
            let x = element(&g, &point, "--point")?;
            let cs = coset_space(&c, stage, cap)?;
            let out = isometry_radius_check(&cs, &x, radius, ctx.cap_or(DEFAULT_CAP))?;
            let check = match &out {
                IsometryOutcome::Pass { pairs_checked } => Check::new("isometry-radius", true).measured(json!(pairs_checked)),
                IsometryOutcome::Inconclusive { a, b, conclusion_holds } => Check::new("injective-on-3R", false)
                    .witness(json!({"a": a, "b": b, "conclusion_holds": conclusion_holds})),
                other => Check::new("isometry-radius", false).witness(serde_json::to_value(other).expect("serializable")),
            };
            let inputs = ctx.inputs(json!({
                "group": g.to_json(), "generators": g.generators(), "chain": c, "stages": [stage],
                "window": {"center": x, "radius": radius},
            }));
            Ok(Certificate::new("chain.isometry-radius", inputs, vec![check], serde_json::to_value(&out).expect("serializable")))
        }
        ChainCmd::Dominates { sel, other, horizon } => {
            let g = parse_group(&sel.group)?;
            let a = parse_chain(&g, &sel.chain, sel.first, horizon)?;
            let b = parse_chain(&g, &other, sel.first, horizon)?;
            let per = dominates(&a, &b, horizon)?;
            let missing = per.iter().find(|d| !matches!(d, Domination::Found { .. }));
            let mut check = Check::new("dominates", missing.is_none()).measured(json!(per.len()));
            if let Some(m) = missing {
                check = check.witness(serde_json::to_value(m).expect("serializable"));
            }
            let inputs = ctx.inputs(json!({"group": g.to_json(), "generators": g.generators(), "chain": [a, b], "stages": [sel.first, horizon]}));
            Ok(Certificate::new("chain.dominates", inputs, vec![check], serde_json::to_value(&per).expect("serializable")))
        }
    }
}

pub fn boxdist(a: BoxdistArgs, ctx: &Ctx) -> Result<Certificate, CliError> {
    let g = parse_group(&a.sel.group)?;
    let c = parse_chain(&g, &a.sel.chain, a.sel.first, a.last)?;
    let (x, y) = (element(&g, &a.x, "x")?, element(&g, &a.y, "y")?);
    let w = box_window(&c, a.sel.first, a.last, ctx.cap_or(DEFAULT_TABLE_CAP))?;
    let locate = |n: usize, e| -> Result<usize, CliError> {
        let b = w
            .blocks
            .iter()
            .find(|b| b.stage == n)
            .ok_or_else(|| CliError::Usage(format!("stage {n} is outside the window {}..={}", a.sel.first, a.last)))?;
        Ok(b.cosets.locate(e))
    };
    let (i, j) = (locate(a.n, &x)?, locate(a.m, &y)?);
    let d = w.distance(a.n, i, a.m, j)?;
    let inputs = ctx.inputs(json!({
        "group": g.to_json(), "generators": g.generators(), "chain": c, "stages": [a.sel.first, a.last],
        "parameters": {"n": a.n, "x": x, "m": a.m, "y": y},
    }));
    Ok(Certificate::new("box.distance", inputs, vec![], json!({"distance": d, "cosets": [i, j]})))
}
