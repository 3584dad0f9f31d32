use crate::args::{chain as parse_chain, element, in_file, lattice as parse_lattice, rational, read_json};
use crate::cert::Certificate;
use crate::{CliError, Ctx};
use boxdim_core::chains::{coset_space, CosetSpace, DEFAULT_INDEX_CAP};
use boxdim_core::covers::{
    push_cover_to_quotient, staggered_brick_cover_u3, synth_scaled_cover_ud, synth_simplicial_cover_zm, verify_cover,
    verify_quotient_cover, ColoredCover,
};
use boxdim_core::decay::{cover_to_decay, decay_to_cover, lipschitz_bound, sup_shift, verify_decay};
use boxdim_core::group::{word_ball, Ball, GroupSpec, DEFAULT_CAP};
use boxdim_core::json::frac_value;
use boxdim_core::{Decay, Rational};
use clap::{Args, Subcommand};
use serde_json::{json, Value};

#[derive(Subcommand, Debug)]
pub enum SynthKind {
    /// U_σ cover of ℤ^m from the L-scaled Kuhn triangulation.
    Simplicial {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        l: u32,
    },
    /// α_k-scaled brick cover of U_d(ℤ).
    Scaled {
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long)]
        k: u32,
        /// Brick-shaped base cover file (default: the staggered U_3 cover).
        #[arg(long)]
        base: Option<String>,
        /// Brick side of the default base cover.
        #[arg(long, default_value_t = 8)]
        brick: u32,
    },
    /// The period-8 two-colour cover of ℤ.
    Demo,
}

#[derive(Args, Debug, Clone)]
pub struct Window {
    /// Radius of the verification window.
    #[arg(long, global = true)]
    pub window_radius: Option<u32>,
    /// Window center (default: identity).
    #[arg(long, global = true)]
    pub center: Option<String>,
}

impl Window {
    fn ball(&self, g: &GroupSpec, default: u32, cap: usize) -> Result<Ball, CliError> {
        let c = match &self.center {
            Some(s) => element(g, s, "--center")?,
            None => g.identity(),
        };
        Ok(word_ball(g, &c, self.window_radius.unwrap_or(default), cap)?)
    }
}

#[derive(Subcommand, Debug)]
pub enum CoverCmd {
    /// Build a cover; with --window-radius it is also verified.
    Synth {
        #[command(subcommand)]
        kind: SynthKind,
        #[command(flatten)]
        window: Window,
        /// Lebesgue radius to verify (default: the cover's own scale).
        #[arg(long, global = true)]
        lebesgue: Option<u32>,
    },
    /// Check disjointness, multiplicity and the Lebesgue radius on a window.
    Verify {
        /// Cover file, or `demo`.
        cover: String,
        #[command(flatten)]
        window: Window,
        #[arg(long)]
        lebesgue: Option<u32>,
    },
    /// Push a cover to a finite quotient G/Q and verify it there.
    Push {
        cover: String,
        /// Q by lattice divisors.
        #[arg(long)]
        lattice: Option<String>,
        /// Q as a chain stage.
        #[arg(long)]
        chain: Option<String>,
        #[arg(long)]
        stage: Option<usize>,
        #[arg(long)]
        lebesgue: Option<u32>,
    },
}

#[derive(Subcommand, Debug)]
pub enum DecayCmd {
    /// Distance-ratio decay functions of a cover, verified on the window.
    Build {
        cover: String,
        #[command(flatten)]
        window: Window,
        /// Claimed shift bound (default 2(2s+3)/R).
        #[arg(long)]
        eps: Option<String>,
    },
    /// Partition, disjointness and shift checks of a decay family file.
    Verify {
        family: String,
        #[command(flatten)]
        window: Window,
        /// Shift bound (default: the family's tolerance).
        #[arg(long)]
        eps: Option<String>,
    },
    /// Back to a cover through the 1/(s+1) pigeonhole.
    Cover {
        family: String,
        #[command(flatten)]
        window: Window,
    },
}

pub fn load_cover(path: &str) -> Result<ColoredCover, CliError> {
    if path == "demo" {
        return Ok(ColoredCover::period_eight_demo());
    }
    let v = read_json(path)?;
    ColoredCover::from_json(&v).map_err(|e| in_file(path, e))
}

fn load_decay(path: &str) -> Result<Decay, CliError> {
    let v = read_json(path)?;
    let f: Decay = Decay::from_json(&v).map_err(|e| in_file(path, e))?;
    Ok(f)
}

/// Window default for a cover: radius large enough for the member diameters.
fn default_radius(c: &ColoredCover, r: u32) -> u32 {
    let diam = c
        .diameter_bound(DEFAULT_CAP)
        .and_then(|d| u32::try_from(d).ok())
        .unwrap_or(8);
    2 * (diam + r) + 2
}

fn cover_inputs(ctx: &Ctx, c: &ColoredCover, window: Option<&Ball>, params: Value) -> Value {
    let mut v = json!({
        "group": c.group.to_json(),
        "generators": c.group.generators(),
        "period_stage": c.to_json()["period_stage"],
        "parameters": params,
    });
    if let Some(w) = window {
        v["window"] = json!({"center": w.center, "radius": w.radius, "points": w.len()});
    }
    ctx.inputs(v)
}

pub fn cover(cmd: CoverCmd, ctx: &Ctx) -> Result<Certificate, CliError> {
    let cap = ctx.cap_or(DEFAULT_CAP);
    match cmd {
        CoverCmd::Synth { kind, window, lebesgue } => {
            let (c, params) = match kind {
                SynthKind::Simplicial { m, l } => (synth_simplicial_cover_zm(m, l)?, json!({"kind": "simplicial", "m": m, "L": l})),
                SynthKind::Scaled { d, k, base, brick } => {
                    let b = match &base {
                        Some(p) => load_cover(p)?,
                        None => staggered_brick_cover_u3(brick)?,
                    };
                    (
                        synth_scaled_cover_ud(d, k, &b)?,
                        json!({"kind": "scaled", "d": d, "k": k, "base": base, "brick": brick}),
                    )
                }
                SynthKind::Demo => (ColoredCover::period_eight_demo(), json!({"kind": "demo"})),
            };
            let r = lebesgue.unwrap_or(c.scale_r);
            let (checks, ball) = if window.window_radius.is_some() {
                let ball = window.ball(&c.group, 0, cap)?;
                (verify_cover(&c, &ball, r)?.checks, Some(ball))
            } else {
                (vec![], None)
            };
            let inputs = cover_inputs(ctx, &c, ball.as_ref(), json!({"synth": params, "R": r}));
            Ok(Certificate::new("cover.synth", inputs, checks, c.to_json()))
        }
        CoverCmd::Verify { cover, window, lebesgue } => {
            let c = load_cover(&cover)?;
            let r = lebesgue.unwrap_or(c.scale_r);
            let ball = window.ball(&c.group, default_radius(&c, r), cap)?;
            let rep = verify_cover(&c, &ball, r)?;
            let inputs = cover_inputs(ctx, &c, Some(&ball), json!({"cover": cover, "R": r}));
            let result = serde_json::to_value(&rep).expect("serializable");
            Ok(Certificate::new("cover.lebesgue", inputs, rep.checks, result))
        }
        CoverCmd::Push { cover, lattice, chain, stage, lebesgue } => {
            let c = load_cover(&cover)?;
            let idx_cap = ctx.cap_or(DEFAULT_INDEX_CAP);
            let cs: CosetSpace = match (&lattice, &chain, stage) {
                (Some(l), None, None) => CosetSpace::new(&c.group, &parse_lattice(&c.group, l, "--lattice")?, idx_cap)?,
                (None, Some(ch), Some(n)) => coset_space(&parse_chain(&c.group, ch, 0, n)?, n, idx_cap)?,
                _ => return Err(CliError::Usage("give --lattice, or --chain with --stage".into())),
            };
            let r = lebesgue.unwrap_or(c.scale_r);
            let qc = push_cover_to_quotient(&c, &cs, cap)?;
            let rep = verify_quotient_cover(&qc, &cs, r);
            let inputs = cover_inputs(
                ctx,
                &c,
                None,
                json!({"cover": cover, "R": r, "quotient": cs.lattice(), "stage": cs.stage()}),
            );
            let result = json!({"report": rep, "quotient_cover": qc});
            Ok(Certificate::new("cover.quotient", inputs, rep.checks, result))
        }
    }
}

pub fn decay(cmd: DecayCmd, ctx: &Ctx) -> Result<Certificate, CliError> {
    let cap = ctx.cap_or(DEFAULT_CAP);
    match cmd {
        DecayCmd::Build { cover, window, eps } => {
            let c = load_cover(&cover)?;
            let ball = window.ball(&c.group, default_radius(&c, c.scale_r), cap)?;
            let fam: Decay = cover_to_decay(&c, &ball, cap)?;
            let eps: Rational = match &eps {
                Some(s) => rational(s, "--eps")?,
                None => lipschitz_bound(c.s(), c.scale_r),
            };
            let m = c.group.generators().to_vec();
            let rep = verify_decay(&fam, &ball, &m, &eps)?;
            let (shift, _) = sup_shift(&fam, &ball, &m)?;
            let fam = fam.with_tolerance(shift.clone());
            let inputs = cover_inputs(ctx, &c, Some(&ball), json!({"cover": cover, "eps": frac_value(&eps)}));
            let mut result = fam.to_json();
            result["measured_shift"] = frac_value(&shift);
            Ok(Certificate::new("decay.build", inputs, rep.checks, result))
        }
        DecayCmd::Verify { family, window, eps } => {
            let f = load_decay(&family)?;
            let eps: Rational = match &eps {
                Some(s) => rational(s, "--eps")?,
                None => f.tolerance_eps.clone(),
            };
            let ball = window.ball(&f.group, 4 * f.source_r.max(2) + 8, cap)?;
            let m = if f.scale_m.is_empty() { f.group.generators().to_vec() } else { f.scale_m.clone() };
            let rep = verify_decay(&f, &ball, &m, &eps)?;
            let inputs = ctx.inputs(json!({
                "group": f.group.to_json(), "generators": f.group.generators(),
                "window": {"center": ball.center, "radius": ball.radius},
                "parameters": {"family": family, "eps": frac_value(&eps), "M": m},
            }));
            let result = serde_json::to_value(&rep).expect("serializable");
            Ok(Certificate::new("decay.verify", inputs, rep.checks, result))
        }
        DecayCmd::Cover { family, window } => {
            let f = load_decay(&family)?;
            let ball = window.ball(&f.group, 4 * f.source_r.max(2) + 8, cap)?;
            let dc = decay_to_cover(&f, &ball, cap)?;
            let inputs = ctx.inputs(json!({
                "group": f.group.to_json(), "generators": f.group.generators(),
                "window": {"center": ball.center, "radius": ball.radius},
                "parameters": {"family": family},
            }));
            let mut result = dc.cover.to_json();
            result["claimed_R"] = json!(dc.claimed_r);
            Ok(Certificate::new("decay.cover", inputs, dc.report.checks, result))
        }
    }
}
