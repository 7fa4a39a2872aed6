use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use teamgame::analytic::{self, irrational_equilibrium, solve_2x2, surd_profile_to_real, verify_irrational_equilibrium};
use teamgame::checks::{epsilon_ne_report, mass_bound_audit, wsne_gap};
use teamgame::clique::{
    classify_symmetric_profile, nashgap_report, payoff_from_graph, payoff_from_graph_delta,
    robust_unique_ne_game, unique_ne_game, wsne_value_audit, CertKind, CliqueGame, Graph, ParameterRegime,
    WsneAuditOptions,
};
use teamgame::dynamics::{self, Algorithm, DynamicsConfig};
use teamgame::gadgets::{
    self, canonical_team_ne, coupled_gadget, default_delta, gadget_structure_audit, median_backmap, quadratic_gadget,
    symmetric_backmap, symmetric_regret, team3v3_audit_and_backmap, team3v3_gadget, team_backmap, team_gadget,
    team_gadget_shifted, TeamGadgetInstance,
};
use teamgame::game;
use teamgame::minmax::{check_fone, gda_gap, Domain, QuadraticMinMaxProblem};
use teamgame::oracle::{self, grid_ne_search, local_ne_refine, max_clique};
use teamgame::rational::{parse_rational, to_f64, RatMatrix};
use teamgame::{BimatrixGame, Game, MixedProfile, MixedStrategy, Orientation, Q};

use crate::formats::{
    parse_game, parse_graph, parse_problem, parse_profile, write_game, write_trajectory, GameFile, LoadedGame, Num,
    ProblemFile, ProfileFile,
};
use crate::report::{hash_inputs, Report, EXIT_INPUT, EXIT_OK, EXIT_VIOLATED};

/// Tolerance used when checking oracle output and exact constructions.
const ORACLE_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "teamgame", version, about = "Team games, clique gadgets and min-max dynamics")]
pub struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a gadget instance.
    #[command(subcommand)]
    Gadget(GadgetCmd),
    /// Certify a profile.
    #[command(subcommand)]
    Check(CheckCmd),
    /// Map an equilibrium of a gadget back to the source game.
    #[command(subcommand)]
    Backmap(BackmapCmd),
    /// Audit a structural lemma.
    #[command(subcommand)]
    Audit(AuditCmd),
    /// Ground-truth solvers.
    #[command(subcommand)]
    Solve(SolveCmd),
    /// Learning dynamics.
    #[command(subcommand)]
    Dynamics(DynamicsCmd),
    /// Closed-form examples.
    #[command(subcommand)]
    Analytic(AnalyticCmd),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CliqueVariantArg {
    Base,
    Delta,
    Unique,
    Robust,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CertKindArg {
    Nash,
    Wsne,
}

#[derive(Debug, Subcommand)]
pub enum GadgetCmd {
    /// Three-player team gadget from a symmetric game (A, A).
    Team {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        eps: f64,
        /// Shift entries into [−range−2, −2] first.
        #[arg(long)]
        shift: bool,
        #[arg(short = 'o', long)]
        out: PathBuf,
    },
    /// Antisymmetric min-max problem from (R, Rᵀ).
    Quadratic {
        #[arg(long)]
        game: PathBuf,
        #[arg(short = 'o', long)]
        out: PathBuf,
    },
    /// The same problem restricted to the coupled domain |x_i − y_i| ≤ δ.
    Coupled {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        delta: Option<f64>,
        /// Target gap used to pick δ = (gap/n)^{1/4} when --delta is absent.
        #[arg(long)]
        gap: Option<f64>,
        #[arg(short = 'o', long)]
        out: PathBuf,
    },
    /// Two teams of three from (R, Rᵀ).
    Team3v3 {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(short = 'o', long)]
        out: PathBuf,
    },
    /// Clique games on a graph.
    Clique {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        variant: CliqueVariantArg,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        delta: Option<String>,
        #[arg(long)]
        eps: Option<String>,
        #[arg(short = 'o', long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct GameProfile {
    #[arg(long)]
    pub game: PathBuf,
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
}

#[derive(Debug, Args)]
pub struct ProblemProfile {
    #[arg(long)]
    pub problem: PathBuf,
    /// Profile file holding x and y as its two strategies.
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
}

#[derive(Debug, Subcommand)]
pub enum CheckCmd {
    /// ε-Nash certificate.
    Ne(GameProfile),
    /// ε-well-supported certificate.
    Wsne(GameProfile),
    /// First-order stationarity of a min-max point.
    Fone(ProblemProfile),
    /// Projected GDA fixed-point gap.
    Gap {
        #[command(flatten)]
        inner: ProblemProfile,
        #[arg(long, default_value_t = 1.0)]
        stepsize: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum BackmapCmd {
    /// Team gadget ε²-NE to a symmetric NE of (A, A).
    Team {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        shift: bool,
        #[arg(long)]
        profile: PathBuf,
        /// Certified ε² (defaults to eps²).
        #[arg(long)]
        eps2: Option<f64>,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Symmetric point of the quadratic gadget to a symmetric NE of (R, Rᵀ).
    Symmetric {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        gap: Option<f64>,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Coupled-domain point to the midpoint strategy.
    Median {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        gap: Option<f64>,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Team-symmetric ε²-NE of the 3 vs 3 gadget to a symmetric NE of (R, Rᵀ).
    Team3v3 {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        profile: PathBuf,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum AuditCmd {
    /// Closeness of x, y and smallness of z in a team gadget ε²-NE.
    GadgetStructure {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        shift: bool,
        #[arg(long)]
        profile: PathBuf,
    },
    /// Value of symmetric equilibria of the graph game.
    Nashgap {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Value bounds for well-supported equilibria of the robust graph game.
    WsneValue {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value = "1/2")]
        delta: String,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 12)]
        grid: usize,
    },
    /// Nearest canonical form of a symmetric equilibrium of a bordered clique game.
    Classify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = CliqueVariantArg::Unique)]
        variant: CliqueVariantArg,
        #[arg(long, default_value = "1/2")]
        delta: String,
        /// Regime ε of the robust game.
        #[arg(long, default_value = "0")]
        regime_eps: String,
        #[arg(long)]
        profile: PathBuf,
        /// Certificate level of the profile.
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = CertKindArg::Nash)]
        kind: CertKindArg,
    },
    /// Mass carried by suboptimal actions in an ε²-NE.
    MassBound(GameProfile),
}

#[derive(Debug, Subcommand)]
pub enum SolveCmd {
    /// Exact support enumeration.
    Enumerate {
        #[arg(long)]
        game: PathBuf,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Grid sweep with resolution 1/m.
    Grid {
        #[arg(long)]
        game: PathBuf,
        /// Grid denominator m.
        #[arg(long)]
        resolution: usize,
        #[arg(long)]
        eps: f64,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Local search for an approximate equilibrium.
    Refine {
        #[arg(long)]
        game: PathBuf,
        /// Start profile (uniform when absent).
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long)]
        target: f64,
        #[arg(long, default_value_t = 100_000)]
        iters: usize,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Closed form of a 2×2 zero-sum game whose row player minimizes.
    #[command(name = "2x2")]
    TwoByTwo {
        #[arg(long)]
        game: PathBuf,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Exact maximum clique.
    MaxClique {
        #[arg(long)]
        graph: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum DynamicsCmd {
    Run {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        algo: Algorithm,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        stepsize: f64,
        /// Initial (x, y) as a two-strategy profile.
        #[arg(long)]
        init: Option<PathBuf>,
        #[arg(short = 'o', long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum AnalyticCmd {
    /// The three-player game with an irrational unique equilibrium.
    Irrational {
        #[arg(long)]
        verify: bool,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
}

/// A list of profiles, as written by the solvers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriaFile {
    pub equilibria: Vec<ProfileFile>,
}

/// Reads inputs and remembers their bytes for the report hash.
struct Session {
    inputs: Vec<Vec<u8>>,
}

impl Session {
    fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        self.inputs.push(bytes.clone());
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    fn arg(&mut self, value: impl std::fmt::Display) {
        self.inputs.push(value.to_string().into_bytes());
    }

    fn game(&mut self, path: &Path) -> Result<LoadedGame> {
        let text = self.read(path)?;
        parse_game(&text).with_context(|| format!("in {}", path.display()))
    }

    fn matrix(&mut self, path: &Path) -> Result<RatMatrix> {
        self.game(path)?.row_matrix()
    }

    fn graph(&mut self, path: &Path) -> Result<Graph> {
        let text = self.read(path)?;
        parse_graph(&text).with_context(|| format!("in {}", path.display()))
    }

    fn profile(&mut self, path: &Path) -> Result<ProfileFile> {
        let text = self.read(path)?;
        parse_profile(&text).with_context(|| format!("in {}", path.display()))
    }

    fn problem(&mut self, path: &Path) -> Result<QuadraticMinMaxProblem> {
        let text = self.read(path)?;
        parse_problem(&text).with_context(|| format!("in {}", path.display()))
    }

    fn report(&self, command: &str) -> Report {
        Report::new(command, hash_inputs(self.inputs.iter().map(|v| v.as_slice())))
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write(path, &serde_json::to_string_pretty(value)?)
}

fn rational_arg(s: &str) -> Result<Q> {
    parse_rational(s).with_context(|| format!("bad number {s:?}"))
}

fn xy(profile: &ProfileFile) -> Result<(Vec<f64>, Vec<f64>)> {
    ensure!(profile.strategies.len() == 2, "expected a profile with two strategies (x, y)");
    let v = |i: usize| profile.strategies[i].iter().map(Num::to_f64).collect();
    Ok((v(0), v(1)))
}

fn build_team(a: &RatMatrix, eps: f64, shift: bool) -> Result<TeamGadgetInstance> {
    Ok(if shift { team_gadget_shifted(a, eps)? } else { team_gadget(a, eps)? })
}

fn regime_for(g: &Graph, k: usize, delta: &str, eps: &str) -> Result<ParameterRegime> {
    Ok(ParameterRegime::new(g.n(), k, rational_arg(delta)?, rational_arg(eps)?)?)
}

fn clique_game(g: &Graph, k: usize, variant: CliqueVariantArg, delta: &str, eps: &str) -> Result<CliqueGame> {
    Ok(match variant {
        CliqueVariantArg::Unique => unique_ne_game(g, k)?,
        CliqueVariantArg::Robust => robust_unique_ne_game(g, k, &regime_for(g, k, delta, eps)?)?,
        other => bail!("variant {other:?} has no bordered game"),
    })
}

fn max_regret_of(game: &dyn Game, profile: &MixedProfile) -> Result<f64> {
    Ok(game::max_regret(game, profile)?)
}

fn gadget(cmd: &GadgetCmd, s: &mut Session) -> Result<Report> {
    match cmd {
        GadgetCmd::Team { game, eps, shift, out } => {
            let a = s.matrix(game)?;
            s.arg(format!("eps={eps} shift={shift}"));
            let inst = build_team(&a, *eps, *shift)?;
            write(out, &write_game(&GameFile::from_polymatrix(&inst.game))?)?;
            let mut r = s.report("gadget team");
            r.upper("gadget-epsilon", "team-gadget", gadgets::MAX_GADGET_EPSILON, *eps);
            let canonical = canonical_team_ne(&inst)?;
            r.upper("canonical-ne-regret", "team-gadget", ORACLE_TOL, max_regret_of(&inst.game, &canonical)?);
            Ok(r)
        }
        GadgetCmd::Quadratic { game, out } => {
            let rm = s.matrix(game)?;
            let p = quadratic_gadget(&rm)?;
            write_json(out, &ProblemFile::from_problem(&p))?;
            let mut r = s.report("gadget quadratic");
            r.bound("entry-range", "quadratic-gadget", Q::from_integer(1.into()), rm.max_abs(), true);
            Ok(r)
        }
        GadgetCmd::Coupled { game, delta, gap, out } => {
            let rm = s.matrix(game)?;
            let delta = match (delta, gap) {
                (Some(d), _) => *d,
                (None, Some(g)) => default_delta(*g, rm.rows()),
                (None, None) => bail!("give --delta or --gap"),
            };
            s.arg(format!("delta={delta}"));
            let p = coupled_gadget(&rm, delta)?;
            write_json(out, &ProblemFile::from_problem(&p))?;
            let mut r = s.report("gadget coupled");
            r.bound("delta", "coupled-gadget", 1.0, delta, (0.0..=1.0).contains(&delta));
            Ok(r)
        }
        GadgetCmd::Team3v3 { game, eps, out } => {
            let rm = s.matrix(game)?;
            s.arg(format!("eps={eps}"));
            let inst = team3v3_gadget(&rm, *eps)?;
            write(out, &write_game(&GameFile::from_polymatrix(&inst.game))?)?;
            let mut r = s.report("gadget team3v3");
            r.upper("gadget-epsilon", "team3v3-gadget", gadgets::MAX_GADGET_EPSILON, *eps);
            Ok(r)
        }
        GadgetCmd::Clique { graph, variant, k, delta, eps, out } => {
            let g = s.graph(graph)?;
            s.arg(format!("variant={variant:?} k={k:?} delta={delta:?} eps={eps:?}"));
            let delta = delta.as_deref().unwrap_or("1/2");
            let eps = eps.as_deref().unwrap_or("0");
            let file = match variant {
                CliqueVariantArg::Base => GameFile::identical(&payoff_from_graph(&g), Orientation::Maximize)?,
                CliqueVariantArg::Delta => {
                    GameFile::identical(&payoff_from_graph_delta(&g, &rational_arg(delta)?)?, Orientation::Maximize)?
                }
                _ => {
                    let k = k.ok_or_else(|| anyhow!("--k is required for bordered variants"))?;
                    GameFile::from_bimatrix(&clique_game(&g, k, *variant, delta, eps)?.game)
                }
            };
            write(out, &write_game(&file)?)?;
            Ok(s.report("gadget clique"))
        }
    }
}

fn check(cmd: &CheckCmd, s: &mut Session) -> Result<Report> {
    match cmd {
        CheckCmd::Ne(a) => {
            let g = s.game(&a.game)?;
            let p = s.profile(&a.profile)?.to_profile()?;
            s.arg(format!("eps={}", a.eps));
            let cert = epsilon_ne_report(g.as_game(), &p)?.against("eps-ne", a.eps);
            let mut r = s.report("check ne");
            for (i, reg) in cert.regrets.iter().enumerate() {
                r.upper(&format!("regret-player-{i}"), "eps-ne", a.eps, *reg);
            }
            Ok(r)
        }
        CheckCmd::Wsne(a) => {
            let g = s.game(&a.game)?;
            let p = s.profile(&a.profile)?.to_profile()?;
            s.arg(format!("eps={}", a.eps));
            let mut r = s.report("check wsne");
            r.upper("well-supported-gap", "eps-wsne", a.eps, wsne_gap(g.as_game(), &p)?);
            Ok(r)
        }
        CheckCmd::Fone(a) => {
            let problem = s.problem(&a.problem)?;
            let (x, y) = xy(&s.profile(&a.profile)?)?;
            s.arg(format!("eps={}", a.eps));
            let (ex, ey) = check_fone(&problem, &x, &y)?;
            let mut r = s.report("check fone");
            r.upper("first-order-x", "eps-fone", a.eps, ex);
            r.upper("first-order-y", "eps-fone", a.eps, ey);
            Ok(r)
        }
        CheckCmd::Gap { inner: a, stepsize } => {
            let problem = s.problem(&a.problem)?;
            let (x, y) = xy(&s.profile(&a.profile)?)?;
            s.arg(format!("eps={} stepsize={stepsize}", a.eps));
            let rep = gda_gap(&problem, &x, &y, *stepsize)?;
            let mut r = s.report("check gap");
            r.upper("gda-gap", "gda-gap", a.eps, rep.gap);
            if let (Some(vi), Domain::SimplexProduct { .. }) = (rep.vi_bound, problem.domain()) {
                let (ex, ey) = check_fone(&problem, &x, &y)?;
                r.upper("first-order-from-gap", "gap-to-vi", vi, ex.max(ey));
            }
            Ok(r)
        }
    }
}

fn write_strategy(out: &Option<PathBuf>, x: &MixedStrategy) -> Result<()> {
    match out {
        Some(path) => write_json(path, &ProfileFile::from_profile(&MixedProfile::new(vec![x.clone()]))),
        None => Ok(()),
    }
}

fn backmap(cmd: &BackmapCmd, s: &mut Session) -> Result<Report> {
    match cmd {
        BackmapCmd::Team { game, eps, shift, profile, eps2, out } => {
            let a = s.matrix(game)?;
            let p = s.profile(profile)?.to_profile()?;
            s.arg(format!("eps={eps} shift={shift} eps2={eps2:?}"));
            let inst = build_team(&a, *eps, *shift)?;
            let (y, bound) = team_backmap(&inst, &p, eps2.unwrap_or(eps * eps))?;
            let sym = BimatrixGame::identical(inst.a.clone(), Orientation::Minimize)?;
            let measured = max_regret_of(&sym, &MixedProfile::new(vec![y.clone(), y.clone()]))?;
            write_strategy(out, &y)?;
            let mut r = s.report("backmap team");
            r.upper("symmetric-ne-regret", "team-backmap", bound, measured);
            Ok(r)
        }
        BackmapCmd::Symmetric { game, profile, gap, out } => {
            let rm = s.matrix(game)?;
            let (x, y) = xy(&s.profile(profile)?)?;
            s.arg(format!("gap={gap:?}"));
            let gap = match gap {
                Some(g) => *g,
                None => gda_gap(&quadratic_gadget(&rm)?, &x, &y, 1.0)?.gap,
            };
            let bound = symmetric_backmap(&rm, &x, &y, gap)?;
            let xs = MixedStrategy::new(x)?;
            let measured = symmetric_regret(&rm, &xs)?;
            write_strategy(out, &xs)?;
            let mut r = s.report("backmap symmetric");
            r.upper("symmetric-ne-regret", "vi-for-ne", bound, measured);
            Ok(r)
        }
        BackmapCmd::Median { game, profile, delta, gap, out } => {
            let rm = s.matrix(game)?;
            let (x, y) = xy(&s.profile(profile)?)?;
            s.arg(format!("delta={delta} gap={gap:?}"));
            let gap = match gap {
                Some(g) => *g,
                None => gda_gap(&coupled_gadget(&rm, *delta)?, &x, &y, 1.0)?.gap,
            };
            let (mid, bound) = median_backmap(&rm, &x, &y, gap, *delta)?;
            let measured = symmetric_regret(&rm, &mid)?;
            write_strategy(out, &mid)?;
            let mut r = s.report("backmap median");
            r.upper("midpoint-regret", "median-backmap", bound, measured);
            Ok(r)
        }
        BackmapCmd::Team3v3 { game, eps, profile, out } => {
            let rm = s.matrix(game)?;
            let p = s.profile(profile)?.to_profile()?;
            s.arg(format!("eps={eps}"));
            let inst = team3v3_gadget(&rm, *eps)?;
            let (x, bound, audit) = team3v3_audit_and_backmap(&inst, &p, *eps)?;
            let measured = symmetric_regret(&rm, &x)?;
            write_strategy(out, &x)?;
            let mut r = s.report("backmap team3v3");
            r.upper("xy-gap", "team3v3-structure", 2.0 * eps, audit.team.max_xy_gap.max(audit.hatted.max_xy_gap));
            r.upper("z-mass", "team3v3-structure", 9.0 * eps, audit.team.max_z_mass.max(audit.hatted.max_z_mass));
            r.upper("symmetric-ne-regret", "team3v3-backmap", bound, measured);
            Ok(r)
        }
    }
}

fn opt_num(v: &Option<Q>) -> Num {
    match v {
        Some(q) => Num::Exact(q.clone()),
        None => Num::Float(f64::NAN),
    }
}

fn audit(cmd: &AuditCmd, s: &mut Session) -> Result<Report> {
    match cmd {
        AuditCmd::GadgetStructure { game, eps, shift, profile } => {
            let a = s.matrix(game)?;
            let p = s.profile(profile)?.to_profile()?;
            s.arg(format!("eps={eps} shift={shift}"));
            let inst = build_team(&a, *eps, *shift)?;
            let audit = gadget_structure_audit(&inst, &p, *eps)?;
            let mut r = s.report("audit gadget-structure");
            r.upper("xy-gap", "team-structure", 2.0 * eps, audit.max_xy_gap);
            r.upper("z-mass", "team-structure", 9.0 * eps, audit.max_z_mass);
            Ok(r)
        }
        AuditCmd::Nashgap { graph } => {
            let g = s.graph(graph)?;
            let rep = nashgap_report(&g)?;
            let k = rep.k as i64;
            let mut r = s.report("audit nashgap");
            let target = Q::new((-1).into(), k.into());
            let ok = rep.max_value == target;
            r.bound("max-value", "clique-value", target, rep.max_value.clone(), ok);
            r.bound("max-clique-uniforms", "clique-value", 0.0, rep.missing_uniforms as f64, rep.missing_uniforms == 0);
            let cap = rep.other_cap();
            let ok = rep.gap_violations().is_empty();
            r.bound("non-clique-value", "clique-gap", opt_num(&cap), opt_num(&rep.max_other_value), ok);
            Ok(r)
        }
        AuditCmd::WsneValue { graph, k, delta, eps, grid } => {
            let g = s.graph(graph)?;
            s.arg(format!("k={k:?} delta={delta} eps={eps} grid={grid}"));
            let k = match k {
                Some(k) => *k,
                None => max_clique(&g)?.0,
            };
            let regime = regime_for(&g, k, delta, eps)?;
            let opts = WsneAuditOptions { grid_resolution: *grid, ..Default::default() };
            let rep = wsne_value_audit(&g, &regime, &opts)?;
            let mut r = s.report("audit wsne-value");
            let on_ok = rep.min_on_clique_value.as_ref().map_or(true, |v| v >= &rep.on_clique_value_bound);
            r.bound("on-clique-value", "wsne-value", rep.on_clique_value_bound.clone(), opt_num(&rep.min_on_clique_value), on_ok);
            let dist = to_f64(&rep.distance_bound);
            r.upper("on-clique-distance", "wsne-value", dist, rep.max_on_clique_distance);
            let off_ok = rep.max_off_clique_value.as_ref().map_or(true, |v| v <= &rep.off_clique_value_bound);
            r.bound("off-clique-value", "wsne-value", rep.off_clique_value_bound.clone(), opt_num(&rep.max_off_clique_value), off_ok);
            Ok(r)
        }
        AuditCmd::Classify { graph, k, variant, delta, regime_eps, profile, eps, kind } => {
            let g = s.graph(graph)?;
            let x = s.profile(profile)?.strategy(0)?;
            s.arg(format!("k={k} variant={variant:?} delta={delta} regime_eps={regime_eps} eps={eps} kind={kind:?}"));
            let cg = clique_game(&g, *k, *variant, delta, regime_eps)?;
            let regime = regime_for(&g, *k, delta, regime_eps)?;
            let kind = match kind {
                CertKindArg::Nash => CertKind::Nash,
                CertKindArg::Wsne => CertKind::WellSupported,
            };
            let c = classify_symmetric_profile(&cg, &regime, &x, *eps, kind)?;
            let mut r = s.report("audit classify");
            let name = format!("distance-to-{:?}", c.form);
            match c.asserted_bound {
                Some(b) => r.upper(&name, "canonical-forms", b, c.distance),
                None => r.bound(&name, "canonical-forms", f64::INFINITY, c.distance, true),
            }
            Ok(r)
        }
        AuditCmd::MassBound(a) => {
            let g = s.game(&a.game)?;
            let p = s.profile(&a.profile)?.to_profile()?;
            s.arg(format!("eps={}", a.eps));
            let v = mass_bound_audit(g.as_game(), &p, a.eps)?;
            let mut r = s.report("audit mass-bound");
            r.bound("suboptimal-mass", "mass-bound", 0.0, v.len() as f64, v.is_empty());
            Ok(r)
        }
    }
}

fn write_equilibria(out: &Option<PathBuf>, eqs: Vec<ProfileFile>) -> Result<()> {
    match out {
        Some(path) => write_json(path, &EquilibriaFile { equilibria: eqs }),
        None => Ok(()),
    }
}

fn solve(cmd: &SolveCmd, s: &mut Session) -> Result<Report> {
    match cmd {
        SolveCmd::Enumerate { game, out } => {
            let g = s.game(game)?;
            let bm = g.bimatrix()?;
            let exact: Vec<Vec<Vec<Q>>> = if bm.symmetric() && bm.identical_payoff() {
                oracle::symmetric_support_enumeration(bm.row_matrix(), bm.orientation(0))?
                    .into_iter()
                    .map(|x| vec![x.clone(), x])
                    .collect()
            } else {
                oracle::bimatrix_support_enumeration(&bm)?.into_iter().map(|(x, y)| vec![x, y]).collect()
            };
            let mut worst: f64 = 0.0;
            for e in &exact {
                worst = worst.max(max_regret_of(&bm, &ProfileFile::from_exact(e).to_profile()?)?);
            }
            let mut r = s.report("solve enumerate");
            r.bound("equilibria-found", "support-enumeration", 1.0, exact.len() as f64, !exact.is_empty());
            r.upper("oracle-regret", "support-enumeration", ORACLE_TOL, worst);
            write_equilibria(out, exact.iter().map(|e| ProfileFile::from_exact(e)).collect())?;
            Ok(r)
        }
        SolveCmd::Grid { game, resolution, eps, out } => {
            let g = s.game(game)?;
            s.arg(format!("m={resolution} eps={eps}"));
            let hits = grid_ne_search(g.as_game(), *resolution, *eps)?;
            let worst = hits.iter().map(|h| h.1).fold(0.0, f64::max);
            let mut r = s.report("solve grid");
            r.upper("hit-regret", "grid-search", *eps, worst);
            write_equilibria(out, hits.iter().map(|h| ProfileFile::from_profile(&h.0)).collect())?;
            Ok(r)
        }
        SolveCmd::Refine { game, profile, target, iters, out } => {
            let g = s.game(game)?;
            let start = match profile {
                Some(p) => s.profile(p)?.to_profile()?,
                None => MixedProfile::uniform(&g.as_game().action_counts()),
            };
            s.arg(format!("target={target} iters={iters}"));
            let res = local_ne_refine(g.as_game(), &start, *target, *iters)?;
            if let Some(path) = out {
                write_json(path, &ProfileFile::from_profile(&res.profile))?;
            }
            let mut r = s.report("solve refine");
            r.upper("refined-regret", "local-refine", *target, res.max_regret);
            Ok(r)
        }
        SolveCmd::TwoByTwo { game, out } => {
            let a = s.matrix(game)?;
            let sol = solve_2x2(&a)?;
            let bm = BimatrixGame::with_orientation(a.clone(), a, [Orientation::Minimize, Orientation::Maximize])?;
            let exact = vec![sol.row.to_vec(), sol.col.to_vec()];
            let regret = max_regret_of(&bm, &ProfileFile::from_exact(&exact).to_profile()?)?;
            let exact_regrets: Vec<Q> =
                (0..2).map(|p| game::regret_exact(&bm, &exact, p)).collect::<teamgame::Result<_>>()?;
            let zero = Q::from_integer(0.into());
            if let Some(path) = out {
                write_json(path, &ProfileFile::from_exact(&exact))?;
            }
            let mut r = s.report("solve 2x2");
            r.upper("closed-form-regret", "closed-form-2x2", ORACLE_TOL, regret);
            let worst = exact_regrets.iter().max().cloned().unwrap_or_default();
            r.bound("exact-regret", "closed-form-2x2", zero.clone(), worst.clone(), worst <= zero);
            r.bound("value", "closed-form-2x2", sol.value.clone(), sol.value, true);
            Ok(r)
        }
        SolveCmd::MaxClique { graph } => {
            let g = s.graph(graph)?;
            let (k, witness) = max_clique(&g)?;
            let mut r = s.report("solve max-clique");
            r.bound("witness-is-clique", "max-clique", k as f64, witness.len() as f64, g.is_clique(&witness));
            Ok(r)
        }
    }
}

fn run_dynamics(cmd: &DynamicsCmd, s: &mut Session) -> Result<Report> {
    let DynamicsCmd::Run { problem, algo, steps, stepsize, init, out } = cmd;
    let p = s.problem(problem)?;
    let mut cfg = DynamicsConfig::new(*algo, *stepsize, *steps);
    let mut symmetric_start = true;
    if let Some(path) = init {
        let (x, y) = xy(&s.profile(path)?)?;
        symmetric_start = x == y;
        cfg = cfg.with_init(x, y);
    }
    s.arg(format!("algo={algo} steps={steps} stepsize={stepsize}"));
    let traj = dynamics::run(&p, &cfg)?;
    write(out, &write_trajectory(&traj))?;
    let mut r = s.report("dynamics run");
    r.bound("min-gap", "dynamics", f64::INFINITY, dynamics::min_gap(&traj), true);
    if p.antisymmetric() && algo.is_symmetric() && symmetric_start {
        r.upper("symmetry-drift", "symmetry-trap", 1e-12, dynamics::symmetry_drift(&traj));
    }
    Ok(r)
}

fn run_analytic(cmd: &AnalyticCmd, s: &mut Session) -> Result<Report> {
    let AnalyticCmd::Irrational { verify, out } = cmd;
    s.arg(format!("verify={verify}"));
    let eq = irrational_equilibrium();
    if let Some(path) = out {
        write_json(path, &ProfileFile::from_profile(&surd_profile_to_real(&eq)?))?;
    }
    let mut r = s.report("analytic irrational");
    let argmin = analytic::value_curve_argmin();
    r.bound("equilibrium-y2", "irrational-ne", argmin.to_real(), eq[1][1].to_real(), argmin == eq[1][1]);
    if *verify {
        let rep = verify_irrational_equilibrium()?;
        for (p, reg) in rep.regrets.iter().enumerate() {
            r.upper(&format!("regret-player-{p}"), "irrational-ne", ORACLE_TOL, *reg);
        }
        let (a, b) = (&rep.action_values[2][0], &rep.action_values[2][1]);
        r.bound("adversary-indifference", "irrational-ne", b.to_real(), a.to_real(), rep.adversary_indifferent);
        r.bound("exact-surd-ne", "irrational-ne", 1.0, if rep.exact_ne { 1.0 } else { 0.0 }, rep.exact_ne);
    }
    Ok(r)
}

fn dispatch(cmd: &Command, s: &mut Session) -> Result<Report> {
    match cmd {
        Command::Gadget(c) => gadget(c, s),
        Command::Check(c) => check(c, s),
        Command::Backmap(c) => backmap(c, s),
        Command::Audit(c) => audit(c, s),
        Command::Solve(c) => solve(c, s),
        Command::Dynamics(c) => run_dynamics(c, s),
        Command::Analytic(c) => run_analytic(c, s),
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Gadget(_) => "gadget",
        Command::Check(_) => "check",
        Command::Backmap(_) => "backmap",
        Command::Audit(_) => "audit",
        Command::Solve(_) => "solve",
        Command::Dynamics(_) => "dynamics",
        Command::Analytic(_) => "analytic",
    }
}

/// Library errors that mean a bound or lemma failed rather than bad input.
fn error_exit_code(e: &anyhow::Error) -> i32 {
    match e.downcast_ref::<teamgame::Error>() {
        Some(teamgame::Error::LemmaViolation(_)) | Some(teamgame::Error::Verification(_)) => EXIT_VIOLATED,
        _ => EXIT_INPUT,
    }
}

/// Runs one command, emits its report and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let mut session = Session { inputs: Vec::new() };
    let report = match dispatch(&cli.command, &mut session) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            let mut r = session.report(command_name(&cli.command));
            r.exit_code = error_exit_code(&e);
            r
        }
    };
    let text = match serde_json::to_string_pretty(&report) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot serialize report: {e}");
            return EXIT_INPUT;
        }
    };
    match &cli.report {
        Some(path) => {
            if let Err(e) = write(path, &text) {
                eprintln!("error: {e:#}");
                return EXIT_INPUT;
            }
        }
        None => println!("{text}"),
    }
    if report.exit_code == EXIT_OK {
        EXIT_OK
    } else {
        report.exit_code
    }
}

