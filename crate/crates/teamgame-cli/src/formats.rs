//! On-disk formats: game, graph, profile, problem and trajectory files.

use std::fmt;

use anyhow::{anyhow, bail, ensure, Context, Result};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use teamgame::clique::Graph;
use teamgame::dynamics::Trajectory;
use teamgame::geometry::JointDomain;
use teamgame::minmax::{Domain, QuadraticMinMaxProblem};
use teamgame::rational::{format_rational, from_f64, parse_rational, to_f64};
use teamgame::{
    BimatrixGame, Game, MixedProfile, MixedStrategy, NormalFormGame, Orientation, PairTerm, PolymatrixGame, RatMatrix,
    TeamPartition, Q,
};

/// A number that is either an exact rational ("p/q" string) or a plain float.
#[derive(Clone, Debug, PartialEq)]
pub enum Num {
    Exact(Q),
    Float(f64),
}

impl Num {
    pub fn to_f64(&self) -> f64 {
        match self {
            Num::Exact(q) => to_f64(q),
            Num::Float(v) => *v,
        }
    }

    pub fn to_exact(&self) -> Result<Q> {
        match self {
            Num::Exact(q) => Ok(q.clone()),
            Num::Float(v) => Ok(from_f64(*v)?),
        }
    }
}

impl From<Q> for Num {
    fn from(q: Q) -> Self {
        Num::Exact(q)
    }
}

impl From<f64> for Num {
    fn from(v: f64) -> Self {
        Num::Float(v)
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Num::Exact(q) => s.serialize_str(&format_rational(q)),
            Num::Float(v) if v.is_finite() => s.serialize_f64(*v),
            Num::Float(v) => s.serialize_str(&v.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct NumVisitor;

        impl Visitor<'_> for NumVisitor {
            type Value = Num;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a rational string")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Num, E> {
                Ok(Num::Float(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Num, E> {
                Ok(Num::Exact(Q::from_integer(v.into())))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Num, E> {
                Ok(Num::Exact(Q::from_integer(v.into())))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Num, E> {
                match v {
                    "NaN" => Ok(Num::Float(f64::NAN)),
                    "inf" => Ok(Num::Float(f64::INFINITY)),
                    "-inf" => Ok(Num::Float(f64::NEG_INFINITY)),
                    _ => parse_rational(v).map(Num::Exact).map_err(E::custom),
                }
            }
        }

        d.deserialize_any(NumVisitor)
    }
}

fn parse_orientation(s: &str) -> Result<Orientation> {
    match s {
        "max" | "maximize" => Ok(Orientation::Maximize),
        "min" | "minimize" => Ok(Orientation::Minimize),
        other => bail!("unknown orientation {other:?}"),
    }
}

fn orientation_name(o: Orientation) -> &'static str {
    match o {
        Orientation::Maximize => "max",
        Orientation::Minimize => "min",
    }
}

fn matrix_to_rows(m: &RatMatrix) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(format_rational).collect()).collect()
}

fn rows_to_matrix(rows: &[Vec<String>]) -> Result<RatMatrix> {
    let parsed = rows
        .iter()
        .map(|r| r.iter().map(|s| parse_rational(s).map_err(Into::into)).collect::<Result<Vec<Q>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(RatMatrix::from_rows(parsed)?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyEntry {
    pub i: usize,
    pub j: usize,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Payoff {
    /// One flat tensor per player, row-major with the last player fastest.
    Tensor(Vec<Vec<String>>),
    Polymatrix(Vec<PolyEntry>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub players: usize,
    pub action_counts: Vec<usize>,
    pub orientation: Vec<String>,
    pub payoff: Payoff,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub team_partition: Option<[Vec<usize>; 2]>,
}

/// A game read from disk in whichever representation the file used.
#[derive(Clone, Debug)]
pub enum LoadedGame {
    Normal(NormalFormGame),
    Poly(PolymatrixGame),
}

impl LoadedGame {
    pub fn as_game(&self) -> &dyn Game {
        match self {
            LoadedGame::Normal(g) => g,
            LoadedGame::Poly(g) => g,
        }
    }

    /// The two-player view (R, C) with orientations; only for tensor games with two players.
    pub fn bimatrix(&self) -> Result<BimatrixGame> {
        let LoadedGame::Normal(g) = self else { bail!("expected a two-player tensor game") };
        let counts = g.action_counts();
        ensure!(counts.len() == 2, "expected a two-player game, found {} players", counts.len());
        let (r, c) = (counts[0], counts[1]);
        let r_m = RatMatrix::new(r, c, g.tensor(0).to_vec())?;
        let c_m = RatMatrix::new(r, c, g.tensor(1).to_vec())?;
        Ok(BimatrixGame::with_orientation(r_m, c_m, [g.orientation(0), g.orientation(1)])?)
    }

    /// The row player's matrix of a two-player tensor game.
    pub fn row_matrix(&self) -> Result<RatMatrix> {
        Ok(self.bimatrix()?.row_matrix().clone())
    }
}

impl GameFile {
    pub fn from_bimatrix(g: &BimatrixGame) -> Self {
        let counts = g.action_counts();
        GameFile {
            players: 2,
            action_counts: counts,
            orientation: (0..2).map(|p| orientation_name(g.orientation(p)).to_string()).collect(),
            payoff: Payoff::Tensor(
                [g.row_matrix(), g.col_matrix()]
                    .iter()
                    .map(|m| m.entries().iter().map(format_rational).collect())
                    .collect(),
            ),
            team_partition: None,
        }
    }

    /// Symmetric game (A, A) with both players sharing `orientation`.
    pub fn identical(a: &RatMatrix, orientation: Orientation) -> Result<Self> {
        Ok(Self::from_bimatrix(&BimatrixGame::identical(a.clone(), orientation)?))
    }

    pub fn from_normal(g: &NormalFormGame) -> Self {
        let players = g.num_players();
        GameFile {
            players,
            action_counts: g.action_counts(),
            orientation: g.orientations().iter().map(|o| orientation_name(*o).to_string()).collect(),
            payoff: Payoff::Tensor(
                (0..players).map(|p| g.tensor(p).iter().map(format_rational).collect()).collect(),
            ),
            team_partition: g.team_partition().map(|t| [t.first.clone(), t.second.clone()]),
        }
    }

    pub fn from_polymatrix(g: &PolymatrixGame) -> Self {
        GameFile {
            players: g.num_players(),
            action_counts: g.action_counts(),
            orientation: g.orientations().iter().map(|o| orientation_name(*o).to_string()).collect(),
            payoff: Payoff::Polymatrix(
                g.terms().iter().map(|t| PolyEntry { i: t.i, j: t.j, matrix: matrix_to_rows(&t.matrix) }).collect(),
            ),
            team_partition: g.team_partition().map(|t| [t.first.clone(), t.second.clone()]),
        }
    }

    pub fn load(&self) -> Result<LoadedGame> {
        ensure!(
            self.players == self.action_counts.len(),
            "players = {} but {} action counts",
            self.players,
            self.action_counts.len()
        );
        let orientation = self.orientation.iter().map(|s| parse_orientation(s)).collect::<Result<Vec<_>>>()?;
        let team = match &self.team_partition {
            Some([a, b]) => Some(TeamPartition::new(a.clone(), b.clone(), self.players)?),
            None => None,
        };
        Ok(match &self.payoff {
            Payoff::Tensor(ts) => {
                let tensors = ts
                    .iter()
                    .map(|t| t.iter().map(|s| parse_rational(s).map_err(Into::into)).collect::<Result<Vec<Q>>>())
                    .collect::<Result<Vec<_>>>()?;
                LoadedGame::Normal(NormalFormGame::new(self.action_counts.clone(), tensors, orientation, team)?)
            }
            Payoff::Polymatrix(entries) => {
                let terms = entries
                    .iter()
                    .map(|e| Ok(PairTerm { i: e.i, j: e.j, matrix: rows_to_matrix(&e.matrix)? }))
                    .collect::<Result<Vec<_>>>()?;
                LoadedGame::Poly(PolymatrixGame::new(self.action_counts.clone(), orientation, terms, team)?)
            }
        })
    }
}

pub fn parse_game(text: &str) -> Result<LoadedGame> {
    let file: GameFile = serde_json::from_str(text).context("malformed game file")?;
    file.load()
}

pub fn write_game(file: &GameFile) -> Result<String> {
    Ok(serde_json::to_string_pretty(file)?)
}

/// Edge list: header "n <count>", then one "i j" pair per line, 1-indexed. '#' starts a comment.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| anyhow!("empty graph file"))?;
    let mut it = header.split_whitespace();
    ensure!(it.next() == Some("n"), "graph file must start with \"n <count>\"");
    let n: usize = it.next().ok_or_else(|| anyhow!("missing vertex count"))?.parse().context("bad vertex count")?;
    ensure!(it.next().is_none(), "trailing text in header");
    let mut edges = Vec::new();
    for line in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        ensure!(parts.len() == 2, "bad edge line {line:?}");
        let i: usize = parts[0].parse().with_context(|| format!("bad vertex in {line:?}"))?;
        let j: usize = parts[1].parse().with_context(|| format!("bad vertex in {line:?}"))?;
        ensure!(i >= 1 && j >= 1 && i <= n && j <= n, "vertex out of range 1..={n} in {line:?}");
        edges.push((i - 1, j - 1));
    }
    Ok(Graph::new(n, edges)?)
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("n {}\n", g.n());
    for (i, j) in g.edges() {
        out.push_str(&format!("{} {}\n", i + 1, j + 1));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileFile {
    pub strategies: Vec<Vec<Num>>,
}

impl ProfileFile {
    pub fn from_profile(p: &MixedProfile) -> Self {
        ProfileFile {
            strategies: p.strategies().iter().map(|s| s.probs().iter().map(|&v| Num::Float(v)).collect()).collect(),
        }
    }

    pub fn from_exact(strategies: &[Vec<Q>]) -> Self {
        ProfileFile { strategies: strategies.iter().map(|s| s.iter().cloned().map(Num::Exact).collect()).collect() }
    }

    pub fn to_profile(&self) -> Result<MixedProfile> {
        let vecs = self.strategies.iter().map(|s| s.iter().map(Num::to_f64).collect()).collect();
        Ok(MixedProfile::from_vecs(vecs)?)
    }

    pub fn to_exact(&self) -> Result<Vec<Vec<Q>>> {
        self.strategies.iter().map(|s| s.iter().map(Num::to_exact).collect()).collect()
    }

    pub fn strategy(&self, i: usize) -> Result<MixedStrategy> {
        let s = self.strategies.get(i).ok_or_else(|| anyhow!("profile has no strategy {i}"))?;
        Ok(MixedStrategy::new(s.iter().map(Num::to_f64).collect())?)
    }
}

pub fn parse_profile(text: &str) -> Result<ProfileFile> {
    serde_json::from_str(text).context("malformed profile file")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainSpec {
    Simplices,
    Joint { delta: f64 },
}

/// min_x max_y ½xᵀQ_x x − ½yᵀQ_y y + yᵀMx, as stored on disk.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub qx: Vec<Vec<String>>,
    pub qy: Vec<Vec<String>>,
    pub m: Vec<Vec<String>>,
    pub domain: DomainSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothness: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<f64>,
}

impl ProblemFile {
    pub fn from_problem(p: &QuadraticMinMaxProblem) -> Self {
        ProblemFile {
            qx: matrix_to_rows(p.qx()),
            qy: matrix_to_rows(p.qy()),
            m: matrix_to_rows(p.m()),
            domain: match p.domain() {
                Domain::SimplexProduct { .. } => DomainSpec::Simplices,
                Domain::Joint(d) => DomainSpec::Joint { delta: d.delta },
            },
            smoothness: p.recorded_smoothness(),
            lipschitz: p.recorded_lipschitz(),
        }
    }

    pub fn load(&self) -> Result<QuadraticMinMaxProblem> {
        let (qx, qy, m) = (rows_to_matrix(&self.qx)?, rows_to_matrix(&self.qy)?, rows_to_matrix(&self.m)?);
        let domain = match self.domain {
            DomainSpec::Simplices => Domain::SimplexProduct { nx: qx.rows(), ny: qy.rows() },
            DomainSpec::Joint { delta } => Domain::Joint(JointDomain::new(qx.rows(), delta)?),
        };
        let mut p = QuadraticMinMaxProblem::new(qx, qy, m, domain)?;
        match (self.smoothness, self.lipschitz) {
            (Some(l), Some(g)) => p = p.with_bounds(l, g),
            (None, None) => {}
            _ => bail!("smoothness and lipschitz must be given together"),
        }
        Ok(p)
    }
}

pub fn parse_problem(text: &str) -> Result<QuadraticMinMaxProblem> {
    let file: ProblemFile = serde_json::from_str(text).context("malformed problem file")?;
    file.load()
}

pub const TRAJECTORY_HEADER: &str = "t,gap,drift,utility";

pub fn write_trajectory(t: &Trajectory) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for i in 0..t.len() {
        out.push_str(&format!("{},{},{},{}\n", i + 1, t.gaps[i], t.drifts[i], t.utilities[i]));
    }
    out
}

/// Rows (t, gap, drift, utility) of a trajectory file.
pub fn parse_trajectory(text: &str) -> Result<Vec<(usize, f64, f64, f64)>> {
    let mut lines = text.lines();
    ensure!(lines.next() == Some(TRAJECTORY_HEADER), "missing trajectory header");
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            ensure!(f.len() == 4, "bad trajectory row {l:?}");
            Ok((f[0].parse()?, f[1].parse()?, f[2].parse()?, f[3].parse()?))
        })
        .collect()
}
