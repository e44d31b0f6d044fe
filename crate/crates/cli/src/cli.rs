use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "geomtype", version, about = "Geometric types of Markov partitions")]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Seed for randomized commands. No command is randomized yet; accepted for scripting.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Top,
    Bottom,
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LayoutArg {
    Perron,
    Uniform,
}

/// `-` reads standard input.
pub type Input = PathBuf;

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the axioms of a geometric type. Exits 2 when they fail.
    Validate { file: Input },
    /// Print the canonical representative of the equivalence class.
    Canon { file: Input },
    /// Decide equivalence (or equality) of two types. Exits 1 when they differ.
    Equiv {
        a: Input,
        b: Input,
        /// Only allow relabelings, no orientation changes.
        #[arg(long)]
        equality: bool,
    },
    /// List every member of the equivalence class up to relabeling.
    Class { file: Input },
    /// Transition matrix, signed incidence matrix and expansion factor.
    Matrix { file: Input },
    /// Topological entropy of the symbolic system.
    Entropy { file: Input },
    /// Number of closed symbolic words of each period up to `--period`.
    Orbits {
        file: Input,
        #[arg(long, default_value_t = 6)]
        period: usize,
    },
    /// Place every rectangle and slot in the plane.
    Layout {
        file: Input,
        #[arg(long, value_enum, default_value_t = LayoutArg::Perron)]
        mode: LayoutArg,
    },
    /// Develop the lifted family around a rectangle and dump the patch.
    Cover {
        file: Input,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Type of the starting rectangle.
        #[arg(long = "type", default_value_t = 1)]
        ty: usize,
    },
    /// Arc points on one side of a rectangle, with both cycles around each.
    Arcpoints {
        file: Input,
        #[arg(long = "type", default_value_t = 1)]
        ty: usize,
        /// Explore this far before looking up `--rect`.
        #[arg(long, default_value_t = 0)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        rect: usize,
        #[arg(long, value_enum, default_value_t = SideArg::Top)]
        side: SideArg,
    },
    /// Reduce a closed rectangle path to the trivial path by B and C moves.
    ReducePath {
        file: Input,
        /// JSON array of `[rect-id, slot-label]` steps; the first slot is null.
        #[arg(long = "file")]
        path: PathBuf,
        #[arg(long = "type", default_value_t = 1)]
        ty: usize,
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
    /// Structural checks on each cycle of a `.gtc` file.
    CyclesCheck { file: Input },
    /// Decide equivalence of two types with cycles. Exits 1 when they differ.
    CyclesEquiv {
        a: Input,
        b: Input,
        /// Compare cycles step for step instead of up to rotation.
        #[arg(long)]
        raw: bool,
    },
    /// Prong data after surgery. `k` is normalized into 1..=n by k = ((k-1) mod n) + 1.
    Surgery {
        /// `n,k`
        #[arg(long, value_parser = parse_pair)]
        prongs: (i64, i64),
        /// `a,b,c,d` with ad - bc = 1
        #[arg(long, value_parser = parse_quad, allow_hyphen_values = true)]
        matrix: (i64, i64, i64, i64),
    },
}

fn ints(s: &str, want: usize) -> Result<Vec<i64>, String> {
    let v: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != want {
        return Err(format!("expected {want} comma-separated integers"));
    }
    Ok(v)
}

fn parse_pair(s: &str) -> Result<(i64, i64), String> {
    let v = ints(s, 2)?;
    Ok((v[0], v[1]))
}

fn parse_quad(s: &str) -> Result<(i64, i64, i64, i64), String> {
    let v = ints(s, 4)?;
    Ok((v[0], v[1], v[2], v[3]))
}
