use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use fracfib::enumerator::{Strategy, DEFAULT_MAX_COSETS};
use fracfib::Exec;
use fracfib_cli::commands::{self, CertKind, SweepBounds};
use fracfib_cli::group::GroupDesc;
use fracfib_cli::reproduce::{cmd_reproduce_paper, Hooks, ReproduceOptions};
use fracfib_cli::RunReport;

/// Computations with Fractional Fibonacci groups.
#[derive(Parser)]
#[command(name = "fracfib", version)]
struct Cli {
    /// Emit one JSON record per line instead of a table.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GroupArgs {
    /// `F n k l [omega]`, `E n k l`, `G n l`, or a presentation file.
    #[arg(required = true, num_args = 1.., allow_negative_numbers = true)]
    group: Vec<String>,
    /// Power relators x_i^omega for the `F` form.
    #[arg(long)]
    omega: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Abelianisation order by formula, Smith normal form and circulant resultant.
    Ab {
        n: usize,
        #[arg(allow_negative_numbers = true)]
        k: i64,
        #[arg(allow_negative_numbers = true)]
        l: i64,
        #[arg(long, default_value_t = 0)]
        omega: u64,
    },
    /// The terms V_1 .. V_n.
    Vseq { n: u32, k: u64, l: u64 },
    /// Coset enumeration.
    Enumerate {
        #[command(flatten)]
        group: GroupArgs,
        /// Subgroup generator, in the group's generator names (repeatable).
        #[arg(long)]
        subgroup: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_MAX_COSETS)]
        max_cosets: usize,
        #[arg(long, default_value = "hlt")]
        strategy: Strategy,
        /// Write the coset table as JSON.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Order, fingerprint and torsion-word order of a finite group.
    Analyze {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = DEFAULT_MAX_COSETS)]
        max_cosets: usize,
        #[arg(long, default_value = "hlt")]
        strategy: Strategy,
    },
    /// Generate and check a rewriting certificate, or check one from a file.
    Certify {
        #[arg(required_unless_present = "check")]
        n: Option<usize>,
        #[arg(required_unless_present = "check")]
        k: Option<i64>,
        #[arg(required_unless_present = "check")]
        l: Option<i64>,
        /// `square` or `commutator`.
        #[arg(long, default_value = "square")]
        which: CertKind,
        /// Write the certificate as JSON.
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Check a certificate file instead of generating one.
        #[arg(long, conflicts_with_all = ["n", "emit"])]
        check: Option<PathBuf>,
    },
    /// Conjugacy classes of subgroups of small index.
    LowIndex {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        max_index: usize,
        #[arg(long, default_value = "parallel")]
        exec: ExecArg,
    },
    /// Parameter sweeps over the sequence V and the certificates.
    Sweep {
        /// One of the sweep names, or `all`.
        #[arg(default_value = "all")]
        which: String,
        #[arg(long)]
        max_n: Option<u32>,
        #[arg(long)]
        max_kl: Option<u64>,
        #[arg(long, default_value = "parallel")]
        exec: ExecArg,
    },
    /// Re-derive every published value and report pass or fail for each.
    ReproducePaper {
        #[arg(long, default_value_t = DEFAULT_MAX_COSETS)]
        max_cosets: usize,
        /// Only items whose name contains this text.
        #[arg(long)]
        only: Option<String>,
        #[arg(long, default_value = "parallel")]
        exec: ExecArg,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ExecArg {
    Sequential,
    Parallel,
}

impl From<ExecArg> for Exec {
    fn from(e: ExecArg) -> Exec {
        match e {
            ExecArg::Sequential => Exec::Sequential,
            ExecArg::Parallel => Exec::Parallel,
        }
    }
}

fn dispatch(command: Command) -> Result<RunReport> {
    Ok(match command {
        Command::Ab { n, k, l, omega } => commands::cmd_ab(n, k, l, omega),
        Command::Vseq { n, k, l } => commands::cmd_vseq(n, k, l)?,
        Command::Enumerate {
            group,
            subgroup,
            max_cosets,
            strategy,
            emit,
        } => {
            let desc = GroupDesc::parse(&group.group, group.omega)?;
            commands::cmd_enumerate(&desc, &subgroup, max_cosets, strategy, emit.as_deref())?
        }
        Command::Analyze {
            group,
            max_cosets,
            strategy,
        } => {
            let desc = GroupDesc::parse(&group.group, group.omega)?;
            commands::cmd_analyze(&desc, max_cosets, strategy)?
        }
        Command::Certify {
            n,
            k,
            l,
            which,
            emit,
            check,
        } => match (check, n, k, l) {
            (Some(path), ..) => commands::cmd_check_certificate(&path)?,
            (None, Some(n), Some(k), Some(l)) => commands::cmd_certify(n, k, l, which, emit.as_deref())?,
            _ => anyhow::bail!("certify needs n k l or --check FILE"),
        },
        Command::LowIndex {
            group,
            max_index,
            exec,
        } => {
            let desc = GroupDesc::parse(&group.group, group.omega)?;
            commands::cmd_low_index(&desc, max_index, exec.into())?
        }
        Command::Sweep {
            which,
            max_n,
            max_kl,
            exec,
        } => commands::cmd_sweep(&which, SweepBounds { max_n, max_kl }, exec.into())?,
        Command::ReproducePaper {
            max_cosets,
            only,
            exec,
        } => {
            let opts = ReproduceOptions {
                max_cosets,
                only,
                exec: exec.into(),
            };
            cmd_reproduce_paper(&opts, Hooks::default())
        }
    })
}

fn main() -> ExitCode {
    // Exit code 2 means "inconclusive", so usage errors exit with 1.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(u8::from(e.use_stderr()));
        }
    };
    match dispatch(cli.command) {
        Ok(report) => {
            let text = if cli.json {
                report.to_json_lines()
            } else {
                report.to_table()
            };
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(text.as_bytes());
            let _ = out.flush();
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
