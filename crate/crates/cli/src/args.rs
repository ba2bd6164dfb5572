use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spinorbit::angle::parse_angle;
use spinorbit::chsh::AngleGrid;
use spinorbit::experiment::AnalyzerScheme;

/// Angles accept `pi/2`, `-pi`, `0.75pi`, plain radians or `22.5deg`.
fn angle(text: &str) -> Result<f64, String> {
    parse_angle(text).map_err(|e| e.to_string())
}

fn grid(text: &str) -> Result<AngleGrid, String> {
    text.parse().map_err(|e: spinorbit::chsh::ChshError| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "spinorbit", version, about = "Single-photon spin-orbit CHSH simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the CHSH parameter S exactly or by sampling.
    Chsh(ChshArgs),
    /// Sweep χ_A at fixed χ_B and write probabilities and counts as CSV.
    Sweep(SweepArgs),
    /// Maximize S over noncontextual assignments and compare with the quantum value.
    Nchv(NchvArgs),
    /// Sample a q-plate's optical-axis pattern to CSV.
    Field(FieldArgs),
    /// Compile and run a bench file at one analyzer setting.
    Run(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Montecarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    Projector,
    Interferometer,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Projector => "projector",
            Scheme::Interferometer => "interferometer",
        }
    }
}

impl From<Scheme> for AnalyzerScheme {
    fn from(s: Scheme) -> Self {
        match s {
            Scheme::Projector => AnalyzerScheme::Projector,
            Scheme::Interferometer => AnalyzerScheme::Interferometer,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct PlateArgs {
    /// Topological charge q of Bob's q-plate (2q must be an integer).
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub q: f64,
    /// Axis offset α₀ of the q-plate.
    #[arg(long, default_value = "0", value_parser = angle, allow_hyphen_values = true)]
    pub alpha0: f64,
    /// Analyzer model.
    #[arg(long, value_enum, default_value_t = Scheme::Projector)]
    pub scheme: Scheme,
}

#[derive(Debug, Clone, Args)]
pub struct SeedArgs {
    /// Base RNG seed.
    #[arg(long, env = "SPINORBIT_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ChshArgs {
    #[arg(long = "chi-a", default_value = "pi/2", value_parser = angle, allow_hyphen_values = true)]
    pub chi_a: f64,
    #[arg(long = "chi-a-prime", default_value = "-pi", value_parser = angle, allow_hyphen_values = true)]
    pub chi_a_prime: f64,
    #[arg(long = "chi-b", default_value = "pi/4", value_parser = angle, allow_hyphen_values = true)]
    pub chi_b: f64,
    #[arg(long = "chi-b-prime", default_value = "-pi/4", value_parser = angle, allow_hyphen_values = true)]
    pub chi_b_prime: f64,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    /// Shots per setting; required for montecarlo.
    #[arg(long, required_if_eq("mode", "montecarlo"))]
    pub shots: Option<u64>,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    pub plate: PlateArgs,
    /// Disable data parallelism.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long = "chi-b", default_value = "pi/4", value_parser = angle, allow_hyphen_values = true)]
    pub chi_b: f64,
    /// χ_A grid `start:stop:points`, half-open; append `:closed` to include stop.
    #[arg(long, default_value = "-pi:pi:64", value_parser = grid, allow_hyphen_values = true)]
    pub grid: AngleGrid,
    /// Shots per grid point; 0 writes exact columns only.
    #[arg(long, default_value_t = 0)]
    pub shots: u64,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    pub plate: PlateArgs,
    /// Output CSV path; the manifest goes to `<out>.manifest.json`.
    #[arg(long)]
    pub out: PathBuf,
    /// Disable data parallelism.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Args)]
pub struct NchvArgs {
    #[arg(long = "chi-a", default_value = "pi/2", value_parser = angle, allow_hyphen_values = true)]
    pub chi_a: f64,
    #[arg(long = "chi-a-prime", default_value = "-pi", value_parser = angle, allow_hyphen_values = true)]
    pub chi_a_prime: f64,
    #[arg(long = "chi-b", default_value = "pi/4", value_parser = angle, allow_hyphen_values = true)]
    pub chi_b: f64,
    #[arg(long = "chi-b-prime", default_value = "-pi/4", value_parser = angle, allow_hyphen_values = true)]
    pub chi_b_prime: f64,
    /// Also evaluate this many random settings drawn from the seed.
    #[arg(long, default_value_t = 0)]
    pub random: u32,
    #[command(flatten)]
    pub seed: SeedArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FieldArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub q: f64,
    #[arg(long, default_value = "0", value_parser = angle, allow_hyphen_values = true)]
    pub alpha0: f64,
    /// Radial samples over (0, 1].
    #[arg(long = "n-r", default_value_t = 8)]
    pub n_r: usize,
    /// Azimuthal samples over [0, 2π).
    #[arg(long = "n-phi", default_value_t = 72)]
    pub n_phi: usize,
    /// Output CSV path; the manifest goes to `<out>.manifest.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    pub bench: PathBuf,
    #[arg(long = "chi-a", value_parser = angle, allow_hyphen_values = true)]
    pub chi_a: f64,
    #[arg(long = "chi-b", value_parser = angle, allow_hyphen_values = true)]
    pub chi_b: f64,
    /// Sample this many detections in addition to the exact probabilities.
    #[arg(long)]
    pub shots: Option<u64>,
    #[command(flatten)]
    pub seed: SeedArgs,
    /// Override the bench's analyzer model.
    #[arg(long, value_enum)]
    pub scheme: Option<Scheme>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn negative_angles_parse_as_values() {
        let cli = Cli::try_parse_from(["spinorbit", "chsh", "--chi-a", "-pi", "--chi-b", "22.5deg"]).unwrap();
        let Command::Chsh(a) = cli.command else {
            panic!("wrong command")
        };
        assert_eq!(a.chi_a, -PI);
        assert!((a.chi_b - PI / 8.0).abs() < 1e-15);
        assert_eq!(a.chi_a_prime, -PI);
    }

    #[test]
    fn montecarlo_requires_shots() {
        assert!(Cli::try_parse_from(["spinorbit", "chsh", "--mode", "montecarlo"]).is_err());
        assert!(Cli::try_parse_from(["spinorbit", "chsh", "--mode", "montecarlo", "--shots", "10"]).is_ok());
    }

    #[test]
    fn default_grid_is_half_open() {
        let cli = Cli::try_parse_from(["spinorbit", "sweep", "--out", "x.csv"]).unwrap();
        let Command::Sweep(a) = cli.command else {
            panic!("wrong command")
        };
        let v = a.grid.values();
        assert_eq!(v.len(), 64);
        assert_eq!(v[0], -PI);
        assert!(v.iter().any(|x| (x - FRAC_PI_2).abs() < 1e-15));
    }
}
