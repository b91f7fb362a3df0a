//! Leaderboards, manipulation search and report rendering.

mod game;
mod leaderboard;
mod report;
pub mod svg;

pub use game::{manipulation_search, rank_under, ManipulationFinding, Objective, SearchSpace};
pub use leaderboard::{annotate, build_leaderboard, LeaderboardEntry};
pub use report::{
    file_entry, heatmap_svg, leaderboard_csv, rank_quality_svg, rank_splits_svg, render_reports, shift_svg, FileEntry,
    FileManifest,
};

use crate::error::Result;
use crate::model::CorrectnessMatrix;
use crate::stats::StatsReport;

/// Annotated leaderboards for every condition of `matrix`, in condition order.
pub fn all_leaderboards(matrix: &CorrectnessMatrix, stats: &StatsReport) -> Result<Vec<LeaderboardEntry>> {
    let mut out = Vec::new();
    for c in matrix.conditions() {
        let mut entries = build_leaderboard(matrix, c)?;
        annotate(&mut entries, stats);
        out.extend(entries);
    }
    Ok(out)
}
