#pragma once

#include "relaysim/csv.hpp"
#include "relaysim/experiment.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace relaysim {

/// Full-size frames carry 64,800 information bits.
inline constexpr std::size_t kFrameBits = 64'800;
/// Fixed frame count of the full-size runs.
inline constexpr std::uint64_t kReferenceFrames = 2000;

/// Desk scale divides the frame length by this factor (1000 BPSK symbols)
/// and the bit cap by kDeskBitFactor, and halves the error target.
inline constexpr double kDeskFrameFactor = 64.8;
inline constexpr std::uint64_t kDeskBitFactor = 100;

struct RecipeOptions {
    bool desk_scale = false;
    /// Run exactly kReferenceFrames frames per point instead of the stop rule.
    bool fixed_frames = false;
};

/// Figure ids fig3, fig4, fig5, fig8. Coded-system figures (fig6, fig7,
/// fig9, fig10) throw ConfigError as out of scope.
ExperimentSpec figure_recipe(std::string_view name, const RecipeOptions& options = {});

std::vector<std::string> figure_ids();

/// Closed-form curves that accompany the schemes of `spec`, one per distinct
/// formula, over the spec's SNR grid.
std::vector<AnalyticPoint> analytic_curves(const ExperimentSpec& spec);

} // namespace relaysim
