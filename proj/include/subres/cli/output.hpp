#pragma once

#include <string>
#include <vector>

#include "subres/cli/config.hpp"
#include "subres/resolvent.hpp"

namespace subres::cli {

/// Shortest round-trip decimal, '.' separator regardless of locale. NaN -> "nan".
std::string fmt(double v);

/// Provenance block embedded in every output.
json metadata(const std::string& command, const RunConfig& config);

/// Key-sorted, two-space indented UTF-8 JSON with a trailing newline.
void write_json(const std::string& path, const json& doc);

/// CSV with a leading '# ...' metadata line and a header row.
void write_csv(const std::string& path, const json& meta, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Sweep columns: re_z, im_z, h, sigma_min, resolvent_norm, in_region, converged.
std::vector<std::vector<std::string>> sweep_rows(const std::vector<Probe>& probes);
extern const std::vector<std::string> kSweepHeader;

struct PlotFrame {
    double re_min = -1.0, re_max = 1.0, im_min = -1.0, im_max = 1.0;
};

/// SVG 1.1 heatmap of log10 resolvent norm with the region boundary overlaid.
/// Rectangular sweeps become cells; other layouts become dots.
std::string sweep_svg(const std::vector<Probe>& probes, const RegionBoundary& boundary,
                      const PlotFrame& frame, int cells_re, int cells_im, const json& meta);

/// SVG 1.1 drawing of the region boundary alone.
std::string region_svg(const RegionBoundary& boundary, const PlotFrame& frame, const json& meta);

void write_text(const std::string& path, const std::string& text);

}  // namespace subres::cli
