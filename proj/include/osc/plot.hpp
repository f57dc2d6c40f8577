#pragma once

#include <string>

#include "osc/csvio.hpp"

namespace osc {

enum class PlotKind { kDecay, kHeatmap };

PlotKind parse_plot_kind(const std::string& s);  // "decay" or "heatmap"; ConfigError otherwise

// The SVG embeds source_hash; identical inputs give identical bytes.
std::string decay_svg(const CsvTable& t, const std::string& source_hash);
std::string heatmap_svg(const CsvTable& t, const std::string& source_hash);

// Reads csv_path, renders, writes svg_path atomically. Returns the SVG text.
std::string plot_csv(const std::string& csv_path, PlotKind kind, const std::string& svg_path);

}  // namespace osc
