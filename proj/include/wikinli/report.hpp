#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wikinli/classifier.hpp"

namespace wikinli {

std::string learning_curve_csv(const std::vector<CurveRow>& rows);
std::vector<CurveRow> parse_learning_curve_csv(const std::filesystem::path& file);

// Self-contained SVG, fraction on the x axis and accuracy on the y axis,
// one polyline per train/dev/test series. No timestamps or other
// run-varying content, so regenerated files are byte-identical.
std::string learning_curve_svg(const std::vector<CurveRow>& rows);

void write_text_file(const std::filesystem::path& file, const std::string& content);

}  // namespace wikinli
