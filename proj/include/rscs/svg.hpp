#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace rscs::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal self-contained SVG line chart. Derived artifact only: nothing
/// downstream reads these files back.
void write_line_chart(const std::filesystem::path& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series);

} // namespace rscs::svg
