#pragma once

#include <string>
#include <vector>

namespace hallmhd {

// shortest round-trip style formatting used for all numeric output
std::string format_g17(double v);

// comma-separated file with one header row
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace hallmhd
