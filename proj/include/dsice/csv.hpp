#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dsice/climate.hpp"

namespace dsice {

// Numeric CSV with a header row; '#' lines are comments. Columns are returned
// in the order of `columns`; extra columns are ignored. Errors name line and column.
std::vector<std::vector<double>> read_csv(const std::string& path, const std::vector<std::string>& columns);

// `t,M_AT,M_UO,M_LO,T_AT,T_OC` rows at t = 0, stride, ..., last_year with none missing.
DecadalTargets read_targets(const std::string& path, int last_year = 500, int stride = 10);
void write_targets(const DecadalTargets& d, const std::string& path);

// `t,E` points, sorted and starting at t = 0.
std::vector<std::pair<double, double>> read_emissions(const std::string& path);

}  // namespace dsice
