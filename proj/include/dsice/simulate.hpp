#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dsice/solver.hpp"
#include "dsice/stats.hpp"

namespace dsice {

struct PathRecord {
    int t = 0;
    State6 x{};
    double zeta = 1.0, chi = 0.0, J = 0.0;
    int iz = 0, ic = 0, iJ = 0;
    double C = 0.0, mu = 0.0, s = 0.0;
    double Y = 0.0, I = 0.0, Psi = 0.0;
    double L = 0.0;
    double scc = 0.0, tax = 0.0;
};

struct PathSet {
    int horizon = 0;
    int n_paths = 0;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::vector<std::vector<PathRecord>> paths;  // [path][t], shorter when aborted
    std::vector<int> aborted_at;                 // -1 when the path completed

    double abort_fraction() const;
    // Per-path series of a derived quantity; `fn` maps consecutive records (r, next or nullptr).
    template <class Fn>
    PathSeries series(Fn&& fn) const {
        PathSeries out(paths.size());
        for (std::size_t p = 0; p < paths.size(); ++p)
            for (std::size_t t = 0; t < paths[p].size(); ++t) {
                const PathRecord* next = t + 1 < paths[p].size() ? &paths[p][t + 1] : nullptr;
                const double v = fn(paths[p][t], next);
                if (std::isnan(v)) break;
                out[p].push_back(v);
            }
        return out;
    }
};

struct SimulateOptions {
    int n_paths = 1000;
    std::uint64_t seed = 0;
    Kernel kernel = Kernel::Parallel;
    int workers = 0;
};

PathSet simulate(const ModelConfig& cfg, const ProductivityChain& chain, const ValueTable& table,
                 const SimulateOptions& opts);

// Adds the states visited under the solved policy (random paths plus paths pinned to
// the extreme discrete states) to `env`. True when any of them lies outside its box.
bool policy_envelope(const ModelConfig& cfg, const ProductivityChain& chain, const ValueTable& table, int n_paths,
                     std::uint64_t seed, Envelope& env);

void write_paths_csv(const PathSet& ps, const std::string& path);
// Reads a paths CSV back; aborted paths come back shorter than the horizon.
PathSet read_paths_csv(const std::string& path);

// Growth rates and ratios used by the summary and the statistics command.
namespace series {
PathSeries consumption_growth(const PathSet& ps);  // per capita
PathSeries output_growth(const PathSet& ps);       // per capita
PathSeries log10_scc(const PathSet& ps);
PathSeries ratio_C_Y(const PathSet& ps);
PathSeries ratio_I_Y(const PathSet& ps);
PathSeries ratio_Psi_Y(const PathSet& ps);
PathSeries variable(const PathSet& ps, const std::string& name);
}  // namespace series

// Correlations of the growth rates of Y, C, I, Psi and SCC at `year`.
Correlation growth_correlations(const PathSet& ps, int year);

// Summary document (ArStats, fans, correlations, growth statistics) as JSON text.
std::string summary_json(const PathSet& ps, int stats_year, int ar_window);

}  // namespace dsice
