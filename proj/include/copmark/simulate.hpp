#pragma once

// Seeded simulators for the processes behind each copula family.  Paths are
// independent work units on per-path RNG substreams; output is ordered by
// path_id and bitwise independent of the worker count.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "copmark/closed_copula.hpp"
#include "copmark/families.hpp"

namespace copmark {

struct PathSample {
    int64_t path_id = 0;
    std::vector<double> times;   // strictly increasing, >= 0
    std::vector<double> values;  // in [0,1], same length as times
};

struct SimConfig {
    uint64_t seed = 0;
    int64_t n_paths = 1;
    std::optional<double> x0;  // fixed initial value; empty means uniform
};

// Chain X_0, ..., X_length with X_{k+1} = transition(c, X_k, V_{k+1}); each
// path consumes its own substream (initial value first, then one uniform per
// step).  Pre: length >= 1.
std::vector<PathSample> simulate_chain(const ClosedCopula& c, int length, const SimConfig& cfg,
                                       int workers = 1);

// Restart/switch process sampled at the given times (strictly increasing,
// >= 0).  Per path, draw order is: initial value, restart events, switch
// events, then walk-time draws.
std::vector<PathSample> simulate_frechet_process(const HomFrechetFamily& fam,
                                                 const std::vector<double>& times,
                                                 const SimConfig& cfg, int workers = 1);
std::vector<PathSample> simulate_frechet_process(const InhomFrechetFamily& fam,
                                                 const std::vector<double>& times,
                                                 const SimConfig& cfg, int workers = 1);

// CSV: header `path_id,time,value`, one row per sample, 17 significant digits.
void write_paths_csv(std::ostream& out, const std::vector<PathSample>& paths);
std::vector<PathSample> read_paths_csv(std::istream& in);

}  // namespace copmark
