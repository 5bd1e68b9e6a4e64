#include "copmark/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "copmark/rng.hpp"

namespace copmark {

namespace {

void require_times(const std::vector<double>& times) {
    if (times.empty()) throw std::invalid_argument("simulate: times must be non-empty");
    double prev = -1.0;
    for (double t : times) {
        if (!(t >= 0.0) || !std::isfinite(t))
            throw std::invalid_argument("simulate: times must be finite and >= 0");
        if (t <= prev) throw std::invalid_argument("simulate: times must be strictly increasing");
        prev = t;
    }
}

void check_config(const SimConfig& cfg) {
    if (cfg.n_paths < 1) throw std::invalid_argument("simulate: n_paths must be >= 1");
    if (cfg.x0 && !(*cfg.x0 >= 0.0 && *cfg.x0 <= 1.0))
        throw std::invalid_argument("simulate: fixed initial value must lie in [0, 1]");
}

// Runs body(path_index) over [0, n_paths) with rows partitioned across
// workers; each path writes only its own slot, so scheduling cannot reorder
// results.
void run_paths(int64_t n_paths, int workers, const std::function<void(int64_t)>& body) {
    workers = static_cast<int>(std::max<int64_t>(1, std::min<int64_t>(workers, n_paths)));
    if (workers == 1) {
        for (int64_t p = 0; p < n_paths; ++p) body(p);
        return;
    }
    std::vector<std::thread> pool;
    const int64_t chunk = (n_paths + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int64_t lo = w * chunk;
        const int64_t hi = std::min(n_paths, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            for (int64_t p = lo; p < hi; ++p) body(p);
        });
    }
    for (auto& t : pool) t.join();
}

struct Event {
    double time;
    bool restart;  // false = switch
};

}  // namespace

std::vector<PathSample> simulate_chain(const ClosedCopula& c, int length, const SimConfig& cfg,
                                       int workers) {
    if (length < 1) throw std::invalid_argument("simulate_chain: length must be >= 1");
    check_config(cfg);
    std::vector<PathSample> out(static_cast<size_t>(cfg.n_paths));
    run_paths(cfg.n_paths, workers, [&](int64_t p) {
        PathRng rng(cfg.seed, static_cast<uint64_t>(p));
        PathSample& path = out[static_cast<size_t>(p)];
        path.path_id = p;
        path.times.resize(static_cast<size_t>(length) + 1);
        path.values.resize(static_cast<size_t>(length) + 1);
        double x = cfg.x0 ? *cfg.x0 : rng.uniform();
        path.times[0] = 0.0;
        path.values[0] = x;
        for (int k = 1; k <= length; ++k) {
            x = c.transition(x, rng.uniform());
            path.times[static_cast<size_t>(k)] = static_cast<double>(k);
            path.values[static_cast<size_t>(k)] = x;
        }
    });
    return out;
}

std::vector<PathSample> simulate_frechet_process(const HomFrechetFamily& fam,
                                                 const std::vector<double>& times,
                                                 const SimConfig& cfg, int workers) {
    require_times(times);
    check_config(cfg);
    if (!(fam.restart_rate >= 0.0 && fam.switch_rate >= 0.0))
        throw std::invalid_argument("simulate: rates must be >= 0");
    const double horizon = times.back();
    std::vector<PathSample> out(static_cast<size_t>(cfg.n_paths));

    run_paths(cfg.n_paths, workers, [&](int64_t p) {
        PathRng rng(cfg.seed, static_cast<uint64_t>(p));
        PathSample& path = out[static_cast<size_t>(p)];
        path.path_id = p;
        path.times = times;
        path.values.resize(times.size());
        const double u0 = cfg.x0 ? *cfg.x0 : rng.uniform();

        if (fam.restart_mode == EventMode::instant) {
            // Any two distinct times are independent; switches cannot change
            // that (a flipped fresh uniform is still uniform).
            for (size_t k = 0; k < times.size(); ++k)
                path.values[k] = times[k] == 0.0 ? u0 : rng.uniform();
            return;
        }

        const std::vector<double> restarts =
            rng.poisson_times(fam.restart_rate, 0.0, horizon);

        if (fam.switch_mode == EventMode::instant) {
            // Within a restart block the values are iid on {base, 1-base}.
            size_t next_restart = 0;
            double base = u0;
            for (size_t k = 0; k < times.size(); ++k) {
                while (next_restart < restarts.size() && restarts[next_restart] <= times[k]) {
                    base = rng.uniform();
                    ++next_restart;
                }
                if (times[k] == 0.0) path.values[k] = u0;
                else path.values[k] = rng.uniform() < 0.5 ? base : 1.0 - base;
            }
            return;
        }

        const std::vector<double> switches = rng.poisson_times(fam.switch_rate, 0.0, horizon);
        std::vector<Event> events;
        events.reserve(restarts.size() + switches.size());
        for (double t : restarts) events.push_back({t, true});
        for (double t : switches) events.push_back({t, false});
        std::sort(events.begin(), events.end(),
                  [](const Event& a, const Event& b) { return a.time < b.time; });

        double value = u0;
        size_t next_event = 0;
        for (size_t k = 0; k < times.size(); ++k) {
            while (next_event < events.size() && events[next_event].time <= times[k]) {
                value = events[next_event].restart ? rng.uniform() : 1.0 - value;
                ++next_event;
            }
            path.values[k] = value;
        }
    });
    return out;
}

std::vector<PathSample> simulate_frechet_process(const InhomFrechetFamily& fam,
                                                 const std::vector<double>& times,
                                                 const SimConfig& cfg, int workers) {
    require_times(times);
    check_config(cfg);
    if (!fam.restart_intensity.rate || !fam.switch_intensity.rate)
        throw std::invalid_argument("simulate: inhom family needs rate functions for thinning");
    const double horizon = times.back();
    std::vector<PathSample> out(static_cast<size_t>(cfg.n_paths));

    run_paths(cfg.n_paths, workers, [&](int64_t p) {
        PathRng rng(cfg.seed, static_cast<uint64_t>(p));
        PathSample& path = out[static_cast<size_t>(p)];
        path.path_id = p;
        path.times = times;
        path.values.resize(times.size());
        const double u0 = cfg.x0 ? *cfg.x0 : rng.uniform();

        auto merge_events = [&](std::vector<double> random_times,
                                const std::vector<double>& fixed) {
            for (double t : fixed)
                if (t > 0.0 && t <= horizon) random_times.push_back(t);
            std::sort(random_times.begin(), random_times.end());
            return random_times;
        };
        const std::vector<double> restarts = merge_events(
            rng.thinned_poisson_times([&](double t) { return fam.restart_intensity.rate(t); },
                                      fam.restart_intensity.rate_bound, 0.0, horizon),
            fam.restart_times);
        const std::vector<double> switches = merge_events(
            rng.thinned_poisson_times([&](double t) { return fam.switch_intensity.rate(t); },
                                      fam.switch_intensity.rate_bound, 0.0, horizon),
            fam.switch_times);

        std::vector<Event> events;
        events.reserve(restarts.size() + switches.size());
        for (double t : restarts) events.push_back({t, true});
        for (double t : switches) events.push_back({t, false});
        std::sort(events.begin(), events.end(),
                  [](const Event& a, const Event& b) { return a.time < b.time; });

        double value = u0;
        size_t next_event = 0;
        for (size_t k = 0; k < times.size(); ++k) {
            while (next_event < events.size() && events[next_event].time <= times[k]) {
                value = events[next_event].restart ? rng.uniform() : 1.0 - value;
                ++next_event;
            }
            path.values[k] = value;
        }
    });
    return out;
}

void write_paths_csv(std::ostream& out, const std::vector<PathSample>& paths) {
    out << "path_id,time,value\n";
    char buf[96];
    for (const auto& p : paths) {
        if (p.times.size() != p.values.size())
            throw std::invalid_argument("path CSV: times/values length mismatch");
        for (size_t k = 0; k < p.times.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g\n",
                          static_cast<long long>(p.path_id), p.times[k], p.values[k]);
            out << buf;
        }
    }
}

std::vector<PathSample> read_paths_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "path_id,time,value")
        throw std::runtime_error("path CSV: missing `path_id,time,value` header");
    std::vector<PathSample> paths;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string id_tok, t_tok, v_tok;
        if (!std::getline(ss, id_tok, ',') || !std::getline(ss, t_tok, ',') ||
            !std::getline(ss, v_tok))
            throw std::runtime_error("path CSV: malformed row");
        long long id = 0;
        double t = 0.0, v = 0.0;
        try {
            id = std::stoll(id_tok);
            t = std::stod(t_tok);
            v = std::stod(v_tok);
        } catch (const std::exception&) {
            throw std::runtime_error("path CSV: non-numeric field");
        }
        if (paths.empty() || paths.back().path_id != id) {
            paths.push_back(PathSample{id, {}, {}});
        }
        paths.back().times.push_back(t);
        paths.back().values.push_back(v);
    }
    if (paths.empty()) throw std::runtime_error("path CSV: no rows");
    return paths;
}

}  // namespace copmark
