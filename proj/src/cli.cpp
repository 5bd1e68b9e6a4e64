#include "copmark/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "copmark/analysis.hpp"
#include "copmark/closed_copula.hpp"
#include "copmark/families.hpp"
#include "copmark/generator.hpp"
#include "copmark/grid_copula.hpp"
#include "copmark/reflected_bm.hpp"
#include "copmark/rng.hpp"
#include "copmark/simulate.hpp"

namespace fs = std::filesystem;

namespace copmark {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDefect = 2;

// All output files go through a temp file renamed on success, so failures
// never leave partial artifacts behind.
void write_atomic(const fs::path& path, const std::function<void(std::ostream&)>& writer) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        writer(out);
        out.flush();
        if (!out.good()) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::vector<double> parse_double_list(const std::string& csv, const char* what) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            size_t used = 0;
            out.push_back(std::stod(tok, &used));
        } catch (const std::exception&) {
            throw std::runtime_error(std::string(what) + ": expected comma-separated numbers");
        }
    }
    if (out.empty()) throw std::runtime_error(std::string(what) + ": empty list");
    return out;
}

// A product/power operand: either a closed-form spec or `grid:<path>`.
struct Operand {
    std::optional<ClosedCopula> closed;
    std::optional<GridCopula> grid;
};

Operand parse_operand(const std::string& spec) {
    if (spec.rfind("grid:", 0) == 0) return {std::nullopt, GridCopula::load(spec.substr(5))};
    return {ClosedCopula::parse_spec(spec), std::nullopt};
}

GridCopula realize(const Operand& op, int n) {
    if (op.grid) {
        if (n != 0 && op.grid->n() != n)
            throw std::runtime_error("grid file resolution differs from --grid");
        return *op.grid;
    }
    if (n < 1) throw std::runtime_error("--grid is required for closed-form operands");
    return discretize(*op.closed, n);
}

struct GridFileStats {
    int n = 0;
    double worst_row = 0.0, worst_col = 0.0, total_defect = 0.0, most_negative = 0.0;
};

// Raw read without invariant enforcement, for `verify grid`.
GridFileStats scan_grid_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open grid file: " + path.string());
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("grid file: missing header line");
    GridFileStats st;
    if (std::sscanf(header.c_str(), "# gridcopula n=%d", &st.n) != 1 || st.n < 1)
        throw std::runtime_error("grid file: header must be `# gridcopula n=<N>`");
    const size_t n = static_cast<size_t>(st.n);
    std::vector<double> mass;
    mass.reserve(n * n);
    std::string line;
    for (size_t i = 0; i < n; ++i) {
        if (!std::getline(in, line))
            throw std::runtime_error("grid file: fewer rows than the header declares");
        std::stringstream ss(line);
        std::string tok;
        size_t cols = 0;
        while (std::getline(ss, tok, ',')) {
            try {
                size_t used = 0;
                mass.push_back(std::stod(tok, &used));
            } catch (const std::exception&) {
                throw std::runtime_error("grid file: non-numeric cell value");
            }
            ++cols;
        }
        if (cols != n) throw std::runtime_error("grid file: row width differs from header n");
    }
    const double target = 1.0 / st.n;
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double row = 0.0, col = 0.0;
        for (size_t j = 0; j < n; ++j) {
            row += mass[i * n + j];
            col += mass[j * n + i];
            st.most_negative = std::min(st.most_negative, mass[i * n + j]);
        }
        st.worst_row = std::max(st.worst_row, std::abs(row - target));
        st.worst_col = std::max(st.worst_col, std::abs(col - target));
        total += row;
    }
    st.total_defect = std::abs(total - 1.0);
    return st;
}

nlohmann::json load_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open JSON file: " + path.string());
    return nlohmann::json::parse(in);
}

void print_json(const nlohmann::json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        write_atomic(out_path, [&](std::ostream& out) { out << j.dump(2) << "\n"; });
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Markov products of copulas: grids, families, simulators, verifiers"};
    app.require_subcommand(1);

    int exit_code = kExitOk;

    // ---- product ----------------------------------------------------------
    auto* product = app.add_subcommand("product", "Markov product of two copulas");
    struct {
        std::string left, right, out;
        int grid = 0, workers = 1;
    } prod_opt;
    product->add_option("--left", prod_opt.left, "left operand (spec or grid:<path>)")->required();
    product->add_option("--right", prod_opt.right, "right operand")->required();
    product->add_option("--grid", prod_opt.grid, "resolution for closed-form operands");
    product->add_option("--out", prod_opt.out, "output grid file")->required();
    product->add_option("--workers", prod_opt.workers, "worker threads");
    product->callback([&] {
        const Operand left = parse_operand(prod_opt.left);
        const Operand right = parse_operand(prod_opt.right);
        int n = prod_opt.grid;
        if (n == 0 && left.grid) n = left.grid->n();
        if (n == 0 && right.grid) n = right.grid->n();
        const GridCopula result =
            markov_product(realize(left, n), realize(right, n), prod_opt.workers);
        write_atomic(prod_opt.out, [&](std::ostream& out) { result.save(out); });
        std::cout << "product: n=" << result.n() << " -> " << prod_opt.out << "\n";
    });

    // ---- power -------------------------------------------------------------
    auto* power = app.add_subcommand("power", "k-fold Markov product");
    struct {
        std::string copula, out;
        int k = 0, grid = 0, workers = 1;
    } pow_opt;
    power->add_option("--copula", pow_opt.copula, "operand (spec or grid:<path>)")->required();
    power->add_option("--k", pow_opt.k, "exponent, >= 0")->required();
    power->add_option("--grid", pow_opt.grid, "resolution for closed-form operands");
    power->add_option("--out", pow_opt.out, "output grid file")->required();
    power->add_option("--workers", pow_opt.workers, "worker threads");
    power->callback([&] {
        const Operand op = parse_operand(pow_opt.copula);
        int n = pow_opt.grid;
        if (n == 0 && op.grid) n = op.grid->n();
        const GridCopula result = grid_power(realize(op, n), pow_opt.k, pow_opt.workers);
        write_atomic(pow_opt.out, [&](std::ostream& out) { result.save(out); });
        std::cout << "power: n=" << result.n() << " k=" << pow_opt.k << " -> " << pow_opt.out
                  << "\n";
    });

    // ---- discretize ---------------------------------------------------------
    auto* disc = app.add_subcommand("discretize", "discretize a copula to a grid file");
    struct {
        std::string copula, process, out;
        int grid = 0;
        double t = 0.0, series_tol = 1e-12;
    } disc_opt;
    disc->add_option("--copula", disc_opt.copula, "closed-form copula spec");
    disc->add_option("--process", disc_opt.process, "process name (reflected-bm)");
    disc->add_option("--t", disc_opt.t, "lag for --process");
    disc->add_option("--series-tol", disc_opt.series_tol, "series tolerance for reflected-bm");
    disc->add_option("--grid", disc_opt.grid, "resolution")->required();
    disc->add_option("--out", disc_opt.out, "output grid file")->required();
    disc->callback([&] {
        if (disc_opt.copula.empty() == disc_opt.process.empty())
            throw std::runtime_error("discretize: give exactly one of --copula or --process");
        GridCopula result = GridCopula::independence(1);
        if (!disc_opt.copula.empty()) {
            result = discretize(ClosedCopula::parse_spec(disc_opt.copula), disc_opt.grid);
        } else if (disc_opt.process == "reflected-bm") {
            result = reflected_bm_grid({disc_opt.t, disc_opt.series_tol}, disc_opt.grid);
        } else {
            throw std::runtime_error("discretize: unknown process \"" + disc_opt.process + "\"");
        }
        write_atomic(disc_opt.out, [&](std::ostream& out) { result.save(out); });
        std::cout << "discretize: n=" << result.n() << " -> " << disc_opt.out << "\n";
    });

    // ---- family -------------------------------------------------------------
    auto* family = app.add_subcommand("family", "evaluate a copula family at given times");
    struct {
        std::string json_path, out;
        double s = 0.0, t = 0.0, tail_tol = 1e-10;
        int grid = 0, workers = 1;
    } fam_opt;
    family->add_option("--json", fam_opt.json_path, "family JSON file")->required();
    family->add_option("--t", fam_opt.t, "evaluation time")->required();
    family->add_option("--s", fam_opt.s, "start time (inhomogeneous families)");
    family->add_option("--tail-tol", fam_opt.tail_tol, "Poisson tail tolerance");
    family->add_option("--grid", fam_opt.grid, "also write a grid at this resolution");
    family->add_option("--out", fam_opt.out, "output grid file (with --grid or poisson-jump)");
    family->add_option("--workers", fam_opt.workers, "worker threads");
    family->callback([&] {
        const fs::path jpath = fam_opt.json_path;
        const CopulaFamily fam = family_from_json(load_json_file(jpath), jpath.parent_path());
        nlohmann::json info;
        std::optional<GridCopula> grid_out;
        if (const auto* hom = std::get_if<HomFrechetFamily>(&fam)) {
            const FrechetCoeffs c = hom->coeffs(fam_opt.t);
            info = {{"type", "hom-frechet"}, {"t", fam_opt.t},  {"alpha", c.alpha},
                    {"beta", c.beta},        {"rho", hom->rho(fam_opt.t)},
                    {"sigma", hom->sigma(fam_opt.t)}};
            if (fam_opt.grid > 0)
                grid_out = discretize(ClosedCopula::frechet(c.alpha, c.beta), fam_opt.grid);
        } else if (const auto* inhom = std::get_if<InhomFrechetFamily>(&fam)) {
            const FrechetCoeffs c = inhom->coeffs(fam_opt.s, fam_opt.t);
            info = {{"type", "inhom-frechet"},
                    {"s", fam_opt.s},
                    {"t", fam_opt.t},
                    {"alpha", c.alpha},
                    {"beta", c.beta}};
            if (fam_opt.grid > 0)
                grid_out = discretize(ClosedCopula::frechet(c.alpha, c.beta), fam_opt.grid);
        } else {
            const auto& pj = std::get<PoissonJumpFamily>(fam);
            grid_out = poisson_jump_copula(pj, fam_opt.t, fam_opt.tail_tol, fam_opt.workers);
            info = {{"type", "poisson-jump"},
                    {"t", fam_opt.t},
                    {"n", grid_out->n()},
                    {"tail_tol", fam_opt.tail_tol}};
        }
        if (grid_out) {
            if (fam_opt.out.empty())
                throw std::runtime_error("family: --out is required when a grid is produced");
            write_atomic(fam_opt.out, [&](std::ostream& out) { grid_out->save(out); });
            info["out"] = fam_opt.out;
        }
        std::cout << info.dump(2) << "\n";
    });

    // ---- simulate ------------------------------------------------------------
    auto* simulate = app.add_subcommand("simulate", "simulate seeded paths");
    struct {
        std::string copula, family_path, process, times_csv, out;
        uint64_t seed = 0;
        int64_t paths = 1;
        int steps = 0, workers = 1;
        double x0 = -1.0;
        bool has_x0 = false;
    } sim_opt;
    simulate->add_option("--copula", sim_opt.copula, "closed-form copula spec (chain mode)");
    simulate->add_option("--family", sim_opt.family_path, "family JSON file");
    simulate->add_option("--process", sim_opt.process, "process name (reflected-bm)");
    simulate->add_option("--steps", sim_opt.steps, "chain length (chain mode)");
    simulate->add_option("--times", sim_opt.times_csv, "comma-separated sample times");
    simulate->add_option("--paths", sim_opt.paths, "number of paths");
    simulate->add_option("--seed", sim_opt.seed, "root RNG seed (required: no wall-clock seeding)")
        ->required();
    simulate->add_option("--x0", sim_opt.x0, "fixed initial value in [0,1]")
        ->each([&](const std::string&) { sim_opt.has_x0 = true; });
    simulate->add_option("--out", sim_opt.out, "output path CSV")->required();
    simulate->add_option("--workers", sim_opt.workers, "worker threads");
    simulate->callback([&] {
        const int mode_count = (!sim_opt.copula.empty()) + (!sim_opt.family_path.empty()) +
                               (!sim_opt.process.empty());
        if (mode_count != 1)
            throw std::runtime_error(
                "simulate: give exactly one of --copula, --family, --process");
        SimConfig cfg;
        cfg.seed = sim_opt.seed;
        cfg.n_paths = sim_opt.paths;
        if (sim_opt.has_x0) cfg.x0 = sim_opt.x0;

        std::vector<PathSample> paths;
        if (!sim_opt.copula.empty()) {
            if (sim_opt.steps < 1)
                throw std::runtime_error("simulate: chain mode needs --steps >= 1");
            paths = simulate_chain(ClosedCopula::parse_spec(sim_opt.copula), sim_opt.steps, cfg,
                                   sim_opt.workers);
        } else {
            if (sim_opt.times_csv.empty())
                throw std::runtime_error("simulate: this mode needs --times");
            const std::vector<double> times = parse_double_list(sim_opt.times_csv, "--times");
            if (!sim_opt.process.empty()) {
                if (sim_opt.process != "reflected-bm")
                    throw std::runtime_error("simulate: unknown process \"" + sim_opt.process +
                                             "\"");
                paths = simulate_reflected_bm(times, cfg, sim_opt.workers);
            } else {
                const fs::path jpath = sim_opt.family_path;
                const CopulaFamily fam =
                    family_from_json(load_json_file(jpath), jpath.parent_path());
                if (const auto* hom = std::get_if<HomFrechetFamily>(&fam)) {
                    paths = simulate_frechet_process(*hom, times, cfg, sim_opt.workers);
                } else if (const auto* inhom = std::get_if<InhomFrechetFamily>(&fam)) {
                    paths = simulate_frechet_process(*inhom, times, cfg, sim_opt.workers);
                } else {
                    throw std::runtime_error(
                        "simulate: poisson-jump families have no path simulator");
                }
            }
        }
        write_atomic(sim_opt.out, [&](std::ostream& out) { write_paths_csv(out, paths); });
        std::cout << "simulate: " << paths.size() << " paths -> " << sim_opt.out << "\n";
    });

    // ---- verify ---------------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "verification suites");
    verify->require_subcommand(1);

    auto* vsemi = verify->add_subcommand("semigroup", "homogeneous Fréchet semigroup law");
    struct {
        std::string family = "hom-frechet";
        double lambda = 0.0, mu = 0.0, tol = 1e-12, horizon = 2.0;
        int pairs = 100;
        uint64_t seed = 0;
    } vs_opt;
    vsemi->add_option("--family", vs_opt.family, "family name (hom-frechet)");
    vsemi->add_option("--lambda", vs_opt.lambda, "restart rate");
    vsemi->add_option("--mu", vs_opt.mu, "switch rate");
    vsemi->add_option("--pairs", vs_opt.pairs, "number of random (s,t) pairs");
    vsemi->add_option("--tol", vs_opt.tol, "defect tolerance");
    vsemi->add_option("--horizon", vs_opt.horizon, "times drawn uniformly from [0, horizon]");
    vsemi->add_option("--seed", vs_opt.seed, "RNG seed (default 0, deterministic)");
    vsemi->callback([&] {
        if (vs_opt.family != "hom-frechet")
            throw std::runtime_error("verify semigroup: unknown family \"" + vs_opt.family + "\"");
        if (vs_opt.pairs < 1) throw std::runtime_error("verify semigroup: --pairs must be >= 1");
        const HomFrechetFamily fam{vs_opt.lambda, vs_opt.mu, EventMode::poisson,
                                   EventMode::poisson};
        PathRng rng(vs_opt.seed, 0);
        double worst = 0.0;
        for (int k = 0; k < vs_opt.pairs; ++k) {
            const double s = vs_opt.horizon * rng.uniform();
            const double t = vs_opt.horizon * rng.uniform();
            worst = std::max(worst, semigroup_check(fam, s, t));
        }
        std::printf("semigroup: max defect %.3e over %d pairs (tol %.3e)\n", worst, vs_opt.pairs,
                    vs_opt.tol);
        if (worst > vs_opt.tol) exit_code = kExitDefect;
    });

    auto* vgrid = verify->add_subcommand("grid", "grid file invariants");
    struct {
        std::string in;
        double tol = GridCopula::kInvariantTol;
    } vg_opt;
    vgrid->add_option("--in", vg_opt.in, "grid file")->required();
    vgrid->add_option("--tol", vg_opt.tol, "invariant tolerance");
    vgrid->callback([&] {
        const GridFileStats st = scan_grid_file(vg_opt.in);
        std::printf(
            "grid: n=%d row defect %.3e col defect %.3e total defect %.3e min entry %.3e\n", st.n,
            st.worst_row, st.worst_col, st.total_defect, st.most_negative);
        if (st.worst_row > vg_opt.tol || st.worst_col > vg_opt.tol ||
            st.total_defect > vg_opt.tol || st.most_negative < -vg_opt.tol)
            exit_code = kExitDefect;
    });

    auto* videm = verify->add_subcommand("idempotent", "idempotency defect of a grid");
    struct {
        std::string in;
        double tol = 1e-10;
        int workers = 1;
    } vi_opt;
    videm->add_option("--in", vi_opt.in, "grid file")->required();
    videm->add_option("--tol", vi_opt.tol, "defect tolerance");
    videm->add_option("--workers", vi_opt.workers, "worker threads");
    videm->callback([&] {
        const double defect = idempotency_defect(GridCopula::load(vi_opt.in), vi_opt.workers);
        std::printf("idempotent: defect %.3e (tol %.3e)\n", defect, vi_opt.tol);
        if (defect > vi_opt.tol) exit_code = kExitDefect;
    });

    auto* vinv = verify->add_subcommand("inverse", "left/right inverse defects of a grid");
    struct {
        std::string in;
        double right_tol = -1.0;
        int workers = 1;
    } vv_opt;
    vinv->add_option("--in", vv_opt.in, "grid file")->required();
    vinv->add_option("--right-tol", vv_opt.right_tol,
                     "fail (exit 2) when the right defect exceeds this");
    vinv->add_option("--workers", vv_opt.workers, "worker threads");
    vinv->callback([&] {
        const InverseDefect d = inverse_defect(GridCopula::load(vv_opt.in), vv_opt.workers);
        std::printf("inverse: left %.6e right %.6e\n", d.left, d.right);
        if (vv_opt.right_tol >= 0.0 && d.right > vv_opt.right_tol) exit_code = kExitDefect;
    });

    auto* vcons = verify->add_subcommand("consistency", "two-time consistency of a family JSON");
    struct {
        std::string json_path;
        double tol = 1e-12, horizon = 2.0;
        int triples = 100;
        uint64_t seed = 0;
    } vc_opt;
    vcons->add_option("--json", vc_opt.json_path, "family JSON file")->required();
    vcons->add_option("--triples", vc_opt.triples, "number of random (r,s,t) triples");
    vcons->add_option("--tol", vc_opt.tol, "defect tolerance");
    vcons->add_option("--horizon", vc_opt.horizon, "times drawn from [0, horizon]");
    vcons->add_option("--seed", vc_opt.seed, "RNG seed (default 0, deterministic)");
    vcons->callback([&] {
        const fs::path jpath = vc_opt.json_path;
        const CopulaFamily fam = family_from_json(load_json_file(jpath), jpath.parent_path());
        const auto* inhom = std::get_if<InhomFrechetFamily>(&fam);
        if (!inhom)
            throw std::runtime_error("verify consistency: needs an inhom-frechet family JSON");
        PathRng rng(vc_opt.seed, 0);
        double worst = 0.0;
        for (int k = 0; k < vc_opt.triples; ++k) {
            double a = vc_opt.horizon * rng.uniform();
            double b = vc_opt.horizon * rng.uniform();
            double c = vc_opt.horizon * rng.uniform();
            if (a > b) std::swap(a, b);
            if (b > c) std::swap(b, c);
            if (a > b) std::swap(a, b);
            worst = std::max(worst, two_time_consistency(*inhom, a, b, c));
        }
        std::printf("consistency: max defect %.3e over %d triples (tol %.3e)\n", worst,
                    vc_opt.triples, vc_opt.tol);
        if (worst > vc_opt.tol) exit_code = kExitDefect;
    });

    // ---- gap ---------------------------------------------------------------
    auto* gap = app.add_subcommand("gap", "Archimedean Markov-violation gap");
    struct {
        std::string generator, lattice_csv, out;
        double theta = 1.0, rate = 1.0;
    } gap_opt;
    gap->add_option("--generator", gap_opt.generator, "clayton | gumbel | exponential")
        ->required();
    gap->add_option("--theta", gap_opt.theta, "generator parameter (clayton/gumbel)");
    gap->add_option("--rate", gap_opt.rate, "rate (exponential)");
    gap->add_option("--lattice", gap_opt.lattice_csv, "comma-separated levels (default 0.5,1,2)");
    gap->add_option("--out", gap_opt.out, "write the JSON report here instead of stdout");
    gap->callback([&] {
        ArchimedeanGenerator gen;
        if (gap_opt.generator == "clayton") gen = clayton_generator(gap_opt.theta);
        else if (gap_opt.generator == "gumbel") gen = gumbel_generator(gap_opt.theta);
        else if (gap_opt.generator == "exponential") gen = exponential_generator(gap_opt.rate);
        else
            throw std::runtime_error("gap: unknown generator \"" + gap_opt.generator + "\"");
        std::vector<double> lattice = {0.5, 1.0, 2.0};
        if (!gap_opt.lattice_csv.empty())
            lattice = parse_double_list(gap_opt.lattice_csv, "--lattice");
        print_json(archimedean_gap(gen, lattice).to_json(), gap_opt.out);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return exit_code;
}

}  // namespace copmark
