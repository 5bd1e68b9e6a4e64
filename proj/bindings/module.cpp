// Python bindings for the main operations: closed copulas, grid algebra,
// Fréchet families, simulators, and the analysis verifiers.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <sstream>
#include <stdexcept>

#include "copmark/analysis.hpp"
#include "copmark/closed_copula.hpp"
#include "copmark/families.hpp"
#include "copmark/frechet.hpp"
#include "copmark/generator.hpp"
#include "copmark/grid_copula.hpp"
#include "copmark/reflected_bm.hpp"
#include "copmark/simulate.hpp"

namespace py = pybind11;
using namespace copmark;

namespace {

GridCopula grid_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
                           double tol) {
    if (a.ndim() != 2 || a.shape(0) != a.shape(1))
        throw std::invalid_argument("mass must be a square 2-d array");
    const int n = static_cast<int>(a.shape(0));
    std::vector<double> mass(static_cast<size_t>(n) * n);
    std::memcpy(mass.data(), a.data(), mass.size() * sizeof(double));
    return GridCopula::from_mass(n, std::move(mass), tol);
}

py::array_t<double> grid_to_array(const GridCopula& g) {
    const int n = g.n();
    py::array_t<double> out({n, n});
    std::memcpy(out.mutable_data(), g.data().data(),
                static_cast<size_t>(n) * n * sizeof(double));
    return out;
}

py::dict paths_to_dict(const std::vector<PathSample>& paths) {
    const py::ssize_t n_paths = static_cast<py::ssize_t>(paths.size());
    const py::ssize_t n_times = static_cast<py::ssize_t>(paths.empty() ? 0 : paths[0].times.size());
    py::array_t<double> times(n_times);
    py::array_t<double> values({n_paths, n_times});
    py::array_t<int64_t> ids(n_paths);
    auto* tv = times.mutable_data();
    auto* vv = values.mutable_data();
    auto* iv = ids.mutable_data();
    if (!paths.empty())
        std::memcpy(tv, paths[0].times.data(), static_cast<size_t>(n_times) * sizeof(double));
    for (py::ssize_t p = 0; p < n_paths; ++p) {
        const auto& path = paths[static_cast<size_t>(p)];
        if (static_cast<py::ssize_t>(path.values.size()) != n_times)
            throw std::runtime_error("ragged path output");
        std::memcpy(vv + p * n_times, path.values.data(),
                    static_cast<size_t>(n_times) * sizeof(double));
        iv[p] = path.path_id;
    }
    py::dict d;
    d["times"] = times;
    d["values"] = values;
    d["path_ids"] = ids;
    return d;
}

SimConfig make_config(uint64_t seed, int64_t n_paths, std::optional<double> x0) {
    SimConfig cfg;
    cfg.seed = seed;
    cfg.n_paths = n_paths;
    cfg.x0 = x0;
    return cfg;
}

ArchimedeanGenerator make_generator(const std::string& kind, double parameter) {
    if (kind == "clayton") return clayton_generator(parameter);
    if (kind == "gumbel") return gumbel_generator(parameter);
    if (kind == "exponential") return exponential_generator(parameter);
    throw std::invalid_argument("unknown generator kind: " + kind);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Markov products of copulas: closed forms, grids, families, simulators";

    py::class_<FrechetCoeffs>(m, "FrechetCoeffs")
        .def(py::init<double, double>(), py::arg("alpha"), py::arg("beta"))
        .def_readonly("alpha", &FrechetCoeffs::alpha)
        .def_readonly("beta", &FrechetCoeffs::beta)
        .def("pi_weight", &FrechetCoeffs::pi_weight)
        .def("__repr__", [](const FrechetCoeffs& c) {
            std::ostringstream os;
            os << "FrechetCoeffs(alpha=" << c.alpha << ", beta=" << c.beta << ")";
            return os.str();
        });
    m.def("frechet_product", &frechet_product, py::arg("c1"), py::arg("c2"));
    m.def("frechet_coeffs_from_fg", &frechet_coeffs_from_fg, py::arg("f_s"), py::arg("g_s"),
          py::arg("f_t"), py::arg("g_t"));

    py::class_<ClosedCopula>(m, "ClosedCopula")
        .def_static("pi", &ClosedCopula::independence)
        .def_static("m", &ClosedCopula::comonotone)
        .def_static("w", &ClosedCopula::countermonotone)
        .def_static("frechet", &ClosedCopula::frechet, py::arg("alpha"), py::arg("beta"))
        .def_static("ltheta", &ClosedCopula::ltheta, py::arg("theta"))
        .def_static("rtheta", &ClosedCopula::rtheta, py::arg("theta"))
        .def_static("ordinal_sum", &ClosedCopula::ordinal_sum, py::arg("intervals"))
        .def_static("binary_scaling", &ClosedCopula::binary_scaling)
        .def_static("parse", &ClosedCopula::parse_spec, py::arg("spec"))
        .def("cdf", &ClosedCopula::cdf, py::arg("u"), py::arg("v"))
        .def("conditional_cdf", &ClosedCopula::conditional_cdf, py::arg("x"), py::arg("y"))
        .def("transition", &ClosedCopula::transition, py::arg("x"), py::arg("u"))
        .def("variant_name", &ClosedCopula::variant_name)
        .def("to_json", [](const ClosedCopula& c) { return c.to_json().dump(); })
        .def_static("from_json",
                    [](const std::string& s) {
                        return ClosedCopula::from_json(nlohmann::json::parse(s));
                    })
        .def("__repr__",
             [](const ClosedCopula& c) { return "ClosedCopula(" + c.variant_name() + ")"; });
    m.def("transition_by_inversion", &transition_by_inversion, py::arg("copula"), py::arg("x"),
          py::arg("u"), py::arg("tol") = 1e-12);

    py::class_<GridCopula>(m, "GridCopula")
        .def_static(
            "from_mass",
            [](const py::array_t<double, py::array::c_style | py::array::forcecast>& mass,
               double tol) { return grid_from_array(mass, tol); },
            py::arg("mass"), py::arg("tol") = GridCopula::kInvariantTol)
        .def_static("independence", &GridCopula::independence, py::arg("n"))
        .def_static("comonotone", &GridCopula::comonotone, py::arg("n"))
        .def_static("countermonotone", &GridCopula::countermonotone, py::arg("n"))
        .def_static("load", [](const std::string& p) { return GridCopula::load(p); },
                    py::arg("path"))
        .def("save", [](const GridCopula& g, const std::string& p) { g.save(p); },
             py::arg("path"))
        .def_property_readonly("n", &GridCopula::n)
        .def_property_readonly("mass", &grid_to_array)
        .def("__eq__", [](const GridCopula& a, const GridCopula& b) { return a == b; })
        .def("__repr__", [](const GridCopula& g) {
            return "GridCopula(n=" + std::to_string(g.n()) + ")";
        });

    m.def("discretize", &discretize, py::arg("copula"), py::arg("n"));
    m.def("markov_product", &markov_product, py::arg("a"), py::arg("b"), py::arg("workers") = 1);
    m.def("power", &grid_power, py::arg("a"), py::arg("k"), py::arg("workers") = 1);
    m.def("mixture", &mixture, py::arg("weights"), py::arg("grids"));
    m.def("transpose", &transpose, py::arg("a"));
    m.def("cdf_at", &cdf_at, py::arg("a"), py::arg("u"), py::arg("v"));
    m.def("sup_distance",
          py::overload_cast<const GridCopula&, const GridCopula&>(&sup_distance), py::arg("a"),
          py::arg("b"));
    m.def("sup_distance_analytic",
          py::overload_cast<const GridCopula&, const ClosedCopula&>(&sup_distance), py::arg("a"),
          py::arg("c"));
    m.def("idempotency_defect", &idempotency_defect, py::arg("a"), py::arg("workers") = 1);
    m.def(
        "inverse_defect",
        [](const GridCopula& a, int workers) {
            const InverseDefect d = inverse_defect(a, workers);
            return py::make_tuple(d.left, d.right);
        },
        py::arg("a"), py::arg("workers") = 1);

    py::class_<HomFrechetFamily>(m, "HomFrechetFamily")
        .def(py::init([](double lam, double mu, const std::string& restart,
                         const std::string& switch_mode) {

                 auto mode = [](const std::string& s) {
                     if (s == "poisson") return EventMode::poisson;
                     if (s == "instant") return EventMode::instant;
                     throw std::invalid_argument("event mode must be poisson|instant");
                 };
                 return HomFrechetFamily{lam, mu, mode(restart), mode(switch_mode)};
             }),
             py::arg("lambda_"), py::arg("mu"), py::arg("restart") = "poisson",
             py::arg("switch") = "poisson")
        .def_readonly("restart_rate", &HomFrechetFamily::restart_rate)
        .def_readonly("switch_rate", &HomFrechetFamily::switch_rate)
        .def("rho", &HomFrechetFamily::rho, py::arg("t"))
        .def("sigma", &HomFrechetFamily::sigma, py::arg("t"))
        .def("tau", &HomFrechetFamily::tau, py::arg("t"))
        .def("coeffs", &HomFrechetFamily::coeffs, py::arg("t"));
    m.def("semigroup_check", &semigroup_check, py::arg("family"), py::arg("s"), py::arg("t"));

    py::class_<InhomFrechetFamily>(m, "InhomFrechetFamily")
        .def(py::init([](const std::vector<std::pair<double, double>>& restart_bp,
                         const std::vector<std::pair<double, double>>& switch_bp,
                         std::vector<double> restart_times, std::vector<double> switch_times) {
                 InhomFrechetFamily fam;
                 fam.restart_intensity =
                     restart_bp.empty()
                         ? InhomIntensity::zero()
                         : InhomIntensity::from_piecewise(
                               PiecewiseLinear::from_breakpoints(restart_bp));
                 fam.switch_intensity =
                     switch_bp.empty() ? InhomIntensity::zero()
                                       : InhomIntensity::from_piecewise(
                                             PiecewiseLinear::from_breakpoints(switch_bp));
                 std::sort(restart_times.begin(), restart_times.end());
                 std::sort(switch_times.begin(), switch_times.end());
                 fam.restart_times = std::move(restart_times);
                 fam.switch_times = std::move(switch_times);
                 return fam;
             }),
             py::arg("restart_breakpoints") = std::vector<std::pair<double, double>>{},
             py::arg("switch_breakpoints") = std::vector<std::pair<double, double>>{},
             py::arg("restart_times") = std::vector<double>{},
             py::arg("switch_times") = std::vector<double>{})
        .def("coeffs", &InhomFrechetFamily::coeffs, py::arg("s"), py::arg("t"));
    m.def("two_time_consistency", &two_time_consistency, py::arg("family"), py::arg("r"),
          py::arg("s"), py::arg("t"));

    m.def(
        "poisson_jump_copula",
        [](double a, const GridCopula& base, double t, double tail_tol, int workers) {
            return poisson_jump_copula(PoissonJumpFamily{a, base}, t, tail_tol, workers);
        },
        py::arg("a"), py::arg("base"), py::arg("t"), py::arg("tail_tol") = 1e-10,
        py::arg("workers") = 1);

    m.def(
        "simulate_chain",
        [](const ClosedCopula& c, int length, uint64_t seed, int64_t n_paths,
           std::optional<double> x0, int workers) {
            return paths_to_dict(simulate_chain(c, length, make_config(seed, n_paths, x0), workers));
        },
        py::arg("copula"), py::arg("length"), py::arg("seed"), py::arg("n_paths") = 1,
        py::arg("x0") = std::nullopt, py::arg("workers") = 1);
    m.def(
        "simulate_frechet_process",
        [](const HomFrechetFamily& fam, const std::vector<double>& times, uint64_t seed,
           int64_t n_paths, std::optional<double> x0, int workers) {
            return paths_to_dict(
                simulate_frechet_process(fam, times, make_config(seed, n_paths, x0), workers));
        },
        py::arg("family"), py::arg("times"), py::arg("seed"), py::arg("n_paths") = 1,
        py::arg("x0") = std::nullopt, py::arg("workers") = 1);
    m.def(
        "simulate_inhom_frechet_process",
        [](const InhomFrechetFamily& fam, const std::vector<double>& times, uint64_t seed,
           int64_t n_paths, std::optional<double> x0, int workers) {
            return paths_to_dict(
                simulate_frechet_process(fam, times, make_config(seed, n_paths, x0), workers));
        },
        py::arg("family"), py::arg("times"), py::arg("seed"), py::arg("n_paths") = 1,
        py::arg("x0") = std::nullopt, py::arg("workers") = 1);
    m.def(
        "simulate_reflected_bm",
        [](const std::vector<double>& times, uint64_t seed, int64_t n_paths,
           std::optional<double> x0, int workers) {
            return paths_to_dict(
                simulate_reflected_bm(times, make_config(seed, n_paths, x0), workers));
        },
        py::arg("times"), py::arg("seed"), py::arg("n_paths") = 1, py::arg("x0") = std::nullopt,
        py::arg("workers") = 1);

    m.def(
        "reflected_bm_density",
        [](double x, double y, double t, double series_tol) {
            return reflected_bm_density(x, y, {t, series_tol});
        },
        py::arg("x"), py::arg("y"), py::arg("t"), py::arg("series_tol") = 1e-12);
    m.def(
        "reflected_bm_cdf",
        [](double u, double v, double t, double series_tol) {
            return reflected_bm_cdf(u, v, {t, series_tol});
        },
        py::arg("u"), py::arg("v"), py::arg("t"), py::arg("series_tol") = 1e-12);
    m.def(
        "reflected_bm_grid",
        [](double t, int n, double series_tol) {
            return reflected_bm_grid({t, series_tol}, n);
        },
        py::arg("t"), py::arg("n"), py::arg("series_tol") = 1e-12);

    m.def(
        "empirical_copula",
        [](const std::vector<double>& x, const std::vector<double>& y, int n) {
            return empirical_copula(PairSample{x, y}, n);
        },
        py::arg("x"), py::arg("y"), py::arg("n"));
    m.def(
        "spreadability_defect",
        [](const std::vector<double>& x1, const std::vector<double>& y1,
           const std::vector<double>& x2, const std::vector<double>& y2, int n) {
            return spreadability_defect(PairSample{x1, y1}, PairSample{x2, y2}, n);
        },
        py::arg("lag1_x"), py::arg("lag1_y"), py::arg("lag2_x"), py::arg("lag2_y"), py::arg("n"));
    m.def(
        "archimedean_gap",
        [](const std::string& kind, double parameter, const std::vector<double>& lattice) {
            const GapReport r = archimedean_gap(make_generator(kind, parameter), lattice);
            py::dict d;
            d["max_gap"] = r.max_gap;
            d["argmax"] = py::make_tuple(r.argmax[0], r.argmax[1], r.argmax[2]);
            d["lattice"] = r.lattice;
            d["generator"] = r.generator_name;
            return d;
        },
        py::arg("generator"), py::arg("parameter") = 1.0,
        py::arg("lattice") = std::vector<double>{0.5, 1.0, 2.0});
    m.def(
        "archimedean_gap_psi",
        [](const py::function& psi, const std::string& name, const std::vector<double>& lattice) {
            ArchimedeanGenerator g{name, [psi](double x) { return psi(x).cast<double>(); }};
            const GapReport r = archimedean_gap(g, lattice);
            py::dict d;
            d["max_gap"] = r.max_gap;
            d["argmax"] = py::make_tuple(r.argmax[0], r.argmax[1], r.argmax[2]);
            d["lattice"] = r.lattice;
            d["generator"] = r.generator_name;
            return d;
        },
        py::arg("psi"), py::arg("name") = "custom",
        py::arg("lattice") = std::vector<double>{0.5, 1.0, 2.0});
    m.def(
        "generator_validate",
        [](const std::string& kind, double parameter, int sample_count) {
            const GeneratorReport r =
                generator_validate(make_generator(kind, parameter), sample_count);
            py::dict d;
            d["unit_at_zero"] = r.unit_at_zero;
            d["non_increasing"] = r.non_increasing;
            d["decays"] = r.decays;
            d["finite"] = r.finite;
            d["pass"] = r.pass();
            d["failure_location"] = r.failure_location;
            d["detail"] = r.detail;
            return d;
        },
        py::arg("generator"), py::arg("parameter") = 1.0, py::arg("sample_count") = 64);
    m.def("ks_uniform_statistic", &ks_uniform_statistic, py::arg("values"));
    m.def(
        "conditional_support_check",
        [](const ClosedCopula& c,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& values,
           double tol) {
            if (values.ndim() != 2) throw std::invalid_argument("values must be 2-d");
            std::vector<PathSample> paths(static_cast<size_t>(values.shape(0)));
            const auto r = values.unchecked<2>();
            for (py::ssize_t p = 0; p < values.shape(0); ++p) {
                paths[static_cast<size_t>(p)].path_id = p;
                for (py::ssize_t k = 0; k < values.shape(1); ++k) {
                    paths[static_cast<size_t>(p)].times.push_back(static_cast<double>(k));
                    paths[static_cast<size_t>(p)].values.push_back(r(p, k));
                }
            }
            const SupportReport rep = conditional_support_check(c, paths, tol);
            py::dict d;
            d["checked"] = rep.checked;
            d["violations"] = rep.violations;
            d["detail"] = rep.detail;
            d["pass"] = rep.pass();
            return d;
        },
        py::arg("copula"), py::arg("values"), py::arg("tol") = 1e-12);
}
