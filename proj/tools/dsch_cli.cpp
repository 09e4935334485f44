// dsch — batch CLI over the library: genericity checks, spectra, resolvent
// studies, propagator kernels, decay fits, and oscillatory-integral tables.
// All outputs are deterministic for a fixed config (+seed); timestamps go to
// a sidecar run.log only. Exit codes: 0 ok, 2 invalid config/preconditions,
// 3 numerical-convergence failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "dsch/ensemble.hpp"
#include "dsch/evolution.hpp"
#include "dsch/io.hpp"
#include "dsch/jost.hpp"
#include "dsch/oscillatory.hpp"
#include "dsch/resolvent.hpp"
#include "dsch/spectrum.hpp"

using nlohmann::json;
using namespace dsch;

namespace {

struct Options {
    json config;  // resolved config (defaults + file + flag overrides)
    std::string out_dir = ".";

    Potential potential() const {
        if (config.contains("potential_file")) return io::load_potential(config["potential_file"]);
        return io::potential_from_json(config["potential"]);
    }
    int window() const { return config["window"].get<int>(); }
    double sigma() const { return config["sigma"].get<double>(); }
    uint64_t seed() const { return config["seed"].get<uint64_t>(); }

    std::string echo() const { return config.dump(); }
    std::string path(const std::string& name) const { return out_dir + "/" + name; }

    void write_json(const std::string& name, json j) const {
        j["config"] = config;
        io::write_text_file(path(name), j.dump(2) + "\n");
        std::printf("wrote %s\n", path(name).c_str());
    }
    void log_run(int argc, char** argv) const {
        std::ofstream log(path("run.log"), std::ios::app);
        auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char tbuf[64];
        std::strftime(tbuf, sizeof(tbuf), "%F %T", std::gmtime(&now));
        log << tbuf << " UTC:";
        for (int i = 0; i < argc; ++i) log << " " << argv[i];
        log << "\n";
    }
};

std::vector<double> resolve_times(const Options& opt) {
    if (opt.config.contains("times")) return opt.config["times"].get<std::vector<double>>();
    double tmin = opt.config["tmin"].get<double>();
    double tmax = opt.config["tmax"].get<double>();
    int count = opt.config["samples"].get<int>();
    if (count < 2) throw std::invalid_argument("time grid needs at least 2 samples");
    std::vector<double> out;
    for (int i = 0; i < count; ++i)
        out.push_back(std::round(tmin * std::pow(tmax / tmin, static_cast<double>(i) / (count - 1))));
    return out;
}

int run_genericity(const Options& opt) {
    auto one = [](const Potential& V) {
        GenericityResult gw = is_generic(V);
        T0Genericity gt = t0_genericity(V);
        return json{{"generic", gw.generic},       {"w0", gw.w0},
                    {"v_pairing", gw.v_pairing},   {"t0_generic", gt.generic},
                    {"t0_pairing", gt.pairing},    {"t0_singular", gt.t0_singular},
                    {"t0_cond", gt.cond_estimate}, {"routes_agree", gw.generic == gt.generic}};
    };
    json j;
    int ensemble = opt.config.value("ensemble", 0);
    if (ensemble > 0) {
        SplitMix64 rng(opt.seed());
        json arr = json::array();
        int agree = 0;
        for (int i = 0; i < ensemble; ++i) {
            Potential V = random_compact_potential(rng, 9, 1.0);
            json r = one(V);
            r["potential"] = io::potential_to_json(V);
            if (r["routes_agree"].get<bool>()) ++agree;
            arr.push_back(r);
        }
        j["ensemble"] = arr;
        j["count"] = ensemble;
        j["agreement"] = agree;
    } else {
        j = one(opt.potential());
    }
    opt.write_json("genericity.json", j);
    return 0;
}

int run_spectrum(const Options& opt) {
    Potential V = opt.potential();
    SpectralDecomposition sd = discrete_spectrum(V, Window::symmetric(opt.window()));
    json j;
    j["eigenvalues"] = json::array();
    for (const EigenPair& p : sd.pairs) j["eigenvalues"].push_back(p.omega);
    j["window"] = opt.window();
    opt.write_json("spectrum.json", j);
    if (opt.config.value("vectors", false)) {
        for (size_t k = 0; k < sd.pairs.size(); ++k) {
            std::string name = "eigenvector_" + std::to_string(k) + ".csv";
            io::write_sequence_csv(opt.path(name), to_complex(sd.pairs[k].vector), opt.echo());
            std::printf("wrote %s\n", opt.path(name).c_str());
        }
    }
    return 0;
}

int run_resolvent(const Options& opt) {
    Potential V = opt.potential();
    std::string study = opt.config.value("study", "lap");
    if (study == "lap") {
        double omega = opt.config.value("omega", 2.0);
        int kmin = opt.config.value("kmin", 4), kmax = opt.config.value("kmax", 14);
        std::ofstream csv(opt.path("resolvent_lap.csv"));
        csv << "# config " << opt.echo() << "\n";
        csv << "omega,eps,gap\n";
        json summary;
        summary["gaps"] = json::array();
        for (int k = kmin; k <= kmax; ++k) {
            double eps = std::pow(2.0, -k);
            double gap = limiting_absorption_gap(V, omega, eps, 1.0);
            csv << io::format_double(omega) << "," << io::format_double(eps) << ","
                << io::format_double(gap) << "\n";
            summary["gaps"].push_back({{"eps", eps}, {"gap", gap}});
        }
        std::printf("wrote %s\n", opt.path("resolvent_lap.csv").c_str());
        opt.write_json("resolvent_lap.json", summary);
        return 0;
    }
    if (study == "puiseux") {
        Window w = Window::symmetric(opt.window());
        bool generic = !V.empty() && is_generic(V).generic;
        std::ofstream csv(opt.path("resolvent_puiseux.csv"));
        csv << "# config " << opt.echo() << "\n";
        csv << "omega,norm,ratio\n";
        Kernel R0k;
        if (generic) R0k = resolvent_at_zero_kernel(V, w);
        for (double omega = 1e-4; omega <= 1.0001e-2; omega *= std::sqrt(10.0)) {
            double nr;
            if (generic) {
                Kernel Rp = resolvent_kernel_jost(V, omega, Side::plus, w);
                Kernel D(w);
                for (size_t i = 0; i < D.a.size(); ++i) D.a[i] = Rp.a[i] - R0k.a[i];
                nr = kernel_norm(D, KernelNorm::b_sigma, opt.sigma());
            } else {
                Kernel Rp = V.empty() ? free_resolvent_kernel(resolve_branch(omega, Side::plus), w)
                                      : resolvent_kernel_jost(V, omega, Side::plus, w);
                nr = kernel_norm(Rp, KernelNorm::b_sigma, opt.sigma());
            }
            // generic: ||R+ - R(0)||/sqrt(omega) must stay bounded;
            // resonant: sqrt(omega) ||R+|| must stay bounded instead
            double ratio = generic ? nr / std::sqrt(omega) : nr * std::sqrt(omega);
            csv << io::format_double(omega) << "," << io::format_double(nr) << ","
                << io::format_double(ratio) << "\n";
        }
        std::printf("wrote %s\n", opt.path("resolvent_puiseux.csv").c_str());
        return 0;
    }
    throw std::invalid_argument("resolvent: unknown study '" + study + "' (use lap or puiseux)");
}

int run_evolve(const Options& opt) {
    Potential V = opt.potential();
    double t = opt.config.value("t", 10.0);
    int obs = std::min(opt.config.value("obs", 50), opt.window());
    Window w = Window::symmetric(obs);
    EvolutionKernel ek = V.empty() ? evolve_free_kernel(t, w) : evolve_ac_kernel(V, t, w);
    io::write_kernel_csv(opt.path("evolve_kernel.csv"), ek.kernel, opt.echo());
    std::printf("wrote %s\n", opt.path("evolve_kernel.csv").c_str());
    opt.write_json("evolve.json", json{{"t", t}, {"quad_error", ek.quad_error}, {"converged", ek.converged}});
    return ek.converged ? 0 : 3;
}

int run_decay_fit(const Options& opt) {
    Potential V = opt.potential();
    std::string kind_s = opt.config.value("kind", "weighted");
    if (kind_s != "l1inf" && kind_s != "weighted")
        throw std::invalid_argument("decay-fit: kind must be weighted or l1inf");
    NormKind kind = kind_s == "l1inf" ? NormKind::l1_inf : NormKind::weighted;
    std::vector<double> times = resolve_times(opt);
    int window = opt.window();
    int need = static_cast<int>(std::ceil(2.0 * times.back())) + 50;
    if (window < need) window = need;  // honor the finite-propagation rule
    DecayOptions dopt;
    dopt.fit_tmin = opt.config.value("fit_tmin", 50.0);
    DecaySeries s = decay_series(V, opt.sigma(), times, kind, window, dopt);

    std::ofstream csv(opt.path("decay.csv"));
    csv << "# config " << opt.echo() << "\n";
    csv << "t,norm,kind,sigma\n";
    for (const DecaySample& smp : s.samples)
        csv << io::format_double(smp.t) << "," << io::format_double(smp.norm) << "," << kind_s << ","
            << io::format_double(opt.sigma()) << "\n";
    std::printf("wrote %s\n", opt.path("decay.csv").c_str());

    opt.write_json("decay_fit.json",
                   json{{"slope", s.slope},
                        {"intercept", s.intercept},
                        {"fit_residual", s.fit_residual},
                        {"fit_tmin", s.fit_tmin},
                        {"kind", kind_s},
                        {"sigma", opt.sigma()},
                        {"window", window},
                        {"samples", s.samples.size()}});
    bool quad_ok = true;
    for (const DecaySample& smp : s.samples) quad_ok = quad_ok && smp.quad_error < 1e-5;
    return quad_ok ? 0 : 3;
}

int run_scattering(const Options& opt) {
    Potential V = opt.potential();
    Window w = Window::symmetric(opt.window());
    int count = opt.config.value("theta_count", 63);
    std::ofstream csv(opt.path("scattering.csv"));
    csv << "# config " << opt.echo() << "\n";
    csv << "theta,omega,a_re,a_im,b_re,b_im,w_re,w_im\n";
    for (int k = 1; k <= count; ++k) {
        double theta = -M_PI * k / (count + 1);
        double omega = 2.0 - 2.0 * std::cos(theta);
        ScatteringData sc = scattering_coeffs(V, theta, w);
        JostData jd = jost_pair(V, resolve_branch(omega, Side::plus), w, false);
        csv << io::format_double(theta) << "," << io::format_double(omega) << ","
            << io::format_double(sc.a.real()) << "," << io::format_double(sc.a.imag()) << ","
            << io::format_double(sc.b.real()) << "," << io::format_double(sc.b.imag()) << ","
            << io::format_double(jd.wronskian.real()) << "," << io::format_double(jd.wronskian.imag()) << "\n";
    }
    std::printf("wrote %s\n", opt.path("scattering.csv").c_str());
    return 0;
}

int run_oscillatory(const Options& opt) {
    double theta0 = opt.config.value("theta0", M_PI / 4.0);
    CutoffPair c = build_cutoffs(theta0);
    if (c.clamped) std::fprintf(stderr, "warning: theta0 > pi/4 reassigned to pi/4\n");
    std::string gname = opt.config.value("g", "chi0");
    if (gname != "chi0" && gname != "chi")
        throw std::invalid_argument("oscillatory: g must be chi0 or chi");
    auto g = [&](double th) { return gname == "chi" ? c.chi(th) : c.chi0(th); };
    std::vector<double> times = opt.config.contains("times")
                                    ? opt.config["times"].get<std::vector<double>>()
                                    : std::vector<double>{100.0, 1000.0, 10000.0};
    std::vector<double> grid = make_a_grid(-4.0, 4.0, opt.config.value("a_step", 0.01));

    std::ofstream csv(opt.path("oscillatory.csv"));
    csv << "# config " << opt.echo() << "\n";
    csv << "t,a,absI,err_estimate\n";
    json summary = json::array();
    bool all_conv = true;
    for (double t : times) {
        std::vector<double> vals;
        SupOverAResult s = sup_over_a_table(t, g, grid, vals);
        all_conv = all_conv && s.converged;
        for (size_t i = 0; i < grid.size(); ++i)
            csv << io::format_double(t) << "," << io::format_double(grid[i]) << ","
                << io::format_double(vals[i]) << "," << io::format_double(s.err_estimate) << "\n";
        summary.push_back({{"t", t}, {"sup", s.sup}, {"a_at_sup", s.a_at_sup}, {"converged", s.converged}});
    }
    std::printf("wrote %s\n", opt.path("oscillatory.csv").c_str());
    opt.write_json("oscillatory.json", json{{"g", gname}, {"theta0", c.theta0}, {"sup_table", summary}});
    return all_conv ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dsch: spectral theory and dispersive decay for the 1D discrete Schrodinger operator"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path, out_dir = ".", potential_path;
    int window = -1;
    double sigma = -1.0, tmax = -1.0;
    int64_t seed = -1;
    app.add_option("--config", config_path, "JSON config file (flags override its values)");
    app.add_option("--out", out_dir, "output directory (default .)");
    app.add_option("--window", window, "lattice window half-width N (default 400)");
    app.add_option("--sigma", sigma, "weight exponent (default 3)");
    app.add_option("--tmax", tmax, "largest time for time grids");
    app.add_option("--seed", seed, "seed for random ensembles (default 1)");
    app.add_option("--potential", potential_path, "potential JSON file {\"offset\": int, \"values\": [...]}");

    auto* c_gen = app.add_subcommand("genericity", "W(0) and T0-route genericity checks");
    int ensemble = 0;
    c_gen->add_option("--ensemble", ensemble, "run on K random potentials instead of the configured one");
    auto* c_spec = app.add_subcommand("spectrum", "discrete spectrum (eigenvalues outside [0,4]) as JSON");
    bool dump_vectors = false;
    c_spec->add_flag("--vectors", dump_vectors, "also dump eigenvectors as n,re,im CSV files");
    auto* c_res = app.add_subcommand("resolvent", "limiting-absorption / Puiseux tables");
    std::string study;
    double omega = 0.0;
    auto* study_opt = c_res->add_option("--study", study, "lap | puiseux (default lap)");
    auto* omega_opt = c_res->add_option("--omega", omega, "band point for the lap study (default 2)");
    auto* c_evo = app.add_subcommand("evolve", "e^{itH} P_ac kernel dump");
    double t_evolve = 0.0;
    int obs = 0;
    auto* t_opt = c_evo->add_option("--t", t_evolve, "time (default 10)");
    auto* obs_opt = c_evo->add_option("--obs", obs, "observation half-width for the dump (default 50)");
    auto* c_dec = app.add_subcommand("decay-fit", "norm decay series + fitted exponent");
    std::string kind;
    int samples = 0;
    double fit_tmin = 0.0;
    auto* kind_opt = c_dec->add_option("--kind", kind, "weighted | l1inf (default weighted)");
    auto* samples_opt = c_dec->add_option("--samples", samples, "number of log-spaced times (default 9)");
    auto* fit_tmin_opt =
        c_dec->add_option("--fit-tmin", fit_tmin, "exclude t < this from the slope fit (default 50)");
    auto* c_sca = app.add_subcommand("scattering", "dump (theta, a, b, W) scattering tables as CSV");
    int theta_count = 0;
    auto* theta_count_opt = c_sca->add_option("--count", theta_count, "theta grid points in (-pi, 0) (default 63)");
    auto* c_osc = app.add_subcommand("oscillatory", "sup-over-a oscillatory integral tables");
    std::string gname;
    double theta0 = 0.0;
    auto* g_opt = c_osc->add_option("--g", gname, "chi0 | chi (default chi0)");
    auto* theta0_opt = c_osc->add_option("--theta0", theta0, "cutoff scale (clamped to pi/4)");

    CLI11_PARSE(app, argc, argv);

    try {
        Options opt;
        opt.config = json{{"potential", {{"offset", 0}, {"values", {-1.5}}}},
                          {"window", 400},
                          {"sigma", 3.0},
                          {"seed", 1},
                          {"tmin", 50.0},
                          {"tmax", 1000.0},
                          {"samples", 9}};
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw std::invalid_argument("cannot open config: " + config_path);
            json file_cfg;
            in >> file_cfg;
            opt.config.merge_patch(file_cfg);
        }
        if (!potential_path.empty()) opt.config["potential_file"] = potential_path;
        if (window > 0) opt.config["window"] = window;
        if (sigma >= 0.0) opt.config["sigma"] = sigma;
        if (tmax > 0.0) opt.config["tmax"] = tmax;
        if (seed >= 0) opt.config["seed"] = static_cast<uint64_t>(seed);
        if (ensemble > 0) opt.config["ensemble"] = ensemble;
        if (dump_vectors) opt.config["vectors"] = true;
        if (!study_opt->empty()) opt.config["study"] = study;
        if (!omega_opt->empty()) opt.config["omega"] = omega;
        if (!t_opt->empty()) opt.config["t"] = t_evolve;
        if (!obs_opt->empty()) opt.config["obs"] = obs;
        if (!kind_opt->empty()) opt.config["kind"] = kind;
        if (!samples_opt->empty()) opt.config["samples"] = samples;
        if (!fit_tmin_opt->empty()) opt.config["fit_tmin"] = fit_tmin;
        if (!g_opt->empty()) opt.config["g"] = gname;
        if (!theta0_opt->empty()) opt.config["theta0"] = theta0;
        if (!theta_count_opt->empty()) opt.config["theta_count"] = theta_count;
        opt.out_dir = out_dir;
        opt.log_run(argc, argv);

        if (c_gen->parsed()) return run_genericity(opt);
        if (c_spec->parsed()) return run_spectrum(opt);
        if (c_sca->parsed()) return run_scattering(opt);
        if (c_res->parsed()) return run_resolvent(opt);
        if (c_evo->parsed()) return run_evolve(opt);
        if (c_dec->parsed()) return run_decay_fit(opt);
        if (c_osc->parsed()) return run_oscillatory(opt);
        return 2;
    } catch (const WindowTooSmall& e) {
        std::fprintf(stderr, "numerical failure: %s (suggested half-width %d)\n", e.what(),
                     e.suggested_halfwidth);
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "precondition violated: %s\n", e.what());
        return 2;
    } catch (const json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
}
