// Command-line front end: lattice solving, kernel verification, Monte
// Carlo ensembles, distribution tabulation and the acceptance suite.
//
// Exit codes: 0 success, 1 verification or statistical failure,
// 2 usage or domain error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "triwalk/acceptance.hpp"
#include "triwalk/dist.hpp"
#include "triwalk/io.hpp"
#include "triwalk/sampler.hpp"
#include "triwalk/verify.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

double to_radians(double value, bool degrees) { return degrees ? value * M_PI / 180.0 : value; }

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int resolve_threads(int threads) {
    if (threads > 0) return threads;
    return std::max(1u, std::thread::hardware_concurrency());
}

struct AngleArgs {
    double alpha = 0.0;
    double beta = 0.0;
    bool degrees = false;

    triwalk::AnglePair pair() const {
        return {to_radians(alpha, degrees), to_radians(beta, degrees)};
    }
};

void add_angle_options(CLI::App* cmd, AngleArgs& args) {
    cmd->add_option("--alpha", args.alpha, "left wedge angle")->required();
    cmd->add_option("--beta", args.beta, "right wedge angle")->required();
    cmd->add_flag("--deg", args.degrees, "angles are in degrees (default radians)");
}

json checks_to_json(const std::vector<triwalk::VerifyCheck>& checks) {
    json arr = json::array();
    for (const auto& c : checks)
        arr.push_back({{"name", c.name},
                       {"pass", c.pass()},
                       {"value", c.value},
                       {"threshold", c.threshold}});
    return arr;
}

std::string json_to_csv(const json& flat) {
    std::string text = "field,value\n";
    for (const auto& [key, value] : flat.items()) {
        text += key + ",";
        text += value.is_number_float() ? format_value(value.get<double>()) : value.dump();
        text += "\n";
    }
    return text;
}

int cmd_geometry(const AngleArgs& angles, const std::string& format, const std::string& out) {
    const triwalk::WedgeGeometry g = triwalk::make_geometry(angles.pair());
    json flat = triwalk::geometry_to_json(g);
    flat["k0"] = g.first_full;
    flat["n1"] = triwalk::row_size(1, g.lattice);
    if (format == "csv") {
        write_text(out, json_to_csv(flat));
    } else {
        json report = {{"geometry", triwalk::geometry_to_json(g)},
                       {"k0", g.first_full},
                       {"n1", triwalk::row_size(1, g.lattice)}};
        write_text(out, report.dump(2) + "\n");
    }
    return kExitOk;
}

int cmd_verify(const AngleArgs& angles, int m_row, int steps, const std::string& format,
               const std::string& out, const std::string& deviations_csv,
               const std::string& green_csv) {
    const triwalk::WedgeGeometry g = triwalk::make_geometry(angles.pair());
    const triwalk::WalkKernel kernel = triwalk::build_kernel(g, m_row);
    const auto checks = triwalk::verify_kernel(kernel, steps);
    bool all_pass = true;
    for (const auto& c : checks) all_pass = all_pass && c.pass();
    if (format == "csv") {
        std::string text = "name,pass,value,threshold\n";
        for (const auto& c : checks)
            text += c.name + "," + (c.pass() ? "true" : "false") + "," +
                    format_value(c.value) + "," + format_value(c.threshold) + "\n";
        write_text(out, text);
    } else {
        json report = {{"pass", all_pass}, {"checks", checks_to_json(checks)}};
        write_text(out, report.dump(2) + "\n");
    }
    if (!deviations_csv.empty()) {
        std::ofstream os(deviations_csv, std::ios::binary);
        triwalk::write_uniformity_csv(os, kernel, steps);
    }
    if (!green_csv.empty()) {
        std::ofstream os(green_csv, std::ios::binary);
        triwalk::write_green_csv(os, g, m_row);
    }
    if (!all_pass) {
        for (const auto& c : checks)
            if (!c.pass()) std::cerr << "failed check: " << c.name << "\n";
        return kExitFailed;
    }
    return kExitOk;
}

int cmd_simulate(const AngleArgs& angles, int m_row, long long n_paths, std::uint64_t seed,
                 int threads, const std::string& out_base) {
    const triwalk::WedgeGeometry g = triwalk::make_geometry(angles.pair());
    const triwalk::PathConfig config = triwalk::PathConfig::make(g, m_row, seed);
    const triwalk::WalkKernel kernel = triwalk::build_kernel(g, m_row);
    const triwalk::EnsembleResult ensemble =
        triwalk::run_ensemble(config, n_paths, resolve_threads(threads));

    {
        std::ofstream os(out_base + ".csv", std::ios::binary);
        if (!os) throw std::runtime_error("cannot open output file: " + out_base + ".csv");
        triwalk::write_paths_csv(os, ensemble, kernel);
    }

    // The exit index is compared against its exact discrete uniform law;
    // y and z are compared against the closed-form laws of the native
    // triangle (statistics plus O(1/M) discretization).
    const triwalk::AnglePair wedge = angles.pair();
    const triwalk::HullLawSpec native{wedge.alpha, wedge.beta, wedge.alpha, wedge.beta};
    std::vector<double> ys, zs;
    ys.reserve(ensemble.samples.size());
    zs.reserve(ensemble.samples.size());
    for (const auto& s : ensemble.samples) {
        if (!s.complete) continue;
        const triwalk::HullVariables v = triwalk::hull_variables(s, kernel);
        ys.push_back(v.y);
        zs.push_back(v.z);
    }
    json summary = {
        {"n", n_paths},
        {"M", m_row},
        {"seed", seed},
        {"geometry", triwalk::geometry_to_json(g)},
        {"ks_x", triwalk::exit_law_ks(ensemble, kernel)},
        {"ks_y", triwalk::ks_distance(triwalk::EmpiricalCdf(ys),
                                      [&](double t) { return triwalk::cdf_y(t, native); })},
        {"ks_z", triwalk::ks_distance(triwalk::EmpiricalCdf(zs),
                                      [&](double t) { return triwalk::cdf_z(t, native); })},
        {"incomplete", ensemble.incomplete},
        {"no_side_contact", ensemble.no_side_contact},
        {"mean_steps", ensemble.mean_steps},
    };
    std::ofstream os(out_base + ".json", std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + out_base + ".json");
    os << summary.dump(2) << "\n";
    return kExitOk;
}

int cmd_dist(const std::string& which, const AngleArgs& angles, double lambda_in, double mu_in,
             bool have_triangle, int grid, const std::string& out) {
    const triwalk::AnglePair refl = angles.pair();
    triwalk::HullLawSpec spec;
    spec.alpha = refl.alpha;
    spec.beta = refl.beta;
    spec.lambda = have_triangle ? to_radians(lambda_in, angles.degrees) : refl.alpha;
    spec.mu = have_triangle ? to_radians(mu_in, angles.degrees) : refl.beta;

    std::function<double(double)> f;
    if (which == "x") f = [&](double t) { return triwalk::cdf_x(t, spec); };
    else if (which == "y") f = [&](double t) { return triwalk::cdf_y(t, spec); };
    else if (which == "z") f = [&](double t) { return triwalk::cdf_z(t, spec); };
    else if (which == "xy") f = [&](double t) { return triwalk::joint_cdf_xy(t, t, spec); };
    else if (which == "xz") f = [&](double t) { return triwalk::joint_cdf_xz(t, t, spec); };
    else if (which == "yz") f = [&](double t) { return triwalk::joint_cdf_yz(t, t, spec); };
    else if (which == "xyz") f = [&](double t) { return triwalk::joint_cdf_xyz(t, t, t, spec); };
    else if (which == "last-visit")
        f = [&](double t) { return triwalk::last_visit_probability(t, spec); };
    else if (which == "corner")
        f = [&](double t) { return triwalk::corner_process_cdf(t, spec); };
    else if (which == "reach")
        f = [&](double t) { return triwalk::reach_probability(t, refl); };
    else
        throw std::domain_error("unknown distribution: " + which);

    // Joint laws are tabulated along the diagonal; reach takes the
    // altitude as its argument.
    std::string text = "arg,value\n";
    for (int i = 0; i < grid; ++i) {
        const double t = grid == 1 ? 0.0 : static_cast<double>(i) / (grid - 1);
        text += format_value(t) + "," + format_value(f(t)) + "\n";
    }
    write_text(out, text);
    return kExitOk;
}

int cmd_acceptance(const std::vector<std::string>& suites, int threads,
                   const std::string& out) {
    const auto results =
        triwalk::run_acceptance(triwalk::expand_suites(suites), resolve_threads(threads));
    if (results.empty()) throw std::domain_error("no matching acceptance criteria");
    json arr = json::array();
    bool all_pass = true;
    for (const auto& r : results) {
        json checks = json::array();
        for (const auto& c : r.checks)
            checks.push_back({{"name", c.name},
                              {"pass", c.pass()},
                              {"value", c.value},
                              {"threshold", c.threshold}});
        arr.push_back({{"id", r.id},
                       {"description", r.description},
                       {"pass", r.pass()},
                       {"checks", checks}});
        all_pass = all_pass && r.pass();
        std::fprintf(stderr, "%-4s %s\n", r.id.c_str(), r.pass() ? "PASS" : "FAIL");
    }
    write_text(out, json{{"pass", all_pass}, {"criteria", arr}}.dump(2) + "\n");
    if (!all_pass) {
        for (const auto& r : results)
            if (!r.pass()) std::cerr << "failed criterion: " << r.id << "\n";
        return kExitFailed;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"uniform random walks on wedge lattices and their hull statistics"};
    app.require_subcommand(1);

    AngleArgs geo_angles;
    std::string geo_out, geo_format = "json";
    CLI::App* geometry = app.add_subcommand("geometry", "solve the wedge-to-lattice fit");
    add_angle_options(geometry, geo_angles);
    geometry->add_option("--format", geo_format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    geometry->add_option("--out", geo_out, "write the report to a file");

    AngleArgs ver_angles;
    int ver_m = 30, ver_steps = 200;
    std::string ver_out, ver_dev_csv, ver_green_csv, ver_format = "json";
    CLI::App* verify = app.add_subcommand("verify", "run the exact verification battery");
    add_angle_options(verify, ver_angles);
    verify->add_option("--format", ver_format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    verify->add_option("-M,--rows", ver_m, "absorbing row")->check(CLI::PositiveNumber);
    verify->add_option("--steps", ver_steps, "propagation steps")->check(CLI::PositiveNumber);
    verify->add_option("--out", ver_out, "write the JSON report to a file");
    verify->add_option("--deviations-csv", ver_dev_csv, "per-row deviation table");
    verify->add_option("--green-csv", ver_green_csv, "green function comparison table");

    AngleArgs sim_angles;
    int sim_m = 100, sim_threads = 0;
    long long sim_n = 100000;
    std::uint64_t sim_seed = 1;
    std::string sim_out = "simulate";
    CLI::App* simulate = app.add_subcommand("simulate", "run a seeded Monte Carlo ensemble");
    add_angle_options(simulate, sim_angles);
    simulate->add_option("-M,--rows", sim_m, "base row")->check(CLI::PositiveNumber);
    simulate->add_option("-n,--paths", sim_n, "number of paths");
    simulate->add_option("--seed", sim_seed, "master seed");
    simulate->add_option("--threads", sim_threads, "worker cap (0 = hardware)");
    simulate->add_option("--out", sim_out, "output base path (.csv and .json)");

    AngleArgs dist_angles;
    double dist_lambda = 0.0, dist_mu = 0.0;
    int dist_grid = 101;
    std::string dist_which, dist_out;
    CLI::App* dist = app.add_subcommand("dist", "tabulate a closed-form distribution");
    dist->add_option("--which", dist_which,
                     "x|y|z|xy|xz|yz|xyz|last-visit|corner|reach")
        ->required();
    add_angle_options(dist, dist_angles);
    CLI::Option* opt_lambda = dist->add_option("--lambda", dist_lambda, "triangle angle at 0");
    CLI::Option* opt_mu = dist->add_option("--mu", dist_mu, "triangle angle at 1");
    opt_lambda->needs(opt_mu);
    opt_mu->needs(opt_lambda);
    dist->add_option("--grid", dist_grid, "number of grid points")->check(CLI::PositiveNumber);
    dist->add_option("--out", dist_out, "write the CSV to a file");

    std::vector<std::string> acc_suites;
    int acc_threads = 0;
    std::string acc_out;
    CLI::App* acceptance = app.add_subcommand("acceptance", "run the acceptance criteria");
    acceptance->add_option("--suite", acc_suites,
                           "criterion ids or suite names (exact, mc, formulas, limits)");
    acceptance->add_option("--threads", acc_threads, "worker cap (0 = hardware)");
    acceptance->add_option("--out", acc_out, "write the JSON report to a file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (geometry->parsed()) return cmd_geometry(geo_angles, geo_format, geo_out);
        if (verify->parsed())
            return cmd_verify(ver_angles, ver_m, ver_steps, ver_format, ver_out, ver_dev_csv,
                              ver_green_csv);
        if (simulate->parsed())
            return cmd_simulate(sim_angles, sim_m, sim_n, sim_seed, sim_threads, sim_out);
        if (dist->parsed())
            return cmd_dist(dist_which, dist_angles, dist_lambda, dist_mu,
                            opt_lambda->count() > 0, dist_grid, dist_out);
        if (acceptance->parsed()) return cmd_acceptance(acc_suites, acc_threads, acc_out);
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailed;
    }
    return kExitUsage;
}
