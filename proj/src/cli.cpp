#include "nfpe/cli.hpp"

#include "nfpe/errors.hpp"
#include "nfpe/exact.hpp"
#include "nfpe/grid.hpp"
#include "nfpe/model.hpp"
#include "nfpe/moments.hpp"
#include "nfpe/reference.hpp"
#include "nfpe/semiclassical.hpp"
#include "nfpe/transform.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nfpe {

namespace {

using nlohmann::json;

std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// --- config access -------------------------------------------------------

const json* find_path(const json& root, const std::string& dotted) {
    const json* cur = &root;
    std::size_t pos = 0;
    while (pos <= dotted.size()) {
        const std::size_t dot = dotted.find('.', pos);
        const std::string key = dotted.substr(pos, dot == std::string::npos
                                                       ? std::string::npos
                                                       : dot - pos);
        if (!cur->is_object() || !cur->contains(key)) {
            return nullptr;
        }
        cur = &(*cur)[key];
        if (dot == std::string::npos) {
            return cur;
        }
        pos = dot + 1;
    }
    return nullptr;
}

double need_num(const json& root, const std::string& path) {
    const json* j = find_path(root, path);
    if (j == nullptr || !j->is_number()) {
        throw ParameterError("config: missing or non-numeric field '" + path + "'");
    }
    return j->get<double>();
}

double num_or(const json& root, const std::string& path, double fallback) {
    const json* j = find_path(root, path);
    if (j == nullptr) {
        return fallback;
    }
    if (!j->is_number()) {
        throw ParameterError("config: field '" + path + "' must be a number");
    }
    return j->get<double>();
}

int int_or(const json& root, const std::string& path, int fallback) {
    const json* j = find_path(root, path);
    if (j == nullptr) {
        return fallback;
    }
    if (!j->is_number_integer()) {
        throw ParameterError("config: field '" + path + "' must be an integer");
    }
    return j->get<int>();
}

std::string need_str(const json& root, const std::string& path) {
    const json* j = find_path(root, path);
    if (j == nullptr || !j->is_string()) {
        throw ParameterError("config: missing or non-string field '" + path + "'");
    }
    return j->get<std::string>();
}

std::string str_or(const json& root, const std::string& path,
                   const std::string& fallback) {
    const json* j = find_path(root, path);
    if (j == nullptr) {
        return fallback;
    }
    if (!j->is_string()) {
        throw ParameterError("config: field '" + path + "' must be a string");
    }
    return j->get<std::string>();
}

bool bool_or(const json& root, const std::string& path, bool fallback) {
    const json* j = find_path(root, path);
    if (j == nullptr) {
        return fallback;
    }
    if (!j->is_boolean()) {
        throw ParameterError("config: field '" + path + "' must be a boolean");
    }
    return j->get<bool>();
}

// Unknown keys in a config section are almost always typos that would
// otherwise fall back to defaults and silently change the run.
void require_known_keys(const json& root, const std::string& section,
                        std::initializer_list<std::string_view> allowed) {
    const json* node = section.empty() ? &root : find_path(root, section);
    if (node == nullptr || !node->is_object()) {
        return;
    }
    for (auto it = node->begin(); it != node->end(); ++it) {
        const std::string& key = it.key();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            const std::string where =
                section.empty() ? key : section + "." + key;
            throw ParameterError("config: unknown key '" + where + "'");
        }
    }
}

void apply_override(json& root, const std::string& spec) {
    const std::size_t eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ParameterError("override '" + spec + "' is not of the form path=value");
    }
    const std::string path = spec.substr(0, eq);
    const std::string raw = spec.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) {
        value = raw;  // unparseable payloads are taken as strings
    }
    json* cur = &root;
    std::size_t pos = 0;
    while (true) {
        const std::size_t dot = path.find('.', pos);
        const std::string key = path.substr(pos, dot == std::string::npos
                                                     ? std::string::npos
                                                     : dot - pos);
        if (key.empty()) {
            throw ParameterError("override '" + spec + "' has an empty path segment");
        }
        if (dot == std::string::npos) {
            (*cur)[key] = value;
            return;
        }
        cur = &(*cur)[key];
        pos = dot + 1;
    }
}

// --- run setup ------------------------------------------------------------

struct RunSetup {
    ModelParams params{};
    CoefficientSet coeffs;     // beta may still be self-consistent here
    GridSpec grid{};
    double init_mean = 0.0;
    double init_var = 0.0;
    std::vector<double> times;
    std::string coeff_kind;
};

ModelParams parse_model(const json& cfg) {
    ModelParams p{};
    p.alpha = need_num(cfg, "model.alpha");
    p.kappa = need_num(cfg, "model.kappa");
    p.a = num_or(cfg, "model.a", 1.0);
    p.epsilon = need_num(cfg, "model.epsilon");
    p.s = num_or(cfg, "model.s", 0.0);
    p.validate();
    return p;
}

std::vector<double> parse_times(const json& cfg, double s) {
    const json* j = find_path(cfg, "times");
    if (j == nullptr || !j->is_array() || j->empty()) {
        throw ParameterError("config: 'times' must be a nonempty array");
    }
    std::vector<double> times;
    for (const auto& v : *j) {
        if (!v.is_number()) {
            throw ParameterError("config: 'times' entries must be numbers");
        }
        times.push_back(v.get<double>());
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < s - 1e-12) {
            throw ParameterError("config: 'times' entries must not precede model.s");
        }
        if (i > 0 && !(times[i] > times[i - 1])) {
            throw ParameterError("config: 'times' must ascend");
        }
    }
    return times;
}

// Builds the coefficient set; the empirical kind also fixes params.a from
// the fitted quadratic weight.
CoefficientSet parse_coefficients(const json& cfg, ModelParams& params,
                                  double init_mean, double horizon,
                                  std::string& kind_out) {
    const std::string kind = str_or(cfg, "coefficients.kind", "constant");
    kind_out = kind;
    if (kind == "constant") {
        require_known_keys(cfg, "coefficients", {"kind", "f0", "g0", "beta"});
    } else if (kind == "exp-decay") {
        require_known_keys(cfg, "coefficients",
                           {"kind", "f0", "decay", "g0", "beta"});
    } else if (kind == "empirical") {
        require_known_keys(cfg, "coefficients",
                           {"kind", "b0", "decay", "quad", "shift", "beta"});
    } else if (kind == "exact-family") {
        require_known_keys(cfg, "coefficients", {"kind", "f_s", "g_s", "beta"});
    }
    require_known_keys(cfg, "coefficients.beta", {"mode", "value"});
    CoefficientSet cs;
    if (kind == "constant") {
        cs = CoefficientSet::constant(num_or(cfg, "coefficients.f0", 1.0),
                                      num_or(cfg, "coefficients.g0", 0.0));
    } else if (kind == "exp-decay") {
        cs = CoefficientSet::exp_decay_f(need_num(cfg, "coefficients.f0"),
                                         need_num(cfg, "coefficients.decay"), params.s,
                                         num_or(cfg, "coefficients.g0", 0.0));
    } else if (kind == "empirical") {
        const EmpiricalMapping m = map_empirical_coefficients(
            need_num(cfg, "coefficients.b0"), need_num(cfg, "coefficients.decay"),
            need_num(cfg, "coefficients.quad"), need_num(cfg, "coefficients.shift"),
            params.epsilon);
        params.a = m.a;
        cs = m.coeffs;
    } else if (kind == "exact-family") {
        const double f_s = need_num(cfg, "coefficients.f_s");
        const double g_s = num_or(cfg, "coefficients.g_s", 0.0);
        const std::string mode = str_or(cfg, "coefficients.beta.mode", "self-consistent");
        if (mode == "constant") {
            const double b = need_num(cfg, "coefficients.beta.value");
            return exact_coefficient_set(params, f_s, g_s, [b](double) { return b; });
        }
        if (mode != "self-consistent") {
            throw ParameterError("config: unknown coefficients.beta.mode '" + mode + "'");
        }
        return exact_coefficient_set_selfconsistent(params, f_s, g_s, init_mean,
                                                    std::max(horizon, params.s + 1e-3));
    } else {
        throw ParameterError("config: unknown coefficients.kind '" + kind + "'");
    }
    const std::string mode = str_or(cfg, "coefficients.beta.mode", "self-consistent");
    if (mode == "constant") {
        const double b = need_num(cfg, "coefficients.beta.value");
        cs.beta = [b](double) { return b; };
    } else if (mode != "self-consistent") {
        throw ParameterError("config: unknown coefficients.beta.mode '" + mode + "'");
    }
    return cs;
}

RunSetup parse_setup(const json& cfg) {
    RunSetup setup;
    setup.params = parse_model(cfg);
    setup.times = parse_times(cfg, setup.params.s);
    setup.grid.x_min = need_num(cfg, "grid.x_min");
    setup.grid.x_max = need_num(cfg, "grid.x_max");
    setup.grid.n = int_or(cfg, "grid.n", 0);
    if (setup.grid.n == 0) {
        throw ParameterError("config: missing or non-numeric field 'grid.n'");
    }
    setup.grid.validate();
    const std::string init_kind = str_or(cfg, "initial.kind", "gaussian");
    if (init_kind != "gaussian") {
        throw ParameterError("config: unknown initial.kind '" + init_kind + "'");
    }
    setup.init_mean = need_num(cfg, "initial.mean");
    setup.init_var = need_num(cfg, "initial.variance");
    if (!(setup.init_var > 0.0)) {
        throw ParameterError("config: initial.variance must be positive");
    }
    setup.coeffs = parse_coefficients(cfg, setup.params, setup.init_mean,
                                      setup.times.back(), setup.coeff_kind);
    return setup;
}

DensityGrid initial_profile(const RunSetup& setup) {
    return gaussian_density(setup.grid, setup.params.s, setup.init_mean,
                            setup.init_var);
}

// --- solvers --------------------------------------------------------------

std::vector<DensityGrid> run_fd(const RunSetup& setup, const json& cfg) {
    FdOptions opts;
    const std::string scheme = str_or(cfg, "fd.scheme", "explicit");
    if (scheme == "explicit") {
        opts.scheme = FdScheme::Explicit;
    } else if (scheme == "semi-implicit") {
        opts.scheme = FdScheme::SemiImplicit;
    } else {
        throw ParameterError("config: unknown fd.scheme '" + scheme + "'");
    }
    opts.dt = num_or(cfg, "fd.dt", 0.0);
    opts.feedback_moment = bool_or(cfg, "fd.feedback_moment", false);
    const DensityGrid gamma = initial_profile(setup);
    return fd_solve(setup.params, setup.coeffs, gamma, setup.times, opts).snapshots;
}

std::vector<DensityGrid> run_exact(const RunSetup& setup) {
    const DensityGrid gamma = initial_profile(setup);
    CoefficientSet coeffs = setup.coeffs;
    if (!coeffs.beta_resolved()) {
        coeffs = resolve_beta(setup.params, coeffs, gamma.mean(),
                              std::max(setup.times.back(), setup.params.s + 1e-3));
    }
    std::vector<DensityGrid> out;
    out.reserve(setup.times.size());
    for (double t : setup.times) {
        out.push_back(evolve_quadratic(setup.params, coeffs, gamma, t));
    }
    return out;
}

std::vector<DensityGrid> run_const(const RunSetup& setup) {
    const DensityGrid gamma = initial_profile(setup);
    std::vector<DensityGrid> out;
    out.reserve(setup.times.size());
    for (double t : setup.times) {
        out.push_back(evolve_const_diffusion(setup.params, gamma, t));
    }
    return out;
}

SemiclassicalState build_state(const RunSetup& setup, const json& cfg,
                               double tau_max) {
    CoefficientSet coeffs = setup.coeffs;
    if (!coeffs.beta_resolved()) {
        coeffs = resolve_beta(setup.params, coeffs, setup.init_mean,
                              std::max(tau_max, setup.params.s + 1e-3));
    }
    TransformContext ctx(setup.params, coeffs);
    SemiclassicalOptions opts;
    opts.xi_grid.x_min = num_or(cfg, "semiclassical.xi_min", -8.0);
    opts.xi_grid.x_max = num_or(cfg, "semiclassical.xi_max", 8.0);
    opts.xi_grid.n = int_or(cfg, "semiclassical.xi_n", 641);
    opts.tau_step = num_or(cfg, "semiclassical.tau_step", 1e-3);
    opts.sigma_nodes = int_or(cfg, "semiclassical.sigma_nodes", 32);
    const double s = setup.params.s;
    const double y_start = num_or(cfg, "semiclassical.y_start",
                                  ctx.y_of_x(setup.init_mean, s));
    // Pull the x-space initial condition back to the stretched variable.
    const double sqe = std::sqrt(setup.params.epsilon);
    const double inv_norm = 1.0 / std::sqrt(2.0 * M_PI * setup.init_var);
    std::vector<double> gamma_xi(static_cast<std::size_t>(opts.xi_grid.n));
    for (int j = 0; j < opts.xi_grid.n; ++j) {
        const double y = y_start + sqe * opts.xi_grid.point(j);
        double value = 0.0;
        try {
            const double x = ctx.x_of_y(y, s);
            const double d = x - setup.init_mean;
            value = inv_norm * std::exp(-0.5 * d * d / setup.init_var);
        } catch (const DomainError&) {
            value = 0.0;  // beyond representable range: tail is zero anyway
        }
        gamma_xi[static_cast<std::size_t>(j)] = value;
    }
    return SemiclassicalState(std::move(ctx), y_start, std::move(gamma_xi), tau_max,
                              opts);
}

std::vector<DensityGrid> run_semiclassical(const RunSetup& setup, const json& cfg) {
    const double s = setup.params.s;
    double tau_max = setup.times.back();
    if (!(tau_max > s)) {
        tau_max = s + 1e-2;
    }
    SemiclassicalState state = build_state(setup, cfg, tau_max);
    const bool include_phi1 = bool_or(cfg, "semiclassical.include_phi1", true);
    const bool renormalize = bool_or(cfg, "semiclassical.renormalize", false);
    std::vector<DensityGrid> out;
    out.reserve(setup.times.size());
    for (double t : setup.times) {
        out.push_back(assemble_density(state, t, setup.grid, include_phi1, renormalize));
    }
    return out;
}

std::vector<DensityGrid> run_solver(const std::string& kind, const RunSetup& setup,
                                    const json& cfg) {
    if (kind == "fd") {
        return run_fd(setup, cfg);
    }
    if (kind == "exact") {
        return run_exact(setup);
    }
    if (kind == "const") {
        return run_const(setup);
    }
    if (kind == "semiclassical") {
        return run_semiclassical(setup, cfg);
    }
    throw ParameterError("config: unknown solver '" + kind + "'");
}

// --- output ---------------------------------------------------------------

void write_text(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ParameterError("cannot open output file " + path.string());
    }
    out << body;
}

std::string density_csv(const DensityGrid& g) {
    std::string body = "x,u\n";
    for (int i = 0; i < g.size(); ++i) {
        body += num17(g.x(i));
        body += ',';
        body += num17(g.value(i));
        body += '\n';
    }
    return body;
}

json density_stats(const DensityGrid& g) {
    return json{{"tau", g.tau()},
                {"norm", g.norm()},
                {"mean", g.mean()},
                {"variance", g.variance()}};
}

int write_density_outputs(const std::string& command,
                          const std::vector<DensityGrid>& snapshots,
                          const std::filesystem::path& out_dir,
                          const std::string& prefix) {
    json summary;
    summary["command"] = command;
    summary["outputs"] = json::array();
    summary["stats"] = json::array();
    for (std::size_t k = 0; k < snapshots.size(); ++k) {
        const std::string name = prefix + "_density_" + std::to_string(k) + ".csv";
        write_text(out_dir / name, density_csv(snapshots[k]));
        summary["outputs"].push_back(name);
        summary["stats"].push_back(density_stats(snapshots[k]));
    }
    write_text(out_dir / (prefix + "_summary.json"), summary.dump(2) + "\n");
    return 0;
}

int cmd_moment(const json& cfg, const std::filesystem::path& out_dir,
               const std::string& prefix) {
    const ModelParams params = parse_model(cfg);
    const std::vector<double> times = parse_times(cfg, params.s);
    std::string kind;
    ModelParams p = params;
    CoefficientSet coeffs = parse_coefficients(cfg, p, num_or(cfg, "moment.x_start", 0.0),
                                               times.back(), kind);
    const double x_start = need_num(cfg, "moment.x_start");
    const double dt = num_or(cfg, "moment.dt", 1e-3);

    std::vector<double> values;
    if (times.back() > p.s + 1e-12) {
        const MomentTrajectory traj = moment_ode_solve(
            p, coeffs, x_start, uniform_time_grid(p.s, times.back(), dt));
        for (double t : times) {
            values.push_back(traj(t));
        }
    } else {
        values.assign(times.size(), x_start);
    }

    std::string body = "tau,moment\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        body += num17(times[i]);
        body += ',';
        body += num17(values[i]);
        body += '\n';
    }
    const std::string name = prefix + "_moment.csv";
    write_text(out_dir / name, body);

    json summary;
    summary["command"] = "moment";
    summary["outputs"] = json::array({name});
    summary["times"] = times;
    summary["moments"] = values;
    write_text(out_dir / (prefix + "_summary.json"), summary.dump(2) + "\n");
    return 0;
}

int cmd_compare(const json& cfg, const std::filesystem::path& out_dir,
                const std::string& prefix) {
    const RunSetup setup = parse_setup(cfg);
    const std::string kind_a = need_str(cfg, "compare.a");
    const std::string kind_b = need_str(cfg, "compare.b");
    const auto snaps_a = run_solver(kind_a, setup, cfg);
    const auto snaps_b = run_solver(kind_b, setup, cfg);

    std::string body = "tau,l1,linf,mean_diff,variance_diff\n";
    json rows = json::array();
    double last_l1 = 0.0;
    for (std::size_t k = 0; k < setup.times.size(); ++k) {
        const GridMetrics m = grid_metrics(snaps_a[k], snaps_b[k]);
        body += num17(setup.times[k]);
        body += ',';
        body += num17(m.l1);
        body += ',';
        body += num17(m.linf);
        body += ',';
        body += num17(m.mean_diff);
        body += ',';
        body += num17(m.variance_diff);
        body += '\n';
        rows.push_back(json{{"tau", setup.times[k]},
                            {"l1", m.l1},
                            {"linf", m.linf},
                            {"mean_diff", m.mean_diff},
                            {"variance_diff", m.variance_diff}});
        last_l1 = m.l1;
    }
    const std::string name = prefix + "_compare.csv";
    write_text(out_dir / name, body);

    json summary;
    summary["command"] = "compare";
    summary["outputs"] = json::array({name});
    summary["solvers"] = json::array({kind_a, kind_b});
    summary["metrics"] = rows;
    summary["l1_vs_reference"] = last_l1;
    write_text(out_dir / (prefix + "_summary.json"), summary.dump(2) + "\n");
    return 0;
}

int cmd_residual(const json& cfg, const std::filesystem::path& out_dir,
                 const std::string& prefix) {
    RunSetup setup = parse_setup(cfg);
    const double tau = need_num(cfg, "residual.tau");
    const json* eps_list = find_path(cfg, "residual.epsilons");
    if (eps_list == nullptr || !eps_list->is_array() || eps_list->empty()) {
        throw ParameterError("config: 'residual.epsilons' must be a nonempty array");
    }
    ResidualOptions ropts;
    ropts.dtau = num_or(cfg, "residual.dtau", 5e-4);
    const bool ablate = bool_or(cfg, "residual.ablate", false);

    SemiclassicalState state =
        build_state(setup, cfg, tau + 8.0 * ropts.dtau);

    std::string body = "epsilon,phi1,residual_norm,solution_norm,ratio\n";
    json rows = json::array();
    for (const auto& je : *eps_list) {
        if (!je.is_number()) {
            throw ParameterError("config: 'residual.epsilons' entries must be numbers");
        }
        const double eps = je.get<double>();
        for (int pass = 0; pass < (ablate ? 2 : 1); ++pass) {
            ropts.include_phi1 = (pass == 0);
            const ResidualReport rep = residual(state, tau, eps, ropts);
            body += num17(rep.epsilon);
            body += ',';
            body += rep.phi1_included ? '1' : '0';
            body += ',';
            body += num17(rep.residual_norm);
            body += ',';
            body += num17(rep.solution_norm);
            body += ',';
            body += num17(rep.ratio);
            body += '\n';
            rows.push_back(json{{"epsilon", rep.epsilon},
                                {"phi1", rep.phi1_included},
                                {"residual_norm", rep.residual_norm},
                                {"solution_norm", rep.solution_norm},
                                {"ratio", rep.ratio}});
        }
    }
    const std::string name = prefix + "_residual.csv";
    write_text(out_dir / name, body);

    json summary;
    summary["command"] = "residual";
    summary["outputs"] = json::array({name});
    summary["tau"] = tau;
    summary["rows"] = rows;
    write_text(out_dir / (prefix + "_summary.json"), summary.dump(2) + "\n");
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"drift-diffusion model toolkit"};
    std::string config_path;
    std::string out_dir = ".";
    std::string command_flag;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_dir, "output directory (created if absent)");
    app.add_option("--command", command_flag, "command, overriding the config");
    app.add_option("--override,-D", overrides,
                   "dot-path override, e.g. -D model.alpha=0.5");
    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot read config file '" << config_path << "'\n";
            return 1;
        }
        json cfg = json::parse(in, nullptr, false);
        if (cfg.is_discarded()) {
            std::cerr << "error: config file '" << config_path
                      << "' is not valid JSON\n";
            return 1;
        }
        for (const auto& o : overrides) {
            apply_override(cfg, o);
        }
        const std::string schema = str_or(cfg, "schema", "");
        if (schema != "1") {
            throw ParameterError("config: field 'schema' must be the string \"1\"");
        }
        require_known_keys(cfg, "",
                           {"schema", "command", "output", "model", "coefficients",
                            "initial", "grid", "times", "moment", "fd",
                            "semiclassical", "compare", "residual"});
        require_known_keys(cfg, "output", {"prefix"});
        require_known_keys(cfg, "model", {"alpha", "kappa", "a", "epsilon", "s"});
        require_known_keys(cfg, "grid", {"x_min", "x_max", "n"});
        require_known_keys(cfg, "initial", {"kind", "mean", "variance"});
        require_known_keys(cfg, "moment", {"x_start", "dt"});
        require_known_keys(cfg, "fd", {"scheme", "dt", "feedback_moment"});
        require_known_keys(cfg, "semiclassical",
                           {"xi_min", "xi_max", "xi_n", "tau_step", "sigma_nodes",
                            "y_start", "include_phi1", "renormalize"});
        require_known_keys(cfg, "compare", {"a", "b"});
        require_known_keys(cfg, "residual", {"tau", "epsilons", "dtau", "ablate"});
        const std::string command =
            command_flag.empty() ? need_str(cfg, "command") : command_flag;
        const std::string prefix = str_or(cfg, "output.prefix", "run");

        std::filesystem::path dir(out_dir);
        std::filesystem::create_directories(dir);

        if (command == "moment") {
            return cmd_moment(cfg, dir, prefix);
        }
        if (command == "evolve-const") {
            const RunSetup setup = parse_setup(cfg);
            return write_density_outputs(command, run_const(setup), dir, prefix);
        }
        if (command == "evolve-exact") {
            const RunSetup setup = parse_setup(cfg);
            return write_density_outputs(command, run_exact(setup), dir, prefix);
        }
        if (command == "evolve-fd") {
            const RunSetup setup = parse_setup(cfg);
            return write_density_outputs(command, run_fd(setup, cfg), dir, prefix);
        }
        if (command == "evolve-semiclassical") {
            const RunSetup setup = parse_setup(cfg);
            return write_density_outputs(command, run_semiclassical(setup, cfg), dir,
                                         prefix);
        }
        if (command == "compare") {
            return cmd_compare(cfg, dir, prefix);
        }
        if (command == "residual") {
            return cmd_residual(cfg, dir, prefix);
        }
        throw ParameterError("config: unknown command '" + command + "'");
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace nfpe
