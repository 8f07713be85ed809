// SPDX-License-Identifier: Apache-2.0
#include "polya/cli.hpp"

#include "polya/bayes.hpp"
#include "polya/errors.hpp"
#include "polya/estimators.hpp"
#include "polya/samplers.hpp"
#include "polya/verify.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

namespace polya::cli {

namespace {

const std::vector<std::string> kCommands = {"simulate", "posterior", "estimate-zw", "verify"};
const std::vector<std::string> kChecks = {"mecke", "polya-ibp", "conjugacy", "mixed-ibp"};

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex(std::uint64_t x) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

// -- parameter access ----------------------------------------------------------

class Params {
public:
    explicit Params(const json& j) : j_(j) {}

    bool has(const char* name) const { return j_.contains(name) && !j_.at(name).is_null(); }

    const json& at(const char* name) const {
        if (!has(name)) {
            throw ConfigError(std::string("missing field '") + name + "'");
        }
        return j_.at(name);
    }

    double number(const char* name) const {
        const auto& v = at(name);
        if (!v.is_number()) {
            throw ConfigError(std::string("field '") + name + "': expected a number");
        }
        return v.get<double>();
    }

    std::optional<double> optional_number(const char* name) const {
        if (!has(name)) {
            return std::nullopt;
        }
        return number(name);
    }

    std::string string(const char* name, const std::string& fallback) const {
        if (!has(name)) {
            return fallback;
        }
        const auto& v = at(name);
        if (!v.is_string()) {
            throw ConfigError(std::string("field '") + name + "': expected a string");
        }
        return v.get<std::string>();
    }

    WindowPtr window() const {
        if (!window_) {
            window_ = guarded("window", [&] { return make_window(window_from_json(at("window"))); });
        }
        return window_;
    }

    ReferenceMeasure rho() const {
        return guarded("rho", [&] {
            const auto& r = at("rho");
            if (r.is_object() && r.contains("mass") && !r.contains("masses")) {
                const auto m = r.at("mass");
                if (!m.is_number()) {
                    throw ConfigError("field 'rho.mass': expected a number");
                }
                return ReferenceMeasure::uniform(window(), m.get<double>());
            }
            return reference_from_json(r, window());
        });
    }

    PointConfiguration mu() const {
        if (!has("mu")) {
            return PointConfiguration(window());
        }
        return guarded("mu", [&] { return configuration_from_json(at("mu"), window()); });
    }

    TestFunction function(const char* name, double fallback) const {
        if (!has(name)) {
            return TestFunction::constant(window(), fallback);
        }
        return guarded(name, [&] { return test_function_from_json(at(name), window()); });
    }

    std::optional<CellSet> cells(const char* name) const {
        if (!has(name)) {
            return std::nullopt;
        }
        return guarded(name, [&] { return cell_set_from_json(at(name), *window()); });
    }

    PolyaParams polya() const {
        const double z = number("z");
        return guarded("z", [&] { return PolyaParams(z, rho()); });
    }

    MixingMeasure mixture() const {
        return guarded("mixture", [&] {
            const auto& m = at("mixture");
            const auto& comps = m.is_object() && m.contains("components") ? m.at("components") : m;
            if (!comps.is_array()) {
                throw ConfigError("field 'mixture': expected an array of {z, w, p}");
            }
            std::vector<MixtureComponent> out;
            for (const auto& c : comps) {
                Params p(c);
                out.push_back({p.number("z"), p.number("w"), p.number("p")});
            }
            return MixingMeasure(std::move(out), rho());
        });
    }

    PolyaRoute route() const {
        const auto r = string("route", "direct");
        if (r == "direct") {
            return PolyaRoute::direct;
        }
        if (r == "cox") {
            return PolyaRoute::cox;
        }
        throw ConfigError("field 'route': expected 'direct' or 'cox', got '" + r + "'");
    }

private:
    template <typename Fn>
    static auto guarded(const char* name, Fn&& fn) -> decltype(fn()) {
        try {
            return fn();
        } catch (const ConfigError&) {
            throw;
        } catch (const SchemaError& e) {
            throw ConfigError(std::string("field '") + name + "': " + e.what());
        } catch (const ParameterError& e) {
            throw ConfigError(std::string("field '") + name + "': " + e.what());
        } catch (const json::exception& e) {
            throw ConfigError(std::string("field '") + name + "': " + e.what());
        }
    }

    const json& j_;
    mutable WindowPtr window_;
};

// -- output --------------------------------------------------------------------

json effective_config(const ExperimentConfig& c) {
    json j;
    j["command"] = c.command;
    j["checks"] = c.checks;
    j["params"] = c.params;
    j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
    j["n"] = c.n;
    j["eps"] = c.eps;
    return j;
}

json provenance(const ExperimentConfig& c, double runtime) {
    return {{"tool", "polya"},
            {"version", kVersion},
            {"command", c.command},
            {"config_hash", hex(fnv1a(effective_config(c).dump()))},
            {"seed", c.seed ? json(*c.seed) : json(nullptr)},
            {"created", utc_timestamp()},
            {"runtime_seconds", runtime}};
}

class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) {
        if (path.empty() || path == "-") {
            stream_ = &fallback;
        } else {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) {
                throw ConfigError("field 'out': cannot open '" + path + "' for writing");
            }
            stream_ = file_.get();
        }
    }
    std::ostream& operator*() { return *stream_; }
    bool is_stdout() const { return !file_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_ = nullptr;
};

void write_json_result(const ExperimentConfig& c, double runtime, const json& result, std::ostream& out) {
    json doc;
    doc["provenance"] = provenance(c, runtime);
    doc["result"] = result;
    out << doc.dump(2) << '\n';
}

void write_csv_header(const ExperimentConfig& c, double runtime, std::ostream& out) {
    out << "# provenance: " << provenance(c, runtime).dump() << '\n';
}

std::uint64_t require_seed(const ExperimentConfig& c) {
    if (!c.seed) {
        throw ConfigError("missing field 'seed' (sampling commands need an explicit seed)");
    }
    return *c.seed;
}

// -- commands ------------------------------------------------------------------

int run_simulate(const ExperimentConfig& c, std::ostream& stdout_stream) {
    const Params p(c.params);
    const RngSeed seed{require_seed(c), 0};
    const auto route = p.string("route", "direct");
    const auto start = std::chrono::steady_clock::now();

    // Each replica renders to one JSON line plus the scalars the CSV needs.
    struct Line {
        std::string text;
        std::uint64_t count = 0;
        double mass = 0.0;
        std::size_t atoms = 0;
    };
    std::vector<Line> lines;
    bool atomic = false;
    if (route == "direct" || route == "cox") {
        const auto params = p.polya();
        const auto r = p.route();
        lines = replicate(c.n, seed, [&](std::size_t, Rng& rng) {
            const auto mu = sample_polya(params, r, c.eps, rng);
            return Line{to_json(mu).dump(), mu.total_count(), 0.0, 0};
        });
    } else if (route == "poisson") {
        const auto rho = p.rho();
        lines = replicate(c.n, seed, [&](std::size_t, Rng& rng) {
            const auto mu = sample_poisson(rho, rng);
            return Line{to_json(mu).dump(), mu.total_count(), 0.0, 0};
        });
    } else if (route == "mixed") {
        const auto v = p.mixture();
        const auto r = p.has("mixed_route") ? Params(json{{"route", p.at("mixed_route")}}).route() : PolyaRoute::direct;
        lines = replicate(c.n, seed, [&](std::size_t, Rng& rng) {
            const auto s = sample_mixed(v, r, c.eps, rng);
            auto j = to_json(s.config);
            j["latent"] = {{"component", s.component}, {"z", s.z}, {"w", s.w}};
            return Line{j.dump(), s.config.total_count(), 0.0, 0};
        });
    } else if (route == "gamma" || route == "posterior") {
        atomic = true;
        const auto params = p.polya();
        const auto mu = p.mu();
        const bool posterior = route == "posterior";
        if (!(params.z() > 0.0)) {
            throw ConfigError("field 'z': gamma and posterior draws need z in (0,1)");
        }
        lines = replicate(c.n, seed, [&](std::size_t, Rng& rng) {
            const auto kappa = posterior ? sample_posterior(mu, params, c.eps, rng)
                                         : sample_gamma_measure(params, c.eps, rng);
            return Line{to_json(kappa).dump(), 0, kappa.total_mass(), kappa.atoms().size()};
        });
    } else {
        throw ConfigError("field 'route': expected direct, cox, poisson, mixed, gamma or posterior; got '" + route +
                          "'");
    }
    const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    Sink sink(c.out_path, stdout_stream);
    auto& out = *sink;
    if (c.format == OutputFormat::json) {
        out << json{{"provenance", provenance(c, runtime)}}.dump() << '\n';
        for (const auto& l : lines) {
            out << l.text << '\n';
        }
        return kSuccess;
    }
    write_csv_header(c, runtime, out);
    if (atomic) {
        out << "sample,total_mass,atoms\n";
        for (std::size_t i = 0; i < lines.size(); ++i) {
            out << i << ',' << json(lines[i].mass).dump() << ',' << lines[i].atoms << '\n';
        }
    } else {
        std::map<std::uint64_t, std::size_t> histogram;
        for (const auto& l : lines) {
            ++histogram[l.count];
        }
        out << "count,frequency\n";
        for (const auto& [k, f] : histogram) {
            out << k << ',' << f << '\n';
        }
    }
    return kSuccess;
}

int run_posterior(const ExperimentConfig& c, std::ostream& stdout_stream) {
    if (c.format != OutputFormat::json) {
        throw ConfigError("field 'format': posterior output is a measure and is only written as json");
    }
    const Params p(c.params);
    const double z = p.number("z");
    const auto rho = p.rho();
    const auto mu = p.mu();
    const auto start = std::chrono::steady_clock::now();
    PosteriorSpec spec = [&] {
        try {
            return posterior_params(z, rho, mu);
        } catch (const ParameterError& e) {
            throw ConfigError(std::string("field 'z': ") + e.what());
        }
    }();
    json result;
    result["posterior"] = {{"z_post", spec.z_post()}, {"a_post", spec.a_post()}, {"base", to_json(spec.base())}};
    result["estimator"] = to_json(bayes_estimator(z, rho, mu));
    result["exact"] = true;
    const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Sink sink(c.out_path, stdout_stream);
    write_json_result(c, runtime, result, *sink);
    return kSuccess;
}

int run_estimate(const ExperimentConfig& c, std::ostream& stdout_stream) {
    const Params p(c.params);
    const auto rho0 = p.rho();
    const auto mu = p.mu();
    const auto cells = p.cells("cells").value_or(CellSet::all(*p.window()));
    ZWConstraint constraint;
    constraint.fixed_z = p.optional_number("fix_z");
    constraint.fixed_w = p.optional_number("fix_w");
    const auto start = std::chrono::steady_clock::now();
    DensityStats stats;
    try {
        stats = density_stats(mu, rho0, cells);
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("field 'cells': ") + e.what());
    }
    ZWEstimate est;
    try {
        est = solve_zw(stats.u, stats.v, constraint);
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("field 'fix_z'/'fix_w': ") + e.what());
    }
    const json result = {{"z_hat", est.z_hat},     {"w_hat", est.w_hat},
                         {"u", stats.u},           {"v", stats.v},
                         {"window_mass", stats.window_mass},
                         {"residual", est.residual}, {"converged", est.converged}};
    const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Sink sink(c.out_path, stdout_stream);
    if (c.format == OutputFormat::json) {
        write_json_result(c, runtime, result, *sink);
    } else {
        write_csv_header(c, runtime, *sink);
        *sink << "z_hat,w_hat,u,v,window_mass,residual,converged\n"
              << json(est.z_hat).dump() << ',' << json(est.w_hat).dump() << ',' << json(stats.u).dump() << ','
              << json(stats.v).dump() << ',' << json(stats.window_mass).dump() << ','
              << json(est.residual).dump() << ',' << (est.converged ? "true" : "false") << '\n';
    }
    return kSuccess;
}

CheckReport run_check(const std::string& name, const ExperimentConfig& c, const Params& p, RngSeed seed) {
    auto guarded = [&](auto&& fn) {
        try {
            return fn();
        } catch (const ParameterError& e) {
            throw ConfigError("check '" + name + "': " + e.what());
        }
    };
    if (name == "mecke") {
        const auto rho = p.rho();
        const auto f = p.function("f", 1.0);
        const auto g = p.function("g", 0.0);
        return guarded([&] { return check_mecke(rho, f, g, c.n, seed); });
    }
    if (name == "polya-ibp") {
        const auto params = p.polya();
        const auto f = p.function("f", 1.0);
        const auto g = p.function("g", 0.0);
        PolyaCheckOptions options;
        options.route = p.route();
        options.eps = c.eps;
        options.kernel_z = p.optional_number("kernel_z");
        return guarded([&] { return check_polya_ibp(params, f, g, c.n, seed, options); });
    }
    if (name == "conjugacy") {
        const auto params = p.polya();
        const auto g = p.function("g", 0.0);
        const auto h = p.function("h", 0.0);
        return guarded([&] { return check_conjugacy(params, g, h, c.eps, c.n, seed); });
    }
    if (name == "mixed-ibp") {
        const auto v = p.mixture();
        const auto f = p.function("f", 1.0);
        const auto g = p.function("g", 0.0);
        MixedCheckOptions options;
        options.route = p.route();
        options.eps = c.eps;
        options.estimation_cells = p.cells("cells");
        if (p.has("fixed_kernel")) {
            const auto& k = p.at("fixed_kernel");
            if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number()) {
                throw ConfigError("field 'fixed_kernel': expected [z, w]");
            }
            options.fixed_kernel = std::pair{k[0].get<double>(), k[1].get<double>()};
        }
        return guarded([&] { return check_mixed_ibp(v, f, g, c.n, seed, options); });
    }
    throw ConfigError("unknown check '" + name + "'");
}

int run_verify(const ExperimentConfig& c, std::ostream& stdout_stream, std::ostream& log) {
    const Params p(c.params);
    const RngSeed base{require_seed(c), 0};
    const auto start = std::chrono::steady_clock::now();
    std::vector<CheckReport> reports;
    for (std::size_t i = 0; i < c.checks.size(); ++i) {
        reports.push_back(run_check(c.checks[i], c, p, base.derive(i)));
    }
    const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool all_pass = std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.pass; });

    Sink sink(c.out_path, stdout_stream);
    if (c.format == OutputFormat::json) {
        json arr = json::array();
        for (const auto& r : reports) {
            arr.push_back(to_json(r));
        }
        write_json_result(c, runtime, {{"reports", arr}, {"pass", all_pass}}, *sink);
    } else {
        write_csv_header(c, runtime, *sink);
        *sink << "check,n,lhs,lhs_stderr,rhs,rhs_stderr,exact,z_score,pass\n";
        for (const auto& r : reports) {
            *sink << r.name << ',' << r.n << ',' << json(r.lhs.mean).dump() << ',' << json(r.lhs.std_error).dump()
                  << ',' << json(r.rhs.mean).dump() << ',' << json(r.rhs.std_error).dump() << ','
                  << (r.exact ? json(*r.exact).dump() : "") << ',' << json(r.z_score).dump() << ','
                  << (r.pass ? "true" : "false") << '\n';
        }
    }
    // Table goes wherever the machine-readable output does not.
    auto& table = sink.is_stdout() ? log : stdout_stream;
    table << format_reports(reports);
    return all_pass ? kSuccess : kCheckFailed;
}

} // namespace

ExperimentConfig make_config(const std::string& command, std::vector<std::string> checks, const json& document,
                             const Overrides& overrides) {
    if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
        throw ConfigError("unknown command '" + command + "'");
    }
    if (!document.is_null() && !document.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    ExperimentConfig c;
    c.command = command;
    c.params = document.is_null() ? json::object() : document;
    if (c.params.contains("command") && c.params.at("command") != command) {
        throw ConfigError("field 'command': config is for '" + c.params.at("command").dump() + "'");
    }
    const Params p(c.params);
    try {
        if (p.has("seed")) {
            c.seed = p.at("seed").get<std::uint64_t>();
        }
        if (p.has("n")) {
            c.n = p.at("n").get<std::size_t>();
        }
        if (p.has("eps")) {
            c.eps = p.number("eps");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("field 'seed'/'n': ") + e.what());
    }
    std::string format = "json";
    if (p.has("output")) {
        const Params o(p.at("output"));
        c.out_path = o.string("path", "");
        format = o.string("format", "json");
    }
    if (overrides.seed) c.seed = overrides.seed;
    if (overrides.n) c.n = *overrides.n;
    if (overrides.eps) c.eps = *overrides.eps;
    if (overrides.out_path) c.out_path = *overrides.out_path;
    if (overrides.format) format = *overrides.format;

    if (format == "json") {
        c.format = OutputFormat::json;
    } else if (format == "csv") {
        c.format = OutputFormat::csv;
    } else {
        throw ConfigError("field 'format': expected json or csv, got '" + format + "'");
    }
    if (!(c.eps > 0.0)) {
        throw ConfigError("field 'eps': must be positive");
    }

    if (command == "verify") {
        if (checks.empty() && p.has("checks")) {
            checks = p.at("checks").get<std::vector<std::string>>();
        }
        if (checks.empty()) {
            throw ConfigError("field 'checks': verify needs at least one check");
        }
        for (const auto& name : checks) {
            if (std::find(kChecks.begin(), kChecks.end(), name) == kChecks.end()) {
                throw ConfigError("field 'checks': unknown check '" + name + "'");
            }
        }
        if (c.n < 100) {
            throw ConfigError("field 'n': checks need at least 100 replicas");
        }
        c.checks = std::move(checks);
    } else if (c.n < 1) {
        throw ConfigError("field 'n': must be positive");
    }
    // Sampling commands never fall back to a clock-derived seed.
    if ((command == "simulate" || command == "verify") && !c.seed) {
        throw ConfigError("missing field 'seed' (sampling commands need an explicit seed)");
    }
    c.params.erase("output");
    for (const char* key : {"seed", "n", "eps", "checks", "command"}) {
        c.params.erase(key);
    }
    return c;
}

int run(const ExperimentConfig& config, std::ostream& stdout_stream, std::ostream& log) {
    try {
        if (config.command == "simulate") {
            return run_simulate(config, stdout_stream);
        }
        if (config.command == "posterior") {
            return run_posterior(config, stdout_stream);
        }
        if (config.command == "estimate-zw") {
            return run_estimate(config, stdout_stream);
        }
        if (config.command == "verify") {
            return run_verify(config, stdout_stream, log);
        }
        throw ConfigError("unknown command '" + config.command + "'");
    } catch (const ConfigError& e) {
        log << "polya: config error: " << e.what() << '\n';
        return kUsageError;
    } catch (const InfeasibleStatistics& e) {
        log << "polya: " << e.what() << '\n';
        return kCheckFailed;
    } catch (const std::invalid_argument& e) {
        log << "polya: invalid parameter: " << e.what() << '\n';
        return kUsageError;
    } catch (const SchemaError& e) {
        log << "polya: config error: " << e.what() << '\n';
        return kUsageError;
    }
}

int main(int argc, char** argv) {
    CLI::App app{"Polya sum processes, Gamma random measures and their Cox processes"};
    app.require_subcommand(1);
    std::string config_path;
    Overrides overrides;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    double eps = 0.0;
    std::string out_path;
    std::string format;
    app.add_option("--config", config_path, "experiment config (JSON)");
    auto* seed_opt = app.add_option("--seed", seed, "64-bit RNG seed");
    auto* n_opt = app.add_option("--n", n, "number of replicas");
    auto* eps_opt = app.add_option("--eps", eps, "Gamma-measure truncation threshold");
    auto* out_opt = app.add_option("--out", out_path, "output path (default stdout)");
    auto* format_opt = app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    std::vector<std::string> checks;
    for (const auto& name : kCommands) {
        auto* sub = app.add_subcommand(name);
        sub->fallthrough();
        if (name == "verify") {
            sub->add_option("checks", checks, "checks to run: mecke, polya-ibp, conjugacy, mixed-ibp");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    if (*seed_opt) overrides.seed = seed;
    if (*n_opt) overrides.n = n;
    if (*eps_opt) overrides.eps = eps;
    if (*out_opt) overrides.out_path = out_path;
    if (*format_opt) overrides.format = format;

    const auto command = app.get_subcommands().front()->get_name();
    try {
        json document;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                throw ConfigError("--config: cannot read '" + config_path + "'");
            }
            try {
                document = json::parse(in);
            } catch (const json::parse_error& e) {
                throw ConfigError("--config: " + std::string(e.what()));
            }
        }
        const auto config = make_config(command, checks, document, overrides);
        return run(config, std::cout, std::cerr);
    } catch (const ConfigError& e) {
        std::cerr << "polya: config error: " << e.what() << '\n';
        return kUsageError;
    }
}

} // namespace polya::cli
