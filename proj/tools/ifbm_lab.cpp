// ifbm_lab: command-line front end.
//
// Every subcommand first turns its flags into a JSON run config, then runs from
// that config alone. The config (minus --out) is embedded in each artifact, and
// --config <artifact> re-runs it, which is how byte-identical reruns are checked.
//
// Exit codes: 0 success, 1 audit failure, 2 invalid arguments (nothing written),
// 3 runtime failure.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ifbm/audit.hpp"
#include "ifbm/kernels.hpp"
#include "ifbm/persistence.hpp"
#include "ifbm/sampler.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitAuditFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(item);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double to_double(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw UsageError("cannot parse " + what + " '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw UsageError("cannot parse " + what + " '" + s + "'");
    return v;
}

std::uint64_t to_uint(const std::string& s, const std::string& what) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw UsageError("cannot parse " + what + " '" + s + "'");
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw UsageError(what + " out of range: '" + s + "'");
    }
}

// "master[:stream]"
json parse_seed(const std::string& s) {
    const auto parts = split(s, ':');
    if (parts.empty() || parts.size() > 2) throw UsageError("seed must be master[:stream]");
    return {{"master_seed", to_uint(parts[0], "seed")},
            {"stream_index", parts.size() == 2 ? to_uint(parts[1], "stream index") : 0}};
}

// "lo:hi:n[:lin|log]"
json parse_range(const std::string& s, bool allow_log) {
    const auto p = split(s, ':');
    if (p.size() < 3 || p.size() > 4) throw UsageError("grid must be lo:hi:n" + std::string(allow_log ? "[:lin|log]" : ""));
    json g{{"lo", to_double(p[0], "grid start")},
           {"hi", to_double(p[1], "grid end")},
           {"n", to_uint(p[2], "grid size")},
           {"spacing", p.size() == 4 ? p[3] : "lin"}};
    if (g["spacing"] != "lin" && !(allow_log && g["spacing"] == "log")) throw UsageError("unknown grid spacing");
    return g;
}

std::vector<double> expand_range(const json& g) {
    const double lo = g.at("lo"), hi = g.at("hi");
    const std::size_t n = g.at("n");
    const bool log = g.at("spacing") == "log";
    if (n < 1 || (n > 1 && !(hi > lo)) || (n == 1 && lo != hi && hi < lo))
        throw UsageError("grid needs n >= 1 and hi > lo");
    if (log && !(lo > 0.0)) throw UsageError("log-spaced grid needs lo > 0");
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        v[i] = log ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f;
    }
    v.back() = n == 1 ? lo : hi;
    return v;
}

// "1,2,4,8", "lin:lo:hi:n" or "geom:lo:hi:n"
std::vector<double> parse_ladder(const std::string& s) {
    const auto parts = split(s, ':');
    if (parts.size() == 4 && (parts[0] == "lin" || parts[0] == "geom")) {
        json g{{"lo", to_double(parts[1], "ladder start")},
               {"hi", to_double(parts[2], "ladder end")},
               {"n", to_uint(parts[3], "ladder size")},
               {"spacing", parts[0] == "geom" ? "log" : "lin"}};
        return expand_range(g);
    }
    std::vector<double> out;
    for (const auto& item : split(s, ',')) out.push_back(to_double(item, "horizon"));
    return out;
}

// =============================================================================
// Artifact I/O
// =============================================================================

// Writes atomically enough for our purposes: the whole content is produced
// before the file is opened.
void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string config_line(const json& config) { return "# config: " + config.dump() + "\n"; }

// Finds the run config inside a CSV, .dat or JSON artifact.
json load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config artifact " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        const json j = json::parse(text, nullptr, false);
        if (j.is_discarded() || !j.contains("config")) throw UsageError("no embedded config in " + path.string());
        return j["config"];
    }
    std::istringstream lines(text);
    std::string line;
    const std::string prefix = "# config: ";
    while (std::getline(lines, line)) {
        if (line.rfind(prefix, 0) == 0) {
            const json j = json::parse(line.substr(prefix.size()), nullptr, false);
            if (j.is_discarded()) break;
            return j;
        }
    }
    throw UsageError("no embedded config in " + path.string());
}

// =============================================================================
// kernel-eval
// =============================================================================

int run_kernel_eval(const json& config, const fs::path& out) {
    const auto hurst = config.at("hurst").is_null() ? std::optional<double>() : config.at("hurst").get<double>();
    ifbm::kernels::KernelId kernel = [&] {
        try {
            return ifbm::kernels::KernelId::parse(config.at("kernel").get<std::string>(), hurst);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }();
    const auto ts = expand_range(config.at("grid"));
    for (double t : ts)
        if (t < 0.0) throw UsageError("lags must be nonnegative");
    const std::string format = config.at("format");
    std::string body;
    if (format == "csv") {
        body = config_line(config) + "t,value\n";
        for (double t : ts) body += num(t) + "," + num(ifbm::kernels::evaluate(kernel, t)) + "\n";
    } else {
        json rows = json::array();
        for (double t : ts) rows.push_back({{"t", t}, {"value", ifbm::kernels::evaluate(kernel, t)}});
        body = json{{"config", config}, {"rows", rows}}.dump(2) + "\n";
    }
    write_file(out, body);
    return 0;
}

// =============================================================================
// audit
// =============================================================================

struct Selection {
    std::vector<ifbm::audit::InequalityId> inequalities;
    bool claims = false;
};

Selection parse_selector(const std::string& selector) {
    using namespace ifbm::audit;
    Selection s;
    auto all_ineq = [&] { s.inequalities.assign(std::begin(kAllInequalities), std::end(kAllInequalities)); };
    if (selector == "all") {
        all_ineq();
        s.claims = true;
        return s;
    }
    if (selector == "inequalities") {
        all_ineq();
        return s;
    }
    for (const auto& item : split(selector, ',')) {
        if (item == "claims") {
            s.claims = true;
        } else if (auto id = parse_inequality(item)) {
            s.inequalities.push_back(*id);
        } else {
            throw UsageError("invalid audit selector '" + item +
                             "' (expected all, inequalities, claims, or a list of 2.1, 2.2, 2.3-left, 2.3-right, 2.4)");
        }
    }
    if (s.inequalities.empty() && !s.claims) throw UsageError("empty audit selector");
    return s;
}

int run_audit(const json& config, const fs::path& out) {
    using namespace ifbm::audit;
    const Selection sel = parse_selector(config.at("selector"));
    if (config.at("format") != "json") throw UsageError("audit reports are JSON only");
    const json& g = config.at("grid");
    GridSpec grid;
    grid.nx = g.at("nx");
    grid.nalpha = g.at("nalpha");
    grid.refine_depth = g.at("refine_depth");
    grid.margin_tol = g.at("margin_tol");
    if (!g.at("alpha_min").is_null()) grid.alpha_min = g.at("alpha_min").get<double>();
    if (!g.at("alpha_max").is_null()) grid.alpha_max = g.at("alpha_max").get<double>();
    for (auto id : sel.inequalities) {
        try {
            grid.validate(id);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    const std::size_t identity_points = config.at("identity_points");
    const std::uint64_t seed = config.at("seed");

    bool pass = true;
    json reports = json::array();
    for (auto id : sel.inequalities) {
        const AuditReport r = verify_inequality(id, grid);
        json j = to_json(r);
        const double residual = defining_identity_residual(id, identity_points, seed);
        j["defining_identity"] = {{"points", identity_points}, {"max_residual", residual}, {"pass", residual <= 1e-9}};
        pass = pass && r.pass && residual <= 1e-9;
        reports.push_back(j);
    }
    json claims = json::array();
    if (sel.claims)
        for (const auto& c : check_claims()) {
            claims.push_back(to_json(c));
            pass = pass && c.pass;
        }
    const json report{{"config", config}, {"inequalities", reports}, {"claims", claims}, {"pass", pass}};
    write_file(out, report.dump(2) + "\n");
    return pass ? 0 : kExitAuditFailed;
}

// =============================================================================
// estimate
// =============================================================================

std::string records_csv(const std::vector<ifbm::persistence::HorizonRecord>& records) {
    std::string s = "horizon,n_trials,n_survive,p_hat,ci_low,ci_high\n";
    for (const auto& r : records)
        s += fmt::format("{},{},{},{},{},{}\n", num(r.horizon), r.n_trials, r.n_survive, num(r.p_hat), num(r.ci_low),
                         num(r.ci_high));
    return s;
}

json records_json(const std::vector<ifbm::persistence::HorizonRecord>& records) {
    json a = json::array();
    for (const auto& r : records)
        a.push_back({{"horizon", r.horizon},
                     {"n_trials", r.n_trials},
                     {"n_survive", r.n_survive},
                     {"p_hat", r.p_hat},
                     {"ci_low", r.ci_low},
                     {"ci_high", r.ci_high}});
    return a;
}

int run_estimate(const json& config, const fs::path& out) {
    using namespace ifbm::persistence;
    ExperimentConfig exp;
    std::optional<ifbm::kernels::HurstIndex> h;
    try {
        if (config.at("hurst").is_null()) throw UsageError("--hurst is required");
        h = ifbm::kernels::HurstIndex(config.at("hurst").get<double>());
        exp = experiment_config_from_json(config.at("experiment"));
        exp.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const ExperimentResult result = experiment(*h, exp);
    json summary = to_json(result);
    summary["coarse_mesh"]["records"] = records_json(result.coarse_estimate.records);
    std::string body;
    if (config.at("format") == "csv") {
        body = config_line(config) + records_csv(result.estimate.records) + "# result: " + summary.dump() + "\n";
    } else {
        body = json{{"config", config}, {"records", records_json(result.estimate.records)}, {"result", summary}}.dump(2) +
               "\n";
    }
    write_file(out, body);
    return 0;
}

// =============================================================================
// bounds
// =============================================================================

int run_bounds(const json& config, const fs::path& out) {
    using namespace ifbm::persistence;
    std::vector<BoundsRow> rows;
    for (double H : expand_range(config.at("grid"))) {
        try {
            rows.push_back(prop1_bounds(ifbm::kernels::HurstIndex(H)));
        } catch (const std::invalid_argument& e) {
            throw UsageError(fmt::format("H = {} : {}", num(H), e.what()));
        }
    }
    std::string body;
    if (config.at("format") == "csv") {
        body = config_line(config) + "H,lower,upper,hypothesis,lower_clause,upper_clause\n";
        for (const auto& r : rows)
            body += fmt::format("{},{},{},{},{},{}\n", num(r.hurst), num(r.lower), num(r.upper), num(r.hypothesis),
                                r.lower_clause, r.upper_clause);
    } else {
        json a = json::array();
        for (const auto& r : rows)
            a.push_back({{"H", r.hurst},
                         {"lower", r.lower},
                         {"upper", r.upper},
                         {"hypothesis", r.hypothesis},
                         {"lower_clause", r.lower_clause},
                         {"upper_clause", r.upper_clause}});
        body = json{{"config", config}, {"rows", a}}.dump(2) + "\n";
    }
    std::string dat = config_line(config) + "# H lower hypothesis upper\n";
    for (const auto& r : rows) dat += fmt::format("{} {} {} {}\n", num(r.hurst), num(r.lower), num(r.hypothesis), num(r.upper));
    fs::path dat_path = out;
    dat_path.replace_extension(".dat");
    if (dat_path == out) dat_path += ".dat";
    write_file(out, body);
    write_file(dat_path, dat);
    return 0;
}

// =============================================================================
// sample
// =============================================================================

int run_sample(const json& config, const fs::path& out) {
    using namespace ifbm::sampler;
    const std::string process = config.at("process");
    const auto hurst = config.at("hurst").is_null() ? std::optional<double>() : config.at("hurst").get<double>();
    ProcessDescriptor desc;
    SampleGrid grid;
    std::size_t batch = 0;
    EigenPolicy policy = config.at("policy") == "pad" ? EigenPolicy::Pad : EigenPolicy::Clip;
    try {
        if (process.empty()) throw std::invalid_argument("--process is required");
        if (process == "stationary") {
            desc = ProcessDescriptor::stationary(ifbm::kernels::KernelId::parse(config.at("kernel").get<std::string>(), hurst));
        } else {
            if (!hurst) throw std::invalid_argument("--hurst is required for " + process);
            const ifbm::kernels::HurstIndex h(*hurst);
            if (process == "fgn")
                desc = ProcessDescriptor::fgn(h);
            else if (process == "fbm")
                desc = ProcessDescriptor::fbm(h);
            else if (process == "ifbm")
                desc = ProcessDescriptor::ifbm(h);
            else
                throw std::invalid_argument("unknown process '" + process + "'");
        }
        grid = {config.at("n").get<std::size_t>(), config.at("dt").get<double>()};
        grid.validate();
        batch = config.at("batch");
        if (batch == 0) throw std::invalid_argument("batch must be positive");
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const SeedSpec seed{config.at("master_seed"), config.at("stream_index")};
    EmbeddingOptions options;
    options.policy = policy;
    const PathBundle bundle = sample(desc, grid, batch, seed, options);
    if (config.at("format") == "csv") {
        // Bundle CSV, then prepend the config line.
        const fs::path tmp = fs::path(out.string() + ".tmp");
        write_bundle_csv(bundle, tmp);
        std::ifstream in(tmp);
        std::stringstream buf;
        buf << in.rdbuf();
        in.close();
        fs::remove(tmp);
        write_file(out, config_line(config) + buf.str());
    } else {
        write_bundle_binary(bundle, out);
        json header = bundle_header(bundle);
        header["config"] = config;
        write_file(fs::path(out.string() + ".json"), header.dump(2) + "\n");
    }
    return 0;
}

// =============================================================================
// Flags to config
// =============================================================================

json default_ladder_config(const std::string& side) {
    return side == "dual" ? json("lin:2:24:12") : json("geom:32:16384:10");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Persistence exponents of integrated fractional Brownian motion"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "ifbm_lab 1.0");

    std::string out, config_path;
    std::string format = "csv";
    std::optional<double> hurst;
    std::string kernel = "ifbm", grid, seed = "0", ladder;
    std::string process, side = "dual", policy = "clip", selector = "all";
    std::size_t batch = 0;
    double dt = 0.0, margin_tol = 1e-12;
    std::optional<double> level, alpha_min, alpha_max;
    int refine_depth = 6;
    std::size_t identity_points = 100, jackknife = 20;
    double known_tolerance = 0.04;

    auto common = [&](CLI::App* sub, const std::string& formats) {
        sub->add_option("--out", out, "Output file")->required();
        sub->add_option("--format", format, "Output format: " + formats);
        sub->add_option("--config", config_path, "Re-run from the config embedded in an earlier artifact");
    };

    auto* kev = app.add_subcommand("kernel-eval", "Evaluate a dual correlation kernel on a lag grid");
    common(kev, "csv or json");
    kev->add_option("--kernel", kernel, "ifbm, fbm or ifbm-half");
    kev->add_option("--hurst", hurst, "Hurst index in (0, 1)");
    kev->add_option("--grid", grid, "lo:hi:n[:lin|log], default 0:10:101");

    auto* aud = app.add_subcommand("audit", "Grid-verify the kernel inequalities and intermediate claims");
    common(aud, "json");
    aud->add_option("--inequality,--select", selector, "all, inequalities, claims, or a list like 2.1,2.3-right");
    aud->add_option("--grid", grid, "nx:nalpha, default 2000:2000");
    aud->add_option("--refine-depth", refine_depth, "Adaptive refinement depth");
    aud->add_option("--margin-tol", margin_tol, "Allowed sign violation");
    aud->add_option("--alpha-min", alpha_min, "Restrict the alpha range");
    aud->add_option("--alpha-max", alpha_max, "Restrict the alpha range");
    aud->add_option("--identity-points", identity_points, "Random points for the Delta-vs-kernel identity check");
    aud->add_option("--seed", seed, "Seed for the identity check points");

    auto* est = app.add_subcommand("estimate", "Monte Carlo persistence exponent");
    common(est, "csv or json");
    est->add_option("--hurst", hurst, "Hurst index in (0, 1); required unless --config");
    est->add_option("--process", process, "ifbm (default) or fbm");
    est->add_option("--side", side, "dual (default) or self-similar");
    est->add_option("--ladder", ladder, "Horizons: list a,b,c or lin:lo:hi:n or geom:lo:hi:n");
    est->add_option("--dt", dt, "Fine mesh (coarse mesh is 2 dt)");
    est->add_option("--batch", batch, "Number of paths");
    est->add_option("--seed", seed, "master[:stream]");
    est->add_option("--level", level, "Barrier level (default 0 dual, 1 self-similar)");
    est->add_option("--policy", policy, "clip or pad");
    est->add_option("--jackknife-groups", jackknife, "Path groups for the jackknife standard error");
    est->add_option("--known-tolerance", known_tolerance, "Allowed distance to a known exact exponent");

    auto* bnd = app.add_subcommand("bounds", "Tabulate the analytic exponent bounds");
    common(bnd, "csv or json");
    bnd->add_option("--grid", grid, "H grid lo:hi:n, default 0.01:0.99:99");

    auto* smp = app.add_subcommand("sample", "Export raw sample paths");
    common(smp, "csv or bin");
    smp->add_option("--process", process, "fgn, fbm, ifbm or stationary; required unless --config");
    smp->add_option("--kernel", kernel, "Kernel for stationary paths");
    smp->add_option("--hurst", hurst, "Hurst index in (0, 1)");
    smp->add_option("--grid", grid, "n:dt, default 1001:0.01");
    smp->add_option("--batch", batch, "Number of paths");
    smp->add_option("--seed", seed, "master[:stream]");
    smp->add_option("--policy", policy, "clip or pad");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        const json nullable_hurst = hurst ? json(*hurst) : json(nullptr);
        json config;
        std::string command;
        if (kev->parsed()) {
            command = "kernel-eval";
            if (format != "csv" && format != "json") throw UsageError("format must be csv or json");
            config = {{"command", command},
                      {"kernel", kernel},
                      {"hurst", nullable_hurst},
                      {"grid", parse_range(grid.empty() ? "0:10:101" : grid, true)},
                      {"format", format}};
        } else if (aud->parsed()) {
            command = "audit";
            if (!aud->get_option("--format")->count()) format = "json";
            const auto g = split(grid.empty() ? "2000:2000" : grid, ':');
            if (g.size() != 2) throw UsageError("audit grid must be nx:nalpha");
            config = {{"command", command},
                      {"selector", selector},
                      {"grid",
                       {{"nx", to_uint(g[0], "nx")},
                        {"nalpha", to_uint(g[1], "nalpha")},
                        {"refine_depth", refine_depth},
                        {"margin_tol", margin_tol},
                        {"alpha_min", alpha_min ? json(*alpha_min) : json(nullptr)},
                        {"alpha_max", alpha_max ? json(*alpha_max) : json(nullptr)}}},
                      {"identity_points", identity_points},
                      {"seed", to_uint(seed, "seed")},
                      {"format", format}};
            // Reject a malformed selector before anything else happens.
            if (config_path.empty()) parse_selector(selector);
        } else if (est->parsed()) {
            command = "estimate";
            if (format != "csv" && format != "json") throw UsageError("format must be csv or json");
            if (side != "dual" && side != "self-similar") throw UsageError("side must be dual or self-similar");
            if (policy != "clip" && policy != "pad") throw UsageError("policy must be clip or pad");
            const std::string proc = process.empty() ? "ifbm" : process;
            if (proc != "ifbm" && proc != "fbm") throw UsageError("process must be ifbm or fbm");
            const json s = parse_seed(seed);
            json ladder_json = ladder.empty() ? default_ladder_config(side) : json(ladder);
            config = {{"command", command},
                      {"hurst", nullable_hurst},
                      {"experiment",
                       {{"process", proc},
                        {"side", side},
                        {"ladder", parse_ladder(ladder_json.get<std::string>())},
                        {"dt", dt > 0.0 ? dt : (side == "dual" ? 0.02 : 1.0)},
                        {"batch", batch > 0 ? batch : 100'000},
                        {"master_seed", s["master_seed"]},
                        {"stream_index", s["stream_index"]},
                        {"level", level ? json(*level) : json(nullptr)},
                        {"eigen_policy", policy},
                        {"jackknife_groups", jackknife},
                        {"known_tolerance", known_tolerance}}},
                      {"format", format}};
        } else if (bnd->parsed()) {
            command = "bounds";
            if (format != "csv" && format != "json") throw UsageError("format must be csv or json");
            config = {{"command", command},
                      {"grid", parse_range(grid.empty() ? "0.01:0.99:99" : grid, false)},
                      {"format", format}};
        } else {
            command = "sample";
            if (format != "csv" && format != "bin") throw UsageError("format must be csv or bin");
            if (policy != "clip" && policy != "pad") throw UsageError("policy must be clip or pad");
            const auto g = split(grid.empty() ? "1001:0.01" : grid, ':');
            if (g.size() != 2) throw UsageError("sample grid must be n:dt");
            const json s = parse_seed(seed);
            config = {{"command", command},
                      {"process", process},
                      {"kernel", process == "stationary" ? json(kernel) : json(nullptr)},
                      {"hurst", nullable_hurst},
                      {"n", to_uint(g[0], "n")},
                      {"dt", to_double(g[1], "dt")},
                      {"batch", batch > 0 ? batch : 100},
                      {"master_seed", s["master_seed"]},
                      {"stream_index", s["stream_index"]},
                      {"policy", policy},
                      {"format", format}};
        }

        if (!config_path.empty()) {
            config = load_config(config_path);
            if (config.value("command", "") != command)
                throw UsageError("config artifact is for '" + config.value("command", "?") + "', not '" + command + "'");
        }

        if (command == "kernel-eval") return run_kernel_eval(config, out);
        if (command == "audit") return run_audit(config, out);
        if (command == "estimate") return run_estimate(config, out);
        if (command == "bounds") return run_bounds(config, out);
        return run_sample(config, out);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const json::exception& e) {
        std::cerr << "error: malformed config: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
