#include "pibounds/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pibounds/error.hpp"
#include "pibounds/error_rate.hpp"
#include "pibounds/fn_bounds.hpp"
#include "pibounds/inertia.hpp"
#include "pibounds/oracle.hpp"
#include "pibounds/pe_bounds.hpp"

namespace pibounds::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Input

std::vector<double> parse_csv_row(const std::string& line, std::size_t line_no) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const auto first = cell.find_first_not_of(" \t\r");
        if (first == std::string::npos)
            throw Error(ErrorCode::ParseError, "empty cell on line " + std::to_string(line_no));
        const auto last = cell.find_last_not_of(" \t\r");
        const std::string text = cell.substr(first, last - first + 1);
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != text.size())
            throw Error(ErrorCode::ParseError, "not a number on line " + std::to_string(line_no) + ": " + text);
        row.push_back(value);
    }
    return row;
}

std::vector<std::vector<double>> parse_grid(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        Json doc;
        try {
            doc = Json::parse(text);
        } catch (const Json::exception& e) {
            throw Error(ErrorCode::ParseError, e.what());
        }
        if (!doc.contains("pmf") || !doc["pmf"].is_array())
            throw Error(ErrorCode::ParseError, "expected an object with a \"pmf\" array");
        std::vector<std::vector<double>> grid;
        for (const auto& row : doc["pmf"]) {
            if (!row.is_array()) throw Error(ErrorCode::ParseError, "\"pmf\" rows must be arrays");
            auto& out = grid.emplace_back();
            for (const auto& v : row) {
                if (!v.is_number()) throw Error(ErrorCode::ParseError, "\"pmf\" entries must be numbers");
                out.push_back(v.get<double>());
            }
        }
        return grid;
    }

    std::vector<std::vector<double>> grid;
    std::stringstream ss(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        grid.push_back(parse_csv_row(line, line_no));
    }
    return grid;
}

JointDistribution load_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot read " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return load_joint(parse_grid(buffer.str()));
}

// ---------------------------------------------------------------------------
// Output

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
    const auto scalar = [](const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) flatten(value, prefix.empty() ? key : prefix + "." + key, out);
    } else if (j.is_array() && std::any_of(j.begin(), j.end(), [](const Json& v) { return v.is_structured(); })) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
    } else if (j.is_array()) {
        std::string joined;
        for (const auto& v : j) joined += (joined.empty() ? "" : " ") + scalar(v);
        out.emplace_back(prefix, joined);
    } else {
        out.emplace_back(prefix, scalar(j));
    }
}

void emit(const Json& report, Format format, std::ostream& out) {
    switch (format) {
        case Format::Json: out << report.dump(2) << '\n'; return;
        case Format::Text:
        case Format::Csv: {
            std::vector<std::pair<std::string, std::string>> rows;
            flatten(report, "", rows);
            if (format == Format::Csv) out << "key,value\n";
            for (const auto& [key, value] : rows) {
                if (format == Format::Csv)
                    out << key << ',' << value << '\n';
                else
                    out << key << ": " << value << '\n';
            }
            return;
        }
    }
}

Json to_json(std::span<const double> values) { return Json(std::vector<double>(values.begin(), values.end())); }

Json bound_json(const Bound& b) { return Json{{"raw", b.raw}, {"clamped", b.value}}; }

std::string_view measure_name(Measure m) {
    switch (m) {
        case Measure::Inertia: return "inertia";
        case Measure::MaxCorr: return "maxcorr";
        case Measure::ChiSquared: return "chi2";
        case Measure::MutualInformation: return "mi";
    }
    return "";
}

// ---------------------------------------------------------------------------
// analyze

int analyze(const RunConfig& config, const JointDistribution& joint, std::ostream& out) {
    const SupportRestriction support = restrict_to_support(joint);
    const InertiaDecomposition dec = decompose(support.joint);

    Json report;
    report["schema_version"] = kSchemaVersion;
    report["command"] = "analyze";
    report["input"] = *config.input_path;
    report["rows"] = joint.rows();
    report["cols"] = joint.cols();
    report["p_X"] = to_json(joint.row_marginal().entries());
    report["p_Y"] = to_json(joint.col_marginal().entries());
    if (support.joint.rows() != joint.rows() || support.joint.cols() != joint.cols()) {
        report["support"] = {{"rows", support.kept_rows}, {"cols", support.kept_cols}};
    }
    report["inertias"] = dec.lambdas;
    report["maximal_correlation"] = maximal_correlation(dec);
    report["chi_squared"] = chi_squared_direct(support.joint);
    report["mutual_information_bits"] = mutual_information_bits(joint);
    Json table = Json::array();
    for (std::size_t k = 1; k <= dec.dimension(); ++k) table.push_back(k_correlation(dec, k));
    report["k_correlation"] = table;
    report["bayes_error"] = bayes_error(joint);
    report["blind_error"] = 1.0 - joint.row_marginal().max();
    emit(report, config.format.value_or(Format::Json), out);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// bound

struct BoundOutcome {
    double theta = 0.0;
    /// Whether theta actually bounds the measure of the input.
    bool premise = true;
    Bound bound;
    std::optional<double> exact;
    Json details = Json::object();
};

std::optional<double> brute_force_or_none(const JointDistribution& joint, std::size_t M) {
    try {
        return peM_bruteforce(joint, M).value;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::TooLarge) return std::nullopt;
        throw;
    }
}

bool is_uniform(const ProbabilityVector& p) {
    const auto [lo, hi] = std::minmax_element(p.begin(), p.end());
    return *hi - *lo <= kInternalTolerance;
}

BoundOutcome compute_bound(Measure measure, const JointDistribution& joint, std::optional<double> theta,
                           std::optional<std::size_t> M, std::optional<std::size_t> k, std::optional<double> beta) {
    const JointDistribution full = restrict_to_support(joint).joint;
    const InertiaDecomposition dec = decompose(full);
    const ProbabilityVector p = joint.row_marginal().sorted();
    const std::size_t m = p.size();
    // Slack allowed when deciding whether a supplied theta covers the true measure.
    constexpr double kPremiseSlack = 1e-12;

    if (M && measure != Measure::MaxCorr && measure != Measure::MutualInformation)
        throw UsageError("--M applies to --measure maxcorr and --measure mi");

    BoundOutcome out;
    switch (measure) {
        case Measure::Inertia: {
            if (k) {
                if (*k < 1 || *k >= m) throw Error(ErrorCode::KOutOfRange, "--k must lie in [1, m-1]");
                const double truth = *k <= dec.dimension() ? k_correlation(dec, *k) : k_correlation(dec, dec.dimension());
                out.theta = theta.value_or(truth);
                out.premise = truth <= out.theta + kPremiseSlack;
                const JkSolution sol = jk_error_rate_lower(p, out.theta, *k);
                out.bound = Bound::clamped(sol.lower_bound);
                out.details = {{"k", *k},
                               {"objective", sol.objective},
                               {"gap", sol.gap},
                               {"newton_steps", sol.newton_steps},
                               {"converged", sol.converged},
                               {"degenerate", sol.degenerate}};
            } else {
                if (theta) throw UsageError("--measure inertia uses the inertias of the input; pass --k to bound J_k by --theta");
                const BoundResult r = theorem3_bound(InertiaBoundInput(p, dec.lambdas, InertiaCompletion::PadWithZeros));
                out.theta = std::accumulate(dec.lambdas.begin(), dec.lambdas.end(), 0.0);
                out.bound = Bound::clamped(r.raw);
                out.details = {{"inertias", dec.lambdas}, {"beta_star", r.beta_star}, {"alpha_star", r.alpha_star},
                               {"k_star", r.k_star},      {"f0_star", r.f0_star},     {"u1", r.u1}};
            }
            out.exact = bayes_error(joint);
            break;
        }
        case Measure::MaxCorr: {
            const double truth = maximal_correlation(dec);
            out.theta = theta.value_or(truth);
            if (out.theta > 1.0) throw Error(ErrorCode::ThetaOutOfRange, "a bound on rho_m must lie in [0, 1]");
            if (out.theta < 0.0) throw Error(ErrorCode::NegativeTheta, "theta must be nonnegative");
            out.premise = truth <= out.theta + kPremiseSlack;
            if (M) {
                out.bound = peM_bound(p, out.theta, *M, FunctionMeasure::MaxCorrelation);
                out.details = {{"M", *M}, {"p_U", to_json(aggregate_gM(p, *M).p_U.entries())}};
                out.exact = brute_force_or_none(joint, *M);
            } else {
                const MaxCorrBound r = corollary_maxcorr_bound(p, out.theta * out.theta, beta);
                out.bound = r.bound;
                out.details = {{"beta", r.beta},
                               {"weak_closed_form", bound_json(r.weak_closed_form)},
                               {"advantage_bound", advantage_bound(p, out.theta * out.theta)}};
                out.exact = bayes_error(joint);
            }
            break;
        }
        case Measure::ChiSquared: {
            const double truth = chi_squared_direct(full);
            out.theta = theta.value_or(truth);
            if (out.theta < 0.0) throw Error(ErrorCode::NegativeTheta, "theta must be nonnegative");
            out.premise = truth <= out.theta + kPremiseSlack;
            if (is_uniform(p)) {
                out.bound = corollary_uniform_bound(m, {UniformInformation::Kind::ChiSquared, out.theta});
                out.details = {{"method", "uniform"}};
            } else {
                // Each inertia is at most min(chi^2, 1).
                const double cap = std::min(out.theta, 1.0);
                const BoundResult r = theorem3_bound(InertiaBoundInput(p, std::vector<double>(m - 1, cap)));
                out.bound = Bound::clamped(r.raw);
                out.details = {{"method", "inertia_cap"}, {"lambda_cap", cap}, {"beta_star", r.beta_star}};
            }
            out.exact = bayes_error(joint);
            break;
        }
        case Measure::MutualInformation: {
            const double truth = mutual_information_bits(joint);
            out.theta = theta.value_or(truth);
            out.premise = truth <= out.theta + kPremiseSlack;
            const std::size_t classes = M.value_or(m);
            out.bound = peM_bound(p, out.theta, classes, FunctionMeasure::MutualInformation);
            out.details = {{"M", classes}, {"p_U", to_json(aggregate_gM(p, classes).p_U.entries())}};
            out.exact = classes == m ? std::optional<double>(bayes_error(joint)) : brute_force_or_none(joint, classes);
            break;
        }
    }
    return out;
}

int bound(const RunConfig& config, const JointDistribution& joint, std::ostream& out) {
    const BoundOutcome r = compute_bound(config.measure, joint, config.theta, config.M, config.k, config.beta);

    Json report;
    report["schema_version"] = kSchemaVersion;
    report["command"] = "bound";
    report["input"] = *config.input_path;
    report["measure"] = measure_name(config.measure);
    report["theta"] = r.theta;
    report["theta_source"] = config.theta ? "flag" : "input";
    report["bound"] = bound_json(r.bound);
    report["details"] = r.details;
    bool violated = false;
    if (r.exact) {
        const double slack = *r.exact - r.bound.value;
        const bool holds = slack >= -1e-9;
        violated = r.premise && !holds;
        report["certificate"] = {{"exact", *r.exact}, {"slack", slack}, {"premise_holds", r.premise}, {"holds", holds}};
    } else {
        report["certificate"] = nullptr;
    }
    emit(report, config.format.value_or(Format::Json), out);
    return violated ? kExitViolations : kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct SweepSpec {
    const char* name;
    OracleReport (*fn)(const SweepOptions&);
    std::size_t default_instances;
};

constexpr SweepSpec kSweeps[] = {
    {"soundness", soundness_sweep, 1000},
    {"remarks", remark_sweep, 1000},
    {"lp_duality", lp_duality_sweep, 1000},
    {"decomposition", decomposition_sweep, 200},
    {"dpi", dpi_sweep, 500},
    {"convexity", convexity_sweep, 100},
    {"schur", schur_sweep, 200},
    {"function_bounds", function_bound_sweep, 200},
    {"corollary_collapse", corollary_collapse_sweep, 100},
};

// Cap on violations listed per sweep; the count is always complete.
constexpr std::size_t kListedViolations = 20;

int verify(const RunConfig& config, std::ostream& out) {
    Json sweeps = Json::array();
    std::size_t total_checked = 0;
    std::size_t total_violations = 0;
    for (const auto& spec : kSweeps) {
        const SweepOptions options{config.seed, config.instances.value_or(spec.default_instances), config.jobs};
        const OracleReport r = spec.fn(options);
        Json failures = Json::array();
        for (std::size_t i = 0; i < std::min(r.violations.size(), kListedViolations); ++i) {
            const auto& c = r.violations[i];
            failures.push_back({{"name", c.name},
                                {"instance", c.instance},
                                {"exact", c.exact},
                                {"bound", c.bound},
                                {"tolerance", c.tolerance}});
        }
        sweeps.push_back({{"name", spec.name},
                          {"instances", options.instances},
                          {"checked", r.checked},
                          {"violations", r.violations.size()},
                          {"worst_slack", r.worst_slack()},
                          {"failures", failures}});
        total_checked += r.checked;
        total_violations += r.violations.size();
    }

    Json report;
    report["schema_version"] = kSchemaVersion;
    report["command"] = "verify";
    report["seed"] = config.seed;
    report["sweeps"] = sweeps;
    report["checked"] = total_checked;
    report["violations"] = total_violations;
    report["status"] = total_violations == 0 ? "pass" : "fail";

    const Format format = config.format.value_or(Format::Json);
    if (format == Format::Text) {
        for (const auto& s : report["sweeps"]) {
            out << s["name"].get<std::string>() << ": checked=" << s["checked"].dump()
                << " violations=" << s["violations"].dump() << " worst_slack=" << s["worst_slack"].dump() << '\n';
        }
        out << (total_violations == 0 ? "PASS" : "FAIL") << " seed=" << config.seed << " checked=" << total_checked
            << " violations=" << total_violations << '\n';
    } else {
        emit(report, format, out);
    }
    return total_violations == 0 ? kExitOk : kExitViolations;
}

// ---------------------------------------------------------------------------
// sweep

int sweep(const RunConfig& config, const JointDistribution& joint, std::ostream& out) {
    if (config.steps < 2) throw UsageError("--steps must be at least 2");
    const ProbabilityVector p = joint.row_marginal().sorted();
    const std::size_t m = p.size();

    struct Row {
        Json param;
        Bound bound;
        std::optional<double> exact;
    };
    std::vector<Row> rows;
    const auto grid = [&](double hi, std::size_t i) { return hi * static_cast<double>(i) / static_cast<double>(config.steps - 1); };

    switch (config.param) {
        case SweepParam::Theta: {
            if (config.theta) throw UsageError("--theta is the swept parameter");
            double hi = 1.0;
            switch (config.measure) {
                case Measure::Inertia:
                    if (!config.k) throw UsageError("sweeping theta with --measure inertia needs --k");
                    hi = static_cast<double>(*config.k);
                    break;
                case Measure::MaxCorr: hi = 1.0; break;
                case Measure::ChiSquared: hi = static_cast<double>(m - 1); break;
                case Measure::MutualInformation: hi = std::log2(static_cast<double>(m)); break;
            }
            for (std::size_t i = 0; i < config.steps; ++i) {
                const double theta = grid(hi, i);
                const BoundOutcome r = compute_bound(config.measure, joint, theta, config.M, config.k, config.beta);
                rows.push_back({theta, r.bound, std::nullopt});
            }
            break;
        }
        case SweepParam::Lambda1: {
            for (std::size_t i = 0; i < config.steps; ++i) {
                const double lambda1 = grid(1.0, i);
                rows.push_back({lambda1, corollary_maxcorr_bound(p, lambda1, config.beta).bound, std::nullopt});
            }
            break;
        }
        case SweepParam::M: {
            if (config.measure != Measure::MaxCorr && config.measure != Measure::MutualInformation)
                throw UsageError("sweeping M needs --measure maxcorr or --measure mi");
            if (config.M) throw UsageError("--M is the swept parameter");
            for (std::size_t M = 1; M <= m; ++M) {
                const BoundOutcome r = compute_bound(config.measure, joint, config.theta, M, std::nullopt, std::nullopt);
                rows.push_back({M, r.bound, brute_force_or_none(joint, M)});
            }
            break;
        }
    }

    const Format format = config.format.value_or(Format::Csv);
    if (format == Format::Json) {
        Json report;
        report["schema_version"] = kSchemaVersion;
        report["command"] = "sweep";
        report["input"] = *config.input_path;
        report["measure"] = measure_name(config.measure);
        Json list = Json::array();
        for (const auto& r : rows) {
            list.push_back({{"param", r.param},
                            {"bound_raw", r.bound.raw},
                            {"bound_clamped", r.bound.value},
                            {"exact_if_available", r.exact ? Json(*r.exact) : Json(nullptr)}});
        }
        report["rows"] = list;
        out << report.dump(2) << '\n';
    } else {
        const char sep = format == Format::Csv ? ',' : ' ';
        out << "param" << sep << "bound_raw" << sep << "bound_clamped" << sep << "exact_if_available\n";
        for (const auto& r : rows) {
            out << r.param.dump() << sep << Json(r.bound.raw).dump() << sep << Json(r.bound.value).dump() << sep
                << (r.exact ? Json(*r.exact).dump() : std::string()) << '\n';
        }
    }
    return kExitOk;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        if (config.command == Command::Verify) return verify(config, out);
        if (!config.input_path) throw UsageError("--input is required");
        const JointDistribution joint = load_input(*config.input_path);
        switch (config.command) {
            case Command::Analyze: return analyze(config, joint, out);
            case Command::Bound: return bound(config, joint, out);
            case Command::Sweep: return sweep(config, joint, out);
            case Command::Verify: break;
        }
        return kExitOk;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitBadFlags;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalidInput;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Principal-inertia information measures and Bayes-error lower bounds", "pibounds"};
    app.require_subcommand(1);

    RunConfig config;
    std::string input;
    double theta = 0.0;
    double beta = 0.0;
    std::size_t M = 0;
    std::size_t k = 0;
    std::size_t instances = 0;
    Format format = Format::Json;

    const std::map<std::string, Measure> measures{{"inertia", Measure::Inertia},
                                                  {"maxcorr", Measure::MaxCorr},
                                                  {"chi2", Measure::ChiSquared},
                                                  {"mi", Measure::MutualInformation}};
    const std::map<std::string, Format> formats{{"json", Format::Json}, {"csv", Format::Csv}, {"text", Format::Text}};
    const std::map<std::string, SweepParam> params{
        {"theta", SweepParam::Theta}, {"lambda1", SweepParam::Lambda1}, {"M", SweepParam::M}};

    struct Handles {
        CLI::Option* input = nullptr;
        CLI::Option* theta = nullptr;
        CLI::Option* beta = nullptr;
        CLI::Option* M = nullptr;
        CLI::Option* k = nullptr;
        CLI::Option* instances = nullptr;
        CLI::Option* format = nullptr;
    };
    std::map<CLI::App*, Handles> handles;

    const auto add = [&](const char* name, const char* help, Command command) {
        CLI::App* sub = app.add_subcommand(name, help);
        Handles h;
        if (command != Command::Verify) {
            h.input = sub->add_option("--input", input, "JSON {\"pmf\": [[...]]} or headerless CSV grid");
            sub->add_option("--measure", config.measure, "inertia, maxcorr, chi2 or mi")
                ->transform(CLI::CheckedTransformer(measures));
            h.theta = sub->add_option("--theta", theta, "Budget on the chosen measure");
            h.M = sub->add_option("--M,--functions", M, "Number of classes of the estimated function");
            h.k = sub->add_option("--k", k, "Index of the k-correlation");
            h.beta = sub->add_option("--beta", beta, "Fixed beta for the maximal-correlation bound");
        }
        sub->add_option("--seed", config.seed, "Seed for randomized sweeps");
        h.instances = sub->add_option("--instances", instances, "Instances per verification sweep");
        sub->add_option("--jobs", config.jobs, "Worker threads")->check(CLI::PositiveNumber);
        h.format = sub->add_option("--format", format, "json, csv or text")->transform(CLI::CheckedTransformer(formats));
        if (command == Command::Sweep) {
            sub->add_option("--param", config.param, "theta, lambda1 or M")->transform(CLI::CheckedTransformer(params));
            sub->add_option("--steps", config.steps, "Grid points for theta and lambda1");
        }
        sub->callback([&config, command] { config.command = command; });
        handles[sub] = h;
    };
    add("analyze", "Inertias, correlations and the Bayes error of a joint pmf", Command::Analyze);
    add("bound", "Lower bound on the estimation error with its certificate", Command::Bound);
    add("verify", "Seeded oracle sweeps over every bound and structural property", Command::Verify);
    add("sweep", "Bound versus a swept parameter as CSV", Command::Sweep);

    std::vector<const char*> argv{"pibounds"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitBadFlags;
    }

    for (const auto& [sub, h] : handles) {
        if (!sub->parsed()) continue;
        if (h.input && h.input->count()) config.input_path = input;
        if (h.theta && h.theta->count()) config.theta = theta;
        if (h.beta && h.beta->count()) config.beta = beta;
        if (h.M && h.M->count()) config.M = M;
        if (h.k && h.k->count()) config.k = k;
        if (h.instances->count()) config.instances = instances;
        if (h.format->count()) config.format = format;
    }
    return run(config, out, err);
}

}  // namespace pibounds::cli
