#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "tsfrac/tsfrac.hpp"

namespace tsfrac::cli {

namespace {

const std::string& require_function(const RunConfig& cfg, const std::string& role)
{
    auto it = cfg.functions.find(role);
    if (it == cfg.functions.end() || it->second.empty())
        throw error(errc::invalid_argument, cfg.command + " needs --" + role);
    return it->second;
}

std::string function_or(const RunConfig& cfg, const std::string& role, std::string fallback)
{
    auto it = cfg.functions.find(role);
    return it == cfg.functions.end() ? fallback : it->second;
}

double require_point(const std::optional<double>& v, const char* flag)
{
    if (!v) throw error(errc::invalid_argument, std::string("missing --") + flag);
    return *v;
}

double single_alpha(const RunConfig& cfg)
{
    auto values = parse_alpha_range(cfg.alpha_text);
    if (values.size() != 1) throw error(errc::invalid_argument, "use `sweep` for a range of alpha values");
    return values.front();
}

TimeScale scale_of(const RunConfig& cfg)
{
    if (cfg.scale_text.empty()) throw error(errc::invalid_argument, cfg.command + " needs --scale");
    return TimeScale::parse(cfg.scale_text);
}

Shape shape_of(const std::string& text)
{
    if (text == "convex") return Shape::convex;
    if (text == "concave") return Shape::concave;
    if (text == "auto") return Shape::automatic;
    throw error(errc::invalid_argument, "unknown shape '" + text + "'");
}

json point_class_json(const PointClass& pc)
{
    return {{"right", std::string(to_string(pc.right))},
            {"left", std::string(to_string(pc.left))},
            {"is_max", pc.is_max},
            {"is_min", pc.is_min}};
}

json integral_json(const FracIntegralResult& r)
{
    return {{"value", r.value},
            {"discrete_part", r.discrete_part},
            {"continuous_part", r.continuous_part},
            {"abs_error_estimate", r.abs_error_estimate}};
}

json report_json(const InequalityReport& r)
{
    json out;
    out["kind"] = std::string(to_string(r.kind));
    out["lhs"] = r.lhs;
    out["rhs"] = r.rhs;
    if (r.kind == InequalityKind::hermite_hadamard) {
        out["lower"] = r.lower;
        out["mid"] = r.mid;
        out["upper"] = r.upper;
    } else if (r.kind == InequalityKind::jensen_convex || r.kind == InequalityKind::jensen_concave) {
        out["mid"] = r.mid;
    }
    out["slack"] = r.slack;
    out["tolerance"] = r.tolerance;
    out["satisfied"] = r.satisfied;

    json ctx;
    ctx["scale"] = r.context.scale;
    ctx["alpha"] = r.context.alpha;
    if (r.context.p) ctx["p"] = *r.context.p;
    if (r.context.q) ctx["q"] = *r.context.q;
    json fns = json::object();
    for (const auto& [role, text] : r.context.functions) fns[role] = text;
    ctx["functions"] = std::move(fns);
    ctx["a"] = r.context.a;
    ctx["b"] = r.context.b;
    out["context"] = std::move(ctx);
    if (r.hh) out["hh"] = {{"x_w_alpha", r.hh->x_w_alpha}, {"weight_mass", r.hh->weight_mass}};

    json integrals = json::array();
    for (const auto& [name, value] : r.integrals) {
        json entry = {{"name", name}};
        entry.update(integral_json(value));
        integrals.push_back(std::move(entry));
    }
    out["integrals"] = std::move(integrals);
    return out;
}

struct Range {
    double a;
    double b;
};

Range range_of(const RunConfig& cfg, const TimeScale& T)
{
    return {cfg.from.value_or(T.min()), cfg.to.value_or(T.max())};
}

InequalityReport verify_one(const std::string& target, const RunConfig& cfg)
{
    const double p = cfg.p.value_or(2.0);
    if ((target == "holder" || target == "minkowski") && !(p > 1.0))
        throw error(errc::invalid_exponent, target + " needs p > 1, got " + detail::format_number(p));
    if (target == "rholder" && !(p < 0.0))
        throw error(errc::invalid_exponent, "rholder needs p < 0, got " + detail::format_number(p));

    const TimeScale T = TimeScale::parse(cfg.scale_text.empty() ? "Z:1..5" : cfg.scale_text);
    const double alpha = cfg.alpha_text.empty() ? 0.5 : single_alpha(cfg);
    const auto [a, b] = range_of(cfg, T);
    const Fn f = Fn::parse(function_or(cfg, "f", "t"));
    const Fn g = Fn::parse(function_or(cfg, "g", "1"));
    const Fn h = Fn::parse(function_or(cfg, "h", "1"));
    const Fn w = Fn::parse(function_or(cfg, "w", "1"));
    const Shape shape = shape_of(cfg.shape);

    if (target == "holder") return holder(f, g, h, T, a, b, alpha, p);
    if (target == "cs") return cauchy_schwarz(f, g, h, T, a, b, alpha);
    if (target == "rholder") return reversed_holder(f, g, h, T, a, b, alpha, p);
    if (target == "minkowski") return minkowski(f, g, h, T, a, b, alpha, p);
    if (target == "jensen") return jensen(f, g, h, T, a, b, alpha, shape);
    if (target == "hh") return hermite_hadamard(f, w, T, a, b, alpha, shape);
    throw error(errc::invalid_argument, "unknown inequality '" + target + "'");
}

// Built-in families for randomized trials. All points are positive so every
// alpha in (0, 1] is admissible.
std::string random_scale(std::mt19937_64& rng)
{
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    switch (pick(0, 5)) {
    case 0: return "Z:1.." + std::to_string(pick(3, 8));
    case 1: return "h:0.5:1.." + std::to_string(pick(2, 5));
    case 2: return "q:2:0.." + std::to_string(pick(2, 4));
    case 3: {
        std::vector<int> hundredths;
        const int n = pick(3, 6);
        while (static_cast<int>(hundredths.size()) < n) {
            int v = pick(50, 600);
            if (std::find(hundredths.begin(), hundredths.end(), v) == hundredths.end()) hundredths.push_back(v);
        }
        std::sort(hundredths.begin(), hundredths.end());
        std::string out = "set:{";
        for (std::size_t i = 0; i < hundredths.size(); ++i)
            out += (i ? "," : "") + detail::format_number(hundredths[i] / 100.0);
        return out + "}";
    }
    case 4: {
        const int lo = pick(1, 4);
        return "R:" + detail::format_number(lo / 2.0) + ".." + detail::format_number(lo / 2.0 + pick(1, 6) / 2.0);
    }
    default: return "union(set:{0.5,0.75};R:1..2;Z:3..5)";
    }
}

const std::vector<std::string> trial_pool{"t", "t^2", "exp(t/4)", "2*t+1"};
const std::vector<std::string> convex_outer{"exp(t/4)", "t^2"};
const std::vector<std::string> concave_outer{"ln(t)", "t^0.5"};

Outcome verify_all(const RunConfig& cfg)
{
    if (cfg.trials < 1) throw error(errc::invalid_argument, "--trials must be at least 1");
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto from = [&](const std::vector<std::string>& pool) {
        return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
    };

    Outcome out;
    for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
        const std::string scale_text = random_scale(rng);
        const TimeScale T = TimeScale::parse(scale_text);
        const double alpha = 1.0 - unit(rng);
        const double p = 5.0 - 4.0 * unit(rng);
        const double a = T.min(), b = T.max();
        const Fn f = Fn::parse(from(trial_pool));
        const Fn g = Fn::parse(from(trial_pool));
        const Fn h = Fn::parse(from(trial_pool));
        const Fn jc = Fn::parse(from(convex_outer));
        const Fn jv = Fn::parse(from(concave_outer));
        const Fn hh_f = Fn::parse(from(trial_pool));

        std::vector<InequalityReport> reports;
        reports.push_back(holder(f, g, h, T, a, b, alpha, p));
        reports.push_back(cauchy_schwarz(f, g, h, T, a, b, alpha));
        reports.push_back(reversed_holder(f, g, h, T, a, b, alpha, 1.0 - p));
        reports.push_back(minkowski(f, g, h, T, a, b, alpha, p));
        reports.push_back(jensen(jc, g, h, T, a, b, alpha, Shape::convex));
        reports.push_back(jensen(jv, g, h, T, a, b, alpha, Shape::concave));
        reports.push_back(hermite_hadamard(hh_f, h, T, a, b, alpha, Shape::convex));
        for (auto& r : reports) {
            json entry = {{"trial", trial}};
            entry.update(report_json(r));
            out.violation = out.violation || !r.satisfied;
            out.results.push_back(std::move(entry));
        }
    }
    return out;
}

void append_number(std::string& out, double v)
{
    if (!std::isfinite(v)) {
        out += "null";
        return;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

void dump_into(std::string& out, const json& v, int indent)
{
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (v.type()) {
    case json::value_t::object: {
        if (v.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += inner + json(it.key()).dump() + ": ";
            dump_into(out, it.value(), indent + 1);
        }
        out += "\n" + pad + "}";
        return;
    }
    case json::value_t::array: {
        if (v.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out += ",\n";
            out += inner;
            dump_into(out, v[i], indent + 1);
        }
        out += "\n" + pad + "]";
        return;
    }
    case json::value_t::number_float: append_number(out, v.get<double>()); return;
    default: out += v.dump(); return;
    }
}

std::string cell(const json& v)
{
    if (v.is_number_float()) {
        std::ostringstream os;
        os << std::setprecision(12) << v.get<double>();
        return os.str();
    }
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

int exit_code_for(errc code)
{
    switch (code) {
    case errc::syntax_error:
    case errc::unknown_identifier:
    case errc::invalid_argument:
    case errc::invalid_scale:
    case errc::invalid_exponent:
    case errc::empty_range: return usage;
    default: return domain;
    }
}

} // namespace

std::vector<double> parse_alpha_range(const std::string& text)
{
    if (text.empty()) throw error(errc::invalid_argument, "missing --alpha");
    detail::Cursor cur(text);
    std::vector<double> parts{cur.expect_number(true)};
    while (cur.consume(':')) parts.push_back(cur.expect_number(true));
    if (!cur.at_end()) cur.fail("unexpected trailing input in alpha");
    if (parts.size() == 1) return parts;
    if (parts.size() != 3) throw error(errc::invalid_argument, "alpha range must be start:step:stop");
    const double start = parts[0], step = parts[1], stop = parts[2];
    if (!(step > 0.0) || start > stop + 1e-12)
        throw error(errc::empty_range, "alpha range '" + text + "' is empty");
    std::vector<double> values;
    for (std::size_t i = 0;; ++i) {
        double v = start + static_cast<double>(i) * step;
        if (v > stop + 1e-9 * step) break;
        if (std::abs(v - stop) <= 1e-9 * step) v = stop;
        values.push_back(v);
    }
    return values;
}

Outcome run_deriv(const RunConfig& cfg)
{
    const TimeScale T = scale_of(cfg);
    const Fn f = Fn::parse(require_function(cfg, "f"));
    const double t = require_point(cfg.at, "at");
    const double alpha = single_alpha(cfg);
    const auto r = frac_derivative(f, T, t, alpha);
    Outcome out;
    out.results.push_back({{"alpha", r.alpha},
                           {"t", T.snap(t)},
                           {"value", r.value},
                           {"point_class", point_class_json(r.point_class)},
                           {"method", std::string(to_string(r.method))}});
    return out;
}

Outcome run_integ(const RunConfig& cfg)
{
    const TimeScale T = scale_of(cfg);
    const Fn f = Fn::parse(require_function(cfg, "f"));
    const auto [a, b] = range_of(cfg, T);
    const double alpha = single_alpha(cfg);
    json entry = {{"alpha", alpha}, {"from", a}, {"to", b}};
    entry.update(integral_json(frac_integral(f, T, a, b, alpha)));
    Outcome out;
    out.results.push_back(std::move(entry));
    return out;
}

Outcome run_chain1(const RunConfig& cfg)
{
    const TimeScale T = scale_of(cfg);
    const Fn f = Fn::parse(require_function(cfg, "f"));
    const Fn g = Fn::parse(require_function(cfg, "g"));
    const double t = require_point(cfg.at, "at");
    const double alpha = single_alpha(cfg);
    const auto r = chain_rule_I(f, g, T, t, alpha);
    Outcome out;
    out.results.push_back({{"alpha", alpha},
                           {"t", T.snap(t)},
                           {"lhs", r.lhs},
                           {"rhs", r.rhs},
                           {"abs_gap", r.abs_gap},
                           {"quadrature_error", r.quadrature_error}});
    return out;
}

Outcome run_chain2(const RunConfig& cfg)
{
    const TimeScale T = scale_of(cfg);
    const Fn w = Fn::parse(require_function(cfg, "w"));
    const Fn nu = Fn::parse(require_function(cfg, "nu"));
    const double t = require_point(cfg.at, "at");
    const double alpha = single_alpha(cfg);
    const auto r = chain_rule_II(w, nu, T, t, alpha, cfg.epsilon);
    Outcome out;
    out.results.push_back({{"alpha", alpha},
                           {"t", T.snap(t)},
                           {"lhs", r.lhs},
                           {"rhs", r.rhs},
                           {"abs_gap", r.abs_gap},
                           {"hypothesis_ok", r.hypothesis_ok},
                           {"identity_claimed", r.hypothesis_ok}});
    return out;
}

Outcome run_verify(const RunConfig& cfg)
{
    if (cfg.target == "all") return verify_all(cfg);
    const auto report = verify_one(cfg.target, cfg);
    Outcome out;
    out.results.push_back(report_json(report));
    out.violation = !report.satisfied;
    return out;
}

Outcome run_sweep(const RunConfig& cfg)
{
    using Runner = Outcome (*)(const RunConfig&);
    Runner runner = nullptr;
    if (cfg.target == "deriv") runner = run_deriv;
    else if (cfg.target == "integ") runner = run_integ;
    else if (cfg.target == "chain1") runner = run_chain1;
    else if (cfg.target == "chain2") runner = run_chain2;
    else throw error(errc::invalid_argument, "cannot sweep '" + cfg.target + "'");

    Outcome out;
    for (double alpha : parse_alpha_range(cfg.alpha_text)) {
        RunConfig one = cfg;
        one.command = cfg.target;
        one.alpha_text = detail::format_number(alpha);
        json row = runner(one).results.at(0);
        if (!row.contains("value")) row["value"] = row["lhs"];
        json ordered = {{"alpha", alpha}, {"value", row["value"]}};
        for (auto it = row.begin(); it != row.end(); ++it)
            if (!ordered.contains(it.key())) ordered[it.key()] = it.value();
        out.results.push_back(std::move(ordered));
    }
    return out;
}

Outcome run(const RunConfig& cfg)
{
    if (cfg.command == "deriv") return run_deriv(cfg);
    if (cfg.command == "integ") return run_integ(cfg);
    if (cfg.command == "chain1") return run_chain1(cfg);
    if (cfg.command == "chain2") return run_chain2(cfg);
    if (cfg.command == "verify") return run_verify(cfg);
    if (cfg.command == "sweep") return run_sweep(cfg);
    throw error(errc::invalid_argument, "unknown command '" + cfg.command + "'");
}

json document(const RunConfig& cfg, const Outcome& outcome)
{
    json config;
    if (!cfg.target.empty()) config["target"] = cfg.target;
    if (!cfg.scale_text.empty()) config["scale"] = cfg.scale_text;
    if (!cfg.alpha_text.empty()) config["alpha"] = cfg.alpha_text;
    json fns = json::object();
    for (const auto& [role, text] : cfg.functions) fns[role] = text;
    config["functions"] = std::move(fns);
    if (cfg.at) config["at"] = *cfg.at;
    if (cfg.from) config["from"] = *cfg.from;
    if (cfg.to) config["to"] = *cfg.to;
    if (cfg.p) config["p"] = *cfg.p;
    if (cfg.command == "chain2" || cfg.target == "chain2") config["epsilon"] = cfg.epsilon;
    if (cfg.command == "verify") {
        config["shape"] = cfg.shape;
        config["trials"] = cfg.trials;
        config["seed"] = cfg.seed;
    }
    return {{"command", cfg.command}, {"config", std::move(config)}, {"results", outcome.results}, {"version", version}};
}

std::string dump(const json& value)
{
    std::string out;
    dump_into(out, value, 0);
    return out;
}

std::string render_table(const RunConfig&, const Outcome& outcome)
{
    std::vector<std::string> columns;
    for (const auto& row : outcome.results)
        for (auto it = row.begin(); it != row.end(); ++it)
            if (it.value().is_primitive() && std::find(columns.begin(), columns.end(), it.key()) == columns.end())
                columns.push_back(it.key());

    std::vector<std::vector<std::string>> cells;
    cells.push_back(columns);
    for (const auto& row : outcome.results) {
        std::vector<std::string> line;
        for (const auto& c : columns) line.push_back(row.contains(c) ? cell(row.at(c)) : "");
        cells.push_back(std::move(line));
    }
    std::vector<std::size_t> width(columns.size(), 0);
    for (const auto& line : cells)
        for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());

    std::ostringstream os;
    for (const auto& line : cells) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            os << std::left << std::setw(static_cast<int>(width[i])) << line[i];
            os << (i + 1 < line.size() ? "  " : "");
        }
        os << '\n';
    }
    return os.str();
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    RunConfig cfg;
    std::string alpha_range;
    CLI::App app{"Fractional calculus on time scales"};
    app.require_subcommand(1);

    auto common = [&](CLI::App* sub) {
        sub->set_help_flag("--help", "print this help and exit");
        sub->add_option("--scale", cfg.scale_text, "time scale, e.g. Z:1..10 or union(R:0..1;set:{2,3})");
        sub->add_option("--alpha", cfg.alpha_text, "order in (0,1]; sweep accepts start:step:stop");
        sub->add_option("--output", cfg.output, "table or json")->check(CLI::IsMember({"table", "json"}));
    };
    auto fn = [&](CLI::App* sub, const std::string& role) {
        sub->add_option_function<std::string>("--" + role, [&cfg, role](const std::string& v) { cfg.functions[role] = v; },
                                              "function " + role + "(t)");
    };
    auto point = [&](CLI::App* sub) { sub->add_option("--at", cfg.at, "evaluation point"); };
    auto range = [&](CLI::App* sub) {
        sub->add_option("--from", cfg.from, "lower limit (default: scale minimum)");
        sub->add_option("--to", cfg.to, "upper limit (default: scale maximum)");
    };

    auto* deriv = app.add_subcommand("deriv", "alpha-fractional derivative at a point");
    common(deriv);
    fn(deriv, "f");
    point(deriv);

    auto* integ = app.add_subcommand("integ", "alpha-fractional integral over [from, to)");
    common(integ);
    fn(integ, "f");
    range(integ);

    auto* chain1 = app.add_subcommand("chain1", "first chain rule, f(g(t))");
    common(chain1);
    fn(chain1, "f");
    fn(chain1, "g");
    point(chain1);

    auto* chain2 = app.add_subcommand("chain2", "second chain rule, w(nu(t))");
    common(chain2);
    fn(chain2, "w");
    fn(chain2, "nu");
    point(chain2);
    chain2->add_option("--epsilon", cfg.epsilon, "tolerance of the substitution hypothesis");

    auto* verify = app.add_subcommand("verify", "check an inequality instance, or randomized trials of all of them");
    verify->add_option("target", cfg.target, "holder|cs|rholder|minkowski|jensen|hh|all")
        ->required()
        ->check(CLI::IsMember({"holder", "cs", "rholder", "minkowski", "jensen", "hh", "all"}));
    common(verify);
    for (const char* role : {"f", "g", "h", "w"}) fn(verify, role);
    range(verify);
    verify->add_option("--p", cfg.p, "exponent");
    verify->add_option("--shape", cfg.shape, "convex|concave|auto")->check(CLI::IsMember({"convex", "concave", "auto"}));
    verify->add_option("--trials", cfg.trials, "randomized trials for `all`")->check(CLI::PositiveNumber);
    verify->add_option("--seed", cfg.seed, "random seed")->envname("TSFRAC_SEED");

    auto* sweep = app.add_subcommand("sweep", "evaluate an operator over a range of alpha");
    sweep->add_option("target", cfg.target, "deriv|integ|chain1|chain2")
        ->required()
        ->check(CLI::IsMember({"deriv", "integ", "chain1", "chain2"}));
    common(sweep);
    sweep->add_option("--alpha-range", alpha_range, "start:step:stop");
    for (const char* role : {"f", "g", "w", "nu"}) fn(sweep, role);
    point(sweep);
    range(sweep);
    sweep->add_option("--epsilon", cfg.epsilon, "tolerance of the substitution hypothesis");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return usage;
    }
    for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
    if (!alpha_range.empty()) cfg.alpha_text = alpha_range;

    try {
        const Outcome outcome = run(cfg);
        if (cfg.output == "json") out << dump(document(cfg, outcome)) << '\n';
        else out << render_table(cfg, outcome);
        return outcome.violation ? violation : ok;
    } catch (const error& e) {
        err << e.what() << '\n';
        return exit_code_for(e.code());
    }
}

} // namespace tsfrac::cli
