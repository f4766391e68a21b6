#include "fujita/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace fujita {

using nlohmann::json;
using nlohmann::ordered_json;

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(violations.empty() ? "invalid configuration" : violations.front()),
      violations_(std::move(violations))
{
}

namespace {

// Collects violations while reading one JSON document.
class Reader {
public:
    std::vector<std::string> violations;

    void fail(const std::string& where, const std::string& message)
    {
        violations.push_back(where.empty() ? message : where + ": " + message);
    }

    void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys)
    {
        if (!obj.is_object())
            return;
        std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& [key, value] : obj.items())
            if (!allowed.count(key))
                fail(where, "unknown key '" + key + "'");
    }

    double number(const json& obj, const char* key, double fallback, const std::string& where)
    {
        if (!obj.is_object() || !obj.contains(key))
            return fallback;
        const auto& v = obj.at(key);
        if (!v.is_number()) {
            fail(where, std::string("'") + key + "' must be a number");
            return fallback;
        }
        return v.get<double>();
    }

    long long integer(const json& obj, const char* key, long long fallback, const std::string& where)
    {
        if (!obj.is_object() || !obj.contains(key))
            return fallback;
        const auto& v = obj.at(key);
        if (!v.is_number_integer()) {
            fail(where, std::string("'") + key + "' must be an integer");
            return fallback;
        }
        return v.get<long long>();
    }

    bool boolean(const json& obj, const char* key, bool fallback, const std::string& where)
    {
        if (!obj.is_object() || !obj.contains(key))
            return fallback;
        const auto& v = obj.at(key);
        if (!v.is_boolean()) {
            fail(where, std::string("'") + key + "' must be true or false");
            return fallback;
        }
        return v.get<bool>();
    }

    std::string string(const json& obj, const char* key, const std::string& fallback, const std::string& where)
    {
        if (!obj.is_object() || !obj.contains(key))
            return fallback;
        const auto& v = obj.at(key);
        if (!v.is_string()) {
            fail(where, std::string("'") + key + "' must be a string");
            return fallback;
        }
        return v.get<std::string>();
    }

    std::vector<double> numbers(const json& obj, const char* key, std::vector<double> fallback,
                                const std::string& where)
    {
        if (!obj.is_object() || !obj.contains(key))
            return fallback;
        const auto& v = obj.at(key);
        std::vector<double> out;
        if (!v.is_array()) {
            fail(where, std::string("'") + key + "' must be an array of numbers");
            return fallback;
        }
        for (const auto& e : v) {
            if (!e.is_number()) {
                fail(where, std::string("'") + key + "' must be an array of numbers");
                return fallback;
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    const json& block(const json& doc, const char* key, const std::string& where)
    {
        static const json empty = json::object();
        if (!doc.contains(key))
            return empty;
        const auto& v = doc.at(key);
        if (!v.is_object()) {
            fail(where, std::string("'") + key + "' must be an object");
            return empty;
        }
        return v;
    }

    // Runs a check that reports through exceptions and records its message.
    template <typename F>
    bool attempt(const std::string& where, F&& f)
    {
        try {
            f();
            return true;
        } catch (const std::exception& e) {
            fail(where, e.what());
            return false;
        }
    }
};

DomainSpec parse_domain(Reader& r, const json& block, double& L, int& M)
{
    const std::string where = "domain";
    r.allow_keys(block, where, {"kind", "N", "R0", "a", "b", "L", "M"});
    const std::string kind = r.string(block, "kind", "radial", where);
    L = r.number(block, "L", 20.0, where);
    M = static_cast<int>(r.integer(block, "M", 2000, where));
    if (kind == "radial") {
        RadialExterior d;
        d.dim = static_cast<int>(r.integer(block, "N", 3, where));
        d.R0 = r.number(block, "R0", 1.0, where);
        if (d.dim < 2)
            r.fail(where, "radial domain needs N >= 2 (use two_rays for N = 1)");
        if (!(d.R0 > 0.0))
            r.fail(where, "R0 must be positive");
        return d;
    }
    if (kind == "two_rays") {
        TwoRays d;
        d.a = r.number(block, "a", -1.0, where);
        d.b = r.number(block, "b", 1.0, where);
        if (!(d.a < d.b))
            r.fail(where, "two-ray domain needs a < b");
        return d;
    }
    r.fail(where, "unknown domain kind '" + kind + "' (expected radial or two_rays)");
    return RadialExterior{};
}

SigmaModel parse_sigma(Reader& r, const json& doc)
{
    const std::string where = "sigma";
    if (!doc.contains("sigma"))
        return SigmaModel::constant(1.0);
    const auto& block = doc.at("sigma");
    if (block.is_number()) {
        const double v = block.get<double>();
        if (v < 0.0) {
            r.fail(where, "dissipativity violated: sigma must be non-negative");
            return SigmaModel::constant(0.0);
        }
        return SigmaModel::constant(v);
    }
    if (!block.is_object()) {
        r.fail(where, "'sigma' must be a number or an object");
        return SigmaModel::constant(1.0);
    }
    r.allow_keys(block, where, {"kind", "value", "times", "values", "bound"});
    const std::string kind = r.string(block, "kind", "constant", where);
    SigmaModel model = SigmaModel::constant(1.0);
    if (kind == "constant") {
        const double v = r.number(block, "value", 1.0, where);
        r.attempt(where, [&] { model = SigmaModel::constant(v); });
    } else if (kind == "profile") {
        SigmaModel::Profile profile;
        profile.times = r.numbers(block, "times", {}, where);
        profile.values = r.numbers(block, "values", {}, where);
        double top = 0.0;
        for (double v : profile.values)
            top = std::max(top, v);
        profile.bound = r.number(block, "bound", top, where);
        r.attempt(where, [&] { model = SigmaModel(profile); });
    } else {
        r.fail(where, "unknown sigma kind '" + kind + "' (expected constant or profile)");
    }
    return model;
}

SolverConfig parse_solver(Reader& r, const json& block)
{
    const std::string where = "solver";
    r.allow_keys(block, where,
                 {"dt_init", "dt_min", "dt_max", "c_r", "blowup_threshold", "t_end", "ordering_tol", "trace_stride",
                  "max_steps"});
    SolverConfig s;
    s.dt_init = r.number(block, "dt_init", s.dt_init, where);
    s.dt_min = r.number(block, "dt_min", s.dt_min, where);
    s.dt_max = r.number(block, "dt_max", s.dt_max, where);
    s.c_r = r.number(block, "c_r", s.c_r, where);
    s.blowup_threshold = r.number(block, "blowup_threshold", s.blowup_threshold, where);
    s.t_end = r.number(block, "t_end", s.t_end, where);
    s.ordering_tol = r.number(block, "ordering_tol", s.ordering_tol, where);
    const long long stride = r.integer(block, "trace_stride", static_cast<long long>(s.trace_stride), where);
    const long long steps = r.integer(block, "max_steps", static_cast<long long>(s.max_steps), where);
    if (stride < 1)
        r.fail(where, "trace_stride must be at least 1");
    else
        s.trace_stride = static_cast<std::size_t>(stride);
    if (steps < 1)
        r.fail(where, "max_steps must be at least 1");
    else
        s.max_steps = static_cast<std::size_t>(steps);
    r.attempt(where, [&] { s.validate(); });
    return s;
}

struct ParsedInit {
    InitialData data;
    std::string kind;
};

// Barrier of the domain's dimension for exponent p. Throws on unsupported parameters.
SupersolutionSpec make_barrier(const std::string& which, const DomainSpec& domain, double p, const json& block,
                               Reader& r, const std::string& where)
{
    const int N = dimension(domain);
    if (which == "U") {
        Eigen::VectorXd mu = Eigen::VectorXd::Zero(N);
        const auto values = r.numbers(block, "mu", {}, where);
        if (!values.empty()) {
            if (static_cast<int>(values.size()) != N)
                throw DomainError("'mu' must have N = " + std::to_string(N) + " entries");
            mu = Eigen::Map<const Eigen::VectorXd>(values.data(), N);
        }
        return UBarrier<double>::make(N, p, mu);
    }
    if (which == "V") {
        const auto* rays = std::get_if<TwoRays>(&domain);
        if (!rays)
            throw DomainError("the V barrier needs the two_rays domain");
        const double mu1 = r.number(block, "mu1", 0.0, where);
        const double mu2 = r.number(block, "mu2", 0.0, where);
        return VBarrier<double>::make(rays->a, rays->b, mu1, mu2, p);
    }
    throw DomainError("unknown barrier '" + which + "' (expected U or V)");
}

ParsedInit parse_init(Reader& r, const json& block, const std::string& where, const DomainSpec& domain, double p,
                      bool domain_ok)
{
    r.allow_keys(block, where, {"kind", "amplitude", "width", "offset", "scale", "mu", "mu1", "mu2", "theta"});
    const std::string kind = r.string(block, "kind", "zero", where);
    if (kind == "zero")
        return {ZeroData{}, kind};
    if (kind == "gaussian") {
        GaussianData g;
        g.amplitude = r.number(block, "amplitude", g.amplitude, where);
        g.width = r.number(block, "width", g.width, where);
        g.offset = r.number(block, "offset", g.offset, where);
        if (!(g.amplitude >= 0.0))
            r.fail(where, "gaussian amplitude must be non-negative");
        if (!(g.width > 0.0))
            r.fail(where, "gaussian width must be positive");
        return {g, kind};
    }
    if (kind == "harmonic_truncated")
        return {HarmonicData{r.number(block, "amplitude", 1.0, where)}, kind};
    if (kind == "lane_emden") {
        LaneEmdenData le;
        le.amplitude = r.number(block, "amplitude", le.amplitude, where);
        le.theta = r.number(block, "theta", le.theta, where);
        le.scale = r.number(block, "scale", le.scale, where);
        if (!(le.scale >= 0.0))
            r.fail(where, "lane_emden scale must be non-negative");
        return {le, kind};
    }
    if (kind == "scaled_U" || kind == "scaled_V") {
        ScaledBarrierData s;
        s.scale = r.number(block, "scale", s.scale, where);
        if (!(s.scale >= 0.0 && s.scale < 1.0))
            r.fail(where, "barrier scale must lie in [0, 1)");
        if (domain_ok)
            r.attempt(where, [&] { s.barrier = make_barrier(kind == "scaled_U" ? "U" : "V", domain, p, block, r, where); });
        return {s, kind};
    }
    r.fail(where, "unknown init kind '" + kind +
                      "' (expected zero, gaussian, scaled_U, scaled_V, harmonic_truncated or lane_emden)");
    return {ZeroData{}, "zero"};
}

// Sampling the data on the configured grid surfaces construction errors early.
void check_data(Reader& r, const ProblemSetup& setup, const InitialData& data, const std::string& where)
{
    r.attempt(where, [&] { (void)make_initial_field(data, setup.grid(), setup.p); });
}

}  // namespace

RunConfig parse_config(const json& doc)
{
    Reader r;
    RunConfig cfg;
    if (!doc.is_object())
        throw ConfigError({"configuration must be a JSON object"});
    r.allow_keys(doc, "",
                 {"domain", "p", "sigma", "init", "solver", "exhaust", "compare", "neumann_mono", "supersolution",
                  "sweep", "output"});

    ProblemSetup& s = cfg.setup;
    const std::size_t before_domain = r.violations.size();
    s.domain = parse_domain(r, r.block(doc, "domain", "domain"), s.L, s.M);
    s.p = r.number(doc, "p", 3.0, "p");
    if (!(s.p > 1.0))
        r.fail("p", "exponent p must exceed 1");
    s.sigma = parse_sigma(r, doc);
    s.solver = parse_solver(r, r.block(doc, "solver", "solver"));

    bool grid_ok = r.violations.size() == before_domain;
    if (grid_ok) {
        grid_ok = r.attempt("domain", [&] {
            const Grid g = s.grid();
            const auto op = assemble_laplacian(g, g.dim());
            if (monotone_dt_floor(op) > s.solver.dt_max)
                throw DomainError("grid spacing needs dt >= " + format_number(monotone_dt_floor(op)) +
                                  " for a monotone step, above solver.dt_max; refine M or raise dt_max");
        });
    }
    const bool p_ok = s.p > 1.0;

    const auto& init_block = r.block(doc, "init", "init");
    const ParsedInit init = parse_init(r, init_block, "init", s.domain, s.p, grid_ok && p_ok);
    s.init = init.data;
    cfg.init_kind = init.kind;
    const auto* scaled = std::get_if<ScaledBarrierData>(&s.init);
    const bool init_barrier_ok = scaled && r.violations.empty();
    if (init_barrier_ok) {
        try {
            require_admissible(s, scaled->barrier);
        } catch (const StudyRefused& e) {
            r.fail("init", e.what());
        }
    }
    if (grid_ok && p_ok && r.violations.empty())
        check_data(r, s, s.init, "init");

    if (doc.contains("exhaust")) {
        const auto& b = r.block(doc, "exhaust", "exhaust");
        r.allow_keys(b, "exhaust", {"L_list", "t_check", "tail_tol"});
        cfg.exhaust.L_list = r.numbers(b, "L_list", cfg.exhaust.L_list, "exhaust");
        cfg.exhaust.t_check = r.number(b, "t_check", cfg.exhaust.t_check, "exhaust");
        cfg.exhaust.tail_tol = r.number(b, "tail_tol", cfg.exhaust.tail_tol, "exhaust");
        const auto& Ls = cfg.exhaust.L_list;
        if (Ls.size() < 3)
            r.fail("exhaust", "L_list needs at least three truncation lengths");
        for (std::size_t i = 1; i < Ls.size(); ++i)
            if (!(Ls[i] > Ls[i - 1])) {
                r.fail("exhaust", "L_list must be strictly increasing");
                break;
            }
        if (grid_ok) {
            const double h = s.L / s.M;
            for (double L : Ls) {
                const double m = L / h;
                if (!(L > 0.0) || std::abs(m - std::round(m)) > 1e-9 * m)
                    r.fail("exhaust", "L = " + format_number(L) + " is not a positive multiple of the spacing L/M");
            }
        }
        if (!(cfg.exhaust.t_check > 0.0 && cfg.exhaust.t_check <= s.solver.t_end))
            r.fail("exhaust", "t_check must lie in (0, solver.t_end]");
    }

    if (doc.contains("compare")) {
        const auto& b = r.block(doc, "compare", "compare");
        r.allow_keys(b, "compare", {"phi", "psi", "mono_tol_scale"});
        const bool ok = grid_ok && p_ok;
        if (b.contains("phi"))
            cfg.compare.phi = parse_init(r, b.at("phi"), "compare.phi", s.domain, s.p, ok).data;
        if (b.contains("psi"))
            cfg.compare.psi = parse_init(r, b.at("psi"), "compare.psi", s.domain, s.p, ok).data;
        cfg.compare.options.mono_tol_scale =
            r.number(b, "mono_tol_scale", cfg.compare.options.mono_tol_scale, "compare");
        if (ok && r.violations.empty()) {
            check_data(r, s, cfg.compare.phi, "compare.phi");
            check_data(r, s, cfg.compare.psi, "compare.psi");
        }
    }

    if (doc.contains("neumann_mono")) {
        const auto& b = r.block(doc, "neumann_mono", "neumann_mono");
        r.allow_keys(b, "neumann_mono", {"psi"});
        if (b.contains("psi"))
            cfg.neumann_psi = parse_init(r, b.at("psi"), "neumann_mono.psi", s.domain, s.p, grid_ok && p_ok).data;
        if (grid_ok && p_ok && r.violations.empty())
            check_data(r, s, cfg.neumann_psi, "neumann_mono.psi");
    }

    if (doc.contains("supersolution")) {
        const auto& b = r.block(doc, "supersolution", "supersolution");
        const std::string where = "supersolution";
        r.allow_keys(b, where, {"barrier", "mu", "mu1", "mu2", "scale", "samples", "span", "t_max", "simulate"});
        auto& sup = cfg.supersolution;
        sup.scale = r.number(b, "scale", sup.scale, where);
        const long long samples = r.integer(b, "samples", static_cast<long long>(sup.samples), where);
        if (samples < 1)
            r.fail(where, "samples must be at least 1");
        else
            sup.samples = static_cast<std::size_t>(samples);
        sup.span = r.number(b, "span", sup.span, where);
        sup.t_max = r.number(b, "t_max", sup.t_max, where);
        sup.simulate = r.boolean(b, "simulate", sup.simulate, where);
        if (!(sup.scale >= 0.0 && sup.scale < 1.0))
            r.fail(where, "barrier scale must lie in [0, 1)");
        if (!(sup.span > 0.0) || !(sup.t_max >= 0.0))
            r.fail(where, "span must be positive and t_max non-negative");
        const std::string which = r.string(b, "barrier", "", where);
        if (!which.empty() && grid_ok && p_ok)
            r.attempt(where, [&] { sup.barrier = make_barrier(which, s.domain, s.p, b, r, where); });
    }
    if (!cfg.supersolution.barrier && scaled && r.violations.empty()) {
        cfg.supersolution.barrier = scaled->barrier;
        if (!doc.contains("supersolution") || !doc.at("supersolution").contains("scale"))
            cfg.supersolution.scale = scaled->scale;
    }

    if (doc.contains("sweep")) {
        const auto& b = r.block(doc, "sweep", "sweep");
        r.allow_keys(b, "sweep", {"p_values", "amplitudes"});
        cfg.sweep_p = r.numbers(b, "p_values", {}, "sweep");
        cfg.sweep_amplitudes = r.numbers(b, "amplitudes", {}, "sweep");
        if (cfg.sweep_p.empty() || cfg.sweep_amplitudes.empty())
            r.fail("sweep", "p_values and amplitudes must be non-empty");
        for (double p : cfg.sweep_p) {
            if (!(p > 1.0)) {
                r.fail("sweep", "every p must exceed 1 (got " + format_number(p) + ")");
                continue;
            }
            if (grid_ok && r.violations.empty())
                r.attempt("sweep", [&] {
                    for (double a : cfg.sweep_amplitudes) {
                        if (!(a >= 0.0))
                            throw DomainError("amplitudes must be non-negative");
                        ProblemSetup member = s;
                        member.p = p;
                        member.init = with_amplitude(s.init, s.domain, p, a);
                        if (const auto* sb = std::get_if<ScaledBarrierData>(&member.init)) {
                            if (!(a < 1.0))
                                throw DomainError("barrier-scaled amplitudes must lie in [0, 1)");
                            require_admissible(member, sb->barrier);
                        }
                    }
                });
        }
    }

    if (doc.contains("output")) {
        const auto& b = r.block(doc, "output", "output");
        r.allow_keys(b, "output", {"dir"});
        cfg.out_dir = r.string(b, "dir", cfg.out_dir.string(), "output");
    }

    if (!r.violations.empty())
        throw ConfigError(std::move(r.violations));
    return cfg;
}

RunConfig parse_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError({"cannot open config file '" + path.string() + "'"});
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("invalid JSON: ") + e.what()});
    }
    return parse_config(doc);
}

// ---------------------------------------------------------------------------
// Output

std::string format_number(double value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

namespace {

std::ofstream open_output(const std::filesystem::path& path)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

std::string csv_text(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s)
        out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

void write_json_value(std::ostream& out, const ordered_json& v, int indent)
{
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    const std::string close(static_cast<std::size_t>(indent), ' ');
    switch (v.type()) {
    case json::value_t::object: {
        if (v.empty()) {
            out << "{}";
            return;
        }
        out << "{\n";
        bool first = true;
        for (const auto& [key, value] : v.items()) {
            out << (first ? "" : ",\n") << pad << json(key).dump() << ": ";
            write_json_value(out, value, indent + 2);
            first = false;
        }
        out << "\n" << close << "}";
        return;
    }
    case json::value_t::array: {
        if (v.empty()) {
            out << "[]";
            return;
        }
        out << "[\n";
        for (std::size_t i = 0; i < v.size(); ++i) {
            out << (i ? ",\n" : "") << pad;
            write_json_value(out, v[i], indent + 2);
        }
        out << "\n" << close << "]";
        return;
    }
    case json::value_t::number_float: {
        const double d = v.get<double>();
        if (std::isfinite(d))
            out << format_number(d);
        else
            out << "null";
        return;
    }
    default:
        out << v.dump();
    }
}

}  // namespace

void write_trace_csv(const std::filesystem::path& path, const Trace& trace)
{
    auto out = open_output(path);
    out << "t,dt,sup_norm,u_inner_boundary,u_cap\n";
    for (std::size_t i = 0; i < trace.size(); ++i)
        out << format_number(trace.t[i]) << ',' << format_number(trace.dt[i]) << ','
            << format_number(trace.sup_norm[i]) << ',' << format_number(trace.u_inner_boundary[i]) << ','
            << format_number(trace.u_cap[i]) << '\n';
}

void write_phase_csv(const std::filesystem::path& path, const std::vector<SweepRecord>& records)
{
    auto out = open_output(path);
    out << "p,amplitude,sigma_bound,domain,outcome,T_hat,t0_bound\n";
    for (const auto& r : records)
        out << format_number(r.p) << ',' << format_number(r.amplitude) << ',' << format_number(r.sigma_bound) << ','
            << csv_text(r.domain) << ',' << r.outcome << ',' << format_number(r.T_hat) << ','
            << format_number(r.t0_bound) << '\n';
}

void write_residuals_csv(const std::filesystem::path& path, const ResidualSampling& sampling)
{
    auto out = open_output(path);
    const Eigen::Index dim = sampling.samples.empty() ? 1 : sampling.samples.front().x.size();
    out << "kind";
    for (Eigen::Index j = 0; j < dim; ++j)
        out << ",x" << j + 1;
    out << ",t,sigma,residual,admissible\n";
    for (const auto& s : sampling.samples) {
        out << s.kind;
        for (Eigen::Index j = 0; j < dim; ++j)
            out << ',' << format_number(s.x[j]);
        out << ',' << format_number(s.t) << ',' << format_number(s.sigma) << ',' << format_number(s.residual) << ','
            << (s.admissible ? 1 : 0) << '\n';
    }
}

ordered_json to_json(const StudyReport& report)
{
    ordered_json j;
    j["kind"] = report.kind;
    j["pass"] = report.pass;
    j["inconclusive"] = report.inconclusive;
    j["worst_violation"] = report.worst_violation;
    j["tolerance"] = report.tolerance;
    j["parameters"] = ordered_json::object();
    for (const auto& [k, v] : report.parameters)
        j["parameters"][k] = v;
    j["metrics"] = ordered_json::object();
    for (const auto& [k, v] : report.metrics)
        j["metrics"][k] = v;
    j["notes"] = report.notes;
    j["artifacts"] = report.artifacts;
    return j;
}

void write_study_json(const std::filesystem::path& path, const StudyReport& report)
{
    auto out = open_output(path);
    write_json_value(out, to_json(report), 0);
    out << '\n';
}

std::string violations_json(const std::string& error, const std::vector<std::string>& violations)
{
    json j;
    j["error"] = error;
    j["violations"] = violations;
    return j.dump();
}

// ---------------------------------------------------------------------------
// Commands

const std::vector<std::string>& command_names()
{
    static const std::vector<std::string> names{"simulate",     "exhaust",
                                                "compare",      "neumann-mono",
                                                "verify-supersolution", "sweep"};
    return names;
}

std::string usage(const std::string& program)
{
    std::ostringstream os;
    os << "usage: " << program << " <command> --config <path> [--out <dir>] [--jobs <k>]\n"
       << "commands:";
    for (const auto& c : command_names())
        os << ' ' << c;
    os << "\nexit codes: 0 pass, 1 study failed, 2 config error, 3 inconclusive, 4 refused\n";
    return os.str();
}

namespace {

int exit_for(const StudyReport& report)
{
    if (report.inconclusive)
        return InconclusiveRun;
    return report.pass ? Pass : Fail;
}

StudyReport simulate(const RunConfig& cfg, const std::filesystem::path& dir)
{
    const Problem problem = cfg.setup.problem();
    const double z0 = sup_norm(problem.initial);
    const double t0 = z0 > 0.0 ? MajorantSpec<double>{cfg.setup.p, z0}.t0() : std::numeric_limits<double>::infinity();
    double worst = 0.0;
    RunOptions options;
    options.observer = [&](std::size_t, const Field&, const Field& next, double) {
        if (z0 > 0.0 && next.time < t0) {
            const double z = majorant_value(MajorantSpec<double>{cfg.setup.p, z0}, next.time);
            worst = std::max(worst, sup_norm(next) - z * (1.0 + 1e-6));
        }
    };
    const RunResult result = run(problem, cfg.setup.solver, options);
    write_trace_csv(dir / "trace.csv", result.trace);

    StudyReport report;
    report.kind = "simulate";
    report.parameters["domain"] = describe(cfg.setup.domain);
    report.parameters["L"] = format_number(cfg.setup.L);
    report.parameters["M"] = std::to_string(cfg.setup.M);
    report.parameters["p"] = format_number(cfg.setup.p);
    report.parameters["sigma_bound"] = format_number(cfg.setup.sigma.bound());
    report.parameters["init"] = cfg.init_kind;
    report.parameters["t_end"] = format_number(cfg.setup.solver.t_end);
    report.parameters["outcome"] = outcome_name(result.outcome);
    report.metrics["initial_sup_norm"] = z0;
    report.metrics["t0_bound"] = t0;
    report.metrics["final_time"] = result.final_state.time;
    report.metrics["final_sup_norm"] = sup_norm(result.final_state);
    std::visit(
        [&](const auto& o) {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, GlobalUpTo>) {
                report.metrics["t_end"] = o.t_end;
                report.metrics["decay_slope"] = o.decay_slope;
            } else if constexpr (std::is_same_v<T, BlowUp>) {
                report.metrics["t_detect"] = o.t_detect;
                report.metrics["T_hat"] = o.T_hat;
            } else {
                report.notes.push_back(o.reason);
            }
        },
        result.outcome);
    report.tolerance = 0.0;
    report.worst_violation = worst;
    report.metrics["majorant_violation"] = worst;
    report.inconclusive = std::holds_alternative<Inconclusive>(result.outcome);
    report.pass = worst <= 0.0;
    report.artifacts.push_back("trace.csv");
    return report;
}

StudyReport verify_supersolution(const RunConfig& cfg, const std::filesystem::path& dir)
{
    const auto& sup = cfg.supersolution;
    if (!sup.barrier)
        throw ConfigError({"supersolution: no barrier given (set supersolution.barrier or use a scaled_U/scaled_V init)"});
    const double varsigma = cfg.setup.sigma.bound();
    const auto sampling = sample_residuals(*sup.barrier, cfg.setup.domain, varsigma, sup.samples, sup.span, sup.t_max);
    write_residuals_csv(dir / "residuals.csv", sampling);

    constexpr double tol = 1e-12;
    StudyReport report;
    if (sup.simulate) {
        report = supersolution_bound_study(cfg.setup, *sup.barrier, sup.scale);
    } else {
        report.kind = "supersolution_residuals";
        report.parameters["domain"] = describe(cfg.setup.domain);
        report.parameters["p"] = format_number(cfg.setup.p);
        report.parameters["sigma_bound"] = format_number(varsigma);
        report.parameters["barrier"] = std::holds_alternative<UBarrier<double>>(*sup.barrier) ? "U" : "V";
        report.pass = true;
    }
    report.parameters["samples"] = std::to_string(sup.samples);
    report.metrics["min_interior_residual"] = sampling.min_interior;
    report.metrics["min_admissible_boundary_residual"] =
        sampling.admissible_boundary_count ? sampling.min_boundary_admissible : std::numeric_limits<double>::quiet_NaN();
    report.metrics["admissible_boundary_samples"] = static_cast<double>(sampling.admissible_boundary_count);
    report.metrics["residual_tolerance"] = tol;
    const bool residuals_ok = sampling.min_interior >= -tol &&
                              (sampling.admissible_boundary_count == 0 || sampling.min_boundary_admissible >= -tol);
    if (sampling.admissible_boundary_count == 0)
        report.notes.push_back("no sampled boundary point satisfies the admissibility condition");
    report.pass = report.pass && residuals_ok;
    report.artifacts.push_back("residuals.csv");
    return report;
}

StudyReport sweep(const RunConfig& cfg, unsigned jobs, const std::filesystem::path& dir)
{
    if (cfg.sweep_p.empty() || cfg.sweep_amplitudes.empty())
        throw ConfigError({"sweep: the configuration has no sweep block"});
    SweepConfig sc;
    sc.base = cfg.setup;
    sc.p_values = cfg.sweep_p;
    sc.amplitudes = cfg.sweep_amplitudes;
    sc.jobs = jobs;
    const auto records = fujita_sweep(sc);
    write_phase_csv(dir / "phase.csv", records);

    StudyReport report;
    report.kind = "sweep";
    report.parameters["domain"] = describe(cfg.setup.domain);
    report.parameters["init"] = cfg.init_kind;
    report.parameters["sigma_bound"] = format_number(cfg.setup.sigma.bound());
    report.parameters["t_end"] = format_number(cfg.setup.solver.t_end);
    std::size_t blow = 0, global = 0, inconclusive = 0, slow = 0;
    for (const auto& r : records) {
        blow += r.outcome == "BlowUp";
        global += r.outcome == "GlobalUpTo";
        inconclusive += r.outcome == "Inconclusive";
        slow += r.slow;
        if (!r.note.empty())
            report.notes.push_back("p=" + format_number(r.p) + " amplitude=" + format_number(r.amplitude) + ": " +
                                   r.note);
        if (r.slow)
            report.notes.push_back("p=" + format_number(r.p) + " amplitude=" + format_number(r.amplitude) +
                                   ": GlobalUpTo without decay over the horizon");
    }
    report.metrics["runs"] = static_cast<double>(records.size());
    report.metrics["blow_up"] = static_cast<double>(blow);
    report.metrics["global"] = static_cast<double>(global);
    report.metrics["inconclusive"] = static_cast<double>(inconclusive);
    report.metrics["slow"] = static_cast<double>(slow);
    const bool monotone = classification_monotone_in_amplitude(records);
    report.parameters["monotone_in_amplitude"] = monotone ? "true" : "false";
    report.inconclusive = inconclusive > 0;
    report.pass = monotone;
    report.artifacts.push_back("phase.csv");
    return report;
}

}  // namespace

int dispatch(const std::string& command, const RunConfig& cfg, unsigned jobs, std::ostream& log)
{
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), command) == names.end()) {
        log << "unknown command '" << command << "'\n" << usage("fujita");
        return ConfigInvalid;
    }
    const std::filesystem::path dir = cfg.out_dir;
    StudyReport report;
    try {
        if (command == "simulate")
            report = simulate(cfg, dir);
        else if (command == "exhaust")
            report = exhaustion_study(cfg.setup, cfg.exhaust.L_list, cfg.exhaust.t_check, cfg.exhaust.tail_tol);
        else if (command == "compare")
            report = comparison_study(cfg.setup, cfg.compare.phi, cfg.compare.psi, cfg.compare.options);
        else if (command == "neumann-mono")
            report = neumann_monotonicity_study(cfg.setup, cfg.neumann_psi, cfg.compare.options);
        else if (command == "verify-supersolution")
            report = verify_supersolution(cfg, dir);
        else
            report = sweep(cfg, jobs, dir);
    } catch (const StudyRefused& e) {
        log << violations_json(e.what(), e.details()) << '\n';
        StudyReport refused;
        refused.kind = command;
        refused.notes.push_back(std::string("refused: ") + e.what());
        for (const auto& d : e.details())
            refused.notes.push_back(d);
        write_study_json(dir / "study.json", refused);
        return Refused;
    } catch (const ConfigError& e) {
        log << violations_json("configuration", e.violations()) << '\n';
        return ConfigInvalid;
    } catch (const std::invalid_argument& e) {
        log << violations_json("configuration", {e.what()}) << '\n';
        return ConfigInvalid;
    }
    report.artifacts.push_back("study.json");
    write_study_json(dir / "study.json", report);
    log << command << ": " << (report.inconclusive ? "inconclusive" : report.pass ? "pass" : "fail") << '\n';
    return exit_for(report);
}

}  // namespace fujita
