#include "slab/cli.hpp"

#include "slab/config.hpp"
#include "slab/error.hpp"
#include "slab/integrate.hpp"
#include "slab/stress.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

namespace slab::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kFdTolerance = 1e-5;
constexpr double kConservationTolerance = 1e-6;
constexpr double kBochnerTolerance = 1e-5;
constexpr double kKatoFloor = -1e-10;

struct Record {
    std::string name;
    std::string anchor;
    std::string status; // pass | fail | info
    double attained = 0.0;
    std::string comparison; // "<=", ">=", "in", ""
    Json tolerance;
    std::string note;
    Json values = Json::object();
};

struct Report {
    std::string command;
    std::vector<std::string> arguments;
    std::string config_hash;
    std::uint64_t seed = 0;
    double tol_point = 0.0;
    double tol_quad = 0.0;
    std::vector<Record> records;
    Json tables = Json::object();
    std::vector<std::vector<std::string>> csv; // optional sidecar table, first row is the header

    bool failed() const
    {
        for (const auto& r : records)
            if (r.status == "fail") return true;
        return false;
    }

    Record& check_le(const std::string& name, const std::string& anchor, double attained, double tol)
    {
        records.push_back({name, anchor, attained <= tol ? "pass" : "fail", attained, "<=", tol, "", Json::object()});
        return records.back();
    }
    Record& check_ge(const std::string& name, const std::string& anchor, double attained, double bound)
    {
        records.push_back({name, anchor, attained >= bound ? "pass" : "fail", attained, ">=", bound, "", Json::object()});
        return records.back();
    }
    Record& check_in(const std::string& name, const std::string& anchor, double attained, double lo, double hi)
    {
        const bool ok = attained >= lo && attained <= hi;
        records.push_back({name, anchor, ok ? "pass" : "fail", attained, "in", Json::array({lo, hi}), "", Json::object()});
        return records.back();
    }
    Record& info(const std::string& name, const std::string& anchor, double attained, const std::string& note = "")
    {
        records.push_back({name, anchor, "info", attained, "", nullptr, note, Json::object()});
        return records.back();
    }
};

std::string utc_timestamp()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Json number(double x)
{
    if (std::isfinite(x)) return x;
    return nullptr;
}

Json to_json(const Report& r)
{
    Json doc;
    doc["schema"] = "slab-report/1";
    doc["metadata"] = {{"command", r.command},
                       {"arguments", r.arguments},
                       {"config_hash", r.config_hash},
                       {"seed", r.seed},
                       {"tol_point", r.tol_point},
                       {"tol_quad", r.tol_quad},
                       {"timestamp", utc_timestamp()}};
    Json recs = Json::array();
    for (const auto& rec : r.records) {
        Json j;
        j["name"] = rec.name;
        j["anchor"] = rec.anchor;
        j["status"] = rec.status;
        j["attained"] = number(rec.attained);
        if (!rec.comparison.empty()) {
            j["comparison"] = rec.comparison;
            j["tolerance"] = rec.tolerance;
        }
        if (!rec.note.empty()) j["note"] = rec.note;
        if (!rec.values.empty()) j["values"] = rec.values;
        recs.push_back(std::move(j));
    }
    doc["records"] = std::move(recs);
    if (!r.tables.empty()) doc["tables"] = r.tables;
    doc["verdict"] = r.failed() ? "fail" : "pass";
    return doc;
}

std::string format_double(double x)
{
    if (std::isnan(x)) return "nan";
    std::ostringstream s;
    s << std::setprecision(10) << x;
    return s.str();
}

void write_text(const Report& r, std::ostream& out)
{
    out << "slab " << r.command << "  (config " << r.config_hash << ", seed " << r.seed << ")\n";
    for (const auto& rec : r.records) {
        std::string status = rec.status;
        for (auto& c : status) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        out << std::left << std::setw(5) << status << ' ' << std::setw(34) << rec.name << ' '
            << std::setw(16) << format_double(rec.attained);
        if (!rec.comparison.empty()) out << ' ' << rec.comparison << ' ' << rec.tolerance.dump();
        out << "  [" << rec.anchor << "]";
        if (!rec.note.empty()) out << "  " << rec.note;
        out << '\n';
    }
    out << "verdict: " << (r.failed() ? "fail" : "pass") << '\n';
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

void write_csv_rows(const std::vector<std::vector<std::string>>& rows, std::ostream& out)
{
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
        out << '\n';
    }
}

void write_csv(const Report& r, std::ostream& out)
{
    std::vector<std::vector<std::string>> rows{{"name", "anchor", "status", "attained", "comparison", "tolerance"}};
    for (const auto& rec : r.records)
        rows.push_back({rec.name, rec.anchor, rec.status, format_double(rec.attained), rec.comparison,
                        rec.comparison.empty() ? "" : rec.tolerance.dump()});
    write_csv_rows(rows, out);
}

Json point_json(const Point& p) { return Json(std::vector<double>(p.data(), p.data() + p.size())); }

Json integral_json(const IntegralResult& r)
{
    Json j{{"value", number(r.value)}, {"error", number(r.error)}, {"divergent", r.divergent}, {"cells", r.cells}};
    if (r.tail != 0.0) j["tail"] = r.tail;
    if (!r.warning.empty()) j["warning"] = r.warning;
    return j;
}

// ---------------------------------------------------------------------------
// Options shared by the commands.

struct Options {
    std::string config_path;
    std::string format = "json";
    std::uint64_t seed = 1;
    double tol_point = 1e-8;
    double tol_quad = 1e-4;
    std::string out_path;

    std::string soliton;
    std::string map;
    std::string theorem;
    std::string grid;
    std::optional<double> rmax;
    std::optional<int> samples;
    std::vector<std::string> points;
    std::vector<double> radii;
    std::string csv_path;
};

struct Context {
    const Options& opt;
    const ConfigDocument& doc;
    Registry registry;

    const ConfigSection* run() const { return doc.run(); }

    double rmax(double fallback) const
    {
        if (opt.rmax) return *opt.rmax;
        if (run() && run()->has("rmax")) return run()->number("rmax");
        return fallback;
    }
    int samples(int fallback) const
    {
        if (opt.samples) return *opt.samples;
        if (run() && run()->has("samples")) return static_cast<int>(run()->number("samples"));
        return fallback;
    }
    std::string grid() const
    {
        if (!opt.grid.empty()) return opt.grid;
        if (run() && run()->has("grid")) return run()->string("grid");
        return "";
    }
    std::vector<double> radii(std::vector<double> fallback) const
    {
        if (!opt.radii.empty()) return opt.radii;
        if (run() && run()->has("radii")) return run()->numbers("radii");
        return fallback;
    }
};

std::pair<int, int> parse_grid(const std::string& g)
{
    const auto x = g.find('x');
    try {
        if (x == std::string::npos) throw std::invalid_argument(g);
        const int nr = std::stoi(g.substr(0, x)), nt = std::stoi(g.substr(x + 1));
        if (nr < 1 || nt < 1) throw std::invalid_argument(g);
        return {nr, nt};
    } catch (const std::exception&) {
        throw ConfigError("grid must look like 32x16, got '" + g + "'");
    }
}

Point parse_point(const std::string& s, int m)
{
    std::vector<double> xs;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            xs.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("bad point coordinate '" + item + "'");
        }
    }
    if (static_cast<int>(xs.size()) != m)
        throw ConfigError("point '" + s + "' needs " + std::to_string(m) + " coordinates");
    return Eigen::Map<Point>(xs.data(), m);
}

struct SampleSet {
    std::vector<Point> points;
    std::string description;
};

SampleSet samples_for(const Context& ctx, int m, double default_rmax, int default_count)
{
    SampleSet s;
    if (!ctx.opt.points.empty()) {
        for (const auto& p : ctx.opt.points) s.points.push_back(parse_point(p, m));
        s.description = "explicit points";
        return s;
    }
    const double rmax = ctx.rmax(default_rmax);
    const std::string g = ctx.grid();
    if (!g.empty()) {
        if (m != 2) throw ConfigError("--grid needs a 2-dimensional chart");
        const auto [nr, nt] = parse_grid(g);
        s.points = polar_grid(rmax, nr, nt);
        s.description = "polar grid " + g + ", r <= " + format_double(rmax);
        return s;
    }
    const int count = ctx.samples(default_count);
    if (count < 1) throw ConfigError("sample count must be positive");
    s.points = random_ball(m, rmax, static_cast<std::size_t>(count), ctx.opt.seed);
    s.description = std::to_string(count) + " random points, |x| <= " + format_double(rmax) + ", seed " +
                    std::to_string(ctx.opt.seed);
    return s;
}

// The map, moved onto the soliton's chart when one is given.
SmoothMap map_on(const SmoothMap& phi, const Chart& chart)
{
    if (phi.m() != chart.dim())
        throw ConfigError("map " + phi.name() + " has source dimension " + std::to_string(phi.m()) + ", chart " +
                          chart.name() + " has " + std::to_string(chart.dim()));
    std::vector<Expr> comps;
    for (int a = 0; a < phi.n(); ++a) comps.push_back(phi.component(a));
    return SmoothMap(phi.name(), chart, phi.target(), comps);
}

// ---------------------------------------------------------------------------
// soliton verify

void soliton_verify(const Context& ctx, Report& rep)
{
    const SolitonEntry e = ctx.registry.soliton(ctx.opt.soliton);
    const int m = e.chart().dim();
    const SampleSet s = m == 2 && ctx.opt.points.empty() && ctx.opt.grid.empty() && !ctx.opt.samples &&
                                !(ctx.run() && (ctx.run()->has("grid") || ctx.run()->has("samples")))
                            ? SampleSet{polar_grid(ctx.rmax(3.0), 32, 16),
                                        "polar grid 32x16, r <= " + format_double(ctx.rmax(3.0))}
                            : samples_for(ctx, m, 3.0, 50);
    rep.tables["samples"] = {{"description", s.description}, {"count", s.points.size()}};

    if (e.yamabe) {
        const YamabeSolitonData& y = e.yamabe_data;
        double sup = 0.0;
        for (const Point& p : s.points) sup = std::max(sup, yamabe_residual(y, p).value.norm());
        rep.check_le("yamabe_residual_sup", "yamabe-soliton-equation", sup, ctx.opt.tol_point);
        rep.info("soliton_type", "yamabe-soliton-equation", y.rho, to_string(y.type()));
        return;
    }
    const RicciSolitonData& sol = e.ricci;
    const SolitonReport r = soliton_report(sol, s.points, s.description);
    const SolitonReport fd = soliton_report(sol, s.points, s.description, DerivSource::FiniteDifference);
    rep.check_le("ricci_residual_sup", "soliton-equation", r.residual_sup, ctx.opt.tol_point);
    rep.check_le("ricci_residual_sup_fd", "soliton-equation", fd.residual_sup, kFdTolerance).note =
        "finite-difference oracle path";
    rep.check_le("trace_identity_sup", "trace-identity", r.trace_identity_sup, ctx.opt.tol_point);
    rep.check_le("scal_gradient_identity_sup", "curvature-potential-identity", r.identity_a_sup, ctx.opt.tol_point);
    Record& c = rep.check_le("soliton_constant_stddev", "soliton-constant", r.constant_stddev, ctx.opt.tol_point);
    c.values = {{"mean", r.constant_mean}};
    rep.info("soliton_type", "soliton-equation", sol.lambda, to_string(sol.type()));
    rep.info("scal_inf", "scalar-curvature", r.scal_inf);
    rep.info("ricci_eigen_sup", "ricci-curvature", r.ricci_eigen_sup);
    if (sol.lambda == 0.0) {
        rep.check_le("grad_f_sq_sup", "steady-gradient-bound", r.grad_f_sq_sup,
                     r.constant_mean * (1.0 + 1e-9)).note = "bounded by the soliton constant";
        rep.check_ge("scal_inf_steady", "steady-scalar-curvature", r.scal_inf, -1e-10);
    } else {
        rep.info("grad_f_sq_sup", "steady-gradient-bound", r.grad_f_sq_sup, "not steady");
    }
}

// ---------------------------------------------------------------------------
// map analyze

void map_analyze(const Context& ctx, Report& rep)
{
    SmoothMap phi = ctx.registry.map(ctx.opt.map);
    if (!ctx.opt.soliton.empty()) phi = map_on(phi, ctx.registry.soliton(ctx.opt.soliton).chart());
    const SampleSet s = samples_for(ctx, phi.m(), 2.0, 20);
    rep.tables["samples"] = {{"description", s.description}, {"count", s.points.size()}};

    double tau_sup = 0.0, tau2_sup = 0.0, e_sup = 0.0, cons1 = 0.0, cons2 = 0.0;
    double kato_min = std::numeric_limits<double>::infinity();
    std::vector<MapPointReport> reports;
    Json rows = Json::array();
    rep.csv = {{"point", "energy_density", "hessian_norm_sq", "tension_norm", "bitension_norm", "kato_gap",
                "zero_differential", "full_hessian_density", "div_s1_residual", "div_s2_residual"}};
    for (const Point& p : s.points) {
        const MapPointReport r = analyze_point(phi, p);
        const double c1 = div_s1_residual(phi, p).norm();
        const double c2 = div_s2_residual(phi, p).norm();
        tau_sup = std::max(tau_sup, std::sqrt(r.tension_norm_sq));
        tau2_sup = std::max(tau2_sup, r.bitension_norm);
        e_sup = std::max(e_sup, r.energy_density);
        cons1 = std::max(cons1, c1);
        cons2 = std::max(cons2, c2);
        if (!r.kato.zero_differential) kato_min = std::min(kato_min, r.kato.value);
        rows.push_back({{"point", point_json(p)},
                        {"energy_density", r.energy_density},
                        {"hessian_norm_sq", r.hessian_norm_sq},
                        {"tension", point_json(r.tension)},
                        {"tension_norm", std::sqrt(r.tension_norm_sq)},
                        {"bitension", point_json(r.bitension)},
                        {"bitension_norm", r.bitension_norm},
                        {"kato_gap", r.kato.value},
                        {"zero_differential", r.kato.zero_differential},
                        {"full_hessian_density", r.full_hessian_density},
                        {"div_s1_residual", c1},
                        {"div_s2_residual", c2}});
        std::string coords;
        for (Eigen::Index i = 0; i < p.size(); ++i) coords += (i ? " " : "") + format_double(p[i]);
        rep.csv.push_back({coords, format_double(r.energy_density), format_double(r.hessian_norm_sq),
                           format_double(std::sqrt(r.tension_norm_sq)), format_double(r.bitension_norm),
                           format_double(r.kato.value), r.kato.zero_differential ? "1" : "0",
                           format_double(r.full_hessian_density), format_double(c1), format_double(c2)});
        reports.push_back(r);
    }
    rep.tables["points"] = std::move(rows);

    const double tol = ctx.opt.tol_point;
    std::string verdict;
    if (std::sqrt(e_sup) <= tol)
        verdict = "harmonic, constant";
    else if (tau_sup <= tol)
        verdict = "harmonic";
    else if (tau2_sup <= tol)
        verdict = "proper biharmonic";
    else
        verdict = "not biharmonic";
    rep.info("classification", "tension-field", tau_sup, verdict).values = {{"verdict", verdict}};
    rep.info("tension_sup", "tension-field", tau_sup);
    rep.info("bitension_sup", "bitension-field", tau2_sup);
    rep.info("energy_density_sup", "energy", e_sup);
    rep.check_le("conservation_energy_sup", "conservation-energy", cons1, kConservationTolerance).note =
        "div S1 + <tau, dphi>, finite differences";
    rep.check_le("conservation_bienergy_sup", "conservation-bienergy", cons2, kConservationTolerance).note =
        "div S2 + <tau2, dphi>, finite differences";
    if (std::isfinite(kato_min))
        rep.check_ge("kato_gap_min", "kato-inequality", kato_min, kKatoFloor);
    else
        rep.info("kato_gap_min", "kato-inequality", 0.0, "differential vanishes at every sample");
    if (tau_sup <= tol) {
        double b = 0.0;
        for (const Point& p : s.points) b = std::max(b, std::abs(bochner_residual(phi, p, tol)));
        rep.check_le("bochner_residual_sup", "bochner-formula", b, kBochnerTolerance);
    }
}

// ---------------------------------------------------------------------------
// inequality

QuadratureConfig whole_space_config(const Context& ctx)
{
    QuadratureConfig c;
    c.rmax = ctx.rmax(200.0);
    c.tail = true;
    return c;
}

void add_terms(Report& rep, const InequalityReport& ir, const std::string& anchor)
{
    for (const auto& t : ir.terms) {
        Record& r = rep.info(t.name, anchor, t.result.value);
        r.values = integral_json(t.result);
    }
    for (const auto& d : ir.diagnostics) rep.info(d.name, anchor, d.value, d.note);
    Json tbl = Json::object();
    for (const auto& t : ir.terms) tbl[t.name] = integral_json(t.result);
    tbl["total"] = integral_json(ir.total);
    tbl["verdict"] = ir.verdict;
    tbl["finite_energy"] = ir.finite_energy;
    tbl["degenerate"] = ir.degenerate;
    rep.tables[ir.kind] = std::move(tbl);
}

void add_vanishing_check(Report& rep, const InequalityReport& ir, const std::string& anchor, double tol_quad,
                         const std::string& finiteness)
{
    const double a = ir.terms[0].result.value, b = ir.terms[1].result.value;
    if (!ir.finite_energy) {
        rep.info("A_plus_B", anchor, ir.total.value, finiteness + " diverges: hypothesis not met");
        return;
    }
    const double tol = ir.total.error + tol_quad * (std::abs(a) + std::abs(b)) + 1e-12;
    rep.check_le("A_plus_B", anchor, std::abs(ir.total.value), tol).note = ir.verdict;
}

bool harmonic_on_samples(const SmoothMap& phi, double radius, double tol)
{
    for (const Point& p : random_ball(phi.m(), radius, 32, 0x5eedULL))
        if (tension(phi, p).value.norm() > tol) return false;
    return true;
}

void inequality(const Context& ctx, Report& rep)
{
    const std::string& th = ctx.opt.theorem;
    const SolitonEntry e = ctx.registry.soliton(ctx.opt.soliton);
    const SmoothMap phi = map_on(ctx.registry.map(ctx.opt.map), e.chart());
    const QuadratureConfig cfg = whole_space_config(ctx);
    const bool yamabe_theorem = th == "yamabe-harmonic" || th == "yamabe-biharmonic";
    if (yamabe_theorem != e.yamabe)
        throw ConfigError("theorem " + th + " needs a " + (yamabe_theorem ? "Yamabe" : "Ricci") + " soliton");

    if (th == "harmonic") {
        const RicciSolitonData& s = e.ricci;
        const InequalityReport ir = harmonic_inequality_terms(phi, s, cfg);
        add_terms(rep, ir, "harmonic-inequality");
        add_vanishing_check(rep, ir, "harmonic-inequality", ctx.opt.tol_quad, "the energy");
        if (phi.m() == 2)
            rep.info("dimension_note", "harmonic-inequality", 2.0,
                     "m = 2: the weight reduces to -Scal and the inequality carries no information");
        const std::vector<double> radii = ctx.radii({2, 4, 8, 16});
        const DecayScan scan = boundary_decay_scan(phi, s, radii, cfg);
        Json rows = Json::array();
        rep.csv = {{"R", "boundary", "boundary_error", "bound", "annulus_energy", "at_floor"}};
        for (const auto& r : scan.rows) {
            rows.push_back({{"R", r.R},
                            {"boundary", integral_json(r.boundary)},
                            {"bound", integral_json(r.bound)},
                            {"annulus_energy", integral_json(r.annulus_energy)},
                            {"at_floor", r.at_floor}});
            rep.csv.push_back({format_double(r.R), format_double(r.boundary.value), format_double(r.boundary.error),
                               format_double(r.bound.value), format_double(r.annulus_energy.value),
                               r.at_floor ? "1" : "0"});
        }
        rep.tables["boundary_decay"] = {{"rows", rows},
                                        {"slope", number(scan.slope)},
                                        {"finite_energy", scan.finite_energy},
                                        {"grad_f_sq_sup", scan.grad_f_sq_sup},
                                        {"note", scan.note}};
        const bool zero_energy = ir.finite_energy && ir.terms[2].result.value == 0.0;
        if (scan.hypothesis_violated)
            rep.info("boundary_decay_slope", "boundary-decay", scan.slope, scan.note);
        else if (zero_energy)
            rep.info("boundary_decay_slope", "boundary-decay", scan.slope, "zero energy: boundary term vanishes identically");
        else
            rep.check_in("boundary_decay_slope", "boundary-decay", scan.slope, -1.5, -0.7).note = scan.note;
        if (s.lambda == 0.0 && harmonic_on_samples(phi, 4.0, ctx.opt.tol_point)) {
            const BochnerScan bs = steady_bochner_scan(phi, s, radii, cfg);
            Json brows = Json::array();
            for (const auto& r : bs.rows)
                brows.push_back({{"R", r.R},
                                 {"scal_term", integral_json(r.scal_term)},
                                 {"gradient_term", integral_json(r.gradient_term)},
                                 {"lhs", r.lhs},
                                 {"cutoff_term", integral_json(r.cutoff_term)},
                                 {"bound", r.bound}});
            rep.tables["steady_bochner"] = {{"rows", brows}, {"note", bs.note}};
            if (!bs.rows.empty())
                rep.info("steady_bochner_lhs", "steady-bochner-estimate", bs.rows.back().lhs,
                         "left side at the largest radius");
        }
    } else if (th == "biharmonic") {
        const InequalityReport ir = biharmonic_inequality_terms(phi, e.ricci, cfg);
        add_terms(rep, ir, "biharmonic-inequality");
        add_vanishing_check(rep, ir, "biharmonic-inequality", ctx.opt.tol_quad, "the bienergy");
        for (const auto& d : ir.diagnostics)
            if (d.name == "pointwise_collapse_sup") {
                rep.records.erase(std::remove_if(rep.records.begin(), rep.records.end(),
                                                 [](const Record& r) { return r.name == "pointwise_collapse_sup"; }),
                                  rep.records.end());
                rep.check_le("pointwise_collapse_sup", "biharmonic-collapse", d.value, ctx.opt.tol_point).note =
                    d.note;
            }
    } else if (yamabe_theorem) {
        const YamabeKind kind = th == "yamabe-harmonic" ? YamabeKind::Harmonic : YamabeKind::Biharmonic;
        const std::string anchor =
            kind == YamabeKind::Harmonic ? "yamabe-harmonic-inequality" : "yamabe-biharmonic-inequality";
        const InequalityReport ir = yamabe_inequality_terms(phi, e.yamabe_data, kind, cfg);
        add_terms(rep, ir, anchor);
        if (ir.degenerate)
            rep.check_le("degenerate_term", anchor, std::abs(ir.total.value), 0.0).note = ir.verdict;
        else
            rep.info("verdict", anchor, ir.total.value, ir.verdict);
    } else if (th == "identities") {
        const RicciSolitonData& s = e.ricci;
        QuadratureConfig local;
        for (double R : ctx.radii({2})) {
            const std::string tag = "_R" + format_double(R);
            try {
                const IdentityReport ir = harmonic_identity(phi, s, R, local);
                Record& r = rep.check_le("harmonic_identity" + tag, "harmonic-cutoff-identity", ir.relative,
                                         ctx.opt.tol_quad);
                r.values = {{"residual", ir.residual}, {"scale", ir.scale}, {"quadrature_error", ir.quadrature_error}};
                for (const auto& t : ir.lhs) r.values[t.name] = t.result.value;
            } catch (const NotHarmonicOnSupport& ex) {
                rep.info("harmonic_identity" + tag, "harmonic-cutoff-identity", 0.0, ex.what());
            }
            try {
                const IdentityReport ir = biharmonic_identity(phi, s, R, local);
                Record& r = rep.check_le("biharmonic_identity" + tag, "biharmonic-cutoff-identity", ir.relative,
                                         ctx.opt.tol_quad);
                r.values = {{"residual", ir.residual}, {"scale", ir.scale}, {"quadrature_error", ir.quadrature_error}};
                for (const auto& t : ir.lhs) r.values[t.name] = t.result.value;
                for (const auto& t : ir.rhs) r.values[t.name] = t.result.value;
            } catch (const NotBiharmonicOnSupport& ex) {
                rep.info("biharmonic_identity" + tag, "biharmonic-cutoff-identity", 0.0, ex.what());
            }
        }
    } else {
        throw ConfigError("unknown theorem " + th);
    }
}

std::ostream& open_output(const std::string& path, std::ofstream& file, std::ostream& fallback)
{
    if (path.empty()) return fallback;
    file.open(path);
    if (!file) throw ConfigError("cannot write " + path);
    return file;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options opt;
    CLI::App app{"Numerical verification of soliton, harmonic and biharmonic map identities", "slab"};
    app.require_subcommand(1);
    app.add_option("--config", opt.config_path, "configuration file");
    app.add_option("--format", opt.format, "report format")->check(CLI::IsMember({"json", "csv", "text"}));
    app.add_option("--seed", opt.seed, "seed for random sample points");
    app.add_option("--tol-point", opt.tol_point, "pointwise tolerance");
    app.add_option("--tol-quad", opt.tol_quad, "relative tolerance for quadrature identities");
    app.add_option("--out", opt.out_path, "write the report here instead of stdout");

    CLI::App* soliton = app.add_subcommand("soliton", "soliton checks")->require_subcommand(1);
    CLI::App* verify = soliton->add_subcommand("verify", "verify a Ricci or Yamabe soliton");
    verify->add_option("--soliton", opt.soliton)->required();
    verify->add_option("--grid", opt.grid, "polar grid NRxNT (2-dimensional charts)");
    verify->add_option("--rmax", opt.rmax);
    verify->add_option("--samples", opt.samples);

    CLI::App* map = app.add_subcommand("map", "map checks")->require_subcommand(1);
    CLI::App* analyze = map->add_subcommand("analyze", "pointwise analysis of a map");
    analyze->add_option("--map", opt.map)->required();
    analyze->add_option("--soliton", opt.soliton, "use this soliton's chart as the source");
    analyze->add_option("--point", opt.points, "sample point x1,x2,...");
    analyze->add_option("--grid", opt.grid);
    analyze->add_option("--rmax", opt.rmax);
    analyze->add_option("--samples", opt.samples);
    analyze->add_option("--csv", opt.csv_path, "point table sidecar");

    CLI::App* ineq = app.add_subcommand("inequality", "integral identities and inequality terms");
    ineq->add_option("--theorem", opt.theorem)
        ->required()
        ->transform(CLI::Transformer(std::map<std::string, std::string>{{"thm11", "harmonic"},
                                                                        {"thm14", "biharmonic"},
                                                                        {"thm41h", "yamabe-harmonic"},
                                                                        {"thm41b", "yamabe-biharmonic"}}))
        ->check(CLI::IsMember({"harmonic", "biharmonic", "yamabe-harmonic", "yamabe-biharmonic", "identities"}));
    ineq->add_option("--map", opt.map)->required();
    ineq->add_option("--soliton", opt.soliton)->required();
    ineq->add_option("--radii", opt.radii)->delimiter(',');
    ineq->add_option("--rmax", opt.rmax);
    ineq->add_option("--csv", opt.csv_path, "scan table sidecar");

    for (CLI::App* sub : {soliton, verify, map, analyze, ineq}) sub->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        err << "slab: " << e.what() << '\n';
        return kExitConfig;
    }

    Report rep;
    rep.arguments = args;
    rep.seed = opt.seed;
    rep.tol_point = opt.tol_point;
    rep.tol_quad = opt.tol_quad;
    try {
        const ConfigDocument doc = opt.config_path.empty() ? ConfigDocument{} : ConfigDocument::load(opt.config_path);
        rep.config_hash = doc.hash();
        if (const ConfigSection* run = doc.run()) {
            if (run->has("seed") && app.get_option("--seed")->count() == 0)
                rep.seed = opt.seed = static_cast<std::uint64_t>(run->number("seed"));
            if (run->has("tol_point") && app.get_option("--tol-point")->count() == 0)
                rep.tol_point = opt.tol_point = run->number("tol_point");
            if (run->has("tol_quad") && app.get_option("--tol-quad")->count() == 0)
                rep.tol_quad = opt.tol_quad = run->number("tol_quad");
        }
        const Context ctx{opt, doc, Registry(doc)};
        if (verify->parsed()) {
            rep.command = "soliton verify";
            soliton_verify(ctx, rep);
        } else if (analyze->parsed()) {
            rep.command = "map analyze";
            map_analyze(ctx, rep);
        } else {
            rep.command = "inequality";
            inequality(ctx, rep);
        }
        std::ofstream file;
        std::ostream& dest = open_output(opt.out_path, file, out);
        if (opt.format == "json")
            dest << to_json(rep).dump(2) << '\n';
        else if (opt.format == "text")
            write_text(rep, dest);
        else
            write_csv(rep, dest);
        if (!opt.csv_path.empty()) {
            std::ofstream side(opt.csv_path);
            if (!side) throw ConfigError("cannot write " + opt.csv_path);
            write_csv_rows(rep.csv, side);
        }
    } catch (const ConfigError& e) {
        err << "slab: configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SyntaxError& e) {
        err << "slab: configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const UnknownIdentifier& e) {
        err << "slab: configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const VariableOutOfRange& e) {
        err << "slab: configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        err << "slab: numerical error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "slab: numerical error: " << e.what() << '\n';
        return kExitNumeric;
    }
    return rep.failed() ? kExitFail : kExitPass;
}

} // namespace slab::cli
