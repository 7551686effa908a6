#include "slab/config.hpp"

#include "slab/error.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace slab {

namespace {

std::string trim(const std::string& s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// Drops a trailing comment that is not inside quotes.
std::string strip_comment(const std::string& s)
{
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (!quoted && s[i] == '#') return s.substr(0, i);
    }
    return s;
}

std::string where(const ConfigSection& s, const std::string& key)
{
    return "[" + s.kind + (s.name.empty() ? "" : " " + s.name) + "] " + key;
}

std::string unquote(const std::string& raw, const std::string& context)
{
    const std::string v = trim(raw);
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    if (v.find('"') != std::string::npos) throw ConfigError(context + ": unbalanced quotes");
    return v;
}

std::vector<std::string> split_list(const std::string& raw, const std::string& context)
{
    std::string v = trim(raw);
    if (v.size() < 2 || v.front() != '[' || v.back() != ']') throw ConfigError(context + ": expected [ ... ]");
    v = v.substr(1, v.size() - 2);
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char ch : v) {
        if (ch == '"') quoted = !quoted;
        if (ch == ',' && !quoted) {
            out.push_back(unquote(cur, context));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (quoted) throw ConfigError(context + ": unbalanced quotes");
    if (!trim(cur).empty() || !out.empty()) out.push_back(unquote(cur, context));
    return out;
}

double to_number(const std::string& s, const std::string& context)
{
    const std::string v = trim(s);
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ConfigError(context + ": expected a number, got '" + v + "'");
    }
    if (used != v.size()) throw ConfigError(context + ": expected a number, got '" + v + "'");
    return x;
}

} // namespace

std::string ConfigSection::string(const std::string& key) const
{
    auto v = maybe_string(key);
    if (!v) throw ConfigError(where(*this, key) + ": missing");
    return *v;
}

std::optional<std::string> ConfigSection::maybe_string(const std::string& key) const
{
    auto it = values.find(key);
    if (it == values.end()) return std::nullopt;
    return unquote(it->second, where(*this, key));
}

double ConfigSection::number(const std::string& key) const { return to_number(string(key), where(*this, key)); }

std::optional<double> ConfigSection::maybe_number(const std::string& key) const
{
    if (!has(key)) return std::nullopt;
    return number(key);
}

bool ConfigSection::boolean(const std::string& key) const
{
    const std::string v = string(key);
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError(where(*this, key) + ": expected true or false");
}

std::vector<std::string> ConfigSection::strings(const std::string& key) const
{
    auto it = values.find(key);
    if (it == values.end()) throw ConfigError(where(*this, key) + ": missing");
    return split_list(it->second, where(*this, key));
}

std::vector<double> ConfigSection::numbers(const std::string& key) const
{
    std::vector<double> out;
    for (const auto& s : strings(key)) out.push_back(to_number(s, where(*this, key)));
    return out;
}

ConfigDocument ConfigDocument::parse(const std::string& text)
{
    ConfigDocument doc;
    doc.text_ = text;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    std::size_t current = std::string::npos;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        const std::string at = "line " + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(at + ": malformed section header");
            std::istringstream hdr(line.substr(1, line.size() - 2));
            ConfigSection s;
            s.line = lineno;
            hdr >> s.kind >> s.name;
            std::string extra;
            if (hdr >> extra) throw ConfigError(at + ": section header has too many words");
            if (s.kind == "run") {
                if (!s.name.empty()) throw ConfigError(at + ": [run] takes no name");
                if (doc.run()) throw ConfigError(at + ": duplicate [run] section");
            } else if (s.kind == "chart" || s.kind == "soliton" || s.kind == "map") {
                if (s.name.empty()) throw ConfigError(at + ": [" + s.kind + "] needs a name");
                if (doc.find(s.kind, s.name)) throw ConfigError(at + ": duplicate " + s.kind + " " + s.name);
            } else {
                throw ConfigError(at + ": unknown section kind '" + s.kind + "'");
            }
            doc.sections_.push_back(std::move(s));
            current = doc.sections_.size() - 1;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(at + ": expected key = value");
        if (current == std::string::npos) throw ConfigError(at + ": key outside of any section");
        ConfigSection& sec = doc.sections_[current];
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError(at + ": empty key");
        if (sec.values.count(key)) throw ConfigError(at + ": duplicate key " + key);
        sec.values[key] = trim(line.substr(eq + 1));
    }
    return doc;
}

ConfigDocument ConfigDocument::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

const ConfigSection* ConfigDocument::find(const std::string& kind, const std::string& name) const
{
    for (const auto& s : sections_)
        if (s.kind == kind && s.name == name) return &s;
    return nullptr;
}

const ConfigSection* ConfigDocument::run() const
{
    for (const auto& s : sections_)
        if (s.kind == "run") return &s;
    return nullptr;
}

std::string ConfigDocument::hash() const
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text_) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::optional<int> builtin_dimension(const std::string& name, const std::string& prefix)
{
    if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
    const std::string tail = name.substr(prefix.size());
    for (char c : tail)
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    const int m = std::stoi(tail);
    if (m < 1 || m > kMaxJetVars) throw ConfigError("dimension of " + name + " must be in 1.." +
                                                    std::to_string(kMaxJetVars));
    return m;
}

Chart Registry::chart(const std::string& name) const
{
    if (const ConfigSection* s = doc_.find("chart", name)) {
        const int m = static_cast<int>(s->number("dim"));
        if (m < 1 || m > kMaxJetVars) throw ConfigError(where(*s, "dim") + ": out of range");
        std::vector<std::string> metric;
        for (int i = 1; i <= m; ++i)
            for (int j = i; j <= m; ++j) {
                const std::string key = "g" + std::to_string(i) + std::to_string(j);
                if (auto v = s->maybe_string(key)) {
                    metric.push_back(*v);
                } else if (i != j) {
                    metric.push_back("0");
                } else {
                    throw ConfigError(where(*s, key) + ": missing diagonal metric entry");
                }
            }
        return Chart::from_strings(name, m, metric, s->maybe_string("domain").value_or("1"),
                                   s->has("radial") && s->boolean("radial"));
    }
    if (name == "cigar") return cigar_chart();
    if (name == "sphere2") return round_sphere_chart();
    if (auto m = builtin_dimension(name, "euclidean")) return euclidean(*m);
    throw ConfigError("unknown chart " + name);
}

SolitonEntry Registry::soliton(const std::string& name) const
{
    SolitonEntry e;
    if (const ConfigSection* s = doc_.find("soliton", name)) {
        const std::string kind = s->maybe_string("kind").value_or("ricci");
        const Chart c = chart(s->string("chart"));
        if (kind == "ricci") {
            e.ricci = {name, c, Expr::parse(s->string("f"), c.dim()), s->number("lambda")};
        } else if (kind == "yamabe") {
            e.yamabe = true;
            e.yamabe_data = {name, c, Expr::parse(s->string("F"), c.dim()), s->number("rho")};
        } else {
            throw ConfigError(where(*s, "kind") + ": expected ricci or yamabe");
        }
        return e;
    }
    if (name == "cigar") {
        e.ricci = cigar();
    } else if (auto m = builtin_dimension(name, "gaussian")) {
        e.ricci = gaussian(*m);
    } else if (auto m = builtin_dimension(name, "euclidean-yamabe")) {
        e.yamabe = true;
        e.yamabe_data = euclidean_yamabe(*m);
    } else if (auto m = builtin_dimension(name, "euclidean")) {
        e.ricci = flat(*m);
    } else {
        throw ConfigError("unknown soliton " + name);
    }
    return e;
}

SmoothMap Registry::map(const std::string& name) const
{
    if (const ConfigSection* s = doc_.find("map", name)) {
        const Chart source = chart(s->string("source"));
        const Chart target = chart(s->string("target"));
        return SmoothMap::from_strings(name, source, target, s->strings("components"));
    }
    if (name == "quartic") return quartic_map();
    if (name == "stereo") return stereographic_identity(euclidean(2));
    if (name == "cigar-stereo") return stereographic_identity(cigar_chart());
    if (name == "cigar-coordinate") return coordinate_map(cigar_chart(), 0);
    if (name == "cigar-constant") return constant_map(cigar_chart(), euclidean(1), Point::Constant(1, 1.0));
    if (auto m = builtin_dimension(name, "constant"))
        return constant_map(euclidean(*m), euclidean(1), Point::Constant(1, 1.0));
    if (auto m = builtin_dimension(name, "quadratic")) return quadratic_map(euclidean(*m));
    if (auto m = builtin_dimension(name, "linear")) {
        const int rows = std::min(*m, 2);
        return linear_map(euclidean(*m), Eigen::MatrixXd::Identity(rows, *m));
    }
    throw ConfigError("unknown map " + name);
}

} // namespace slab
