#pragma once

// Sectioned key-value configuration:
//
//   # comment
//   [chart warped]
//   dim = 2
//   g11 = "1/(1+abs2)"
//   g22 = "1/(1+abs2)"
//   radial = true
//
//   [soliton mine]
//   chart = warped
//   f = "-log(1+abs2)"
//   lambda = 0
//
//   [map probe]
//   source = warped
//   target = sphere2
//   components = ["x", "y"]
//
//   [run]
//   rmax = 3
//   radii = [2, 4, 8]
//
// Names not defined in the document fall back to the built-in catalogue.

#include "slab/maps.hpp"
#include "slab/soliton.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace slab {

struct ConfigSection {
    std::string kind; // chart | soliton | map | run
    std::string name;
    int line = 0;
    std::map<std::string, std::string> values; // raw right-hand sides

    bool has(const std::string& key) const { return values.count(key) != 0; }
    std::string string(const std::string& key) const;
    std::optional<std::string> maybe_string(const std::string& key) const;
    double number(const std::string& key) const;
    std::optional<double> maybe_number(const std::string& key) const;
    bool boolean(const std::string& key) const;
    std::vector<std::string> strings(const std::string& key) const;
    std::vector<double> numbers(const std::string& key) const;
};

class ConfigDocument {
public:
    ConfigDocument() = default;
    /// Throws ConfigError with the offending line number.
    static ConfigDocument parse(const std::string& text);
    static ConfigDocument load(const std::string& path);

    const std::string& text() const noexcept { return text_; }
    const std::vector<ConfigSection>& sections() const noexcept { return sections_; }
    const ConfigSection* find(const std::string& kind, const std::string& name) const;
    /// The [run] section, if any.
    const ConfigSection* run() const;
    /// 64-bit FNV-1a of the document text, as 16 hex digits.
    std::string hash() const;

private:
    std::string text_;
    std::vector<ConfigSection> sections_;
};

struct SolitonEntry {
    bool yamabe = false;
    RicciSolitonData ricci;
    YamabeSolitonData yamabe_data;

    const std::string& name() const { return yamabe ? yamabe_data.name : ricci.name; }
    const Chart& chart() const { return yamabe ? yamabe_data.chart : ricci.chart; }
};

/// Resolves chart, soliton and map names against a document and the built-ins:
///   charts    cigar, sphere2, euclidean<m>
///   solitons  cigar, gaussian<m>, euclidean<m>, euclidean-yamabe<m>
///   maps      constant<m>, linear<m>, quadratic<m>, quartic, stereo, cigar-stereo,
///             cigar-coordinate, cigar-constant
class Registry {
public:
    explicit Registry(const ConfigDocument& doc) : doc_(doc) {}

    Chart chart(const std::string& name) const;
    SolitonEntry soliton(const std::string& name) const;
    SmoothMap map(const std::string& name) const;

private:
    const ConfigDocument& doc_;
};

/// Dimension suffix of names such as "gaussian3"; nullopt if `name` is not prefix + digits.
std::optional<int> builtin_dimension(const std::string& name, const std::string& prefix);

} // namespace slab
