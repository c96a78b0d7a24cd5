#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "accrestart/problems.hpp"
#include "accrestart/solvers.hpp"
#include "accrestart/types.hpp"

namespace accrestart {

enum class DataFormat { libsvm, csv };

/// How raw labels become targets.
///   numeric:     parse as a real number (regression targets)
///   binary:      parse as a number that must be -1 or +1
///   one_vs_rest: +1 for `positive`, -1 for anything else
///   mapping:     explicit table; an unmapped label is an error
struct LabelRule {
    enum class Kind { numeric, binary, one_vs_rest, mapping };
    Kind kind = Kind::numeric;
    std::string positive;
    std::map<std::string, double> table;

    double apply(const std::string& label) const;

    static LabelRule numeric() { return {}; }
    static LabelRule one_vs_rest(std::string positive_label);
    /// "name=value,name=value".
    static LabelRule parse_mapping(const std::string& spec);
};

struct DatasetManifest {
    std::filesystem::path path;
    DataFormat format = DataFormat::libsvm;
    LabelRule label_rule;
    std::optional<Index> feature_count;
};

/// csv for a .csv extension, libsvm otherwise.
DataFormat format_for(const std::filesystem::path& path);

/// Relative paths that do not exist are looked up under $ACCRESTART_DATA_DIR.
std::filesystem::path resolve_data_path(const std::filesystem::path& path);

/// LibSVM: `label idx:val ...` with 1-based increasing-or-not unique indices.
/// CSV: header row, features first, label in the last column.
/// Throws IoError when the file cannot be read and ConfigError on malformed content.
SparseDesign load_design(const DatasetManifest& manifest);
SparseDesign parse_libsvm(std::istream& in, const LabelRule& rule, std::optional<Index> feature_count = std::nullopt);
SparseDesign parse_csv(std::istream& in, const LabelRule& rule);

void write_libsvm(const SparseDesign& design, std::ostream& out);
void write_libsvm(const SparseDesign& design, const std::filesystem::path& path);

struct SyntheticLasso {
    SparseDesign design;
    Vector planted;
};

/// Seeded sparse Gaussian design (every column nonempty) whose column scales
/// decay geometrically from 1 to 1 / cond_hint; b = A x_planted + noise N(0, 1).
SyntheticLasso synth_lasso(Index n, Index m, double density, double cond_hint, std::uint64_t seed,
                           double noise = 0.01);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double x);
double parse_double(const std::string& text);

using Header = std::vector<std::pair<std::string, std::string>>;

/// CSV `iter,epoch,F,gap,dist_v,restart` preceded by `# key = value` lines
/// (solver, policy, seed, then `extra`).
void write_trace(const RunTrace& trace, std::ostream& out, const Header& extra = {});
void write_trace(const RunTrace& trace, const std::filesystem::path& path, const Header& extra = {});

struct TraceFile {
    Header header;
    std::vector<TraceRecord> records;
};

TraceFile read_trace(std::istream& in);
TraceFile read_trace(const std::filesystem::path& path);

void write_reference(const ReferenceSolution& ref, const std::filesystem::path& path, const Header& header = {});
/// Throws ConfigError when expected_dimension is given and differs.
ReferenceSolution read_reference(const std::filesystem::path& path,
                                 std::optional<Index> expected_dimension = std::nullopt);

} // namespace accrestart
