#include "accrestart/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_set>

namespace accrestart {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

[[noreturn]] void malformed(std::size_t line, const std::string& what)
{
    throw ConfigError("line " + std::to_string(line) + ": " + what);
}

std::ifstream open_in(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path)
{
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path)
{
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

bool parse_number(const std::string& text, double& value)
{
    const std::string t = trim(text);
    if (t.empty()) return false;
    const char* first = t.data();
    if (*first == '+') ++first;
    const char* last = t.data() + t.size();
    const auto res = std::from_chars(first, last, value);
    return res.ec == std::errc() && res.ptr == last;
}

SparseDesign assemble(Index rows, Index cols, std::vector<Eigen::Triplet<double>>& triplets, Vector b)
{
    SparseDesign d;
    d.A.resize(rows, cols);
    d.A.setFromTriplets(triplets.begin(), triplets.end());
    d.A.makeCompressed();
    d.b = std::move(b);
    return d;
}

void read_header_line(const std::string& line, Header& header)
{
    const std::string body = trim(line.substr(1));
    const auto eq = body.find('=');
    if (eq != std::string::npos) header.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
}

void write_header(std::ostream& out, const Header& header)
{
    for (const auto& [k, v] : header) out << "# " << k << " = " << v << '\n';
}

} // namespace

double LabelRule::apply(const std::string& raw) const
{
    const std::string label = trim(raw);
    double value = 0.0;
    switch (kind) {
    case Kind::numeric:
        if (!parse_number(label, value) || !std::isfinite(value)) throw ConfigError("label '" + label + "' is not a number");
        return value;
    case Kind::binary:
        if (!parse_number(label, value) || (value != 1.0 && value != -1.0))
            throw ConfigError("label '" + label + "' is not -1 or +1");
        return value;
    case Kind::one_vs_rest: return label == positive ? 1.0 : -1.0;
    case Kind::mapping: {
        const auto it = table.find(label);
        if (it == table.end()) throw ConfigError("label '" + label + "' has no mapping");
        return it->second;
    }
    }
    throw ConfigError("unknown label rule");
}

LabelRule LabelRule::one_vs_rest(std::string positive_label)
{
    LabelRule r;
    r.kind = Kind::one_vs_rest;
    r.positive = std::move(positive_label);
    return r;
}

LabelRule LabelRule::parse_mapping(const std::string& spec)
{
    LabelRule r;
    r.kind = Kind::mapping;
    for (const auto& item : split(spec, ',')) {
        const auto eq = item.rfind('=');
        double value = 0.0;
        if (eq == std::string::npos || !parse_number(item.substr(eq + 1), value))
            throw ConfigError("label mapping entry '" + item + "' must look like name=value");
        r.table[trim(item.substr(0, eq))] = value;
    }
    if (r.table.empty()) throw ConfigError("label mapping is empty");
    return r;
}

DataFormat format_for(const std::filesystem::path& path)
{
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".csv" ? DataFormat::csv : DataFormat::libsvm;
}

std::filesystem::path resolve_data_path(const std::filesystem::path& path)
{
    if (path.is_absolute() || std::filesystem::exists(path)) return path;
    if (const char* dir = std::getenv("ACCRESTART_DATA_DIR")) {
        const auto candidate = std::filesystem::path(dir) / path;
        if (std::filesystem::exists(candidate)) return candidate;
    }
    return path;
}

SparseDesign parse_libsvm(std::istream& in, const LabelRule& rule, std::optional<Index> feature_count)
{
    std::vector<Eigen::Triplet<double>> triplets;
    std::vector<double> labels;
    std::unordered_set<Index> seen;
    Index max_index = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream tokens(line);
        std::string label;
        if (!(tokens >> label)) continue;
        double y = 0.0;
        try {
            y = rule.apply(label);
        } catch (const ConfigError& e) {
            malformed(lineno, e.what());
        }
        const Index row = static_cast<Index>(labels.size());
        labels.push_back(y);
        seen.clear();
        std::string item;
        while (tokens >> item) {
            const auto colon = item.find(':');
            if (colon == std::string::npos) malformed(lineno, "expected idx:value, got '" + item + "'");
            long long idx = 0;
            const auto ir = std::from_chars(item.data(), item.data() + colon, idx);
            if (ir.ec != std::errc() || ir.ptr != item.data() + colon) malformed(lineno, "bad index in '" + item + "'");
            if (idx < 1) malformed(lineno, "index " + std::to_string(idx) + " out of range (indices are 1-based)");
            if (feature_count && idx > *feature_count)
                malformed(lineno, "index " + std::to_string(idx) + " exceeds feature count " + std::to_string(*feature_count));
            double value = 0.0;
            if (!parse_number(item.substr(colon + 1), value) || !std::isfinite(value))
                malformed(lineno, "bad value in '" + item + "'");
            const Index col = static_cast<Index>(idx - 1);
            if (!seen.insert(col).second) malformed(lineno, "duplicate index " + std::to_string(idx));
            max_index = std::max<Index>(max_index, idx);
            if (value != 0.0) triplets.emplace_back(row, col, value);
        }
    }
    if (labels.empty()) throw ConfigError("dataset has no rows");
    const Index cols = feature_count ? *feature_count : max_index;
    if (cols == 0) throw ConfigError("dataset has no features");
    return assemble(static_cast<Index>(labels.size()), cols, triplets, Eigen::Map<Vector>(labels.data(), labels.size()));
}

SparseDesign parse_csv(std::istream& in, const LabelRule& rule)
{
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        header = split(line, ',');
        break;
    }
    if (header.size() < 2) throw ConfigError("csv needs a header with at least one feature and a label column");
    const Index cols = static_cast<Index>(header.size()) - 1;

    std::vector<Eigen::Triplet<double>> triplets;
    std::vector<double> labels;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        if (static_cast<Index>(fields.size()) != cols + 1)
            malformed(lineno, "expected " + std::to_string(cols + 1) + " fields, got " + std::to_string(fields.size()));
        const Index row = static_cast<Index>(labels.size());
        for (Index j = 0; j < cols; ++j) {
            double value = 0.0;
            if (!parse_number(fields[static_cast<std::size_t>(j)], value) || !std::isfinite(value))
                malformed(lineno, "bad number '" + fields[static_cast<std::size_t>(j)] + "'");
            if (value != 0.0) triplets.emplace_back(row, j, value);
        }
        try {
            labels.push_back(rule.apply(fields.back()));
        } catch (const ConfigError& e) {
            malformed(lineno, e.what());
        }
    }
    if (labels.empty()) throw ConfigError("dataset has no rows");
    return assemble(static_cast<Index>(labels.size()), cols, triplets, Eigen::Map<Vector>(labels.data(), labels.size()));
}

SparseDesign load_design(const DatasetManifest& manifest)
{
    const auto path = resolve_data_path(manifest.path);
    auto in = open_in(path);
    SparseDesign d;
    try {
        if (manifest.format == DataFormat::csv) {
            d = parse_csv(in, manifest.label_rule);
            if (manifest.feature_count && *manifest.feature_count != d.cols())
                throw ConfigError("csv has " + std::to_string(d.cols()) + " features, manifest declares " +
                                  std::to_string(*manifest.feature_count));
        } else {
            d = parse_libsvm(in, manifest.label_rule, manifest.feature_count);
        }
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    if (in.bad()) throw IoError("read failed: " + path.string());
    return d;
}

void write_libsvm(const SparseDesign& design, std::ostream& out)
{
    const Eigen::SparseMatrix<double, Eigen::RowMajor> rows = design.A;
    for (Index j = 0; j < rows.rows(); ++j) {
        out << format_double(design.b[j]);
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(rows, j); it; ++it)
            out << ' ' << (it.col() + 1) << ':' << format_double(it.value());
        out << '\n';
    }
}

void write_libsvm(const SparseDesign& design, const std::filesystem::path& path)
{
    auto out = open_out(path);
    write_libsvm(design, out);
    finish(out, path);
}

SyntheticLasso synth_lasso(Index n, Index m, double density, double cond_hint, std::uint64_t seed, double noise)
{
    if (n < 1 || m < 1) throw ConfigError("synth_lasso: n and m must be positive");
    if (!(density > 0.0 && density <= 1.0)) throw ConfigError("synth_lasso: density must lie in (0, 1]");
    if (!(cond_hint >= 1.0)) throw ConfigError("synth_lasso: cond_hint must be >= 1");
    if (!(noise >= 0.0)) throw ConfigError("synth_lasso: noise must be nonnegative");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif;
    std::uniform_int_distribution<Index> pick_row(0, m - 1);

    std::vector<Eigen::Triplet<double>> triplets;
    for (Index i = 0; i < n; ++i) {
        const double scale = n > 1 ? std::pow(cond_hint, -static_cast<double>(i) / static_cast<double>(n - 1)) : 1.0;
        bool any = false;
        for (Index j = 0; j < m; ++j) {
            if (density < 1.0 && unif(rng) >= density) continue;
            triplets.emplace_back(j, i, scale * gauss(rng));
            any = true;
        }
        if (!any) triplets.emplace_back(pick_row(rng), i, scale * (gauss(rng) >= 0.0 ? 1.0 : -1.0));
    }

    SyntheticLasso out;
    out.planted = Vector::Zero(n);
    const Index support = std::max<Index>(1, n / 5);
    std::vector<Index> idx(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (Index s = 0; s < support; ++s) {
        std::uniform_int_distribution<Index> pick(s, n - 1);
        std::swap(idx[static_cast<std::size_t>(s)], idx[static_cast<std::size_t>(pick(rng))]);
        out.planted[idx[static_cast<std::size_t>(s)]] = gauss(rng);
    }

    out.design = assemble(m, n, triplets, Vector::Zero(m));
    Vector b = out.design.A * out.planted;
    for (Index j = 0; j < m; ++j) b[j] += noise * gauss(rng);
    out.design.b = b;
    return out;
}

std::string format_double(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text)
{
    const std::string t = trim(text);
    if (t == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (t == "inf") return std::numeric_limits<double>::infinity();
    if (t == "-inf") return -std::numeric_limits<double>::infinity();
    double value = 0.0;
    if (!parse_number(t, value)) throw ConfigError("not a number: '" + t + "'");
    return value;
}

void write_trace(const RunTrace& trace, std::ostream& out, const Header& extra)
{
    Header header{{"solver", to_string(trace.solver)}, {"policy", trace.policy}, {"seed", std::to_string(trace.seed)}};
    header.insert(header.end(), extra.begin(), extra.end());
    write_header(out, header);
    out << "iter,epoch,F,gap,dist_v,restart\n";
    for (const auto& r : trace.records) {
        out << r.iter << ',' << format_double(r.epoch) << ',' << format_double(r.F) << ',';
        if (r.gap) out << format_double(*r.gap);
        out << ',';
        if (r.dist_v) out << format_double(*r.dist_v);
        out << ',' << (r.restart ? 1 : 0) << '\n';
    }
}

void write_trace(const RunTrace& trace, const std::filesystem::path& path, const Header& extra)
{
    auto out = open_out(path);
    write_trace(trace, out, extra);
    finish(out, path);
}

TraceFile read_trace(std::istream& in)
{
    TraceFile file;
    std::string line;
    bool seen_columns = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        if (line[0] == '#') {
            read_header_line(line, file.header);
            continue;
        }
        if (!seen_columns) {
            if (trim(line) != "iter,epoch,F,gap,dist_v,restart") malformed(lineno, "unexpected trace columns");
            seen_columns = true;
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 6) malformed(lineno, "expected 6 fields");
        TraceRecord r;
        try {
            r.iter = std::stoll(f[0]);
            r.epoch = parse_double(f[1]);
            r.F = parse_double(f[2]);
            if (!f[3].empty()) r.gap = parse_double(f[3]);
            if (!f[4].empty()) r.dist_v = parse_double(f[4]);
        } catch (const std::exception& e) {
            malformed(lineno, e.what());
        }
        if (f[5] != "0" && f[5] != "1") malformed(lineno, "restart flag must be 0 or 1");
        r.restart = f[5] == "1";
        file.records.push_back(r);
    }
    if (!seen_columns) throw ConfigError("trace has no column header");
    return file;
}

TraceFile read_trace(const std::filesystem::path& path)
{
    auto in = open_in(path);
    return read_trace(in);
}

void write_reference(const ReferenceSolution& ref, const std::filesystem::path& path, const Header& header)
{
    auto out = open_out(path);
    write_header(out, header);
    out << "F " << format_double(ref.F) << '\n';
    out << "n " << ref.x.size() << '\n';
    for (Index i = 0; i < ref.x.size(); ++i) out << format_double(ref.x[i]) << '\n';
    finish(out, path);
}

ReferenceSolution read_reference(const std::filesystem::path& path, std::optional<Index> expected_dimension)
{
    auto in = open_in(path);
    ReferenceSolution ref;
    std::optional<Index> n;
    std::optional<double> F;
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    try {
        while (std::getline(in, line)) {
            ++lineno;
            const std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            if (t.rfind("F ", 0) == 0) {
                F = parse_double(t.substr(2));
            } else if (t.rfind("n ", 0) == 0) {
                n = std::stoll(t.substr(2));
            } else {
                values.push_back(parse_double(t));
            }
        }
    } catch (const std::exception& e) {
        throw ConfigError(path.string() + ": line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!F || !n) throw ConfigError(path.string() + ": missing F or n entry");
    if (static_cast<Index>(values.size()) != *n)
        throw ConfigError(path.string() + ": expected " + std::to_string(*n) + " entries, found " +
                          std::to_string(values.size()));
    if (expected_dimension && *expected_dimension != *n)
        throw ConfigError(path.string() + ": reference has dimension " + std::to_string(*n) + ", problem has " +
                          std::to_string(*expected_dimension));
    ref.F = *F;
    ref.x = Eigen::Map<Vector>(values.data(), static_cast<Index>(values.size()));
    return ref;
}

} // namespace accrestart
