#include "accrestart/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "accrestart/data_io.hpp"
#include "accrestart/problems.hpp"
#include "accrestart/restart.hpp"
#include "accrestart/schedule.hpp"
#include "accrestart/solvers.hpp"

namespace accrestart::cli {

namespace {

struct ProblemOptions {
    std::string problem = "lasso";
    std::string data;
    std::string format = "auto";
    std::string label_positive;
    std::string label_map;
    Index features = 0;
    Index synth_n = 20;
    Index synth_m = 50;
    double synth_density = 1.0;
    double synth_cond = 1.0;
    double synth_noise = 0.01;
    std::uint64_t synth_seed = 0;
    double lambda = 0.0; // 0: ||A^T b||_inf / 10
    double l2 = 0.0;
    double lambda1 = 1.0;
    double lambda2 = 0.0;
    std::string reference;
    bool compute_reference = false;
};

struct SolverOptions {
    std::string solver = "fista";
    std::string engine = "efficient";
    std::string restart = "none";
    double mu = 0.0;
    double alpha = std::exp(-2.0);
    double sigma = 0.0;
    std::int64_t K = 0;
    std::int64_t K_low = 0;
    std::int64_t K_high = 0;
    std::string inner = "adaptive";
    Index tau = 1;
    std::uint64_t seed = 0;
    std::int64_t max_iter = 1000;
    double max_epochs = 0.0;
    double tol = 0.0;
    std::int64_t record_every = 0;
};

SolverKind parse_solver(const std::string& s)
{
    if (s == "ista") return SolverKind::ista;
    if (s == "fista") return SolverKind::fista;
    if (s == "apg") return SolverKind::apg;
    if (s == "approx") return SolverKind::approx;
    throw ConfigError("unknown solver '" + s + "'");
}

void add_problem_options(CLI::App* app, ProblemOptions& p)
{
    app->add_option("--problem", p.problem, "lasso or logistic")->check(CLI::IsMember({"lasso", "logistic"}));
    app->add_option("--data", p.data, "dataset path (libsvm or csv); empty for a synthetic instance");
    app->add_option("--format", p.format, "auto, libsvm or csv")->check(CLI::IsMember({"auto", "libsvm", "csv"}));
    app->add_option("--label-positive", p.label_positive, "map this label to +1 and every other label to -1");
    app->add_option("--label-map", p.label_map, "explicit label table name=value,...");
    app->add_option("--features", p.features, "declared feature count (libsvm)");
    app->add_option("--synth-n", p.synth_n, "synthetic features");
    app->add_option("--synth-m", p.synth_m, "synthetic samples");
    app->add_option("--synth-density", p.synth_density, "synthetic design density");
    app->add_option("--synth-cond", p.synth_cond, "synthetic column scale spread");
    app->add_option("--synth-noise", p.synth_noise, "synthetic target noise");
    app->add_option("--synth-seed", p.synth_seed, "synthetic instance seed");
    app->add_option("--lambda", p.lambda, "lasso l1 weight (0: ||A^T b||_inf / 10)");
    app->add_option("--l2", p.l2, "lasso l2 weight");
    app->add_option("--lambda1", p.lambda1, "logistic loss weight");
    app->add_option("--lambda2", p.lambda2, "logistic l2 weight");
    app->add_option("--reference", p.reference, "reference solution file");
    app->add_flag("--compute-reference", p.compute_reference, "compute the reference solution in process");
}

void add_solver_options(CLI::App* app, SolverOptions& s)
{
    app->add_option("--solver", s.solver, "ista, fista, apg or approx")
        ->check(CLI::IsMember({"ista", "fista", "apg", "approx"}));
    app->add_option("--engine", s.engine, "efficient or naive (approx only)")
        ->check(CLI::IsMember({"efficient", "naive"}));
    app->add_option("--restart", s.restart, "none, at-x, at-z, combo, approx-combo, adaptive or interval")
        ->check(CLI::IsMember({"none", "at-x", "at-z", "combo", "approx-combo", "adaptive", "interval"}));
    app->add_option("--mu", s.mu, "growth estimate used to derive restart parameters");
    app->add_option("--alpha", s.alpha, "gap contraction target of the at-x rule")->default_str(format_double(s.alpha));
    app->add_option("--sigma", s.sigma, "combination weight (overrides the value derived from --mu)");
    app->add_option("--K", s.K, "restart period (overrides the value derived from --mu)");
    app->add_option("--K-low", s.K_low, "interval rule: first counter at which the inner trigger is honoured");
    app->add_option("--K-high", s.K_high, "interval rule: forced restart counter");
    app->add_option("--inner", s.inner, "interval rule trigger: adaptive or at-z")
        ->check(CLI::IsMember({"adaptive", "at-z"}));
    app->add_option("--tau", s.tau, "coordinates per iteration (approx)");
    app->add_option("--seed", s.seed, "sampling seed");
    app->add_option("--max-iter", s.max_iter, "iteration cap");
    app->add_option("--max-epochs", s.max_epochs, "epoch cap (0: none)");
    app->add_option("--tol", s.tol, "stop once F - F* <= tol (0: off; needs a reference)");
    app->add_option("--record-every", s.record_every, "trace stride (0: automatic)");
}

LabelRule label_rule(const ProblemOptions& p)
{
    if (!p.label_positive.empty() && !p.label_map.empty())
        throw ConfigError("--label-positive and --label-map are mutually exclusive");
    if (!p.label_positive.empty()) return LabelRule::one_vs_rest(p.label_positive);
    if (!p.label_map.empty()) return LabelRule::parse_mapping(p.label_map);
    LabelRule r;
    if (p.problem == "logistic") r.kind = LabelRule::Kind::binary;
    return r;
}

CompositeProblem build_problem(const ProblemOptions& p)
{
    SparseDesign design;
    if (p.data.empty()) {
        design = synth_lasso(p.synth_n, p.synth_m, p.synth_density, p.synth_cond, p.synth_seed, p.synth_noise).design;
    } else {
        DatasetManifest m;
        m.path = p.data;
        m.format = p.format == "auto" ? format_for(m.path) : (p.format == "csv" ? DataFormat::csv : DataFormat::libsvm);
        m.label_rule = label_rule(p);
        if (p.features > 0) m.feature_count = p.features;
        design = load_design(m);
    }
    design.validate();
    if (p.problem == "logistic") {
        if (!(p.lambda1 > 0.0)) throw ConfigError("--lambda1 must be positive");
        if (!(p.lambda2 >= 0.0)) throw ConfigError("--lambda2 must be nonnegative");
        return logistic_problem(std::move(design), p.lambda1, p.lambda2);
    }
    if (p.lambda < 0.0) throw ConfigError("--lambda must be nonnegative");
    if (p.l2 < 0.0) throw ConfigError("--l2 must be nonnegative");
    const double weight = p.lambda > 0.0 ? p.lambda : default_lasso_weight(design);
    return lasso_problem(std::move(design), weight, p.l2);
}

CompositeProblem attach_reference(const CompositeProblem& problem, const ProblemOptions& p)
{
    if (!p.reference.empty()) {
        if (p.compute_reference) throw ConfigError("--reference and --compute-reference are mutually exclusive");
        return problem.with_reference(read_reference(resolve_data_path(p.reference), problem.dimension()));
    }
    if (p.compute_reference) return problem.with_reference(compute_reference(problem));
    return problem;
}

RestartPolicy build_policy(const SolverOptions& s, SolverKind solver, Index n)
{
    const Index tau = solver == SolverKind::approx ? s.tau : n;
    const double theta0 = initial_theta(solver, n, tau);
    const double ratio = 1.0 / theta0;
    const bool have_mu = s.mu > 0.0;
    const auto need_mu = [&](const char* rule) {
        if (!have_mu) throw ConfigError(std::string("--restart ") + rule + " needs --mu or explicit --sigma and --K");
    };

    if (s.restart == "none") return NoRestart{};
    if (s.restart == "at-x") {
        if (!have_mu) throw ConfigError("--restart at-x needs --mu");
        return ConditionalAtX{s.mu, s.alpha};
    }
    if (s.restart == "at-z") return ConditionalAtZ{};
    if (s.restart == "adaptive") return FunctionValueAdaptive{};

    const bool history = s.restart == "approx-combo" || solver == SolverKind::approx;
    if (s.restart == "combo" || s.restart == "approx-combo") {
        std::int64_t K = s.K;
        double sigma = s.sigma;
        if (K <= 0 || sigma <= 0.0) {
            need_mu(s.restart.c_str());
            if (history) {
                const auto c = approx_combination_from_mu(s.mu, theta0, ratio);
                if (K <= 0) K = c.K;
                if (sigma <= 0.0) sigma = choose_sigma(s.mu, K, theta0, ratio);
            } else {
                const auto c = fixed_combination_from_mu(s.mu);
                if (K <= 0) K = c.K;
                if (sigma <= 0.0) sigma = choose_sigma_full_gradient(s.mu, K);
            }
        }
        if (history) return ApproxCombination{sigma, K};
        return FixedCombination{sigma, K};
    }

    // interval
    IntervalAdaptive p;
    p.K_high = s.K_high;
    if (p.K_high <= 0) {
        need_mu("interval");
        p.K_high = history ? approx_combination_from_mu(s.mu, theta0, ratio).K : fixed_combination_from_mu(s.mu).K;
    }
    p.K_low = s.K_low > 0 ? s.K_low : std::max<std::int64_t>(1, p.K_high / 4);
    p.inner = s.inner == "at-z" ? AdaptiveTrigger::z_comparison : AdaptiveTrigger::function_value;
    if (s.sigma > 0.0) {
        p.sigma = s.sigma;
    } else {
        need_mu("interval");
        p.sigma = history ? choose_sigma(s.mu, p.K_high, theta0, ratio) : choose_sigma_full_gradient(s.mu, p.K_high);
    }
    return p;
}

RunOptions build_run_options(const SolverOptions& s, const CompositeProblem& problem)
{
    RunOptions opt;
    opt.solver = parse_solver(s.solver);
    opt.engine = s.engine == "naive" ? Engine::naive : Engine::efficient;
    opt.tau = s.tau;
    opt.seed = s.seed;
    opt.max_iterations = s.max_iter;
    if (s.max_epochs > 0.0) opt.max_epochs = s.max_epochs;
    if (s.tol > 0.0) opt.gap_tolerance = s.tol;
    opt.record_every = s.record_every;
    opt.policy = build_policy(s, opt.solver, problem.dimension());
    return opt;
}

// Every option of the subcommand with its effective value, flags and file merged.
Header resolved_config(const CLI::App& sub)
{
    Header h{{"command", sub.get_name()}};
    std::istringstream lines(sub.config_to_str(true, false));
    std::string line;
    while (std::getline(lines, line)) {
        const auto eq = line.find('=');
        if (line.empty() || line[0] == '[' || eq == std::string::npos) continue;
        std::string value = line.substr(eq + 1);
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        h.emplace_back(line.substr(0, eq), value);
    }
    return h;
}

void write_header_lines(std::ostream& out, const Header& header)
{
    for (const auto& [k, v] : header) out << "# " << k << " = " << v << '\n';
}

class OutputSink {
public:
    OutputSink(const std::string& path, std::ostream& fallback) : path_(path), stream_(&fallback)
    {
        if (!path.empty()) {
            const std::filesystem::path p(path);
            if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
            file_.open(p);
            if (!file_) throw IoError("cannot write " + path);
            stream_ = &file_;
        }
    }
    std::ostream& get() { return *stream_; }
    bool to_file() const { return !path_.empty(); }
    void close()
    {
        if (!to_file()) return;
        file_.flush();
        if (!file_) throw IoError("write failed: " + path_);
        file_.close();
    }

private:
    std::string path_;
    std::ofstream file_;
    std::ostream* stream_;
};

std::string summary_line(const RunTrace& t)
{
    std::ostringstream os;
    os << "iterations=" << t.iterations << " restarts=" << t.restarts << " stop=" << to_string(t.stop)
       << " iterations_to_tolerance=";
    if (t.iterations_to_tolerance) os << *t.iterations_to_tolerance;
    else os << "none";
    if (!t.records.empty()) {
        os << " final_F=" << format_double(t.records.back().F);
        if (t.records.back().gap) os << " final_gap=" << format_double(*t.records.back().gap);
    }
    return os.str();
}

int cmd_solve(const CLI::App& cmd, const ProblemOptions& po, const SolverOptions& so, const std::string& out_path,
              std::ostream& out, std::ostream& err)
{
    const SolverKind solver = parse_solver(so.solver);
    const CompositeProblem base = attach_reference(build_problem(po), po);
    const CompositeProblem problem = prepare_problem(base, solver, so.tau);
    const RunOptions opt = build_run_options(so, problem);
    const RunTrace trace = run(problem, opt);

    OutputSink sink(out_path, out);
    write_trace(trace, sink.get(), resolved_config(cmd));
    sink.close();
    for (const auto& d : trace.diagnostics) err << "note: " << d << '\n';
    (sink.to_file() ? out : err) << summary_line(trace) << '\n';
    return ok;
}

int cmd_rates(const CLI::App& cmd, const std::vector<std::string>& mu_grid, const std::vector<std::string>& mu_F_grid, Index n, Index tau,
              double theta0_override, const std::string& out_path, std::ostream& out)
{
    const auto mus = parse_grid(mu_grid);
    const auto mu_Fs = parse_grid(mu_F_grid);
    if (n < 1 || tau < 1 || tau > n) throw ConfigError("rates: need 1 <= tau <= n");
    const double theta0 = theta0_override > 0.0 ? theta0_override : static_cast<double>(tau) / static_cast<double>(n);
    if (!(theta0 > 0.0 && theta0 <= 1.0)) throw ConfigError("rates: theta0 must lie in (0, 1]");
    const double ratio = 1.0 / theta0;

    OutputSink sink(out_path, out);
    auto& os = sink.get();
    write_header_lines(os, resolved_config(cmd));
    os << "mu,K,sigma,rate_restart,rate_cd,mu_F,rate_prop5\n";
    for (double mu_F : mu_Fs) {
        if (!(mu_F > 0.0)) throw ConfigError("rates: mu_F values must be positive");
        for (double mu : mus) {
            const auto c = choose_restart_parameters(mu, theta0, ratio);
            os << format_double(mu) << ',' << c.K << ',' << format_double(c.sigma) << ','
               << format_double(restarted_rate(c.K, c.sigma, mu_F, theta0, ratio)) << ','
               << format_double(coordinate_descent_rate(mu_F, theta0)) << ',' << format_double(mu_F) << ','
               << format_double(rate_bound(mu, mu_F, theta0)) << '\n';
        }
    }
    sink.close();
    return ok;
}

struct SweepRow {
    std::vector<double> iterations; // only runs that reached the tolerance
    std::vector<double> final_gap;
    std::vector<double> restarts;
    std::size_t runs = 0;
};

std::pair<double, double> mean_std(const std::vector<double>& v)
{
    if (v.empty()) return {std::nan(""), std::nan("")};
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    const double sd = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
    return {mean, sd};
}

void apply_axis(SolverOptions& s, const std::string& axis, double value)
{
    const auto as_int = [&](const char* name) {
        if (value != std::floor(value) || value < 1) throw ConfigError(std::string("sweep: ") + name + " values must be positive integers");
        return static_cast<std::int64_t>(value);
    };
    if (axis == "mu") s.mu = value;
    else if (axis == "sigma") s.sigma = value;
    else if (axis == "alpha") s.alpha = value;
    else if (axis == "K") s.K = as_int("K");
    else if (axis == "K-high") s.K_high = as_int("K-high");
    else if (axis == "tau") s.tau = as_int("tau");
    else throw ConfigError("sweep: unknown axis '" + axis + "'");
}

int cmd_sweep(const CLI::App& cmd, const ProblemOptions& po, const SolverOptions& so, const std::string& axis,
              const std::vector<std::string>& values_text, std::size_t seeds, std::size_t workers, const std::string& out_path,
              std::ostream& out)
{
    if (values_text.empty()) throw ConfigError("sweep: --values is empty");
    const auto values = parse_grid(values_text);
    if (seeds < 1) throw ConfigError("sweep: --seeds must be >= 1");
    if (workers < 1) throw ConfigError("sweep: --workers must be >= 1");
    const SolverKind solver = parse_solver(so.solver);
    const CompositeProblem base = attach_reference(build_problem(po), po);

    // Weights depend on tau only; prepare each distinct tau once.
    std::vector<SolverOptions> configs;
    std::vector<std::shared_ptr<const CompositeProblem>> problems;
    std::map<Index, std::shared_ptr<const CompositeProblem>> by_tau;
    for (double v : values) {
        SolverOptions s = so;
        apply_axis(s, axis, v);
        auto& slot = by_tau[s.tau];
        if (!slot) slot = std::make_shared<const CompositeProblem>(prepare_problem(base, solver, s.tau));
        problems.push_back(slot);
        configs.push_back(s);
    }
    // Validate every configuration before any work starts.
    std::vector<RunOptions> options;
    for (std::size_t i = 0; i < configs.size(); ++i) options.push_back(build_run_options(configs[i], *problems[i]));

    const std::size_t jobs = values.size() * seeds;
    std::vector<RunTrace> traces(jobs);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto worker = [&] {
        for (std::size_t j = next++; j < jobs; j = next++) {
            try {
                RunOptions opt = options[j / seeds];
                opt.seed = so.seed + j % seeds;
                traces[j] = run(*problems[j / seeds], opt);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < std::min(workers, jobs); ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    OutputSink sink(out_path, out);
    auto& os = sink.get();
    write_header_lines(os, resolved_config(cmd));
    const bool spread = seeds > 1;
    os << axis << ",runs,reached,iterations_mean";
    if (spread) os << ",iterations_std";
    os << ",final_gap_mean";
    if (spread) os << ",final_gap_std";
    os << ",restarts_mean";
    if (spread) os << ",restarts_std";
    os << '\n';
    const auto cell = [](double x) { return std::isnan(x) ? std::string() : format_double(x); };
    for (std::size_t v = 0; v < values.size(); ++v) {
        SweepRow row;
        for (std::size_t s = 0; s < seeds; ++s) {
            const RunTrace& t = traces[v * seeds + s];
            ++row.runs;
            if (t.iterations_to_tolerance) row.iterations.push_back(static_cast<double>(*t.iterations_to_tolerance));
            if (!t.records.empty() && t.records.back().gap) row.final_gap.push_back(*t.records.back().gap);
            row.restarts.push_back(static_cast<double>(t.restarts));
        }
        const auto it = mean_std(row.iterations);
        const auto gap = mean_std(row.final_gap);
        const auto rs = mean_std(row.restarts);
        os << format_double(values[v]) << ',' << row.runs << ',' << row.iterations.size() << ',' << cell(it.first);
        if (spread) os << ',' << cell(it.second);
        os << ',' << cell(gap.first);
        if (spread) os << ',' << cell(gap.second);
        os << ',' << cell(rs.first);
        if (spread) os << ',' << cell(rs.second);
        os << '\n';
    }
    sink.close();
    return ok;
}

int cmd_make_reference(const CLI::App& cmd, const ProblemOptions& po, const std::string& out_path,
                       std::int64_t max_iter, std::ostream& out)
{
    if (out_path.empty()) throw ConfigError("make-reference: --out is required");
    const CompositeProblem problem = build_problem(po);
    ReferenceOptions ro;
    ro.max_iterations = max_iter;
    const ReferenceSolution ref = compute_reference(problem, ro);
    write_reference(ref, out_path, resolved_config(cmd));
    out << "F*=" << format_double(ref.F) << " n=" << ref.x.size() << " written to " << out_path << '\n';
    return ok;
}

} // namespace

std::vector<double> parse_grid(const std::vector<std::string>& pieces)
{
    std::vector<double> out;
    for (const auto& piece : pieces) {
        const auto part = parse_grid(piece);
        out.insert(out.end(), part.begin(), part.end());
    }
    if (out.empty()) throw ConfigError("grid is empty");
    return out;
}

std::vector<double> parse_grid(const std::string& text)
{
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ':')) parts.push_back(item);
        if (parts.size() != 3) throw ConfigError("grid '" + text + "' must look like lo:hi:count");
        const double lo = parse_double(parts[0]);
        const double hi = parse_double(parts[1]);
        const double count = parse_double(parts[2]);
        if (!(lo > 0.0 && hi >= lo)) throw ConfigError("grid '" + text + "' needs 0 < lo <= hi");
        if (!(count >= 1.0) || count != std::floor(count)) throw ConfigError("grid count must be a positive integer");
        const auto c = static_cast<int>(count);
        if (c == 1) return {lo};
        const double a = std::log10(lo);
        const double b = std::log10(hi);
        for (int i = 0; i < c; ++i) out.push_back(std::pow(10.0, a + (b - a) * i / (c - 1)));
        out.front() = lo;
        out.back() = hi;
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        out.push_back(parse_double(item));
    }
    if (out.empty()) throw ConfigError("grid '" + text + "' is empty");
    return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app("Accelerated proximal and coordinate methods with restarting", "accrestart");
    app.set_config("--config", "", "INI file with one section per subcommand; flags override it");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    ProblemOptions po;
    SolverOptions so;
    std::string out_path;

    auto* solve = app.add_subcommand("solve", "run one solver and write its trace");
    add_problem_options(solve, po);
    add_solver_options(solve, so);
    solve->add_option("--out", out_path, "trace CSV path (stdout when empty)");

    std::vector<std::string> mu_grid{"1e-9:1:61"};
    std::vector<std::string> mu_F_grid{"1e-5"};
    Index rates_n = 10;
    Index rates_tau = 1;
    double rates_theta0 = 0.0;
    auto* rates = app.add_subcommand("rates", "per-iteration rate factors over a grid of mu and mu_F");
    rates->add_option("--mu-grid", mu_grid, "mu values: lo:hi:count (log-spaced) or a list")->delimiter(',');
    rates->add_option("--mu-F", mu_F_grid, "mu_F values: lo:hi:count or a list")->delimiter(',');
    rates->add_option("--n", rates_n, "dimension");
    rates->add_option("--tau", rates_tau, "coordinates per iteration");
    rates->add_option("--theta0", rates_theta0, "override theta0 = tau / n");
    rates->add_option("--out", out_path, "CSV path (stdout when empty)");

    std::string axis = "mu";
    std::vector<std::string> values;
    std::size_t seeds = 1;
    std::size_t workers = 1;
    auto* sweep = app.add_subcommand("sweep", "one summary row per value of a parameter axis");
    add_problem_options(sweep, po);
    add_solver_options(sweep, so);
    sweep->add_option("--axis", axis, "mu, sigma, alpha, K, K-high or tau")
        ->check(CLI::IsMember({"mu", "sigma", "alpha", "K", "K-high", "tau"}));
    sweep->add_option("--values", values, "axis values: list or lo:hi:count")->required()->delimiter(',');
    sweep->add_option("--seeds", seeds, "seeds per value (seed, seed+1, ...)");
    sweep->add_option("--workers", workers, "worker threads");
    sweep->add_option("--out", out_path, "CSV path (stdout when empty)");

    std::int64_t ref_max_iter = 1'000'000;
    auto* make_ref = app.add_subcommand("make-reference", "compute and store a high-accuracy solution");
    add_problem_options(make_ref, po);
    make_ref->add_option("--max-iter", ref_max_iter, "iteration cap of the accelerated phase");
    make_ref->add_option("--out", out_path, "reference file path")->required();

    for (auto* sub : {solve, rates, sweep, make_ref}) sub->allow_config_extras(CLI::config_extras_mode::error);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return config_error;
    }

    try {
        if (solve->parsed()) return cmd_solve(*solve, po, so, out_path, out, err);
        if (rates->parsed()) return cmd_rates(*rates, mu_grid, mu_F_grid, rates_n, rates_tau, rates_theta0, out_path, out);
        if (sweep->parsed()) return cmd_sweep(*sweep, po, so, axis, values, seeds, workers, out_path, out);
        if (make_ref->parsed()) return cmd_make_reference(*make_ref, po, out_path, ref_max_iter, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return config_error;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return numeric_error;
    } catch (const IoError& e) {
        err << "io failure: " << e.what() << '\n';
        return io_error;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "io failure: " << e.what() << '\n';
        return io_error;
    }
    return config_error;
}

} // namespace accrestart::cli
