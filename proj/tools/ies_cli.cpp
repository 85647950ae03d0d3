// ies: command-line front end for the integer evolution strategy toolkit.
//
// Exit codes: 0 success, 2 usage/config error, 3 missing input, 1 anything else.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ies/distributions.hpp"
#include "ies/experiments.hpp"
#include "ies/io/csv.hpp"
#include "ies/io/runlog.hpp"
#include "ies/parallel.hpp"
#include "ies/problems.hpp"
#include "ies/strategies.hpp"

#ifndef IES_VERSION
#define IES_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace ies;

namespace {

constexpr int exit_usage = 2;
constexpr int exit_missing = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MissingInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Options that only say where things go; they never change file contents.
bool is_io_option(const std::string& name)
{
    return name == "help" || name == "config" || name == "out" || name == "out-dir" || name == "threads" ||
           name == "heatmap" || name == "final-values";
}

std::string section_of(const CLI::App* leaf)
{
    std::vector<std::string> parts;
    for (const CLI::App* a = leaf; a != nullptr && a->get_parent() != nullptr; a = a->get_parent()) {
        parts.push_back(a->get_name());
    }
    std::reverse(parts.begin(), parts.end());
    std::string out;
    for (const auto& p : parts) {
        out += (out.empty() ? "" : ".") + p;
    }
    return out;
}

std::string option_value(const CLI::Option* opt)
{
    std::string value;
    if (opt->count() > 0) {
        for (const auto& r : opt->results()) {
            value += (value.empty() ? "" : ",") + r;
        }
    } else {
        value = opt->get_default_str();
        if (value.size() >= 2 && value.front() == '[' && value.back() == ']') {
            value = value.substr(1, value.size() - 2);
        }
    }
    return value;
}

// "ies <version> [section] key=value ..." with every option in effect, defaults included.
std::string metadata(const CLI::App* leaf)
{
    std::string out = "ies " IES_VERSION " [" + section_of(leaf) + "]";
    for (const CLI::Option* opt : leaf->get_options()) {
        const std::string name = opt->get_single_name();
        if (name.empty() || is_io_option(name)) continue;
        out += " " + name + "=" + option_value(opt);
    }
    return out;
}

void emit(const io::CsvTable& table, const std::string& out)
{
    if (out.empty() || out == "-") {
        io::write_csv(std::cout, table);
        std::cout.flush();
    } else {
        io::write_csv(fs::path(out), table);
    }
}

DistributionKind kind_arg(const std::string& name, const char* flag)
{
    const auto k = parse_distribution_kind(name);
    if (!k) throw UsageError(std::string(flag) + ": unknown distribution kind '" + name + "'");
    return *k;
}

DistributionKind tn_or_dg(const std::string& name, const char* flag)
{
    const DistributionKind k = kind_arg(name, flag);
    if (k != DistributionKind::TN && k != DistributionKind::DG) {
        throw UsageError(std::string(flag) + ": must be tn or dg");
    }
    return k;
}

io::CsvTable scan_table(const CLI::App* leaf, const std::string& x_name, const std::vector<ScanResult>& rows)
{
    io::CsvTable t{metadata(leaf), {"series", x_name, "statistic", "value", "stderr"}, {}};
    for (const auto& r : rows) {
        t.add(r.series, r.x, r.statistic, r.defined ? io::cell(r.value) : std::string("NA"),
              r.defined ? io::cell(r.std_error) : std::string("NA"));
    }
    return t;
}

std::string slug(std::string s)
{
    for (char& ch : s) {
        if (ch == '/' || ch == '=') ch = '_';
    }
    return s;
}

// ---------------------------------------------------------------- distributions

struct PmfArgs {
    std::string kind = "dg";
    double step = 1.0;
    std::optional<double> param;
    std::optional<std::int64_t> kmax;
    std::string out = "-";
};

void add_pmf(CLI::App& app, std::vector<std::function<void()>>& actions)
{
    auto args = std::make_shared<PmfArgs>();
    auto* cmd = app.add_subcommand("pmf", "Exact pmf table of one distribution");
    cmd->add_option("--kind", args->kind, "du | sb | tn | dg");
    auto* step = cmd->add_option("--step", args->step, "Mean absolute step S")->check(CLI::PositiveNumber);
    cmd->add_option("--param", args->param, "Native parameter (N, N, sigma or p) instead of --step")
        ->excludes(step);
    cmd->add_option("--kmax", args->kmax, "Table covers -kmax..kmax (default: support window)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--out", args->out, "Output CSV ('-' for stdout)");
    cmd->callback([cmd, args, &actions] {
        actions.push_back([cmd, args] {
            const DistributionKind kind = kind_arg(args->kind, "--kind");
            const DistParam p = args->param ? DistParam::make(kind, *args->param) : param_from_step(kind, args->step);
            const std::int64_t kmax = args->kmax ? *args->kmax : support_window(p);
            io::CsvTable t{metadata(cmd), {"k", "pmf"}, {}};
            for (std::int64_t k = -kmax; k <= kmax; ++k) {
                t.add(k, pmf_exact(p, k));
            }
            emit(t, args->out);
        });
    });
}

struct SampleArgs {
    std::string kind = "dg";
    double step = 1.0;
    std::size_t n = 1;
    std::size_t count = 10000;
    std::uint64_t seed = 1;
    std::string out = "-";
};

void add_sample(CLI::App& app, std::vector<std::function<void()>>& actions)
{
    auto args = std::make_shared<SampleArgs>();
    auto* cmd = app.add_subcommand("sample", "Draw uncorrelated integer vectors");
    cmd->add_option("--kind", args->kind, "du | sb | tn | dg");
    cmd->add_option("--step", args->step, "Mean absolute step S per coordinate")->check(CLI::PositiveNumber);
    cmd->add_option("--n", args->n, "Dimension")->check(CLI::PositiveNumber);
    cmd->add_option("--count", args->count, "Number of samples")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", args->seed, "Random seed");
    cmd->add_option("--out", args->out, "Output CSV ('-' for stdout)");
    cmd->callback([cmd, args, &actions] {
        actions.push_back([cmd, args] {
            const DistributionKind kind = kind_arg(args->kind, "--kind");
            const DistParam p = param_from_step(kind, args->step);
            RandomSource rng(args->seed, 0);
            io::CsvTable t{metadata(cmd), {}, {}};
            for (std::size_t i = 0; i < args->n; ++i) {
                t.header.push_back("z" + std::to_string(i + 1));
            }
            for (std::size_t j = 0; j < args->count; ++j) {
                std::vector<std::string> row;
                for (std::size_t i = 0; i < args->n; ++i) {
                    row.push_back(io::cell(sample(p, rng)));
                }
                t.rows.push_back(std::move(row));
            }
            emit(t, args->out);
        });
    });
}

struct EntropyArgs {
    std::string kind = "dg";
    std::optional<double> step;
    std::string scan;
    double from = 0.5;
    double to = 10.0;
    std::size_t points = 40;
    std::string out = "-";
};

void add_entropy(CLI::App& app, std::vector<std::function<void()>>& actions)
{
    auto args = std::make_shared<EntropyArgs>();
    auto* cmd = app.add_subcommand("entropy", "Exact Shannon entropy (bits)");
    cmd->add_option("--kind", args->kind, "Kind for a single --step query");
    auto* step = cmd->add_option("--step", args->step, "Single step size")->check(CLI::PositiveNumber);
    cmd->add_option("--scan", args->scan, "Scan parameter (only 's')")->check(CLI::IsMember({"s"}))->excludes(step);
    cmd->add_option("--from", args->from, "Scan start")->check(CLI::PositiveNumber);
    cmd->add_option("--to", args->to, "Scan end")->check(CLI::PositiveNumber);
    cmd->add_option("--points", args->points, "Scan points")->check(CLI::PositiveNumber);
    cmd->add_option("--out", args->out, "Output CSV ('-' for stdout)");
    cmd->callback([cmd, args, &actions] {
        actions.push_back([cmd, args] {
            if (args->step) {
                const DistParam p = param_from_step(kind_arg(args->kind, "--kind"), *args->step);
                io::CsvTable t{metadata(cmd), {"s", "kind", "H"}, {}};
                t.add(*args->step, args->kind, entropy_exact(p));
                emit(t, args->out);
                return;
            }
            if (args->scan.empty()) throw UsageError("--step or --scan s is required");
            if (!(args->from < args->to)) throw UsageError("--from must be below --to");
            const auto grid = linspace(args->from, args->to, args->points);
            const auto rows = entropy_scan_1d(grid);
            io::CsvTable t{metadata(cmd), {"s", "H_DU", "H_SB", "H_TN", "H_TN_approx", "H_DG"}, {}};
            for (std::size_t i = 0; i < grid.size(); ++i) {
                t.add(grid[i], rows[5 * i].value, rows[5 * i + 1].value, rows[5 * i + 2].value,
                      rows[5 * i + 3].value, rows[5 * i + 4].value);
            }
            emit(t, args->out);
        });
    });
}

// ---------------------------------------------------------------- scans

struct ScanCommon {
    std::size_t pop = 10000;
    std::uint64_t seed = 1;
    std::string out = "-";
};

void add_common(CLI::App* cmd, ScanCommon& c)
{
    cmd->add_option("--pop", c.pop, "Samples per grid point")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", c.seed, "Random seed");
    cmd->add_option("--out", c.out, "Output CSV ('-' for stdout)");
}

void add_scan(CLI::App& app, std::vector<std::function<void()>>& actions)
{
    auto* scan = app.add_subcommand("scan", "Figure-data scans");
    scan->require_subcommand(1, 1);

    {
        struct Args : ScanCommon {
            std::string kind = "dg";
            std::size_t n = 30;
            std::size_t kmax = 10;
        };
        auto a = std::make_shared<Args>();
        auto* cmd = scan->add_subcommand("calibrate", "Mean l1/l2 norms against K n (n+1)/2, S_i = K i");
        cmd->add_option("--kind", a->kind, "tn | dg");
        cmd->add_option("--n", a->n, "Dimension")->check(CLI::PositiveNumber);
        cmd->add_option("--kmax", a->kmax, "K = 1..kmax")->check(CLI::PositiveNumber);
        add_common(cmd, *a);
        cmd->callback([cmd, a, &actions] {
            actions.push_back([cmd, a] {
                std::vector<double> ks;
                for (std::size_t k = 1; k <= a->kmax; ++k) ks.push_back(static_cast<double>(k));
                const auto rows =
                    norm_calibration(tn_or_dg(a->kind, "--kind"), a->n, ks, a->pop, RandomSource(a->seed, 0));
                emit(scan_table(cmd, "K", rows), a->out);
            });
        });
    }
    {
        struct Args : ScanCommon {
            std::vector<std::size_t> n{1, 10, 30, 80};
            double sigma_from = 0.75;
            double sigma_to = 20.0;
            std::size_t sigma_points = 40;
        };
        auto a = std::make_shared<Args>();
        auto* cmd = scan->add_subcommand("sigma-step", "Empirical E|z|_1 of TN against n sqrt(2/pi) sigma");
        cmd->add_option("--n", a->n, "Dimensions")->delimiter(',')->check(CLI::PositiveNumber);
        cmd->add_option("--sigma-from", a->sigma_from)->check(CLI::PositiveNumber);
        cmd->add_option("--sigma-to", a->sigma_to)->check(CLI::PositiveNumber);
        cmd->add_option("--sigma-points", a->sigma_points)->check(CLI::PositiveNumber);
        add_common(cmd, *a);
        cmd->callback([cmd, a, &actions] {
            actions.push_back([cmd, a] {
                const auto grid = linspace(a->sigma_from, a->sigma_to, a->sigma_points);
                const auto rows = sigma_step_validation(a->n, grid, a->pop, RandomSource(a->seed, 0));
                emit(scan_table(cmd, "sigma", rows), a->out);
            });
        });
    }
    {
        struct Args : ScanCommon {
            std::string kind = "dg";
            double s1 = 1.0;
            double s2 = 3.0;
            std::size_t theta_points = 33;
            std::string heatmap;
        };
        auto a = std::make_shared<Args>();
        auto* cmd = scan->add_subcommand("rotate", "Rotated 2D populations over theta in [0, pi/2]");
        cmd->add_option("--kind", a->kind, "tn | dg | ftn");
        cmd->add_option("--s1", a->s1)->check(CLI::PositiveNumber);
        cmd->add_option("--s2", a->s2)->check(CLI::PositiveNumber);
        cmd->add_option("--theta-points", a->theta_points)->check(CLI::Range(2, 100000));
        cmd->add_option("--heatmap", a->heatmap, "Also write (theta, z1, z2, count) frequency tables here");
        add_common(cmd, *a);
        cmd->callback([cmd, a, &actions] {
            actions.push_back([cmd, a] {
                const auto kind = parse_rotation_kind(a->kind);
                if (!kind) throw UsageError("--kind: must be tn, dg or ftn");
                const auto thetas = theta_grid(a->theta_points);
                const auto res = rotation_scan(*kind, a->s1, a->s2, thetas, a->pop, RandomSource(a->seed, 0),
                                               !a->heatmap.empty());
                emit(scan_table(cmd, "theta", res.stats), a->out);
                if (!a->heatmap.empty()) {
                    io::CsvTable t{metadata(cmd), {"theta", "z1", "z2", "count"}, {}};
                    for (const auto& map : res.heatmaps) {
                        if (!map.defined) {
                            t.add(map.theta, "NA", "NA", "NA");
                            continue;
                        }
                        for (const auto& [bin, count] : map.counts) {
                            t.add(map.theta, bin.first, bin.second, count);
                        }
                    }
                    emit(t, a->heatmap);
                }
            });
        });
    }
    {
        struct Args : ScanCommon {
            std::vector<std::string> kinds{"tn", "dg"};
            double s1 = 1.0;
            std::vector<double> s2{2.0, 3.0, 4.0, 5.0};
            bool correlated = false;
            std::size_t theta_points = 33;
        };
        auto a = std::make_shared<Args>();
        auto* cmd = scan->add_subcommand("entropy2d", "Plug-in entropy of 2D populations");
        cmd->add_option("--kind", a->kinds, "tn,dg")->delimiter(',');
        cmd->add_option("--s1", a->s1)->check(CLI::PositiveNumber);
        cmd->add_option("--s2", a->s2, "Swept (uncorrelated) or one series each (correlated)")
            ->delimiter(',')
            ->check(CLI::PositiveNumber);
        cmd->add_flag("--correlated", a->correlated, "Sweep theta instead of s2");
        cmd->add_option("--theta-points", a->theta_points)->check(CLI::Range(2, 100000));
        add_common(cmd, *a);
        cmd->callback([cmd, a, &actions] {
            actions.push_back([cmd, a] {
                std::vector<ScanResult> rows;
                const RandomSource root(a->seed, 0);
                for (std::size_t ki = 0; ki < a->kinds.size(); ++ki) {
                    const DistributionKind kind = tn_or_dg(a->kinds[ki], "--kind");
                    const RandomSource rng = root.substream(ki);
                    if (a->correlated) {
                        const auto thetas = theta_grid(a->theta_points);
                        for (std::size_t si = 0; si < a->s2.size(); ++si) {
                            auto part =
                                entropy_2d_correlated(kind, a->s1, a->s2[si], thetas, a->pop, rng.substream(si));
                            rows.insert(rows.end(), part.begin(), part.end());
                        }
                    } else {
                        auto part = entropy_2d_uncorrelated(kind, a->s1, a->s2, a->pop, rng);
                        rows.insert(rows.end(), part.begin(), part.end());
                    }
                }
                emit(scan_table(cmd, a->correlated ? "theta" : "s2", rows), a->out);
            });
        });
    }
    {
        struct Args : ScanCommon {
            std::string kind = "dg";
            double step = 1.0;
        };
        auto a = std::make_shared<Args>();
        a->pop = 100000;
        auto* cmd = scan->add_subcommand("histogram", "Exact pmf against empirical frequencies");
        cmd->add_option("--kind", a->kind, "tn | dg");
        cmd->add_option("--step", a->step)->check(CLI::PositiveNumber);
        add_common(cmd, *a);
        cmd->callback([cmd, a, &actions] {
            actions.push_back([cmd, a] {
                const auto rows =
                    pmf_histogram(tn_or_dg(a->kind, "--kind"), a->step, a->pop, RandomSource(a->seed, 0));
                io::CsvTable t{metadata(cmd), {"k", "exact", "empirical", "approx"}, {}};
                for (const auto& r : rows) {
                    t.add(r.k, r.exact, r.empirical, r.approx ? io::cell(*r.approx) : std::string("NA"));
                }
                emit(t, a->out);
            });
        });
    }
}

// ---------------------------------------------------------------- strategies

struct EsTweaks {
    std::optional<std::size_t> mu;
    std::optional<std::size_t> lambda;
    std::optional<double> s_init;
    std::optional<std::size_t> window;
    std::optional<double> factor;

    void add_to(CLI::App* cmd)
    {
        cmd->add_option("--mu", mu, "Parent count (default 15)")->check(CLI::PositiveNumber);
        cmd->add_option("--lambda", lambda, "Offspring count (default 100)")->check(CLI::PositiveNumber);
        cmd->add_option("--s-init", s_init, "Initial step size (default 10)")->check(CLI::PositiveNumber);
        cmd->add_option("--window", window, "1/5th-rule window (default n)")->check(CLI::PositiveNumber);
        cmd->add_option("--factor", factor, "1/5th-rule factor (default 0.85)")->check(CLI::Range(0.0, 1.0));
    }

    void apply(EsConfig& cfg) const
    {
        if (mu) cfg.mu = *mu;
        if (lambda) cfg.lambda = *lambda;
        if (s_init) cfg.s_init = *s_init;
        if (window) cfg.one_fifth.window = *window;
        if (factor) cfg.one_fifth.factor = *factor;
    }
};

EsVariant variant_arg(const std::string& name)
{
    const auto v = parse_variant(name);
    if (!v) throw UsageError("--variant: unknown variant '" + name + "'");
    return *v;
}

QuadraticInstance instance_arg(const std::string& problem, std::size_t n, double c, std::uint64_t seed)
{
    const auto kind = parse_hessian_kind(problem);
    if (!kind) throw UsageError("--problem: unknown problem '" + problem + "'");
    try {
        return make_instance(*kind, n, c, seed);
    } catch (const DomainError& e) {
        throw UsageError(std::string("--problem/--n/--c: ") + e.what());
    }
}

void add_optimize(CLI::App& app, std::vector<std::function<void()>>& actions)
{
    struct Args {
        std::string variant = "uncorr-dg";
        std::string problem = "sphere";
        std::size_t n = 16;
        double c = 1e3;
        std::uint64_t budget = 10000;
        std::uint64_t seed = 1;
        std::uint64_t instance_seed = 1;
        EsTweaks tweaks;
        std::string out = "-";
    };
    auto a = std::make_shared<Args>();
    auto* cmd = app.add_subcommand("optimize", "One strategy run; writes a JSONL trace");
    cmd->add_option("--variant", a->variant, "1+1-dg | 1+1-tn | corr-dg | corr-tn | uncorr-dg | uncorr-tn");
    cmd->add_option("--problem", a->problem, "sphere | discus | cigar | rotated-ellipse | hadamard-ellipse");
    cmd->add_option("--n", a->n, "Dimension")->check(CLI::Range(2, 1 << 20));
    cmd->add_option("--c", a->c, "Condition number")->check(CLI::Range(1.0, 1e300));
    cmd->add_option("--budget", a->budget, "Evaluation budget");
    cmd->add_option("--seed", a->seed, "Run seed");
    cmd->add_option("--instance-seed", a->instance_seed, "Seed of the optimum location");
    a->tweaks.add_to(cmd);
    cmd->add_option("--out", a->out, "Output JSONL ('-' for stdout)");
    cmd->callback([a, &actions] {
        actions.push_back([a] {
            const EsVariant variant = variant_arg(a->variant);
            const QuadraticInstance inst = instance_arg(a->problem, a->n, a->c, a->instance_seed);
            EsConfig cfg = EsConfig::defaults(variant, a->n, a->budget);
            a->tweaks.apply(cfg);
            try {
                cfg.validate();
            } catch (const std::exception& e) {
                throw UsageError(e.what());
            }
            const RunRecord rec = run(variant, inst, cfg, a->seed);
            if (a->out.empty() || a->out == "-") {
                io::write_run(std::cout, rec);
            } else {
                io::write_run(fs::path(a->out), rec);
            }
            std::cerr << rec.run_id << " evals=" << rec.evaluations << " best_f=" << io::format_double(rec.best_f)
                      << "\n";
        });
    });
}

void add_bench(CLI::App& app, std::vector<std::function<void()>>& actions)
{
    struct Args {
        std::size_t n = 16;
        std::size_t runs = 15;
        std::uint64_t budget = 10000;
        std::vector<std::string> variants{"corr-dg", "corr-tn", "uncorr-dg", "uncorr-tn"};
        std::uint64_t seed = 1;
        std::uint64_t instance_seed = 1000;
        EsTweaks tweaks;
        std::size_t threads = default_worker_count();
        std::string out_dir = "runs";
    };
    auto a = std::make_shared<Args>();
    auto* cmd = app.add_subcommand("bench", "Variants x 24 instances x seeds campaign; one JSONL per run");
    cmd->add_option("--n", a->n, "Dimension (power of two)")->check(CLI::Range(2, 1 << 20));
    cmd->add_option("--runs", a->runs, "Seeds per (variant, instance)")->check(CLI::PositiveNumber);
    cmd->add_option("--budget", a->budget, "Evaluation budget per run");
    cmd->add_option("--variants", a->variants, "Comma separated variant names")->delimiter(',');
    cmd->add_option("--seed", a->seed, "First run seed; runs use seed..seed+runs-1");
    cmd->add_option("--instance-seed", a->instance_seed, "Base instance seed (+ instance index)");
    a->tweaks.add_to(cmd);
    cmd->add_option("--threads", a->threads, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--out-dir", a->out_dir, "Directory for run logs");
    cmd->callback([a, &actions] {
        actions.push_back([a] {
            std::vector<EsVariant> variants;
            for (const auto& v : a->variants) variants.push_back(variant_arg(v));
            if (!is_power_of_two(a->n)) {
                throw UsageError("--n: Hadamard instances need a power-of-two dimension, got " +
                                 std::to_string(a->n));
            }
            const auto suite = benchmark_suite(a->n, a->instance_seed);
            std::vector<std::uint64_t> seeds;
            for (std::size_t r = 0; r < a->runs; ++r) seeds.push_back(a->seed + r);
            for (EsVariant v : variants) {
                EsConfig cfg = EsConfig::defaults(v, a->n, a->budget);
                a->tweaks.apply(cfg);
                try {
                    cfg.validate();
                } catch (const std::exception& e) {
                    throw UsageError(e.what());
                }
            }
            const std::size_t total = variants.size() * suite.size() * seeds.size();
            const fs::path dir(a->out_dir);
            parallel_for(total, a->threads, [&](std::size_t job) {
                const std::size_t si = job % seeds.size();
                const std::size_t ii = (job / seeds.size()) % suite.size();
                const std::size_t vi = job / (seeds.size() * suite.size());
                EsConfig cfg = EsConfig::defaults(variants[vi], a->n, a->budget);
                a->tweaks.apply(cfg);
                const RunRecord rec = run(variants[vi], suite[ii], cfg, seeds[si]);
                io::write_run(dir / (slug(rec.run_id) + ".jsonl"), rec);
            });
            std::cerr << "wrote " << total << " run logs to " << dir.string() << "\n";
        });
    });
}

std::vector<RunRecord> load_logs(const fs::path& dir)
{
    if (!fs::exists(dir)) throw MissingInput("log directory not found: " + dir.string());
    std::vector<fs::path> files;
    if (fs::is_regular_file(dir)) {
        files.push_back(dir);
    } else {
        for (const auto& e : fs::recursive_directory_iterator(dir)) {
            if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
        }
    }
    if (files.empty()) throw MissingInput("no .jsonl run logs under " + dir.string());
    std::sort(files.begin(), files.end());
    std::vector<RunRecord> all;
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        auto runs = io::read_runs(in);
        all.insert(all.end(), std::make_move_iterator(runs.begin()), std::make_move_iterator(runs.end()));
    }
    return all;
}

void add_report(CLI::App& app, std::vector<std::function<void()>>& actions)
{
    struct Args {
        std::string logs = "runs";
        std::string group = "all";
        std::string out = "-";
        std::string final_values;
    };
    auto a = std::make_shared<Args>();
    auto* cmd = app.add_subcommand("report", "Dominance matrix and final-value table from run logs");
    cmd->add_option("--logs", a->logs, "Run-log directory or file");
    cmd->add_option("--group", a->group, "separable | non-separable | all")
        ->check(CLI::IsMember({"separable", "non-separable", "all"}));
    cmd->add_option("--out", a->out, "Dominance CSV ('-' for stdout)");
    cmd->add_option("--final-values", a->final_values, "Also write per-instance final-value table here");
    cmd->callback([cmd, a, &actions] {
        actions.push_back([cmd, a] {
            const auto records = load_logs(a->logs);
            const Grouping grouping = *parse_grouping(a->group);
            DominanceMatrix dm;
            try {
                dm = pairwise_dominance(records, grouping);
            } catch (const PreconditionError& e) {
                throw MissingInput(e.what());
            }
            io::CsvTable t{metadata(cmd), {"variant"}, {}};
            for (EsVariant v : dm.variants) t.header.emplace_back(to_string(v));
            t.header.emplace_back("score");
            t.header.emplace_back("rank");
            const auto ranking = dm.ranking();
            for (std::size_t r = 0; r < dm.variants.size(); ++r) {
                std::vector<std::string> row{std::string(to_string(dm.variants[r]))};
                for (std::size_t c = 0; c < dm.variants.size(); ++c) {
                    row.push_back(io::cell(dm.fraction(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))));
                }
                row.push_back(io::cell(dm.score(r)));
                const auto pos = std::find(ranking.begin(), ranking.end(), dm.variants[r]) - ranking.begin();
                row.push_back(io::cell(static_cast<std::int64_t>(pos + 1)));
                t.rows.push_back(std::move(row));
            }
            emit(t, a->out);
            if (!a->final_values.empty()) {
                std::vector<RunRecord> selected;
                for (const auto& r : records) {
                    if (r.instance && in_group(r.instance->kind, grouping)) selected.push_back(r);
                }
                io::CsvTable f{metadata(cmd),
                               {"problem", "n", "c", "instance_seed", "variant", "runs", "mean_f", "median_f", "best_f"},
                               {}};
                for (const auto& s : summarize_final_values(selected)) {
                    f.add(to_string(s.instance.kind), static_cast<std::uint64_t>(s.instance.n), s.instance.c,
                          s.instance.seed, to_string(s.variant), static_cast<std::uint64_t>(s.runs), s.mean_f,
                          s.median_f, s.best_f);
                }
                emit(f, a->final_values);
            }
        });
    });
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Integer evolution strategies: samplers, figure-data scans and benchmarks", "ies"};
    app.set_version_flag("--version", IES_VERSION);
    app.set_config("--config", "", "TOML/INI config; sections name the subcommand, e.g. [scan.rotate]");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::vector<std::function<void()>> actions;
    add_pmf(app, actions);
    add_sample(app, actions);
    add_entropy(app, actions);
    add_scan(app, actions);
    add_optimize(app, actions);
    add_bench(app, actions);
    add_report(app, actions);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        for (auto& action : actions) action();
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const MissingInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_missing;
    } catch (const io::RunLogError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_missing;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
