#include "randbc/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <exception>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "randbc/multiply.hpp"
#include "randbc/randomize.hpp"

namespace randbc {

ExperimentKind parse_experiment(std::string_view text) {
    for (auto kind : {ExperimentKind::s1_avg, ExperimentKind::s1_dist, ExperimentKind::s2_avg,
                      ExperimentKind::s2_variants}) {
        std::string dashed(experiment_name(kind));
        std::replace(dashed.begin(), dashed.end(), '_', '-');
        if (text == experiment_name(kind) || text == dashed) return kind;
    }
    throw std::invalid_argument("unknown experiment '" + std::string(text) +
                                "' (expected s1-avg, s1-dist, s2-avg or s2-variants)");
}

std::string_view experiment_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::s1_avg:
            return "s1_avg";
        case ExperimentKind::s1_dist:
            return "s1_dist";
        case ExperimentKind::s2_avg:
            return "s2_avg";
        case ExperimentKind::s2_variants:
            return "s2_variants";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view text) {
    if (text == "deterministic") return Algorithm::deterministic;
    if (text == "full_random" || text == "full") return Algorithm::full_random;
    if (text == "sign_only" || text == "sign") return Algorithm::sign_only;
    if (text == "perm_only" || text == "perm") return Algorithm::perm_only;
    if (text == "rescaled_2xoi" || text == "rescaled-2xoi") return Algorithm::rescaled_2xoi;
    if (text == "standard") return Algorithm::standard;
    throw std::invalid_argument("unknown algorithm '" + std::string(text) + "'");
}

std::string_view algorithm_name(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::deterministic:
            return "deterministic";
        case Algorithm::full_random:
            return "full_random";
        case Algorithm::sign_only:
            return "sign_only";
        case Algorithm::perm_only:
            return "perm_only";
        case Algorithm::rescaled_2xoi:
            return "rescaled_2xoi";
        case Algorithm::standard:
            return "standard";
    }
    return "?";
}

Algorithm algorithm_for(Variant variant) {
    switch (variant) {
        case Variant::full:
            return Algorithm::full_random;
        case Variant::sign_only:
            return Algorithm::sign_only;
        case Variant::perm_only:
            return Algorithm::perm_only;
        case Variant::none:
            return Algorithm::deterministic;
    }
    return Algorithm::full_random;
}

void ExperimentConfig::validate() const {
    if (matrix_types.empty()) throw std::invalid_argument("no matrix types selected");
    if (size == 0) throw std::invalid_argument("matrix size must be positive");
    if (recursions.empty()) throw std::invalid_argument("no recursion depths selected");
    if (trials == 0) throw std::invalid_argument("trial count must be positive");
    if (repeats == 0) throw std::invalid_argument("repeat count must be positive");
    if (kind == ExperimentKind::s2_variants && algorithms.empty()) throw std::invalid_argument("no algorithms selected");
    for (std::uint64_t c : checkpoints)
        if (c == 0 || c > trials) throw std::invalid_argument("checkpoints must lie in [1, trials]");
}

ExperimentConfig default_config(ExperimentKind kind) {
    ExperimentConfig c;
    c.kind = kind;
    switch (kind) {
        case ExperimentKind::s1_avg:
            break;
        case ExperimentKind::s1_dist:
            c.matrix_types = all_matrix_kinds();
            c.size = 320;
            c.recursions = {1, 2, 3, 4, 5};
            c.trials = 100;
            break;
        case ExperimentKind::s2_avg:
            c.mode = ScalarMode::f32();
            break;
        case ExperimentKind::s2_variants:
            c.matrix_types = all_matrix_kinds();
            c.size = 320;
            c.recursions = {1, 2, 3, 4, 5};
            c.trials = 100;
            c.mode = ScalarMode::f32();
            break;
    }
    return c;
}

std::vector<std::uint64_t> checkpoint_grid(std::uint64_t last) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t step = 1; step <= last; step *= 10) {
        for (std::uint64_t k = 1; k <= 9; ++k) {
            const std::uint64_t v = k * step;
            if (v > last) break;
            if (out.empty() || out.back() != v) out.push_back(v);
        }
        if (step > last / 10) break;
    }
    if (last > 0 && (out.empty() || out.back() != last)) out.push_back(last);
    return out;
}

BilinearFormula experiment_formula(const ExperimentConfig& config, std::uint64_t seed) {
    if (config.formula_path) return load_formula(*config.formula_path);
    const BilinearFormula s = strassen_formula();
    if (config.kind == ExperimentKind::s1_avg || config.kind == ExperimentKind::s1_dist) {
        Philox4x32 rng = substream(seed, 0, 0, StreamRole::formula);
        return perturb(s, config.perturb_sigma, config.perturb_extra, rng);
    }
    return s;
}

namespace {

using Clock = std::chrono::steady_clock;

template <class T>
struct Inputs {
    Matrix<T> a;
    Matrix<T> b;
    Matrix<double> reference;
};

// The reference is the double product of the inputs as stored in the mode.
template <class T>
Inputs<T> make_inputs(MatrixKind kind, std::size_t size, std::uint64_t seed, const ScalarMode& mode) {
    MatrixPair<T> pair = generate_in<T>(MatrixSpec{kind, size, seed, 0}, mode);
    Matrix<double> ref = standard_multiply(to_double(pair.a), to_double(pair.b), ScalarMode::f64());
    return {std::move(pair.a), std::move(pair.b), std::move(ref)};
}

void check_sizes(const ExperimentConfig& config, const BilinearFormula& f) {
    for (std::size_t q : config.recursions) detail::checked_block_size(config.size, f.n(), q);
}

// Runs fn(i) for i in [0, count) on OpenMP threads; rethrows the first error.
template <class Fn>
void parallel_tasks(std::size_t count, Fn&& fn) {
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(randbc_experiment_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

void log_line(const ExperimentConfig& config, MatrixKind kind, std::uint64_t seed, Clock::time_point start) {
    if (!config.log) return;
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s %s seed %llu: %.1f s", std::string(experiment_name(config.kind)).c_str(),
                  std::string(matrix_kind_name(kind)).c_str(), static_cast<unsigned long long>(seed), seconds);
    config.log(buf);
}

template <class T>
Matrix<T> run_randomized(const BilinearFormula& f, const Inputs<T>& in, std::size_t q, std::uint64_t seed,
                         std::uint64_t trial, Variant variant, const ScalarMode& mode) {
    const RecursivePlan plan = variant_plan(draw_recursive_plan(f.n(), q, seed, trial), variant);
    return recursive_randomized_apply(f, plan, in.a, in.b, mode);
}

template <class T>
std::vector<TrialRecord> run_average_impl(const ExperimentConfig& config) {
    std::vector<TrialRecord> records;
    const std::vector<std::uint64_t> checkpoints =
        config.checkpoints.empty() ? checkpoint_grid(config.trials) : config.checkpoints;
    const std::size_t batch = 256;
    for (std::size_t rep = 0; rep < config.repeats; ++rep) {
        const std::uint64_t seed = config.seed + rep;
        const BilinearFormula f = experiment_formula(config, seed);
        check_sizes(config, f);
        for (MatrixKind kind : config.matrix_types) {
            const auto start = Clock::now();
            const Inputs<T> in = make_inputs<T>(kind, config.size, seed, config.mode);
            TrialRecord base;
            base.experiment = config.kind;
            base.matrix_type = kind;
            base.n = config.size;
            base.seed = seed;
            if (config.kind == ExperimentKind::s2_avg) {
                TrialRecord r = base;
                r.algorithm = Algorithm::standard;
                r.Q = 0;
                r.rel_error = relative_error(standard_multiply(in.a, in.b, config.mode), in.reference);
                records.push_back(r);
            }
            for (std::size_t q : config.recursions) {
                Matrix<double> sum(config.size, config.size, 0.0);
                std::size_t next = 0;
                std::vector<Matrix<double>> products(batch);
                for (std::uint64_t first = 0; first < config.trials; first += batch) {
                    const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(batch, config.trials - first));
                    parallel_tasks(count, [&](std::size_t i) {
                        products[i] = to_double(
                            run_randomized<T>(f, in, q, seed, first + i, config.variant, config.mode));
                    });
                    for (std::size_t i = 0; i < count; ++i) {
                        for (std::size_t e = 0; e < sum.size(); ++e) sum.data()[e] += products[i].data()[e];
                        const std::uint64_t done = first + i + 1;
                        while (next < checkpoints.size() && checkpoints[next] < done) ++next;
                        if (next < checkpoints.size() && checkpoints[next] == done) {
                            Matrix<double> mean = sum;
                            for (double& x : mean.values()) x /= static_cast<double>(done);
                            TrialRecord r = base;
                            r.algorithm = algorithm_for(config.variant);
                            r.Q = q;
                            r.trial = done - 1;
                            r.running_n = done;
                            r.rel_error = relative_error(mean, in.reference);
                            records.push_back(r);
                        }
                    }
                }
            }
            log_line(config, kind, seed, start);
        }
    }
    sort_records(records);
    return records;
}

struct Task {
    Algorithm algorithm;
    std::size_t q;
    std::uint64_t trial;
};

Variant variant_of(Algorithm a) {
    switch (a) {
        case Algorithm::full_random:
            return Variant::full;
        case Algorithm::sign_only:
            return Variant::sign_only;
        case Algorithm::perm_only:
            return Variant::perm_only;
        default:
            return Variant::none;
    }
}

template <class T>
std::vector<TrialRecord> run_tasks_impl(const ExperimentConfig& config, const std::vector<Algorithm>& algorithms) {
    std::vector<TrialRecord> records;
    const auto has = [&](Algorithm a) { return std::find(algorithms.begin(), algorithms.end(), a) != algorithms.end(); };
    for (std::size_t rep = 0; rep < config.repeats; ++rep) {
        const std::uint64_t seed = config.seed + rep;
        const BilinearFormula f = experiment_formula(config, seed);
        check_sizes(config, f);
        std::vector<Task> tasks;
        if (has(Algorithm::standard)) tasks.push_back({Algorithm::standard, 0, 0});
        for (std::size_t q : config.recursions) {
            for (Algorithm a : {Algorithm::deterministic, Algorithm::rescaled_2xoi})
                if (has(a)) tasks.push_back({a, q, 0});
            for (std::uint64_t t = 0; t < config.trials; ++t)
                for (Algorithm a : {Algorithm::full_random, Algorithm::sign_only, Algorithm::perm_only})
                    if (has(a)) tasks.push_back({a, q, t});
        }
        for (MatrixKind kind : config.matrix_types) {
            const auto start = Clock::now();
            const Inputs<T> in = make_inputs<T>(kind, config.size, seed, config.mode);
            std::vector<TrialRecord> out(tasks.size());
            parallel_tasks(tasks.size(), [&](std::size_t i) {
                const Task& task = tasks[i];
                Matrix<T> c;
                switch (task.algorithm) {
                    case Algorithm::standard:
                        c = standard_multiply(in.a, in.b, config.mode);
                        break;
                    case Algorithm::deterministic:
                        c = recursive_apply(f, in.a, in.b, task.q, config.mode);
                        break;
                    case Algorithm::rescaled_2xoi:
                        c = rescaled_multiply(f, in.a, in.b, task.q, config.schedule, config.mode);
                        break;
                    case Algorithm::full_random:
                    case Algorithm::sign_only:
                    case Algorithm::perm_only:
                        c = run_randomized<T>(f, in, task.q, seed, task.trial, variant_of(task.algorithm), config.mode);
                        break;
                }
                TrialRecord& r = out[i];
                r.experiment = config.kind;
                r.algorithm = task.algorithm;
                r.matrix_type = kind;
                r.n = config.size;
                r.Q = task.q;
                r.trial = task.trial;
                r.seed = seed;
                r.rel_error = relative_error(c, in.reference);
                r.running_n = 1;
            });
            records.insert(records.end(), out.begin(), out.end());
            log_line(config, kind, seed, start);
        }
    }
    sort_records(records);
    return records;
}

template <class Fn>
std::vector<TrialRecord> with_mode(const ExperimentConfig& config, ExperimentKind expected, Fn&& fn) {
    if (config.kind != expected)
        throw std::invalid_argument("configuration is for experiment " + std::string(experiment_name(config.kind)));
    config.validate();
    return dispatch_scalar(config.mode, fn);
}

}  // namespace

std::vector<TrialRecord> run_setting1_average(const ExperimentConfig& config) {
    return with_mode(config, ExperimentKind::s1_avg, [&]<class T>() { return run_average_impl<T>(config); });
}

std::vector<TrialRecord> run_setting1_distribution(const ExperimentConfig& config) {
    return with_mode(config, ExperimentKind::s1_dist, [&]<class T>() {
        std::vector<Algorithm> algorithms{Algorithm::deterministic};
        if (config.variant != Variant::none) algorithms.push_back(algorithm_for(config.variant));
        return run_tasks_impl<T>(config, algorithms);
    });
}

std::vector<TrialRecord> run_setting2_average(const ExperimentConfig& config) {
    return with_mode(config, ExperimentKind::s2_avg, [&]<class T>() { return run_average_impl<T>(config); });
}

std::vector<TrialRecord> run_setting2_variants(const ExperimentConfig& config) {
    return with_mode(config, ExperimentKind::s2_variants,
                     [&]<class T>() { return run_tasks_impl<T>(config, config.algorithms); });
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& config) {
    switch (config.kind) {
        case ExperimentKind::s1_avg:
            return run_setting1_average(config);
        case ExperimentKind::s1_dist:
            return run_setting1_distribution(config);
        case ExperimentKind::s2_avg:
            return run_setting2_average(config);
        case ExperimentKind::s2_variants:
            return run_setting2_variants(config);
    }
    throw std::logic_error("unknown experiment");
}

void sort_records(std::vector<TrialRecord>& records) {
    const auto key = [](const TrialRecord& r) {
        return std::make_tuple(r.experiment, r.seed, r.matrix_type, r.algorithm, r.Q, r.trial, r.running_n);
    };
    std::stable_sort(records.begin(), records.end(),
                     [&](const TrialRecord& x, const TrialRecord& y) { return key(x) < key(y); });
}

void write_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
    out << kCsvHeader << '\n';
    char buf[320];
    for (const TrialRecord& r : records) {
        std::snprintf(buf, sizeof buf, "%s,%s,%s,%zu,%zu,%llu,%llu,%.17g,%llu\n",
                      std::string(experiment_name(r.experiment)).c_str(),
                      std::string(algorithm_name(r.algorithm)).c_str(),
                      std::string(matrix_kind_name(r.matrix_type)).c_str(), r.n, r.Q,
                      static_cast<unsigned long long>(r.trial), static_cast<unsigned long long>(r.seed), r.rel_error,
                      static_cast<unsigned long long>(r.running_n));
        out << buf;
    }
}

namespace {

template <class T>
T parse_number(std::string_view field, std::size_t line) {
    T value{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw std::runtime_error("line " + std::to_string(line) + ": bad number '" + std::string(field) + "'");
    return value;
}

}  // namespace

std::vector<TrialRecord> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw std::runtime_error("missing or unexpected CSV header");
    std::vector<TrialRecord> out;
    std::size_t number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) continue;
        std::vector<std::string_view> f;
        std::string_view rest = line;
        for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest = rest.substr(pos + 1))
            f.push_back(rest.substr(0, pos));
        f.push_back(rest);
        if (f.size() != 9) throw std::runtime_error("line " + std::to_string(number) + ": expected 9 fields");
        TrialRecord r;
        r.experiment = parse_experiment(f[0]);
        r.algorithm = parse_algorithm(f[1]);
        r.matrix_type = parse_matrix_kind(f[2]);
        r.n = parse_number<std::size_t>(f[3], number);
        r.Q = parse_number<std::size_t>(f[4], number);
        r.trial = parse_number<std::uint64_t>(f[5], number);
        r.seed = parse_number<std::uint64_t>(f[6], number);
        r.rel_error = parse_number<double>(f[7], number);
        r.running_n = parse_number<std::uint64_t>(f[8], number);
        out.push_back(r);
    }
    return out;
}

}  // namespace randbc
