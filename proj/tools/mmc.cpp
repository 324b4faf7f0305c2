// mmc: train, generate, verify and benchmark (1-eps)-approximate maximum
// margin slab classifiers from CSV datasets.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "mmc/datagen.hpp"
#include "mmc/dataset.hpp"
#include "mmc/engine.hpp"
#include "mmc/io.hpp"
#include "mmc/oracles.hpp"
#include "mmc/reference.hpp"
#include "mmc/version.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct TrainArgs {
    std::string input;
    double epsilon = 0.0;
    std::string mode = "offline";
    std::string oracle = "exact";
    std::int64_t sample_m = 90;
    std::uint64_t seed = 0;
    std::string report_path;
    std::string trace_path;
    std::int64_t cap = 0;
    bool cap_set = false;
    double tol = 1e-12;
};

int run_train(const TrainArgs& args) {
    const std::string bytes = mmc::read_file(args.input);
    const mmc::Dataset data = mmc::dataset_from_csv(bytes);

    mmc::EngineConfig cfg;
    cfg.epsilon = args.epsilon;
    cfg.tol = args.tol;
    cfg.rng_seed = args.seed;
    if (args.cap_set) cfg.explicit_cap = args.cap;

    mmc::RunMeta meta;
    meta.version = mmc::kVersion;
    meta.dataset_checksum = mmc::checksum_hex(bytes);
    meta.mode = args.mode;
    meta.oracle = args.mode == "active" ? args.oracle : "none";
    meta.sample_m = args.sample_m;
    meta.rng_seed = args.seed;
    meta.tol = args.tol;
    meta.cap_constant = cfg.cap_constant;
    meta.explicit_cap = cfg.explicit_cap;

    const auto t0 = Clock::now();
    mmc::TrainReport rep;
    if (args.mode == "offline") {
        rep = mmc::train_offline(data, cfg);
    } else {
        // Active mode simulates the oracles from the ground-truth labels in
        // the input file; seeds are the lowest-index point of each class.
        mmc::require_labels(data);
        const auto b = mmc::first_index_of(data, mmc::Label::Black);
        const auto w = mmc::first_index_of(data, mmc::Label::White);
        if (!b || !w) throw mmc::SingleClass("active mode needs both classes in the pool");
        mmc::PoolLabelingOracle label_oracle(data);
        std::unique_ptr<mmc::CounterexampleOracle> cex;
        if (args.oracle == "exact") {
            cex = std::make_unique<mmc::ExactCounterexampleOracle>(data, args.tol);
        } else {
            cex = std::make_unique<mmc::SampledCounterexampleOracle>(
                label_oracle, data.points, static_cast<std::size_t>(args.sample_m), args.seed,
                args.tol);
        }
        rep = mmc::train_active(label_oracle, *cex, data.points, data.points[*b],
                                data.points[*w], cfg);
    }
    meta.wall_seconds = seconds_since(t0);

    for (const std::string& warning : rep.warnings) {
        std::cerr << "warning: " << warning << "\n";
    }

    const mmc::json j = mmc::report_to_json(rep, meta);
    if (!args.report_path.empty()) {
        mmc::write_file(args.report_path, j.dump(2) + "\n");
        std::cout << (rep.converged ? "converged" : "stopped") << " after " << rep.iterations
                  << " iterations; final_ell=" << mmc::format_double(rep.final_ell)
                  << " width=" << mmc::format_double(rep.width) << "\n";
    } else {
        std::cout << j.dump(2) << "\n";
    }
    if (!args.trace_path.empty()) {
        mmc::write_file(args.trace_path, mmc::trace_to_csv(rep));
    }
    return rep.converged ? 0 : 2;
}

struct GenArgs {
    std::size_t dim = 2;
    std::size_t n = 100;
    double margin = 1.0;
    double diam = 10.0;
    std::uint64_t seed = 0;
    std::string out;
    double mislabel_rho = 0.0;
};

int run_gen(const GenArgs& args) {
    const mmc::GenSpec spec{args.dim, args.n, args.margin, args.diam, args.seed};
    mmc::PlantedInstance inst = mmc::gen_planted(spec);
    // The certificate describes the clean planted structure, before any
    // label flips are injected.
    const mmc::MarginCertificate cert =
        mmc::planted_margin_bounds(inst.data, inst.planted_normal);
    mmc::Dataset out_data = args.mislabel_rho > 0.0
                                ? mmc::inject_mislabels(inst.data, args.mislabel_rho, args.seed)
                                : inst.data;

    mmc::write_file(args.out, mmc::dataset_to_csv(out_data));

    mmc::json sidecar;
    sidecar["version"] = mmc::kVersion;
    sidecar["planted_normal"] = inst.planted_normal;
    sidecar["anchor_black_index"] = inst.anchor_black_index;
    sidecar["anchor_white_index"] = inst.anchor_white_index;
    sidecar["certificate"] =
        mmc::json{{"lower", cert.lower}, {"upper", cert.upper}, {"exact", cert.exact}};
    sidecar["flipped"] = out_data.flipped;
    sidecar["spec"] = mmc::json{{"dim", args.dim},       {"n", args.n},
                                {"margin", args.margin}, {"diam", args.diam},
                                {"seed", args.seed},     {"mislabel_rho", args.mislabel_rho}};
    mmc::write_file(args.out + ".meta.json", sidecar.dump(2) + "\n");

    std::cout << "wrote " << out_data.size() << " points (dim " << out_data.dim << ") to "
              << args.out << "; certificate [" << mmc::format_double(cert.lower) << ", "
              << mmc::format_double(cert.upper) << "]\n";
    return 0;
}

struct VerifyArgs {
    std::string input;
    std::string slab_path;
    double tol = 1e-12;
};

int run_verify(const VerifyArgs& args) {
    const mmc::Dataset data = mmc::dataset_from_csv(mmc::read_file(args.input));
    mmc::json slab_json;
    try {
        slab_json = mmc::json::parse(mmc::read_file(args.slab_path));
    } catch (const mmc::json::parse_error& e) {
        throw mmc::ParseError(std::string("slab file: ") + e.what());
    }
    const mmc::Slab slab = mmc::slab_from_json(slab_json);
    const mmc::VerifyReport v = mmc::verify_separation(data, slab, args.tol);
    const mmc::json out{{"misclassified_count", v.misclassified_count},
                        {"interior_count", v.interior_count},
                        {"width", v.width},
                        {"certified", v.certified()}};
    std::cout << out.dump(2) << "\n";
    return v.certified() ? 0 : 3;
}

struct BenchArgs {
    std::string epsilons = "0.4,0.2,0.1";
    std::string ratios = "5,10,20";
    std::int64_t trials = 5;
    std::uint64_t seed = 0;
    std::size_t n = 100;
    std::string out;
    bool timing = false;
};

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> values;
    std::string cur;
    for (const char c : text) {
        if (c == ',') {
            values.push_back(mmc::parse_double(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (cur.empty()) throw mmc::ParseError(what + " list is empty or ends with a comma");
    values.push_back(mmc::parse_double(cur));
    return values;
}

struct BenchRow {
    double eps = 0.0;
    double ratio = 0.0;
    std::int64_t trial = 0;
    std::int64_t iterations = 0;
    std::int64_t cap = 0;
    bool converged = false;
    double seconds = 0.0;
    double final_ell = 0.0;
    double hull_dist = 0.0;
};

int run_bench(const BenchArgs& args) {
    const std::vector<double> epsilons = parse_list(args.epsilons, "epsilon");
    const std::vector<double> ratios = parse_list(args.ratios, "ratio");
    if (args.trials < 1) throw mmc::ParseError("--trials must be >= 1");

    struct Job {
        double eps;
        double ratio;
        std::int64_t trial;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    std::uint64_t job_id = 0;
    for (const double eps : epsilons) {
        for (const double ratio : ratios) {
            for (std::int64_t trial = 0; trial < args.trials; ++trial) {
                jobs.push_back(Job{eps, ratio, trial, mmc::mix_seed(args.seed, job_id++)});
            }
        }
    }

    std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MMC_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) threads = static_cast<std::size_t>(v);
    }
    threads = std::min(threads, jobs.size());

    std::vector<BenchRow> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= jobs.size()) return;
            const Job& job = jobs[k];
            const mmc::GenSpec spec{2, args.n, 1.0, job.ratio, job.seed};
            const mmc::PlantedInstance inst = mmc::gen_planted(spec);
            mmc::EngineConfig cfg;
            cfg.epsilon = job.eps;
            cfg.record_trace = false;
            const auto t0 = Clock::now();
            const mmc::TrainReport rep = mmc::train_offline(inst.data, cfg);
            const double dt = seconds_since(t0);
            std::vector<mmc::Vector> black, white;
            for (std::size_t i = 0; i < inst.data.size(); ++i) {
                ((*inst.data.labels)[i] == mmc::Label::Black ? black : white)
                    .push_back(inst.data.points[i]);
            }
            BenchRow row;
            row.eps = job.eps;
            row.ratio = job.ratio;
            row.trial = job.trial;
            row.iterations = rep.iterations;
            row.cap = rep.iteration_cap;
            row.converged = rep.converged;
            row.seconds = args.timing ? dt : 0.0;
            row.final_ell = rep.final_ell;
            row.hull_dist = mmc::hull_distance_2d(black, white);
            rows[k] = row;
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
        if (a.eps != b.eps) return a.eps < b.eps;
        if (a.ratio != b.ratio) return a.ratio < b.ratio;
        return a.trial < b.trial;
    });

    std::string csv = "eps,ratio,trial,iterations,cap,converged,seconds,final_ell,hull_dist\n";
    for (const BenchRow& r : rows) {
        csv += mmc::format_double(r.eps) + "," + mmc::format_double(r.ratio) + "," +
               std::to_string(r.trial) + "," + std::to_string(r.iterations) + "," +
               std::to_string(r.cap) + "," + (r.converged ? "1" : "0") + "," +
               mmc::format_double(r.seconds) + "," + mmc::format_double(r.final_ell) + "," +
               mmc::format_double(r.hull_dist) + "\n";
    }
    if (args.out.empty()) {
        std::cout << csv;
    } else {
        mmc::write_file(args.out, csv);
        std::cout << "wrote " << rows.size() << " rows to " << args.out << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"maximum-margin slab trainer (iterative witness projection)"};
    app.require_subcommand(1);

    TrainArgs train_args;
    CLI::App* train = app.add_subcommand(
        "train", "Train a separating slab on a CSV dataset; exits 0 on convergence, 2 when "
                 "the iteration cap is hit, 1 on usage/IO errors.");
    train->add_option("input", train_args.input, "dataset CSV (x0,...,x{d-1},label)")
        ->required();
    train->add_option("--epsilon", train_args.epsilon, "approximation parameter in (0,1)")
        ->required();
    train->add_option("--mode", train_args.mode, "offline: labels come from the file; active: "
                      "labels are fetched through simulated oracles")
        ->check(CLI::IsMember({"offline", "active"}))
        ->capture_default_str();
    train->add_option("--oracle", train_args.oracle,
                      "counterexample oracle for active mode")
        ->check(CLI::IsMember({"exact", "sampled"}))
        ->capture_default_str();
    train->add_option("--sample-m", train_args.sample_m,
                      "sample size per query of the sampled oracle")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    train->add_option("--seed", train_args.seed, "RNG seed for the sampled oracle")
        ->capture_default_str();
    train->add_option("--report", train_args.report_path,
                      "write the JSON run report here (default: stdout)");
    train->add_option("--trace", train_args.trace_path, "write the per-iteration trace CSV here");
    CLI::Option* cap_opt = train->add_option("--cap", train_args.cap,
                                             "explicit iteration cap (default: adaptive)")
                               ->check(CLI::NonNegativeNumber);
    train->add_option("--tol", train_args.tol, "slab membership tolerance on t")
        ->capture_default_str();

    GenArgs gen_args;
    CLI::App* gen = app.add_subcommand(
        "gen", "Generate a planted-margin instance (CSV plus a .meta.json sidecar with the "
               "planted normal and margin certificate).");
    gen->add_option("--dim", gen_args.dim, "dimension")->capture_default_str();
    gen->add_option("--n", gen_args.n, "number of points")->capture_default_str();
    gen->add_option("--margin", gen_args.margin, "planted margin gamma")->required();
    gen->add_option("--diam", gen_args.diam, "diameter bound (must exceed margin)")->required();
    gen->add_option("--seed", gen_args.seed, "generator seed")->capture_default_str();
    gen->add_option("--out", gen_args.out, "output CSV path")->required();
    gen->add_option("--mislabel-rho", gen_args.mislabel_rho,
                    "flip the labels of ceil(rho*n) points")
        ->capture_default_str();

    VerifyArgs verify_args;
    CLI::App* verify = app.add_subcommand(
        "verify", "Check a slab against a labeled CSV; exits 0 iff it separates (3 if not).");
    verify->add_option("input", verify_args.input, "dataset CSV")->required();
    verify->add_option("--slab", verify_args.slab_path,
                       "slab JSON (anchor_b/anchor_w arrays, or a train report)")
        ->required();
    verify->add_option("--tol", verify_args.tol, "side tolerance on t")->capture_default_str();

    BenchArgs bench_args;
    CLI::App* bench = app.add_subcommand(
        "bench", "Iteration-count scaling table over planted 2D instances. CSV columns: "
                 "eps,ratio,trial,iterations,cap,converged,seconds,final_ell,hull_dist. "
                 "The seconds column is 0 unless --timing is given, so fixed-seed output "
                 "is byte-identical.");
    bench->add_option("--epsilons", bench_args.epsilons, "comma-separated epsilon values")
        ->capture_default_str();
    bench->add_option("--ratios", bench_args.ratios, "comma-separated diam/margin ratios")
        ->capture_default_str();
    bench->add_option("--trials", bench_args.trials, "instances per (eps, ratio) cell")
        ->capture_default_str();
    bench->add_option("--seed", bench_args.seed, "base seed")->capture_default_str();
    bench->add_option("--n", bench_args.n, "points per instance")->capture_default_str();
    bench->add_option("--out", bench_args.out, "output CSV path (default: stdout)");
    bench->add_flag("--timing", bench_args.timing, "fill the seconds column with wall-clock "
                    "measurements (makes output nondeterministic)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*train) {
            train_args.cap_set = cap_opt->count() > 0;
            return run_train(train_args);
        }
        if (*gen) return run_gen(gen_args);
        if (*verify) return run_verify(verify_args);
        if (*bench) return run_bench(bench_args);
    } catch (const mmc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
