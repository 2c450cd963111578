#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "unijadi/diagnostics.hpp"
#include "unijadi/io.hpp"
#include "unijadi/problems.hpp"
#include "unijadi/solver.hpp"

namespace {

using namespace unijadi;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCheckFailed = 2;
constexpr int kExitMaxSweeps = 3;

const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::MaxSweeps: return "MaxSweeps";
        case SolveStatus::StalledAtSaddle: return "StalledAtSaddle";
    }
    return "?";
}

StrategyKind parse_strategy(const std::string& name) {
    if (name == "gradient-max") return StrategyKind::GradientMax;
    if (name == "cyclic-threshold") return StrategyKind::CyclicThreshold;
    if (name == "cyclic") return StrategyKind::PureCyclic;
    if (name == "sd") return StrategyKind::SteepestDescent;
    throw CLI::ValidationError("--strategy", "unknown strategy '" + name + "'");
}

// Diagonal entries come in as "re" or "re:im" tokens.
std::vector<cplx> parse_diag(const std::vector<std::string>& tokens) {
    std::vector<cplx> out;
    for (const auto& tok : tokens) {
        const auto colon = tok.find(':');
        try {
            if (colon == std::string::npos) {
                out.emplace_back(std::stod(tok), 0.0);
            } else {
                out.emplace_back(std::stod(tok.substr(0, colon)),
                                 std::stod(tok.substr(colon + 1)));
            }
        } catch (const std::exception&) {
            throw CLI::ValidationError("--diag", "cannot parse entry '" + tok + "'");
        }
    }
    return out;
}

int bench_threads() {
    if (const char* env = std::getenv("UNIJADI_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v >= 1) return v;
        } catch (const std::exception&) {
        }
        std::cerr << "warning: ignoring invalid UNIJADI_THREADS='" << env << "'\n";
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

struct GenerateArgs {
    std::string kind = "example1";
    int n = 10;
    int L = 5;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::string> diag;
    std::string out = "problem.json";
};

int run_generate(const GenerateArgs& args) {
    std::cout << "config: generate kind=" << args.kind << " n=" << args.n
              << " L=" << args.L << " sigma=" << args.sigma << " seed=" << args.seed
              << " out=" << args.out << "\n";

    GeneratedProblem prob = [&] {
        if (args.kind == "example1")
            return gen_random_joint_matrices(args.n, args.L, args.seed);
        if (args.kind == "example2")
            return gen_near_diagonalizable(args.n, args.L, args.sigma, args.seed);
        if (args.kind == "tensor3" || args.kind == "trace4") {
            std::vector<cplx> diag = parse_diag(args.diag);
            if (diag.empty())
                for (int p = 0; p < args.n; ++p) diag.emplace_back(1.0 + p, 0.0);
            if (args.kind == "tensor3")
                return gen_diagonal_tensor3(args.n, diag, args.seed);
            std::vector<double> real_diag;
            for (auto v : diag) {
                if (v.imag() != 0.0)
                    throw CLI::ValidationError("--diag",
                                               "trace4 diagonals must be real");
                real_diag.push_back(v.real());
            }
            return gen_diagonal_trace4(args.n, real_diag, args.seed);
        }
        throw CLI::ValidationError(
            "--kind", "expected example1, example2, tensor3 or trace4");
    }();

    save_problem(args.out, prob.cost);
    std::cout << "wrote " << args.out << "\n";
    if (prob.truth.U_star || prob.truth.f_star) {
        const std::string truth_path = ground_truth_path_for(args.out);
        save_json(truth_path, ground_truth_to_json(prob.truth));
        std::cout << "wrote " << truth_path << "\n";
    }
    return kExitOk;
}

struct SolveArgs {
    std::string problem_path;
    std::string strategy = "gradient-max";
    double delta = 0.0;
    double eps = 1e-8;
    int max_sweeps = 200;
    std::uint64_t seed = 0;
    std::string start = "identity";
    std::string trace_path;
    std::string format = "csv";
};

int run_solve(const SolveArgs& args) {
    std::cout << "config: solve problem=" << args.problem_path
              << " strategy=" << args.strategy << " delta=" << args.delta
              << " eps=" << args.eps << " max-sweeps=" << args.max_sweeps
              << " seed=" << args.seed << " start=" << args.start << "\n";

    const CostFunction cost = load_problem(args.problem_path);

    Eigen::MatrixXcd U0;
    if (args.start == "identity") {
        U0 = Eigen::MatrixXcd::Identity(cost.n(), cost.n());
    } else if (args.start == "random") {
        CounterRng rng(args.seed, 0x75303030u);
        U0 = haar_unitary(cost.n(), rng);
    } else {
        throw CLI::ValidationError("--start", "expected identity or random");
    }

    SolverConfig config;
    config.strategy.kind = parse_strategy(args.strategy);
    config.strategy.delta = args.delta;
    config.grad_tol = args.eps;
    config.max_sweeps = args.max_sweeps;
    config.seed = args.seed;

    const auto res = jacobi_g_solve(cost, U0, config);

    if (!args.trace_path.empty()) {
        std::ofstream os(args.trace_path);
        if (!os) throw std::runtime_error("cannot open trace file " + args.trace_path);
        if (args.format == "csv")
            write_trace_csv(os, res.trace);
        else if (args.format == "jsonl")
            write_trace_jsonl(os, res.trace);
        else
            throw CLI::ValidationError("--format", "expected csv or jsonl");
        std::cout << "trace: " << args.trace_path << " (" << res.trace.size()
                  << " rotations)\n";
    }

    std::cout << "status=" << status_name(res.status) << " f=" << res.f_final
              << " grad=" << res.grad_norm_final << " iterations=" << res.iterations
              << " sweeps=" << res.sweeps;
    if (res.stalled_pair)
        std::cout << " stalled_pair=(" << res.stalled_pair->i << ","
                  << res.stalled_pair->j << ")";
    std::cout << "\n";
    return res.status == SolveStatus::MaxSweeps ? kExitMaxSweeps : kExitOk;
}

struct CheckArgs {
    std::string problem_path;
    int directions = 8;
    double fd_step = 1e-5;
    double grad_check_tol = 1e-6;
    double truth_tol = 1e-9;
    std::uint64_t seed = 0;
};

int run_check(const CheckArgs& args) {
    std::cout << "config: check problem=" << args.problem_path
              << " directions=" << args.directions << " fd-step=" << args.fd_step
              << " grad-check-tol=" << args.grad_check_tol << " seed=" << args.seed
              << "\n";

    int failures = 0;
    auto report = [&](const std::string& name, bool ok, const std::string& detail) {
        std::cout << (ok ? "PASS" : "FAIL") << "  " << name
                  << (detail.empty() ? "" : "  (" + detail + ")") << "\n";
        if (!ok) ++failures;
    };

    CostFunction cost = [&] {
        try {
            return load_problem(args.problem_path);
        } catch (const std::exception& e) {
            report("schema", false, e.what());
            std::cout << "checks failed: 1\n";
            std::exit(kExitCheckFailed);
        }
    }();
    report("schema", true, "kind loads and validates");

    CounterRng rng(args.seed, 0x63686563u);
    const Eigen::MatrixXcd U = haar_unitary(cost.n(), rng);

    const auto grad = finite_diff_gradient_check(cost, U, args.directions, args.fd_step,
                                                 args.seed);
    {
        std::ostringstream d;
        d << "max relative error " << grad.max_rel_err;
        report("gradient-fd", grad.max_rel_err <= args.grad_check_tol, d.str());
    }

    const auto inv = invariance_check(cost, U, 8, args.seed + 1);
    {
        std::ostringstream d;
        d << "f dev " << inv.max_f_dev << ", grad dev " << inv.max_grad_dev;
        report("phase-invariance", inv.pass, d.str());
    }

    const std::string truth_path = ground_truth_path_for(args.problem_path);
    if (std::ifstream(truth_path)) {
        const GroundTruth truth = ground_truth_from_json(load_json(truth_path));
        if (truth.U_star && truth.f_star) {
            const double at_truth = evaluate(cost, *truth.U_star);
            std::ostringstream d;
            d << "f(U_star) = " << at_truth << " vs " << *truth.f_star;
            const double rel = std::abs(at_truth - *truth.f_star) /
                               std::max(1.0, std::abs(*truth.f_star));
            // Noisy generators store the noiseless value; widen accordingly.
            const bool noisy = truth.note.find("noiseless") != std::string::npos;
            report("ground-truth-value", rel <= (noisy ? 1e-3 : args.truth_tol), d.str());

            const auto state = rotate_full(cost, *truth.U_star);
            auto reg = regularity_check(cost, state);
            if (truth.regularity_expected && !noisy) {
                const bool all_regular =
                    reg.rank_estimate == cost.n() * (cost.n() - 1);
                std::ostringstream rd;
                rd << "rank " << reg.rank_estimate << "/" << cost.n() * (cost.n() - 1);
                report("regularity", all_regular == *truth.regularity_expected, rd.str());
            }
        }
    }

    std::cout << "checks failed: " << failures << "\n";
    return failures == 0 ? kExitOk : kExitCheckFailed;
}

struct BenchArgs {
    std::string problem_path;
    std::vector<std::string> strategies{"gradient-max", "cyclic-threshold"};
    std::vector<std::uint64_t> seeds{0};
    double eps = 1e-8;
    int max_sweeps = 200;
    std::string summary_path;
};

struct BenchRow {
    std::string strategy;
    std::uint64_t seed = 0;
    SolveResult result;
    double elapsed_s = 0.0;
};

int run_bench(const BenchArgs& args) {
    std::cout << "config: bench problem=" << args.problem_path << " strategies=";
    for (std::size_t k = 0; k < args.strategies.size(); ++k)
        std::cout << (k ? "," : "") << args.strategies[k];
    std::cout << " seeds=";
    for (std::size_t k = 0; k < args.seeds.size(); ++k)
        std::cout << (k ? "," : "") << args.seeds[k];
    std::cout << " eps=" << args.eps << " max-sweeps=" << args.max_sweeps << "\n";

    const CostFunction cost = load_problem(args.problem_path);
    for (const auto& s : args.strategies) parse_strategy(s);  // validate early

    struct Job {
        std::string strategy;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const auto& s : args.strategies)
        for (auto seed : args.seeds) jobs.push_back({s, seed});

    std::vector<BenchRow> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    const int workers = std::min<int>(bench_threads(), static_cast<int>(jobs.size()));

    auto worker = [&] {
        for (std::size_t k = next.fetch_add(1); k < jobs.size(); k = next.fetch_add(1)) {
            const auto& job = jobs[k];
            CounterRng rng(job.seed, 0x62656e63u);
            const Eigen::MatrixXcd U0 = haar_unitary(cost.n(), rng);
            SolverConfig config;
            config.strategy.kind = parse_strategy(job.strategy);
            config.grad_tol = args.eps;
            config.max_sweeps = args.max_sweeps;
            config.seed = job.seed;
            const auto start = std::chrono::steady_clock::now();
            auto res = jacobi_g_solve(cost, U0, config);
            rows[k] = {job.strategy, job.seed, std::move(res),
                       std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                     start)
                           .count()};
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::ostringstream table;
    table << "strategy,seed,status,sweeps,iterations,f_final,grad_norm_final,elapsed_s\n";
    for (const auto& row : rows)
        table << row.strategy << ',' << row.seed << ','
              << status_name(row.result.status) << ',' << row.result.sweeps << ','
              << row.result.iterations << ',' << row.result.f_final << ','
              << row.result.grad_norm_final << ',' << row.elapsed_s << "\n";

    std::cout << table.str();
    if (!args.summary_path.empty()) {
        std::ofstream os(args.summary_path);
        if (!os) throw std::runtime_error("cannot open summary file " + args.summary_path);
        os << table.str();
        std::cout << "summary: " << args.summary_path << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint approximate diagonalization on the unitary group"};
    app.require_subcommand(1);

    GenerateArgs gen_args;
    auto* gen = app.add_subcommand("generate", "write a problem file");
    gen->add_option("--kind", gen_args.kind,
                    "example1 | example2 | tensor3 | trace4");
    gen->add_option("--n", gen_args.n, "problem dimension")->check(CLI::Range(2, 64));
    gen->add_option("--L", gen_args.L, "number of matrices (example kinds)");
    gen->add_option("--sigma", gen_args.sigma, "noise level for example2");
    gen->add_option("--seed", gen_args.seed, "generator seed");
    gen->add_option("--diag", gen_args.diag,
                    "diagonal entries for tensor3/trace4, each re or re:im");
    gen->add_option("--out", gen_args.out, "output path");

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "run a solver on a problem file");
    solve->add_option("problem", solve_args.problem_path, "problem JSON path")
        ->required();
    solve->add_option("--strategy", solve_args.strategy,
                      "gradient-max | cyclic-threshold | cyclic | sd");
    solve->add_option("--delta", solve_args.delta,
                      "pair threshold factor (cyclic-threshold)");
    solve->add_option("--eps", solve_args.eps, "gradient norm tolerance");
    solve->add_option("--max-sweeps", solve_args.max_sweeps, "sweep budget");
    solve->add_option("--seed", solve_args.seed, "seed for the random start");
    solve->add_option("--start", solve_args.start, "identity | random");
    solve->add_option("--trace", solve_args.trace_path, "iteration trace output path");
    solve->add_option("--format", solve_args.format, "trace format: csv | jsonl");

    CheckArgs check_args;
    auto* check = app.add_subcommand("check", "validate a problem file and gradients");
    check->add_option("problem", check_args.problem_path, "problem JSON path")
        ->required();
    check->add_option("--directions", check_args.directions,
                      "finite difference directions");
    check->add_option("--fd-step", check_args.fd_step, "finite difference step");
    check->add_option("--grad-check-tol", check_args.grad_check_tol,
                      "max relative gradient error");
    check->add_option("--truth-tol", check_args.truth_tol,
                      "relative tolerance against stored f_star");
    check->add_option("--seed", check_args.seed, "probe seed");

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "run strategy x seed grid");
    bench->add_option("problem", bench_args.problem_path, "problem JSON path")
        ->required();
    bench->add_option("--strategies", bench_args.strategies, "strategy names");
    bench->add_option("--seeds", bench_args.seeds, "one run per seed");
    bench->add_option("--eps", bench_args.eps, "gradient norm tolerance");
    bench->add_option("--max-sweeps", bench_args.max_sweeps, "sweep budget");
    bench->add_option("--summary", bench_args.summary_path, "summary CSV path");

    try {
        app.parse(argc, argv);
        if (gen->parsed()) return run_generate(gen_args);
        if (solve->parsed()) return run_solve(solve_args);
        if (check->parsed()) return run_check(check_args);
        if (bench->parsed()) return run_bench(bench_args);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
