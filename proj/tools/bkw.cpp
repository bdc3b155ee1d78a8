#include "bkw/estimate.hpp"
#include "bkw/gen.hpp"
#include "bkw/io.hpp"
#include "bkw/lattice.hpp"
#include "bkw/reduce.hpp"
#include "bkw/solve.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

using namespace bkw;

namespace {

// Exit codes: 0 success, 2 infeasible parameters, 3 solver failure, 4 I/O.
constexpr int kOk = 0, kInfeasible = 2, kSolverFailure = 3, kIoError = 4;

NoiseModel parse_noise(double sigma, double p, std::int64_t q) {
    if (p > 0.0) {
        if (q != 2) throw std::runtime_error("Bernoulli noise requires q = 2");
        return Bernoulli{p};
    }
    if (sigma > 0.0) return DiscreteGaussian{sigma};
    return Exact{};
}

SecretModel parse_secret(const std::string& spec, std::size_t n) {
    if (spec == "uniform") return SecretUniform{};
    if (spec == "binary") return SecretBinary{};
    if (spec.rfind("bounded:", 0) == 0) {
        std::int64_t B = std::stoll(spec.substr(8));
        return SecretBoundedPerCoordinate{std::vector<std::int64_t>(n, B)};
    }
    throw std::runtime_error("unknown secret model: " + spec);
}

std::vector<std::int64_t> secret_bounds(const SecretModel& secret, std::size_t n,
                                        std::int64_t q, double sigma) {
    if (std::holds_alternative<SecretBinary>(secret)) return std::vector<std::int64_t>(n, 1);
    if (const auto* b = std::get_if<SecretBoundedPerCoordinate>(&secret)) return b->B;
    if (std::holds_alternative<SecretRoundedNoise>(secret))
        return std::vector<std::int64_t>(
            n, std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(6.0 * sigma))));
    return std::vector<std::int64_t>(n, q / 2);
}

// Serializes the fully resolved configuration next to the outputs.
void dump_config(const std::string& out, const Config& cfg) {
    if (!out.empty()) write_config_file(out + ".config", cfg);
}

ReductionPlan plan_from_file(const std::string& path, std::size_t n, std::int64_t q) {
    Config cfg = read_config_file(path);
    ReductionPlan p;
    p.k = std::stoul(cfg.at("k"));
    {
        std::istringstream ds(cfg.at("d"));
        std::size_t v;
        while (ds >> v) p.d.push_back(v);
    }
    {
        std::istringstream Ds(cfg.at("D"));
        double v;
        while (Ds >> v) p.D.push_back(v);
    }
    p.m = cfg.count("m") ? std::stod(cfg.at("m")) : 0.0;
    p.x = cfg.count("x") ? std::stod(cfg.at("x")) : 0.0;
    p.predicted_final_bias = cfg.count("bias") ? std::stod(cfg.at("bias")) : 0.05;
    p.validate(n, q);
    return p;
}

// Automatic desk-scale plan for the FindSecret pipeline: trailing FFT block
// sized by the cell cap, uniform small D on the reduced blocks.
ReductionPlan auto_plan(std::size_t n, std::int64_t q, double sigma, std::int64_t B,
                        std::size_t m, std::size_t fft_cells) {
    const double log2q = std::log2(static_cast<double>(q));
    std::size_t w = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::log2(static_cast<double>(fft_cells)) / log2q));
    w = std::min(w, n);
    // Reduced blocks sized so collisions are plentiful at budget m.
    std::size_t k = (n + w - 1) / w;
    ReductionPlan p;
    p.k = k;
    p.d.push_back(0);
    for (std::size_t i = 1; i <= k; ++i) p.d.push_back(std::min(i * w, n));
    // Match the quantization-noise budget to the error term (or a mild floor
    // when the noise is tiny), split evenly across blocks.
    double Es2 = std::max(0.5, static_cast<double>(B) * static_cast<double>(B) / 3.0);
    double err_part = std::pow(2.0, static_cast<double>(k)) * sigma * sigma;
    double budget = std::max(err_part, 0.02 * static_cast<double>(q) * static_cast<double>(q) /
                                           (4.0 * M_PI * M_PI));
    double D = std::sqrt(budget) /
               (2.0 * M_PI *
                std::sqrt(Es2 * static_cast<double>(w) * std::pow(2.0, static_cast<double>(k))));
    D = std::max(1.0, std::min(D, static_cast<double>(q)));
    p.D.assign(k, D);
    p.m = static_cast<double>(m);
    p.predicted_final_bias =
        std::exp(-2.0 * M_PI * M_PI * (2.0 * err_part) / (static_cast<double>(q) * static_cast<double>(q)));
    p.validate(n, q);
    return p;
}

int cmd_gen(std::size_t n, std::int64_t q, double sigma, double p, const std::string& secret_spec,
            std::size_t m, std::uint64_t seed, const std::string& out, bool uniform) {
    LweParams params;
    params.n = n;
    params.q = q;
    params.noise = parse_noise(sigma, p, q);
    params.secret = parse_secret(secret_spec, n);
    params.validate();
    Rng rng(seed);
    SampleList list = [&] {
        if (uniform) return sample_uniform(params, m, rng);
        auto s = sample_secret(params, rng);
        write_key_file(out + ".key", s);
        return sample_lwe(params, s, m, rng);
    }();
    write_samples_file(out, list);
    Config cfg{{"n", std::to_string(n)},   {"q", std::to_string(q)},
               {"sigma", std::to_string(sigma)}, {"p", std::to_string(p)},
               {"secret", secret_spec},    {"m", std::to_string(m)},
               {"seed", std::to_string(seed)}, {"uniform", uniform ? "1" : "0"}};
    dump_config(out, cfg);
    std::cout << "wrote " << m << " samples to " << out << "\n";
    return kOk;
}

int cmd_solve(const std::string& in, const std::string& plan_spec, const std::string& mode,
              double sigma, const std::string& secret_spec, std::uint64_t seed, unsigned threads,
              bool greedy, const std::string& out) {
    SampleList list = read_samples_file(in);
    const std::size_t n = list.dim();
    const std::int64_t q = list.q();

    SecretModel secret = parse_secret(secret_spec, n);
    auto B = secret_bounds(secret, n, q, sigma);

    ReductionPlan pl;
    if (plan_spec == "auto") {
        pl = auto_plan(n, q, sigma, B[0], list.size(), 1u << 21);
    } else {
        pl = plan_from_file(plan_spec, n, q);
    }
    (void)mode;
    (void)seed;

    SolveOptions opts;
    opts.greedy = greedy;
    opts.threads = threads;
    opts.on_step = [](const StepDiag& d) {
        std::cout << diag_json_line(d.step, d.size, d.bias_re, d.bias_pred, d.ms) << "\n";
    };

    auto started = std::chrono::steady_clock::now();
    auto res = solve_lwe(list, pl, Finisher::FindSecretOnLastBlock, opts);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    const auto& rec = std::get<RecoveredSecret>(res);
    std::ostringstream os;
    for (std::size_t i = 0; i < rec.s.size(); ++i) os << (i ? " " : "") << rec.s[i];
    std::cout << "{\"secret\":\"" << os.str() << "\",\"score\":" << rec.score
              << ",\"seconds\":" << secs << "}\n";
    if (!out.empty()) {
        write_key_file(out, rec.s);
    }
    return kOk;
}

int cmd_distinguish(const std::string& in, double bias_floor) {
    SampleList list = read_samples_file(in);
    Verdict v = distinguish(list.b_values(), list.q(), bias_floor);
    std::cout << "{\"verdict\":\"" << (v.is_lwe() ? "lwe" : "uniform")
              << "\",\"statistic\":" << v.statistic << ",\"threshold\":" << v.threshold << "}\n";
    return kOk;
}

int cmd_estimate(const std::string& what, const std::string& out, const std::string& knob_spec) {
    CostModelKnobs knobs = CostModelKnobs::reasonable();
    if (knob_spec == "optimistic") knobs = CostModelKnobs::optimistic();
    else if (knob_spec == "pessimistic") knobs = CostModelKnobs::pessimistic();
    else if (knob_spec != "reasonable") throw std::runtime_error("unknown knobs: " + knob_spec);

    std::ostringstream os;
    if (what == "regev") {
        std::vector<std::pair<std::size_t, std::int64_t>> sets;
        for (const auto& r : kRegevTable) sets.emplace_back(r.n, r.q);
        write_cost_csv(os, bkw_report_regev(sets, SecretKind::SwitchedGaussian));
    } else if (what == "contours") {
        write_contour_csv(os, emit_contours(ContourGrid{}, knobs));
    } else {
        throw std::runtime_error("unknown estimate target: " + what);
    }
    if (out.empty()) std::cout << os.str();
    else atomic_write_file(out, os.str());
    return kOk;
}

int cmd_subsetsum(std::size_t n, std::uint64_t mbits, std::uint64_t seed, std::int64_t q) {
    Rng rng(seed);
    std::vector<Int> a(n);
    for (auto& ai : a) {
        Int v = 0;
        for (std::uint64_t b = 0; b < mbits; b += 32)
            v = (v << 32) | Int(rng.below(1ull << std::min<std::uint64_t>(32, mbits - b)));
        a[&ai - a.data()] = v;
    }
    std::vector<int> planted(n);
    for (auto& si : planted) si = static_cast<int>(rng.below(2));
    Int t = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (planted[i]) t += a[i];

    SubsetSumConfig cfg;
    cfg.q = q;
    cfg.rng_seed = seed + 1;
    auto s = solve_subset_sum(a, t, cfg);
    std::cout << "{\"solved\":true,\"matches_planted\":" << (s == planted ? "true" : "false")
              << "}\n";
    return kOk;
}

// Norm-computation throughput over 16-bit fixed point, the experiment's
// dominating kernel.
int cmd_bench(std::size_t dim, std::size_t reps, unsigned threads) {
    std::vector<std::int16_t> data(dim * 1024);
    Rng rng(42);
    for (auto& v : data) v = static_cast<std::int16_t>(rng.below(1 << 12));
    auto worker = [&](std::size_t rep_count, std::uint64_t& sink) {
        std::uint64_t acc = 0;
        for (std::size_t r = 0; r < rep_count; ++r) {
            for (std::size_t i = 0; i + dim <= data.size(); i += dim) {
                std::uint32_t norm = 0;
                for (std::size_t j = 0; j < dim; ++j) {
                    std::int32_t x = data[i + j];
                    norm += static_cast<std::uint32_t>(x * x);
                }
                acc += norm;
            }
        }
        sink = acc;
    };
    auto t0 = std::chrono::steady_clock::now();
    std::vector<std::uint64_t> sinks(threads, 0);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] { worker(reps, sinks[t]); });
    for (auto& th : pool) th.join();
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    double norms = static_cast<double>(reps) * threads * (data.size() / dim);
    std::uint64_t sink = 0;
    for (auto s : sinks) sink ^= s;
    std::cout << "{\"dim\":" << dim << ",\"norms_per_second\":" << norms / secs
              << ",\"threads\":" << threads << ",\"checksum\":" << (sink & 0xff) << "}\n";
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantized-BKW cryptanalysis toolkit"};
    app.require_subcommand(1);

    std::size_t n = 32, m = 1 << 16, mbits = 32, bench_dim = 16, bench_reps = 4096;
    std::int64_t q = 1031;
    double sigma = 0.0, p = 0.0, bias_floor = 0.1;
    std::string secret_spec = "binary", out, in, plan_spec = "auto", mode = "general",
                knob_spec = "reasonable", target = "regev";
    std::uint64_t seed = 1;
    unsigned threads = 1;
    bool uniform = false, greedy = false;

    auto* g = app.add_subcommand("gen", "generate an LWE/uniform sample file");
    g->add_option("--n", n);
    g->add_option("--q", q);
    g->add_option("--sigma", sigma);
    g->add_option("--p", p);
    g->add_option("--secret", secret_spec);
    g->add_option("--m", m);
    g->add_option("--seed", seed);
    g->add_option("--out", out)->required();
    g->add_flag("--uniform", uniform);

    auto* s = app.add_subcommand("solve", "run the reduction pipeline and recover the secret");
    s->add_option("--in", in)->required();
    s->add_option("--plan", plan_spec);
    s->add_option("--mode", mode);
    s->add_option("--sigma", sigma);
    s->add_option("--secret", secret_spec);
    s->add_option("--seed", seed);
    s->add_option("--threads", threads);
    s->add_flag("--greedy", greedy);
    s->add_option("--out", out);

    auto* dz = app.add_subcommand("distinguish", "decision test on a sample file");
    dz->add_option("--in", in)->required();
    dz->add_option("--bias", bias_floor);

    auto* e = app.add_subcommand("estimate", "cost tables and contour grids");
    e->add_option("--what", target)->check(CLI::IsMember({"regev", "contours"}));
    e->add_option("--knobs", knob_spec)
        ->check(CLI::IsMember({"optimistic", "reasonable", "pessimistic"}));
    e->add_option("--out", out);

    auto* ss = app.add_subcommand("subsetsum", "plant and solve a subset-sum instance");
    ss->add_option("--n", n);
    ss->add_option("--bits", mbits);
    ss->add_option("--seed", seed);
    ss->add_option("--q", q);

    auto* b = app.add_subcommand("bench", "fixed-point norm throughput");
    b->add_option("--dim", bench_dim);
    b->add_option("--reps", bench_reps);
    b->add_option("--threads", threads);

    CLI11_PARSE(app, argc, argv);

    try {
        if (g->parsed()) return cmd_gen(n, q, sigma, p, secret_spec, m, seed, out, uniform);
        if (s->parsed()) return cmd_solve(in, plan_spec, mode, sigma, secret_spec, seed, threads,
                                          greedy, out);
        if (dz->parsed()) return cmd_distinguish(in, bias_floor);
        if (e->parsed()) return cmd_estimate(target, out, knob_spec);
        if (ss->parsed()) return cmd_subsetsum(n, mbits, seed, q);
        if (b->parsed()) return cmd_bench(bench_dim, bench_reps, threads);
    } catch (const std::ios_base::failure& ex) {
        std::cerr << "io error: " << ex.what() << "\n";
        return kIoError;
    } catch (const std::runtime_error& ex) {
        std::string msg = ex.what();
        std::cerr << "error: " << msg << "\n";
        if (msg.find("cannot open") != std::string::npos ||
            msg.find("sample file") != std::string::npos || msg.find("rename") != std::string::npos)
            return kIoError;
        if (msg.find("infeasible") != std::string::npos ||
            msg.find("no admissible") != std::string::npos ||
            msg.find("below") != std::string::npos)
            return kInfeasible;
        return kSolverFailure;
    }
    return kOk;
}
