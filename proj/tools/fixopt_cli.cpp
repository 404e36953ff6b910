#include <fixopt/io.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <thread>

using namespace fixopt;

namespace {

int cmd_run(const std::string& config_path, const std::string& out_dir, unsigned workers)
{
    const auto cfg = load_config(config_path);
    const auto rep = run_experiment(cfg, workers);
    const auto paths = emit_csv(rep, out_dir);

    json meta = {{"config", to_json(cfg)},
                 {"f_distribution", rep.f_distribution},
                 {"crossings", "computed on the ensemble-averaged D_n / F_n series"},
                 {"problem_seed", rep.problem_seed},
                 {"run_seeds", rep.run_seeds}};
    std::ofstream(std::filesystem::path(out_dir) / "metadata.json") << meta.dump(2) << '\n';

    std::cout << "wrote " << paths.trace.string() << " and " << paths.summary.string() << '\n';
    for (const auto& e : rep.events) {
        std::cout << "  " << e.name << ": ";
        if (e.n)
            std::cout << "n=" << *e.n << " value=" << format_number(e.value);
        else
            std::cout << "not reached by n=" << cfg.n_max;
        std::cout << '\n';
    }
    return 0;
}

int cmd_validate(double a, double b, const std::string& algorithm)
{
    const Algorithm alg = parse_algorithm(algorithm);
    const auto violations = StepSchedule(a, b).validate(alg);
    if (violations.empty()) {
        std::cout << "ok: (a, b) = (" << a << ", " << b << ") is admissible for " << algorithm << '\n';
        return 0;
    }
    std::cout << "rejected: (a, b) = (" << a << ", " << b << ") for " << algorithm << '\n';
    for (const auto& v : violations) std::cout << "  - " << v.message << '\n';
    return 1;
}

int cmd_gen(std::uint64_t seed, std::size_t d, std::size_t I, std::size_t K, const std::string& objective,
            const std::string& out)
{
    const auto p = generate_problem(seed, d, I, K, parse_objective_kind(objective));
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot write " + out);
    os << problem_to_json(p).dump(1) << '\n';
    std::cout << "wrote " << out << '\n';
    return 0;
}

int cmd_table(const std::string& config_path, unsigned workers)
{
    const auto cfg = load_config(config_path);
    std::cout << format_table(run_grid(cfg, workers));
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Stochastic fixed-point constrained optimization: Halpern-type gradient and proximal engines"};
    app.require_subcommand(1);

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());

    std::string config_path, out_dir = "out";
    unsigned workers = hw;
    auto* run = app.add_subcommand("run", "Run one experiment and write trace/summary CSV");
    run->add_option("--config", config_path, "Experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory")->capture_default_str();
    run->add_option("--workers", workers, "Concurrent runs")->check(CLI::PositiveNumber);

    double a = 0, b = 0;
    std::string algorithm;
    auto* validate = app.add_subcommand("validate", "Check a power-law step-size pair");
    validate->add_option("--a", a, "Exponent of the inner step (lambda_n / gamma_n)")->required();
    validate->add_option("--b", b, "Exponent of alpha_n")->required();
    validate->add_option("--algorithm", algorithm, "gradient | proximal")
        ->required()
        ->check(CLI::IsMember({"gradient", "proximal"}));

    std::uint64_t seed = 0;
    std::size_t d = 0, I = 0, K = 0;
    std::string objective, out_file;
    auto* gen = app.add_subcommand("gen", "Generate and serialize a random problem instance");
    gen->add_option("--seed", seed)->required();
    gen->add_option("--d", d)->required()->check(CLI::PositiveNumber);
    gen->add_option("--i", I)->required()->check(CLI::PositiveNumber);
    gen->add_option("--k", K)->required()->check(CLI::PositiveNumber);
    gen->add_option("--objective", objective)->required()->check(CLI::IsMember({"quadratic", "weighted_l1"}));
    gen->add_option("--out", out_file)->required();

    auto* table = app.add_subcommand("table", "Run the sampler x exponent-pair grid and print a table");
    table->add_option("--config", config_path, "Base configuration (JSON)")->required()->check(CLI::ExistingFile);
    table->add_option("--workers", workers, "Concurrent runs")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config_path, out_dir, workers);
        if (*validate) return cmd_validate(a, b, algorithm);
        if (*gen) return cmd_gen(seed, d, I, K, objective, out_file);
        if (*table) return cmd_table(config_path, workers);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
