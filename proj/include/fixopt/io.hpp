#pragma once

#include "harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fixopt {

using json = nlohmann::json;

/// Shortest-safe decimal form: 17 significant digits round-trips any double.
inline std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kTraceHeader = "n,D_n,F_n,alpha_n,inner_n,cum_time_s";
inline constexpr const char* kSummaryHeader = "event,threshold,n,time_s,value,mean_run_n,runs_crossed";

inline void write_trace_csv(const EnsembleReport& rep, std::ostream& os)
{
    os << kTraceHeader << '\n';
    for (const auto& r : rep.rows) {
        os << r.n << ',' << format_number(r.D) << ',' << format_number(r.F) << ','
           << format_number(r.alpha) << ',' << format_number(r.inner) << ',' << format_number(r.time_s)
           << '\n';
    }
}

/// One row per event; `n` and `value` are NA when the averaged series never crossed.
inline void write_summary_csv(const EnsembleReport& rep, std::ostream& os)
{
    os << kSummaryHeader << '\n';
    for (const auto& e : rep.events) {
        os << e.name << ',' << format_number(e.threshold) << ',';
        if (e.n)
            os << *e.n << ',' << format_number(e.time_s) << ',' << format_number(e.value);
        else
            os << "NA,NA,NA";
        os << ',' << (e.mean_run_n ? format_number(*e.mean_run_n) : std::string("NA")) << ','
           << e.runs_crossed << '\n';
    }
}

struct CsvPaths
{
    std::filesystem::path trace;
    std::filesystem::path summary;
};

/// Writes trace.csv and summary.csv into `dir` (created if missing).
inline CsvPaths emit_csv(const EnsembleReport& rep, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    CsvPaths paths{dir / "trace.csv", dir / "summary.csv"};
    auto open = [](const std::filesystem::path& p) {
        std::ofstream os(p, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + p.string());
        return os;
    };
    {
        auto os = open(paths.trace);
        write_trace_csv(rep, os);
        if (!os) throw std::runtime_error("write failed: " + paths.trace.string());
    }
    {
        auto os = open(paths.summary);
        write_summary_csv(rep, os);
        if (!os) throw std::runtime_error("write failed: " + paths.summary.string());
    }
    return paths;
}

// ---------------------------------------------------------------------------
// experiment configuration

inline json to_json(const ExperimentConfig& c)
{
    json j = {
        {"d", c.d},
        {"I", c.I},
        {"K", c.K},
        {"objective", std::string(to_string(c.objective))},
        {"algorithm", std::string(to_string(c.algorithm))},
        {"sampler", std::string(to_string(c.sampler))},
        {"schedule",
         {{"a", c.schedule.a},
          {"b", c.schedule.b},
          {"scale_alpha", c.schedule.scale_alpha},
          {"scale_inner", c.schedule.scale_inner}}},
        {"samplings", c.samplings},
        {"n_max", c.n_max},
        {"d_threshold", c.d_threshold},
        {"f_delta_threshold", c.f_delta_threshold},
        {"master_seed", c.master_seed},
        {"projected", c.projected},
    };
    if (c.markov_seed) j["markov_seed"] = *c.markov_seed;
    return j;
}

/// Missing keys keep their defaults; unknown keys are rejected.
inline ExperimentConfig config_from_json(const json& j)
{
    static const std::vector<std::string> known = {
        "d", "I", "K", "objective", "algorithm", "sampler", "markov_seed", "schedule", "samplings",
        "n_max", "d_threshold", "f_delta_threshold", "master_seed", "projected"};
    if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
    for (const auto& [key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw std::invalid_argument("config: unknown field '" + key + "'");

    ExperimentConfig c;
    auto get = [&j](const char* key, auto& out) {
        if (j.contains(key)) j.at(key).get_to(out);
    };
    get("d", c.d);
    get("I", c.I);
    get("K", c.K);
    if (j.contains("objective")) c.objective = parse_objective_kind(j.at("objective").get<std::string>());
    if (j.contains("algorithm")) c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    if (j.contains("sampler")) c.sampler = parse_sampler_kind(j.at("sampler").get<std::string>());
    if (j.contains("markov_seed")) c.markov_seed = j.at("markov_seed").get<std::uint64_t>();
    if (j.contains("schedule")) {
        const auto& s = j.at("schedule");
        for (const auto& [key, _] : s.items())
            if (key != "a" && key != "b" && key != "scale_alpha" && key != "scale_inner")
                throw std::invalid_argument("config: unknown schedule field '" + key + "'");
        if (s.contains("a")) s.at("a").get_to(c.schedule.a);
        if (s.contains("b")) s.at("b").get_to(c.schedule.b);
        if (s.contains("scale_alpha")) s.at("scale_alpha").get_to(c.schedule.scale_alpha);
        if (s.contains("scale_inner")) s.at("scale_inner").get_to(c.schedule.scale_inner);
    }
    get("samplings", c.samplings);
    get("n_max", c.n_max);
    get("d_threshold", c.d_threshold);
    get("f_delta_threshold", c.f_delta_threshold);
    get("master_seed", c.master_seed);
    get("projected", c.projected);
    return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config " + path.string());
    return config_from_json(json::parse(is));
}

// ---------------------------------------------------------------------------
// problem instances

namespace detail {

inline json vec_to_json(const Eigen::VectorXd& v)
{
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

inline Eigen::VectorXd vec_from_json(const json& j)
{
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline json ball_to_json(const Ball& b)
{
    return {{"center", vec_to_json(b.center())}, {"radius", b.radius()}};
}

inline Ball ball_from_json(const json& j)
{
    return Ball(vec_from_json(j.at("center")), j.at("radius").get<double>());
}

inline json operator_to_json(const Operator& op)
{
    return std::visit(
        [](const auto& n) -> json {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, Operator::Identity>) {
                return {{"type", "identity"}};
            } else if constexpr (std::is_same_v<N, Operator::BallProjection>) {
                return {{"type", "ball_projection"}, {"ball", ball_to_json(n.ball)}};
            } else if constexpr (std::is_same_v<N, Operator::GcfsComposite>) {
                json inner = json::array();
                for (const auto& b : n.inner) inner.push_back(ball_to_json(b));
                return {{"type", "gcfs_composite"}, {"outer", ball_to_json(n.outer)}, {"inner", inner}};
            } else {
                return {{"type", "half_averaged"}, {"inner", operator_to_json(*n.inner)}};
            }
        },
        op.node());
}

inline Operator operator_from_json(const json& j)
{
    const auto type = j.at("type").get<std::string>();
    if (type == "identity") return Operator::identity();
    if (type == "ball_projection") return Operator::ball_projection(ball_from_json(j.at("ball")));
    if (type == "gcfs_composite") {
        std::vector<Ball> inner;
        for (const auto& b : j.at("inner")) inner.push_back(ball_from_json(b));
        return Operator::gcfs_composite(ball_from_json(j.at("outer")), std::move(inner));
    }
    if (type == "half_averaged") return Operator::half_averaged(operator_from_json(j.at("inner")));
    throw std::invalid_argument("unknown operator type '" + type + "'");
}

inline json function_to_json(const ConvexFunction& f)
{
    if (const auto* q = std::get_if<ConvexFunction::DiagQuadratic>(&f.form()))
        return {{"type", "quadratic"}, {"diag", vec_to_json(q->diag)}, {"linear", vec_to_json(q->linear)}};
    const auto& l = std::get<ConvexFunction::WeightedL1>(f.form());
    return {{"type", "weighted_l1"}, {"weights", vec_to_json(l.weights)}, {"anchor", vec_to_json(l.anchor)}};
}

inline ConvexFunction function_from_json(const json& j)
{
    const auto type = j.at("type").get<std::string>();
    if (type == "quadratic")
        return ConvexFunction::diag_quadratic(vec_from_json(j.at("diag")), vec_from_json(j.at("linear")));
    if (type == "weighted_l1")
        return ConvexFunction::weighted_l1(vec_from_json(j.at("weights")), vec_from_json(j.at("anchor")));
    throw std::invalid_argument("unknown objective type '" + type + "'");
}

} // namespace detail

/// Self-describing document: d, I, K, objective kind, bounding ball and every
/// component. K is the inner ball count of the first component, 0 if it is
/// not a composite operator.
inline json problem_to_json(const ProblemInstance& p)
{
    std::size_t K = 0;
    if (const auto* g = std::get_if<Operator::GcfsComposite>(&p[0].mapping.node())) K = g->inner.size();
    json comps = json::array();
    for (const auto& c : p.components())
        comps.push_back({{"objective", detail::function_to_json(c.objective)},
                         {"operator", detail::operator_to_json(c.mapping)}});
    return {{"d", p.dim()},
            {"I", p.size()},
            {"K", K},
            {"objective", p.smooth() ? "quadratic" : "weighted_l1"},
            {"bounding_ball", detail::ball_to_json(p.bounding_ball())},
            {"components", comps}};
}

inline ProblemInstance problem_from_json(const json& j)
{
    std::vector<Component> comps;
    for (const auto& c : j.at("components"))
        comps.push_back({detail::function_from_json(c.at("objective")), detail::operator_from_json(c.at("operator"))});
    ProblemInstance p(std::move(comps), detail::ball_from_json(j.at("bounding_ball")));
    if (j.at("d").get<Eigen::Index>() != p.dim() || j.at("I").get<std::size_t>() != p.size())
        throw std::invalid_argument("problem: header d/I disagree with the components");
    return p;
}

// ---------------------------------------------------------------------------
// benchmark grid

struct GridEntry
{
    SamplerKind sampler;
    char pair_label; ///< 'A' or 'B'
    EnsembleReport report;
};

/// The two exponent pairs of the benchmark grid.
inline std::vector<std::pair<char, ScheduleParams>> benchmark_pairs(const ScheduleParams& base)
{
    ScheduleParams A = base, B = base;
    A.a = 0.25;
    A.b = 0.5;
    B.a = 0.125;
    B.b = 0.75;
    return {{'A', A}, {'B', B}};
}

/// Runs every sampler x exponent-pair combination of `base`.
inline std::vector<GridEntry> run_grid(const ExperimentConfig& base, unsigned workers = 1)
{
    std::vector<GridEntry> out;
    for (SamplerKind s : {SamplerKind::iid, SamplerKind::greedy, SamplerKind::perm, SamplerKind::markov}) {
        for (const auto& [label, params] : benchmark_pairs(base.schedule)) {
            ExperimentConfig cfg = base;
            cfg.sampler = s;
            cfg.schedule = params;
            out.push_back({s, label, run_experiment(cfg, workers)});
        }
    }
    return out;
}

inline std::string format_table(const std::vector<GridEntry>& grid)
{
    if (grid.empty()) return {};
    const auto& c0 = grid.front().report.config;
    char buf[256], d_thr[32], f_thr[32];
    std::snprintf(d_thr, sizeof d_thr, "%g", c0.d_threshold);
    std::snprintf(f_thr, sizeof f_thr, "%g", c0.f_delta_threshold);
    std::ostringstream os;
    std::snprintf(buf, sizeof buf, "%-22s | %29s | %29s | %21s\n", "", (std::string("D_n <= ") + d_thr).c_str(),
                  (std::string("|F_n - F_n-1| <= ") + f_thr).c_str(),
                  ("n = " + std::to_string(c0.n_max)).c_str());
    os << buf;
    std::snprintf(buf, sizeof buf, "%-22s | %6s %11s %10s | %6s %11s %10s | %10s %10s\n", "", "n",
                  "time [s]", "D_n", "n", "time [s]", "F_n", "time [s]", "F_n");
    os << buf << std::string(111, '-') << '\n';
    for (const auto& g : grid) {
        const auto& cfg = g.report.config;
        std::string label = std::string(to_string(cfg.algorithm)) + " " + std::string(to_string(g.sampler)) +
                            " (" + g.pair_label + ")";
        auto cell = [&](const CrossingEvent& e) {
            char c[64];
            if (e.n)
                std::snprintf(c, sizeof c, "%6zu %11.6f %10.6f", *e.n, e.time_s, e.value);
            else
                std::snprintf(c, sizeof c, "%6s %11s %10s", (">" + std::to_string(cfg.n_max)).c_str(), "---",
                              "---");
            return std::string(c);
        };
        const auto& ev = g.report.events;
        std::snprintf(buf, sizeof buf, "%-22s | %s | %s | %10.6f %10.6f\n", label.c_str(), cell(ev[0]).c_str(),
                      cell(ev[1]).c_str(), ev[2].time_s, ev[2].value);
        os << buf;
    }
    return os.str();
}

} // namespace fixopt
