#pragma once

// Experiment configuration: a single JSON document describing the system
// (interval, horizon, boundary rows, coupling operator), the truncation, the
// numerical tolerances and grids, the initial/target coefficient states, and
// the solver options.  Complex numbers are [re, im] pairs.  Parsing validates
// every field with a field-level message before any computation runs, and
// serialization emits a canonical normalized form so that
// serialize(parse(text)) is idempotent.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "wavectl/errors.hpp"
#include "wavectl/moment_solver.hpp"
#include "wavectl/spectral_bvp.hpp"

namespace wavectl {

struct ExperimentConfig {
    double a = 0.0;  // interval length
    double T = 0.0;  // control horizon

    cplx alpha1{}, beta1{}, alpha2{}, beta2{};  // boundary rows

    Eigen::MatrixXd coupling;  // N x N symmetric
    Eigen::VectorXd b;         // control direction, length N
    int K = 0;                 // spatial truncation

    double tol_rank = 1e-10;        // Kalman rank threshold
    double tol_distinct = 1e-8;     // eigenvalue distinctness
    double tol_quadrature = 1e-10;  // quadrature self-checks
    double tol_solver = 1e-6;       // verification residual gate

    double dx = 0.0;     // FD oracle spatial step; cells = round(a / dx)
    double dt = 0.0;     // FD oracle time step; must satisfy dt <= dx
    int samples = 4096;  // series simulation time steps

    Eigen::MatrixXcd initial_a, initial_ap;  // K x N, zero when omitted
    Eigen::MatrixXcd target_a, target_ap;    // K x N, zero when omitted

    SolveMode mode = SolveMode::Direct;
    double ridge = 0.0;
    int taper_order = 0;
    double cond_cap = 1e12;

    unsigned seed = 0;  // randomized diagnostics

    int N() const { return static_cast<int>(coupling.rows()); }
};

namespace detail {

inline const nlohmann::json& need(const nlohmann::json& j,
                                  const std::string& key,
                                  const std::string& where) {
    if (!j.is_object() || !j.contains(key))
        throw ConfigError(where + key + ": missing required field");
    return j.at(key);
}

inline double need_number(const nlohmann::json& j, const std::string& field) {
    if (!j.is_number())
        throw ConfigError(field + ": expected a number");
    return j.get<double>();
}

inline double need_positive(const nlohmann::json& j,
                            const std::string& field) {
    const double v = need_number(j, field);
    if (!(v > 0.0)) throw ConfigError(field + ": must be positive");
    return v;
}

inline int need_int(const nlohmann::json& j, const std::string& field) {
    if (!j.is_number_integer())
        throw ConfigError(field + ": expected an integer");
    return j.get<int>();
}

inline cplx need_complex(const nlohmann::json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() ||
        !j[1].is_number())
        throw ConfigError(field + ": complex values are [re, im] pairs");
    return cplx(j[0].get<double>(), j[1].get<double>());
}

inline Eigen::MatrixXcd parse_state_block(const nlohmann::json& j, int K,
                                          int N, const std::string& field) {
    if (!j.is_array() || static_cast<int>(j.size()) != K)
        throw ConfigError(field + ": expected " + std::to_string(K) +
                          " rows of " + std::to_string(N) + " [re, im] pairs");
    Eigen::MatrixXcd out(K, N);
    for (int k = 0; k < K; ++k) {
        const auto& row = j[static_cast<size_t>(k)];
        if (!row.is_array() || static_cast<int>(row.size()) != N)
            throw ConfigError(field + "[" + std::to_string(k) + "]: expected " +
                              std::to_string(N) + " [re, im] pairs");
        for (int l = 0; l < N; ++l)
            out(k, l) = need_complex(row[static_cast<size_t>(l)],
                                     field + "[" + std::to_string(k) + "][" +
                                         std::to_string(l) + "]");
    }
    return out;
}

inline nlohmann::json dump_complex(const cplx& z) {
    return nlohmann::json::array({z.real(), z.imag()});
}

inline nlohmann::json dump_state_block(const Eigen::MatrixXcd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.rows(); ++k) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index l = 0; l < m.cols(); ++l)
            row.push_back(dump_complex(m(k, l)));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");

    ExperimentConfig cfg;
    cfg.a = detail::need_positive(detail::need(j, "a", ""), "a");
    cfg.T = detail::need_positive(detail::need(j, "T", ""), "T");

    const auto& bnd = detail::need(j, "boundary", "");
    cfg.alpha1 = detail::need_complex(detail::need(bnd, "alpha1", "boundary."),
                                      "boundary.alpha1");
    cfg.beta1 = detail::need_complex(detail::need(bnd, "beta1", "boundary."),
                                     "boundary.beta1");
    cfg.alpha2 = detail::need_complex(detail::need(bnd, "alpha2", "boundary."),
                                      "boundary.alpha2");
    cfg.beta2 = detail::need_complex(detail::need(bnd, "beta2", "boundary."),
                                     "boundary.beta2");

    const auto& cj = detail::need(j, "coupling", "");
    if (!cj.is_array() || cj.empty())
        throw ConfigError("coupling: expected a nonempty array of rows");
    const int n = static_cast<int>(cj.size());
    cfg.coupling.resize(n, n);
    for (int r = 0; r < n; ++r) {
        const auto& row = cj[static_cast<size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw ConfigError("coupling[" + std::to_string(r) +
                              "]: matrix must be square (" +
                              std::to_string(n) + " entries per row)");
        for (int c = 0; c < n; ++c)
            cfg.coupling(r, c) = detail::need_number(
                row[static_cast<size_t>(c)],
                "coupling[" + std::to_string(r) + "][" + std::to_string(c) +
                    "]");
    }

    const auto& bj = detail::need(j, "b", "");
    if (!bj.is_array() || static_cast<int>(bj.size()) != n)
        throw ConfigError("b: expected " + std::to_string(n) + " numbers");
    cfg.b.resize(n);
    for (int r = 0; r < n; ++r)
        cfg.b(r) = detail::need_number(bj[static_cast<size_t>(r)],
                                       "b[" + std::to_string(r) + "]");

    cfg.K = detail::need_int(detail::need(j, "K", ""), "K");
    if (cfg.K < 1) throw ConfigError("K: must be at least 1");

    if (j.contains("tolerances")) {
        const auto& tj = j.at("tolerances");
        if (!tj.is_object()) throw ConfigError("tolerances: expected object");
        if (tj.contains("rank"))
            cfg.tol_rank = detail::need_positive(tj.at("rank"),
                                                 "tolerances.rank");
        if (tj.contains("distinct"))
            cfg.tol_distinct = detail::need_positive(tj.at("distinct"),
                                                     "tolerances.distinct");
        if (tj.contains("quadrature"))
            cfg.tol_quadrature = detail::need_positive(
                tj.at("quadrature"), "tolerances.quadrature");
        if (tj.contains("solver"))
            cfg.tol_solver = detail::need_positive(tj.at("solver"),
                                                   "tolerances.solver");
    }

    const auto& gj = detail::need(j, "grid", "");
    cfg.dx = detail::need_positive(detail::need(gj, "dx", "grid."), "grid.dx");
    cfg.dt = detail::need_positive(detail::need(gj, "dt", "grid."), "grid.dt");
    if (cfg.dt > cfg.dx * (1.0 + 1e-12))
        throw ConfigError("grid.dt: must not exceed grid.dx (stability cap)");
    if (gj.contains("samples")) {
        cfg.samples = detail::need_int(gj.at("samples"), "grid.samples");
        if (cfg.samples < 3)
            throw ConfigError("grid.samples: must be at least 3");
    }

    auto read_state = [&](const char* key, Eigen::MatrixXcd& pos,
                          Eigen::MatrixXcd& vel) {
        pos = Eigen::MatrixXcd::Zero(cfg.K, n);
        vel = Eigen::MatrixXcd::Zero(cfg.K, n);
        if (!j.contains(key)) return;
        const auto& sj = j.at(key);
        if (!sj.is_object())
            throw ConfigError(std::string(key) +
                              ": expected object with \"a\" and \"ap\"");
        if (sj.contains("a"))
            pos = detail::parse_state_block(sj.at("a"), cfg.K, n,
                                            std::string(key) + ".a");
        if (sj.contains("ap"))
            vel = detail::parse_state_block(sj.at("ap"), cfg.K, n,
                                            std::string(key) + ".ap");
    };
    read_state("initial", cfg.initial_a, cfg.initial_ap);
    read_state("target", cfg.target_a, cfg.target_ap);

    if (j.contains("solver")) {
        const auto& sj = j.at("solver");
        if (!sj.is_object()) throw ConfigError("solver: expected object");
        if (sj.contains("mode")) {
            const auto& mj = sj.at("mode");
            if (!mj.is_string())
                throw ConfigError("solver.mode: expected \"direct\" or \"edd\"");
            const std::string m = mj.get<std::string>();
            if (m == "direct")
                cfg.mode = SolveMode::Direct;
            else if (m == "edd")
                cfg.mode = SolveMode::Edd;
            else
                throw ConfigError("solver.mode: unknown mode \"" + m +
                                  "\" (use \"direct\" or \"edd\")");
        }
        if (sj.contains("ridge")) {
            cfg.ridge = detail::need_number(sj.at("ridge"), "solver.ridge");
            if (cfg.ridge < 0.0)
                throw ConfigError("solver.ridge: must be nonnegative");
        }
        if (sj.contains("taper_order")) {
            cfg.taper_order =
                detail::need_int(sj.at("taper_order"), "solver.taper_order");
            if (cfg.taper_order < 0 || cfg.taper_order > 2)
                throw ConfigError("solver.taper_order: must be 0, 1, or 2");
        }
        if (sj.contains("cond_cap"))
            cfg.cond_cap = detail::need_positive(sj.at("cond_cap"),
                                                 "solver.cond_cap");
    }

    if (j.contains("seed")) {
        const int s = detail::need_int(j.at("seed"), "seed");
        if (s < 0) throw ConfigError("seed: must be nonnegative");
        cfg.seed = static_cast<unsigned>(s);
    }
    return cfg;
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["a"] = cfg.a;
    j["T"] = cfg.T;
    j["boundary"] = {{"alpha1", detail::dump_complex(cfg.alpha1)},
                     {"beta1", detail::dump_complex(cfg.beta1)},
                     {"alpha2", detail::dump_complex(cfg.alpha2)},
                     {"beta2", detail::dump_complex(cfg.beta2)}};
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < cfg.coupling.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < cfg.coupling.cols(); ++c)
            row.push_back(cfg.coupling(r, c));
        rows.push_back(row);
    }
    j["coupling"] = rows;
    nlohmann::json bvec = nlohmann::json::array();
    for (Eigen::Index r = 0; r < cfg.b.size(); ++r) bvec.push_back(cfg.b(r));
    j["b"] = bvec;
    j["K"] = cfg.K;
    j["tolerances"] = {{"rank", cfg.tol_rank},
                       {"distinct", cfg.tol_distinct},
                       {"quadrature", cfg.tol_quadrature},
                       {"solver", cfg.tol_solver}};
    j["grid"] = {{"dx", cfg.dx}, {"dt", cfg.dt}, {"samples", cfg.samples}};
    j["initial"] = {{"a", detail::dump_state_block(cfg.initial_a)},
                    {"ap", detail::dump_state_block(cfg.initial_ap)}};
    j["target"] = {{"a", detail::dump_state_block(cfg.target_a)},
                   {"ap", detail::dump_state_block(cfg.target_ap)}};
    j["solver"] = {
        {"mode", cfg.mode == SolveMode::Edd ? "edd" : "direct"},
        {"ridge", cfg.ridge},
        {"taper_order", cfg.taper_order},
        {"cond_cap", cfg.cond_cap}};
    j["seed"] = cfg.seed;
    return j.dump(2) + "\n";
}

// --tol-override KEY=VAL: adjust one named tolerance after parsing.
inline void apply_tol_override(ExperimentConfig& cfg,
                               const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
        throw ConfigError("tol-override: expected KEY=VAL, got \"" + spec +
                          "\"");
    const std::string key = spec.substr(0, eq);
    double val = 0.0;
    try {
        size_t used = 0;
        val = std::stod(spec.substr(eq + 1), &used);
        if (used != spec.size() - eq - 1) throw std::invalid_argument("trail");
    } catch (const std::exception&) {
        throw ConfigError("tol-override: value in \"" + spec +
                          "\" is not a number");
    }
    if (key == "rank")
        cfg.tol_rank = val;
    else if (key == "distinct")
        cfg.tol_distinct = val;
    else if (key == "quadrature")
        cfg.tol_quadrature = val;
    else if (key == "solver")
        cfg.tol_solver = val;
    else if (key == "ridge")
        cfg.ridge = val;
    else if (key == "cond_cap")
        cfg.cond_cap = val;
    else
        throw ConfigError(
            "tol-override: unknown key \"" + key +
            "\" (use rank, distinct, quadrature, solver, ridge, cond_cap)");
}

}  // namespace wavectl
