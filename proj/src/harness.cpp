#include "nzam/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "nzam/assignment.hpp"
#include "nzam/enumerate.hpp"
#include "nzam/kernels.hpp"
#include "nzam/linalg.hpp"
#include "nzam/states.hpp"

namespace nzam {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Typed, range-checked access to one config section; finish() rejects leftovers.
class Section {
public:
    Section(const json& root, const std::string& name) : name_(name) {
        if (!root.contains(name)) return;
        if (!root.at(name).is_object()) throw ValidationError(name, "must be an object");
        obj_ = &root.at(name);
    }

    double number(const std::string& key, double def, double lo, double hi, bool open_lo = false) {
        const json* v = take(key);
        if (!v) return def;
        if (!v->is_number()) throw ValidationError(field(key), "must be a number");
        const double x = v->get<double>();
        if (!std::isfinite(x) || x < lo || x > hi || (open_lo && x == lo)) {
            std::ostringstream os;
            os << "must lie in " << (open_lo ? "(" : "[") << lo << ", " << hi << "], got " << x;
            throw ValidationError(field(key), os.str());
        }
        return x;
    }

    std::int64_t integer(const std::string& key, std::int64_t def, std::int64_t lo, std::int64_t hi) {
        const json* v = take(key);
        if (!v) return def;
        if (!v->is_number_integer()) throw ValidationError(field(key), "must be an integer");
        const auto x = v->get<std::int64_t>();
        if (x < lo || x > hi)
            throw ValidationError(field(key),
                                  "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " + std::to_string(x));
        return x;
    }

    std::string text(const std::string& key, const std::string& def, const std::set<std::string>& allowed) {
        const json* v = take(key);
        if (!v) return def;
        if (!v->is_string()) throw ValidationError(field(key), "must be a string");
        auto x = v->get<std::string>();
        if (!allowed.empty() && !allowed.count(x)) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            throw ValidationError(field(key), "unknown value '" + x + "' (expected one of: " + list + ")");
        }
        return x;
    }

    bool flag(const std::string& key, bool def) {
        const json* v = take(key);
        if (!v) return def;
        if (!v->is_boolean()) throw ValidationError(field(key), "must be true or false");
        return v->get<bool>();
    }

    const json* raw(const std::string& key) { return take(key); }

    // Scalar or list of numbers.
    std::vector<double> numbers(const std::string& key, std::vector<double> def, double lo, double hi, bool open_lo) {
        const json* v = take(key);
        if (!v) return def;
        std::vector<double> out;
        auto one = [&](const json& x) {
            if (!x.is_number()) throw ValidationError(field(key), "must be a number or a list of numbers");
            const double d = x.get<double>();
            if (!std::isfinite(d) || d < lo || d > hi || (open_lo && d == lo))
                throw ValidationError(field(key), "value out of range");
            out.push_back(d);
        };
        if (v->is_array()) {
            for (const auto& x : *v) one(x);
        } else {
            one(*v);
        }
        return out;
    }

    void finish() const {
        if (!obj_) return;
        for (auto it = obj_->begin(); it != obj_->end(); ++it)
            if (!used_.count(it.key())) throw ValidationError(field(it.key()), "unknown key");
    }

    std::string field(const std::string& key) const { return name_ + "." + key; }

private:
    const json* take(const std::string& key) {
        used_.insert(key);
        if (!obj_ || !obj_->contains(key)) return nullptr;
        return &obj_->at(key);
    }

    std::string name_;
    const json* obj_ = nullptr;
    std::set<std::string> used_;
};

void check_top_level(const json& config, const std::set<std::string>& allowed) {
    if (!config.is_object()) throw ValidationError("<root>", "config must be an object");
    for (auto it = config.begin(); it != config.end(); ++it)
        if (!allowed.count(it.key())) throw ValidationError(it.key(), "unknown section");
}

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    return f;
}

void write_json(const fs::path& path, const json& j) { open_out(path) << j.dump(2) << '\n'; }

double max_of(const std::vector<double>& v) {
    double m = kNaN;
    for (double x : v)
        if (!std::isnan(x)) m = std::isnan(m) ? x : std::max(m, x);
    return m;
}

std::vector<double> norms_of(const std::vector<Mat>& series) {
    std::vector<double> out;
    out.reserve(series.size());
    for (const auto& x : series) out.push_back(schatten1(x));
    return out;
}

json null_if_nan(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

} // namespace

// ---------------------------------------------------------------------------

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

json Scenario::to_json() const {
    json j;
    j["chain"] = {{"model", chain.model},           {"n_env", chain.n_env},       {"coupling", chain.coupling},
                  {"field", chain.field},           {"anisotropy", chain.anisotropy}, {"boundary", chain.boundary},
                  {"seed", chain.seed}};
    j["initial_state"] = {{"kind", initial_state.kind},
                          {"spread", initial_state.spread},
                          {"terms", initial_state.terms},
                          {"rank", initial_state.rank},
                          {"seed", initial_state.seed}};
    j["bss"] = {{"n_terms", bss.n_terms},   {"max_terms", bss.max_terms}, {"restarts", bss.restarts},
                {"max_iters", bss.max_iters}, {"tol", bss.tol},           {"seed", bss.seed}};
    j["integrator"] = {{"h", integrator.h},
                       {"t_max", integrator.t_max},
                       {"memory", nzam::to_string(integrator.memory)},
                       {"checkpoint_stride", integrator.checkpoint_stride},
                       {"positivity_stride", integrator.positivity_stride}};
    j["bounds"] = {{"mode", bounds.mode}, {"C", bounds.C}, {"beta", bounds.beta}, {"alpha", bounds.alpha}};
    j["outputs"] = {{"directory", outputs.directory}, {"trajectory", outputs.trajectory}};
    return j;
}

std::string Scenario::hash() const {
    json j = to_json();
    j.erase("outputs");
    return fnv1a_hex(j.dump());
}

Scenario parse_scenario(const json& config) {
    check_top_level(config, {"chain", "initial_state", "bss", "integrator", "bounds", "outputs", "sweep"});
    Scenario s;

    Section chain(config, "chain");
    s.chain.model = chain.text("model", s.chain.model, {"tfim", "xxz", "random"});
    s.chain.n_env = static_cast<int>(chain.integer("n_env", s.chain.n_env, 1, 11));
    const double big = 1e6;
    s.chain.coupling = chain.number("coupling", s.chain.coupling, -big, big);
    s.chain.field = chain.number("field", s.chain.field, -big, big);
    s.chain.anisotropy = chain.number("anisotropy", s.chain.anisotropy, -big, big);
    s.chain.boundary = chain.number("boundary", s.chain.boundary, -big, big);
    s.chain.seed = static_cast<std::uint64_t>(chain.integer("seed", 0, 0, std::numeric_limits<std::int64_t>::max()));
    chain.finish();

    Section init(config, "initial_state");
    auto& is = s.initial_state;
    is.kind = init.text("kind", is.kind, {"product", "boundary-bell", "ghz", "random-separable", "random"});
    is.spread = init.text("spread", is.spread, {"none", "even"});
    is.terms = static_cast<int>(init.integer("terms", is.terms, 1, 64));
    is.rank = static_cast<int>(init.integer("rank", is.rank, 0, std::int64_t{1} << (s.chain.n_env + 1)));
    is.seed = static_cast<std::uint64_t>(init.integer("seed", 0, 0, std::numeric_limits<std::int64_t>::max()));
    init.finish();

    Section bss(config, "bss");
    s.bss.n_terms = static_cast<int>(bss.integer("n_terms", s.bss.n_terms, 0, 1024));
    s.bss.max_terms = static_cast<int>(bss.integer("max_terms", s.bss.max_terms, 1, 1024));
    s.bss.restarts = static_cast<int>(bss.integer("restarts", s.bss.restarts, 1, 10000));
    s.bss.max_iters = static_cast<int>(bss.integer("max_iters", s.bss.max_iters, 1, 1000000));
    s.bss.tol = bss.number("tol", s.bss.tol, 0.0, 2.0, true);
    s.bss.seed = static_cast<std::uint64_t>(bss.integer("seed", 1, 0, std::numeric_limits<std::int64_t>::max()));
    bss.finish();

    Section integ(config, "integrator");
    auto& ig = s.integrator;
    ig.h = integ.number("h", ig.h, 0.0, 10.0, true);
    ig.t_max = integ.number("t_max", ig.t_max, 0.0, 1e3, true);
    if (ig.t_max / ig.h > 1e6) throw ValidationError("integrator.h", "more than 1e6 steps requested");
    ig.memory = parse_memory_mode(integ.text("memory", "ode", {"ode", "quadrature", "none"}));
    ig.checkpoint_stride = static_cast<int>(integ.integer("checkpoint_stride", ig.checkpoint_stride, 1, 1000000));
    ig.positivity_stride = static_cast<int>(integ.integer("positivity_stride", ig.positivity_stride, 0, 1000000));
    integ.finish();

    Section bounds(config, "bounds");
    s.bounds.mode = bounds.text("mode", s.bounds.mode, {"measured", "analytic", "both"});
    s.bounds.C = bounds.number("C", s.bounds.C, 0.0, big);
    s.bounds.beta = bounds.number("beta", s.bounds.beta, 0.0, big);
    s.bounds.alpha = bounds.number("alpha", s.bounds.alpha, 0.0, 3.0, true);
    bounds.finish();

    Section out(config, "outputs");
    s.outputs.directory = out.text("directory", "", {});
    s.outputs.trajectory = out.flag("trajectory", true);
    out.finish();

    if (config.contains("sweep")) {
        Section sw(config, "sweep");
        SweepSpec spec;
        spec.axis = sw.text("axis", "", {});
        if (spec.axis.empty()) throw ValidationError("sweep.axis", "required");
        if (const json* v = sw.raw("values")) {
            if (!v->is_array()) throw ValidationError("sweep.values", "must be a list");
            spec.values = *v;
        }
        sw.finish();
        s.sweep = spec;
    }
    return s;
}

json load_json(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("--config", "cannot read " + path.string());
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw ValidationError("--config", std::string("not valid JSON: ") + e.what());
    }
}

Mat initial_state(const Scenario& s, const ChainModel& m) {
    const auto& is = s.initial_state;
    const int n = m.n_env();
    if (is.kind == "boundary-bell") return pure_projector(boundary_bell_vector(n, is.spread));
    if (is.kind == "ghz") return pure_projector(ghz_vector(n + 1));
    std::mt19937_64 rng(is.seed);
    if (is.kind == "product") {
        std::vector<Vec> sites;
        for (int i = 0; i <= n; ++i) {
            Vec v = Vec::Zero(2);
            v(0) = 1.0;
            sites.push_back(is.seed == 0 ? v : random_pure(2, rng));
        }
        return pure_projector(product_vector(sites));
    }
    if (is.kind == "random-separable")
        return random_separable(2, 1 << n, is.terms, rng).reconstruct();
    if (is.kind == "random") {
        const auto d = m.layout.total_dim();
        return random_state(m.layout, is.rank == 0 ? static_cast<int>(d) : is.rank, is.seed);
    }
    throw ValidationError("initial_state.kind", "unknown kind '" + is.kind + "'");
}

RunResult run_scenario(const Scenario& s, const fs::path& out_dir) {
    RunResult r;
    r.hash = s.hash();
    const auto& ig = s.integrator;
    const ChainModel m = build_chain(s.chain);
    const auto dim = m.layout.total_dim();
    if (ig.memory == MemoryMode::quadrature && dim > kQuadratureMaxDim)
        throw InfeasibleRequest("memory mode \"quadrature\" refused for joint dimension " + std::to_string(dim) + " > " +
                                std::to_string(kQuadratureMaxDim) + "; use \"ode\"");

    const Mat rho0 = initial_state(s, m);
    const BipartiteState bs{rho0, m.layout, {0}};
    const BssResult bss = best_separable_state(bs, s.bss);
    r.bss_distance = bss.distance;
    const BasisChoice choice = choose_basis(bss.decomposition);
    const AssignmentMap amap = AssignmentMap::build(bss.decomposition, choice);
    const AnchoredMap am(m, amap);
    const TimeGrid grid{ig.t_max, ig.h};

    const bool inhom_only = ig.memory == MemoryMode::none && !s.outputs.trajectory;
    std::optional<Trajectory> traj;
    double delta_norm = 0.0, mismatch = 0.0, max_trace = 0.0;
    if (inhom_only) {
        const Mat delta = initial_irrelevant(am, rho0);
        delta_norm = schatten1(delta);
        mismatch = schatten1(reduce_to(m, 0, delta));
        r.delta_norms = delta_profile(m, delta);
        const auto inhom = inhom_series(m, am, delta, grid);
        r.inhom_norm = norms_of(inhom);
        for (int k = 0; k <= grid.steps(); ++k) r.times.push_back(k * grid.step());
        r.drive_norm.assign(r.times.size(), kNaN);
        r.memory_norm.assign(r.times.size(), kNaN);
        r.closure_residual.assign(r.times.size(), kNaN);
        for (const auto& x : inhom) max_trace = std::max(max_trace, std::abs(x.trace()));
    } else {
        traj = exact_evolve(m, rho0, grid, EvolveOptions{ig.positivity_stride, 0});
        const auto dec = nz_decompose(m, *traj, am, NzOptions{ig.memory, true});
        r.times = dec.times;
        r.drive_norm = norms_of(dec.drive);
        r.inhom_norm = norms_of(dec.inhom);
        r.memory_norm = dec.memory.empty() ? std::vector<double>(r.times.size(), kNaN) : norms_of(dec.memory);
        r.closure_residual = dec.closure_residual;
        r.delta_norms = dec.delta_norms;
        delta_norm = dec.delta_norm;
        mismatch = dec.marginal_mismatch;
        max_trace = dec.max_trace;
    }

    const double J = m.coupling_bound();
    BoundParams bp;
    bp.J = J;
    bp.L_env = m.n_env();
    bp.alpha = s.bounds.alpha;
    bp.beta = s.bounds.beta;
    bp.C = s.bounds.C;
    bp.dim_A = 2.0;
    bool dominated = true;
    double worst_slack = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < r.times.size(); ++k) {
        const double t = r.times[k];
        r.bound_measured.push_back(inhom_bound_1d_measured(J, t, r.delta_norms).total);
        bp.x = t;
        r.bound_analytic.push_back(inhom_bound_1d_analytic(bp).total);
        const double slack = r.bound_measured[k] - r.inhom_norm[k];
        worst_slack = std::min(worst_slack, slack);
        if (slack < 0.0) dominated = false;
    }

    json summary;
    summary["scenario_hash"] = r.hash;
    summary["scenario"] = s.to_json();
    summary["joint_dim"] = dim;
    summary["steps"] = grid.steps();
    summary["h_effective"] = grid.step();
    summary["coupling_bound_J"] = J;
    summary["bss"] = {{"distance", bss.distance},
                      {"terms", bss.decomposition.size()},
                      {"restarts_used", bss.restarts_used},
                      {"certified", bss.certified}};
    summary["assignment"] = {{"p_max", choice.p_max},
                             {"restricted", choice.restricted},
                             {"completeness_defect", (amap.completeness() - Mat::Identity(2, 2)).norm()}};
    summary["delta"] = {{"norm", delta_norm}, {"marginal_mismatch", mismatch}, {"per_distance", r.delta_norms}};
    summary["inhom_max"] = null_if_nan(max_of(r.inhom_norm));
    summary["drive_max"] = null_if_nan(max_of(r.drive_norm));
    summary["memory_max"] = null_if_nan(max_of(r.memory_norm));
    summary["closure_residual_max"] = null_if_nan(max_of(r.closure_residual));
    summary["max_term_trace"] = max_trace;
    summary["memory_mode"] = nzam::to_string(ig.memory);
    if (traj) {
        summary["exact"] = {{"min_eigenvalue", traj->min_eigenvalue},
                            {"max_trace_error", traj->max_trace_error},
                            {"max_hermiticity_defect", traj->max_hermiticity_defect}};
    }
    const double null_tol = 10.0 * bss.distance + 1e-6;
    json checks;
    checks["bound_domination"] = {{"pass", dominated}, {"worst_slack", worst_slack}};
    checks["inhom_within_separability_tol"] = {{"pass", max_of(r.inhom_norm) <= null_tol}, {"tol", null_tol}};
    if (!std::isnan(max_of(r.closure_residual)))
        checks["closure"] = {{"pass", max_of(r.closure_residual) <= 5e-5}, {"tol", 5e-5}};
    if (traj) checks["positivity"] = {{"pass", traj->min_eigenvalue >= -1e-9}, {"tol", 1e-9}};
    summary["checks"] = checks;
    r.summary = summary;

    if (out_dir.empty()) return r;
    fs::create_directories(out_dir);
    const int stride = ig.checkpoint_stride;
    const std::size_t last = r.times.size() - 1;
    auto keep_row = [&](std::size_t k) { return k % static_cast<std::size_t>(stride) == 0 || k == last; };

    if (traj) {
        auto f = open_out(out_dir / "trajectory.csv");
        f << "t";
        const auto d0 = traj->reduced.front().rows();
        for (Eigen::Index i = 0; i < d0; ++i)
            for (Eigen::Index j = 0; j < d0; ++j) f << ",re_" << i << '_' << j << ",im_" << i << '_' << j;
        f << ",scenario_hash\n";
        for (std::size_t k = 0; k <= last; ++k) {
            if (!keep_row(k)) continue;
            f << fmt(traj->times[k]);
            const auto& x = traj->reduced[k];
            for (Eigen::Index i = 0; i < d0; ++i)
                for (Eigen::Index j = 0; j < d0; ++j) f << ',' << fmt(x(i, j).real()) << ',' << fmt(x(i, j).imag());
            f << ',' << r.hash << '\n';
        }
    }
    {
        auto f = open_out(out_dir / "decomposition.csv");
        f << "t,drive_norm,inhom_norm,memory_norm,closure_residual,bound_measured_mode,bound_analytic_mode,scenario_hash\n";
        for (std::size_t k = 0; k <= last; ++k) {
            if (!keep_row(k)) continue;
            f << fmt(r.times[k]) << ',' << fmt(r.drive_norm[k]) << ',' << fmt(r.inhom_norm[k]) << ','
              << fmt(r.memory_norm[k]) << ',' << fmt(r.closure_residual[k]) << ',' << fmt(r.bound_measured[k]) << ','
              << fmt(r.bound_analytic[k]) << ',' << r.hash << '\n';
        }
    }
    {
        json reports = json::array();
        if (s.bounds.mode != "analytic") reports.push_back(inhom_bound_1d_measured(J, ig.t_max, r.delta_norms).to_json());
        if (s.bounds.mode != "measured") {
            bp.x = ig.t_max;
            reports.push_back(inhom_bound_1d_analytic(bp).to_json());
        }
        write_json(out_dir / "bounds.json", {{"scenario_hash", r.hash}, {"t", ig.t_max}, {"reports", reports}});
    }
    write_json(out_dir / "summary.json", summary);
    return r;
}

// ---------------------------------------------------------------------------

void set_path(json& config, const std::string& path, const json& value) {
    json* node = &config;
    std::size_t pos = 0;
    while (true) {
        const auto dot = path.find('.', pos);
        const std::string key = path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (!node->is_object() || !node->contains(key)) throw ValidationError("sweep.axis", "no such parameter '" + path + "'");
        node = &(*node)[key];
        if (dot == std::string::npos) break;
        pos = dot + 1;
    }
    if (node->is_object()) throw ValidationError("sweep.axis", "'" + path + "' is a section, not a parameter");
    *node = value;
}

namespace {

int exit_code_of(const std::exception_ptr& e, std::string& message, json& record) {
    try {
        std::rethrow_exception(e);
    } catch (const ValidationError& v) {
        message = v.what();
        record = {{"kind", "validation"}, {"field", v.field}, {"message", message}, {"exit_code", kExitValidation}};
        return kExitValidation;
    } catch (const InfeasibleRequest& v) {
        message = v.what();
        record = {{"kind", "infeasible"}, {"message", message}, {"exit_code", kExitInfeasible}};
        return kExitInfeasible;
    } catch (const std::exception& v) {
        message = v.what();
        record = {{"kind", "runtime"}, {"message", message}, {"exit_code", kExitRuntime}};
        return kExitRuntime;
    }
}

} // namespace

std::vector<SweepRow> run_sweep(const json& base, const std::string& axis, const json& values, const fs::path& out_dir,
                                int workers) {
    json normalized = parse_scenario(base).to_json();
    json probe = normalized;
    set_path(probe, axis, nullptr);
    std::vector<SweepRow> rows(values.size());
    fs::create_directories(out_dir);

    const int n_workers = std::max(1, std::min<int>(workers, static_cast<int>(rows.size())));
    const int inner = std::max(1, kernels::num_threads() / n_workers);
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        kernels::set_num_threads(inner);
        for (std::size_t i = next++; i < rows.size(); i = next++) {
            auto& row = rows[i];
            row.value = values[i];
            std::ostringstream name;
            name << std::setw(3) << std::setfill('0') << i;
            const fs::path dir = out_dir / name.str();
            try {
                json cfg = normalized;
                set_path(cfg, axis, values[i]);
                const Scenario sc = parse_scenario(cfg);
                row.result = run_scenario(sc, dir);
            } catch (...) {
                json record;
                row.exit_code = exit_code_of(std::current_exception(), row.error, record);
                record["value"] = values[i];
                fs::create_directories(dir);
                write_json(dir / "error.json", {{"error", record}});
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < n_workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    auto f = open_out(out_dir / "aggregate.csv");
    f << "index,value,exit_code,inhom_max,drive_max,memory_max,closure_residual_max,bound_measured_max,bss_distance,"
         "scenario_hash\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const std::string v = row.value.is_string() ? row.value.get<std::string>() : row.value.dump();
        f << i << ',' << v << ',' << row.exit_code;
        if (row.result) {
            const auto& r = *row.result;
            f << ',' << fmt(max_of(r.inhom_norm)) << ',' << fmt(max_of(r.drive_norm)) << ',' << fmt(max_of(r.memory_norm))
              << ',' << fmt(max_of(r.closure_residual)) << ',' << fmt(max_of(r.bound_measured)) << ','
              << fmt(r.bss_distance) << ',' << r.hash << '\n';
        } else {
            f << ",nan,nan,nan,nan,nan,nan,\n";
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------

json run_bounds(const json& config, const fs::path& out_dir) {
    check_top_level(config, {"bounds", "outputs"});
    Section b(config, "bounds");
    const std::string mode = b.text("mode", "analytic_1d", {"measured", "analytic_1d", "higher_d"});
    BoundParams base;
    base.C = b.number("C", base.C, 0.0, 1e6);
    base.beta = b.number("beta", base.beta, 0.0, 1e6);
    base.alpha = b.number("alpha", base.alpha, 0.0, 3.0, true);
    base.K = b.number("K", base.K, 1.0, 64.0);
    base.dim_A = b.number("dim_A", base.dim_A, 2.0, 1e6);
    base.l0 = b.number("l0", base.l0, 1.0, 1e6);
    const auto Js = b.numbers("J", {1.0}, 0.0, 1e6, true);
    const auto xs = b.numbers("x", {0.1}, 0.0, 1e3, false);
    const auto Ls = b.numbers("L_env", {8.0}, 1.0, 1e9, false);
    std::vector<double> delta_norms;
    if (const json* d = b.raw("delta_norms")) {
        if (!d->is_array()) throw ValidationError("bounds.delta_norms", "must be a list");
        for (const auto& v : *d) {
            if (!v.is_number() || v.get<double>() < 0.0) throw ValidationError("bounds.delta_norms", "must be non-negative numbers");
            delta_norms.push_back(v.get<double>());
        }
    }
    if (mode == "measured" && delta_norms.empty()) throw ValidationError("bounds.delta_norms", "required in measured mode");
    b.finish();
    Section(config, "outputs").finish();

    json reports = json::array();
    std::ostringstream table;
    table << "mode,J,L_env,x,D,near_sum,far_sum,total,vacuous\n";
    for (double J : Js)
        for (double L : Ls)
            for (double x : xs) {
                BoundReport rep;
                if (mode == "measured") {
                    rep = inhom_bound_1d_measured(J, x, delta_norms);
                } else {
                    BoundParams p = base;
                    p.J = J;
                    p.L_env = L;
                    p.x = x;
                    rep = mode == "analytic_1d" ? inhom_bound_1d_analytic(p) : inhom_bound_highd(p);
                }
                reports.push_back(rep.to_json());
                table << mode << ',' << fmt(J) << ',' << fmt(mode == "measured" ? rep.params.L_env : L) << ',' << fmt(x)
                      << ',' << rep.D << ',' << fmt(rep.near_sum) << ',' << fmt(rep.far_sum) << ',' << fmt(rep.total)
                      << ',' << (rep.vacuous ? 1 : 0) << '\n';
            }
    json out = {{"mode", mode}, {"C_is_derived", false}, {"reports", reports}};
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_json(out_dir / "bounds.json", out);
        open_out(out_dir / "bounds_table.csv") << table.str();
    }
    return out;
}

json run_enumerate(const json& config, const fs::path& out_dir) {
    check_top_level(config, {"enumerate", "outputs"});
    Section e(config, "enumerate");
    const int k_max = static_cast<int>(e.integer("k_max", 12, 0, 12));
    const int i_max = static_cast<int>(e.integer("i_max", 8, 0, 10));
    const int s_max = static_cast<int>(e.integer("stirling_max", 20, 1, 200));
    e.finish();
    Section(config, "outputs").finish();

    bool all = true;
    json seq = json::array(), animals = json::array(), stirling = json::array();
    std::ostringstream seq_csv, ani_csv, st_csv;
    seq_csv << "k,count,bound,holds\n";
    for (int k = 0; k <= k_max; ++k) {
        const auto c = count_1d_sequences(k);
        all = all && c.holds;
        seq.push_back({{"k", k}, {"count", c.count}, {"bound", c.bound}, {"holds", c.holds}});
        seq_csv << k << ',' << c.count << ',' << fmt(c.bound) << ',' << c.holds << '\n';
    }
    ani_csv << "lattice,i,count,K,l0,bound,holds\n";
    for (const std::string lat : {"1d", "square"}) {
        for (const auto& a : count_animals_upto(lat, i_max)) {
            all = all && a.holds;
            animals.push_back({{"lattice", lat}, {"i", a.i}, {"count", a.count}, {"bound", a.bound}, {"holds", a.holds}});
            ani_csv << lat << ',' << a.i << ',' << a.count << ',' << fmt(a.K) << ',' << fmt(a.l0) << ',' << fmt(a.bound)
                    << ',' << a.holds << '\n';
        }
    }
    st_csv << "L,k,exact,log_lhs,log_rhs,holds,holds_power_l\n";
    int st_fail = 0, st_fail_l = 0;
    for (int L = 1; L <= s_max; ++L)
        for (int k = 0; k <= s_max; ++k) {
            const auto c = stirling_check(L, k);
            st_fail += !c.holds;
            st_fail_l += !c.holds_power_l;
            st_csv << L << ',' << k << ',' << c.exact << ',' << fmt(c.log_lhs) << ',' << fmt(c.log_rhs) << ',' << c.holds
                   << ',' << c.holds_power_l << '\n';
        }
    all = all && st_fail == 0;
    stirling = {{"max", s_max}, {"failures", st_fail}, {"failures_power_l", st_fail_l}};
    json out = {{"sequences", seq}, {"animals", animals}, {"stirling", stirling}, {"all_hold", all}};
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_json(out_dir / "enumerate.json", out);
        open_out(out_dir / "sequences.csv") << seq_csv.str();
        open_out(out_dir / "animals.csv") << ani_csv.str();
        open_out(out_dir / "stirling.csv") << st_csv.str();
    }
    return out;
}

fs::path default_output_root() {
    if (const char* env = std::getenv("NZAM_OUTPUT_ROOT"); env && *env) return env;
    return "nzam_out";
}

// ---------------------------------------------------------------------------

namespace {

void apply_seed_override(json& config, std::uint64_t seed) {
    for (const char* section : {"chain", "initial_state", "bss"}) {
        if (!config.contains(section)) config[section] = json::object();
        if (config[section].is_object()) config[section]["seed"] = seed;
    }
}

fs::path resolve_out(const std::string& flag, const json& config) {
    if (!flag.empty()) return flag;
    if (config.contains("outputs") && config["outputs"].is_object() && config["outputs"].contains("directory") &&
        config["outputs"]["directory"].is_string() && !config["outputs"]["directory"].get<std::string>().empty())
        return config["outputs"]["directory"].get<std::string>();
    return default_output_root();
}

} // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"nzam: exact N-Z decomposition with assignment maps"};
    app.require_subcommand(1);
    std::string config_path, out_flag;
    int threads = 0;
    std::int64_t seed_override = -1;
    auto add_common = [&](CLI::App* sub, bool need_config) {
        auto* c = sub->add_option("--config", config_path, "JSON config file");
        if (need_config) c->required();
        sub->add_option("--out", out_flag, "output directory");
        sub->add_option("--threads", threads, "worker threads")->check(CLI::NonNegativeNumber);
        sub->add_option("--seed-override", seed_override, "replace every seed in the config")->check(CLI::NonNegativeNumber);
    };
    auto* run = app.add_subcommand("run", "run one scenario");
    auto* sweep = app.add_subcommand("sweep", "parameter sweep");
    auto* bounds = app.add_subcommand("bounds", "bounds-only evaluation");
    auto* enumerate = app.add_subcommand("enumerate", "graph-count oracles");
    add_common(run, true);
    add_common(sweep, true);
    add_common(bounds, true);
    add_common(enumerate, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << json{{"error", {{"kind", "validation"}, {"field", "<command line>"}, {"message", e.what()}}}}.dump()
                  << '\n';
        return kExitValidation;
    }

    fs::path out_dir;
    try {
        json config = config_path.empty() ? json::object() : load_json(config_path);
        if (seed_override >= 0 && (*run || *sweep)) apply_seed_override(config, static_cast<std::uint64_t>(seed_override));
        out_dir = resolve_out(out_flag, config);

        if (*run) {
            if (threads > 0) kernels::set_num_threads(threads);
            json cfg = config;
            cfg.erase("sweep");
            const Scenario s = parse_scenario(cfg);
            const auto r = run_scenario(s, out_dir);
            std::cout << json{{"scenario_hash", r.hash},
                              {"out", out_dir.string()},
                              {"inhom_max", r.summary["inhom_max"]},
                              {"closure_residual_max", r.summary["closure_residual_max"]},
                              {"checks", r.summary["checks"]}}
                             .dump()
                      << '\n';
        } else if (*sweep) {
            const Scenario s = parse_scenario(config);
            if (!s.sweep) throw ValidationError("sweep", "section required for the sweep subcommand");
            json base = config;
            base.erase("sweep");
            const auto rows = run_sweep(base, s.sweep->axis, s.sweep->values, out_dir, threads > 0 ? threads : 1);
            int failed = 0;
            for (const auto& r : rows) failed += r.exit_code != 0;
            std::cout << json{{"out", out_dir.string()}, {"runs", rows.size()}, {"failed", failed}}.dump() << '\n';
            return failed == 0 ? kExitOk : kExitRuntime;
        } else if (*bounds) {
            const auto j = run_bounds(config, out_dir);
            std::cout << json{{"out", out_dir.string()}, {"reports", j["reports"].size()}}.dump() << '\n';
        } else {
            if (threads > 0) kernels::set_num_threads(threads);
            const auto j = run_enumerate(config, out_dir);
            std::cout << json{{"out", out_dir.string()}, {"all_hold", j["all_hold"]}}.dump() << '\n';
            return j["all_hold"].get<bool>() ? kExitOk : kExitRuntime;
        }
    } catch (...) {
        std::string message;
        json record;
        const int code = exit_code_of(std::current_exception(), message, record);
        std::cerr << json{{"error", record}}.dump() << '\n';
        if (!out_dir.empty()) {
            std::error_code ec;
            fs::create_directories(out_dir, ec);
            if (!ec) {
                std::ofstream f(out_dir / "error.json");
                f << json{{"error", record}}.dump(2) << '\n';
            }
        }
        return code;
    }
    return kExitOk;
}

} // namespace nzam
