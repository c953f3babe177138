// Command-line front end: constant estimation, asymptotic evaluation, direct
// Monte Carlo ruin simulation, the release checklist, and figure data dumps.
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "parisian/acceptance.hpp"
#include "parisian/asymptotics.hpp"
#include "parisian/errors.hpp"
#include "parisian/mc_ruin.hpp"
#include "parisian/model.hpp"
#include "parisian/pickands.hpp"
#include "parisian/piterbarg.hpp"
#include "parisian/registry.hpp"
#include "parisian/version.hpp"

using nlohmann::json;
using namespace parisian;

namespace {

// Command-level misuse that CLI11 cannot catch itself (bad flag combinations,
// malformed sweep ranges); mapped to exit code 2 like parse errors.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string csv_field(double v) { return std::isnan(v) ? "-" : fmt17(v); }

std::vector<double> sweep_values(const std::string& range, const char* flag) {
    double lo = 0, hi = 0, step = 0;
    char tail = 0;
    if (std::sscanf(range.c_str(), "%lf:%lf:%lf%c", &lo, &hi, &step, &tail) != 3)
        throw UsageError(std::string(flag) + ": expected lo:hi:step, got '" + range + "'");
    if (!(step > 0) || !(hi >= lo))
        throw UsageError(std::string(flag) + ": need step > 0 and hi >= lo");
    const double kd = (hi - lo) / step;
    const auto k = static_cast<long long>(std::llround(kd));
    if (std::abs(lo + static_cast<double>(k) * step - hi) > 1e-9 * std::max(1.0, std::abs(hi)))
        throw UsageError(std::string(flag) + ": step must tile [lo, hi] exactly");
    std::vector<double> out;
    for (long long i = 0; i <= k; ++i)
        out.push_back(i == k ? hi : lo + static_cast<double>(i) * step);
    return out;
}

// Collects everything run_manifest.json needs; written next to the first
// output file (current directory when the run printed to stdout only).
struct RunContext {
    std::string command;
    std::vector<std::string> argv;
    json parameters = json::object();
    std::uint64_t seed = 0;
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    void write_file(const std::string& path, const std::string& content) {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << content;
        outputs.push_back(path);
    }

    void write_manifest() const {
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        json m;
        m["command"] = command;
        m["argv"] = argv;
        m["parameters"] = parameters;
        m["seed"] = seed;
        m["tool_version"] = kVersion;
        m["wall_time_seconds"] = wall;
        m["outputs"] = outputs;
        std::filesystem::path dir =
            outputs.empty() ? std::filesystem::path(".")
                            : std::filesystem::path(outputs.front()).parent_path();
        if (dir.empty()) dir = ".";
        std::ofstream out(dir / "run_manifest.json");
        if (out) out << m.dump(2) << "\n";
    }
};

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::string describe(const ConstantDescriptor& d) {
    std::ostringstream os;
    if (d.kind == ConstantDescriptor::Kind::Piterbarg)
        os << "piterbarg window=" << d.window << " a=" << d.a << " b=" << d.b;
    else
        os << "pickands hurst=" << d.hurst << " window=" << d.window;
    return os.str();
}

json descriptor_json(const ConstantDescriptor& d) {
    json j;
    j["kind"] = d.kind == ConstantDescriptor::Kind::Piterbarg ? "piterbarg" : "pickands";
    j["hurst"] = d.hurst;
    j["window"] = d.window;
    if (d.kind == ConstantDescriptor::Kind::Piterbarg) {
        j["a"] = d.a;
        j["b"] = d.b;
    }
    return j;
}

// Provider used when neither a registry nor on-the-fly simulation was allowed:
// any request for a simulated constant fails loudly, naming the descriptor.
class RefusingProvider final : public ConstantProvider {
  public:
    ResolvedConstant resolve(const ConstantDescriptor& d) override {
        throw MissingConstant("a simulated constant is required: " + describe(d) +
                              "; rerun with --registry <path> or --simulate-constants");
    }
};

// Wraps another provider and records which descriptors the formulas asked for,
// so the output can show the constant's identity, not just its value.
class RecordingProvider final : public ConstantProvider {
  public:
    explicit RecordingProvider(ConstantProvider* inner) : inner_(inner) {}
    ResolvedConstant resolve(const ConstantDescriptor& d) override {
        ResolvedConstant r = inner_->resolve(d);
        seen.emplace_back(d, r);
        return r;
    }
    std::vector<std::pair<ConstantDescriptor, ResolvedConstant>> seen;

  private:
    ConstantProvider* inner_;
};

const char* regime_name(RegimeTag tag) {
    switch (tag) {
        case RegimeTag::LeftOfT1: return "LeftOfT1";
        case RegimeTag::BoundaryT1: return "BoundaryT1";
        case RegimeTag::Interior: return "Interior";
        case RegimeTag::BoundaryT2: return "BoundaryT2";
        case RegimeTag::RightOfT2: return "RightOfT2";
    }
    return "?";
}

// ---------------------------------------------------------------- piterbarg

struct PiterbargArgs {
    double a = 0, b = 0, L = 0;
    std::string sweep;
    double M = 0, tau = 0.005;
    std::size_t n = 10000;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string out, registry_path;
    bool json_out = false, save = false, independent = false;
};

int run_piterbarg(const PiterbargArgs& args, RunContext& ctx) {
    const DriftSpec drift{args.a, args.b};
    drift.validate();
    const std::vector<double> Ls =
        args.sweep.empty() ? std::vector<double>{args.L} : sweep_values(args.sweep, "--sweep-L");
    SimConfig cfg;
    cfg.M = args.M;
    cfg.tau = args.tau;
    cfg.n = args.n;
    cfg.seed = args.seed;
    cfg.threads = args.threads;

    std::vector<Estimate> ests;
    if (Ls.size() == 1) {
        ests.push_back(simulate_piterbarg(drift, Ls[0], cfg));
    } else if (args.independent) {
        for (std::size_t i = 0; i < Ls.size(); ++i) {
            SimConfig c = cfg;
            c.seed = cfg.seed + i;
            ests.push_back(simulate_piterbarg(drift, Ls[i], c));
        }
    } else {
        ests = piterbarg_sweep(drift, Ls, cfg);
    }

    std::string csv = "L,a,b,estimate,std_error,lower,upper,M,tau,n,seed\n";
    json rows = json::array();
    for (std::size_t i = 0; i < Ls.size(); ++i) {
        const Estimate& e = ests[i];
        const auto [lower, upper] = piterbarg_bounds(drift, Ls[i]);
        csv += fmt17(Ls[i]) + "," + fmt17(args.a) + "," + fmt17(args.b) + "," + fmt17(e.value) +
               "," + fmt17(e.std_error) + "," + fmt17(lower) + "," + fmt17(upper) + "," +
               fmt17(e.M) + "," + fmt17(e.tau) + "," + std::to_string(e.n) + "," +
               std::to_string(e.seed) + "\n";
        json r = {{"L", Ls[i]},         {"estimate", e.value}, {"std_error", e.std_error},
                  {"lower", lower},     {"upper", upper},      {"M", e.M},
                  {"tau", e.tau},       {"n", e.n},            {"seed", e.seed}};
        rows.push_back(r);
        print_warnings(e.warnings);
    }

    if (args.json_out) {
        json obj = {{"command", "piterbarg"}, {"a", args.a}, {"b", args.b}, {"results", rows}};
        std::cout << obj.dump(2) << "\n";
    } else {
        std::printf("drifted sup-inf constant, drift a=%g b=%g\n", args.a, args.b);
        for (std::size_t i = 0; i < Ls.size(); ++i) {
            const auto [lower, upper] = piterbarg_bounds(drift, Ls[i]);
            std::printf("  L=%-8g estimate %.10g (se %.3g), bounds [%.10g, %.10g]\n", Ls[i],
                        ests[i].value, ests[i].std_error, lower, upper);
            if (Ls[i] == 0)
                std::printf("           window-0 closed form 1+1/a+1/b-1/(a+b+1) = %.12g\n",
                            piterbarg_closed_form(drift));
        }
        std::printf("  settings: M=%g tau=%g n=%zu seed=%llu\n", ests[0].M, ests[0].tau,
                    ests[0].n, static_cast<unsigned long long>(ests[0].seed));
    }

    if (!args.out.empty()) ctx.write_file(args.out, csv);
    if (args.save) {
        if (args.registry_path.empty())
            throw UsageError("--save needs --registry or PARISIAN_REGISTRY");
        Registry reg(args.registry_path);
        for (std::size_t i = 0; i < Ls.size(); ++i) {
            ConstantRecord rec;
            rec.desc.kind = ConstantDescriptor::Kind::Piterbarg;
            rec.desc.window = Ls[i];
            rec.desc.a = args.a;
            rec.desc.b = args.b;
            rec.cfg.M = ests[i].M;
            rec.cfg.tau = ests[i].tau;
            rec.cfg.eta = std::nan("");
            rec.cfg.n = ests[i].n;
            rec.cfg.seed = ests[i].seed;
            rec.value = ests[i].value;
            rec.std_error = ests[i].std_error;
            reg.put(rec);
        }
        std::cerr << "stored " << Ls.size() << " record(s) in " << args.registry_path << "\n";
    }
    return 0;
}

// ----------------------------------------------------------------- pickands

struct PickandsArgs {
    double H = 0.5, L = 0;
    std::string sweep;
    bool bias_sweep = false, lower_bound = false;
    double M = 0, eta = 0;
    std::vector<double> taus;
    std::size_t n = 10000;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string out, registry_path;
    bool json_out = false, save = false, independent = false;
};

std::string bias_csv(const std::vector<double>& taus, const std::vector<Estimate>& ests,
                     double L, json* rows) {
    std::string csv = "tau,estimate,std_error,exact,bias,M,n,seed\n";
    const double exact = exact_F1(L);
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const Estimate& e = ests[i];
        csv += fmt17(taus[i]) + "," + fmt17(e.value) + "," + fmt17(e.std_error) + "," +
               fmt17(exact) + "," + fmt17(e.value - exact) + "," + fmt17(e.M) + "," +
               std::to_string(e.n) + "," + std::to_string(e.seed) + "\n";
        if (rows)
            rows->push_back({{"tau", taus[i]},
                             {"estimate", e.value},
                             {"std_error", e.std_error},
                             {"exact", exact},
                             {"bias", e.value - exact}});
    }
    return csv;
}

std::string pickands_csv(double H, const std::vector<double>& Ls,
                         const std::vector<Estimate>& ests,
                         const std::vector<double>* bounds, json* rows) {
    std::string csv = "H,L,estimate,std_error,exact_if_known,lower_bound,M,tau,eta,n,seed\n";
    for (std::size_t i = 0; i < Ls.size(); ++i) {
        const Estimate& e = ests[i];
        const double exact = H == 0.5 ? exact_F1(Ls[i]) : std::nan("");
        const double lb = bounds ? (*bounds)[i] : std::nan("");
        csv += fmt17(H) + "," + fmt17(Ls[i]) + "," + fmt17(e.value) + "," + fmt17(e.std_error) +
               "," + csv_field(exact) + "," + csv_field(lb) + "," + fmt17(e.M) + "," +
               fmt17(e.tau) + "," + fmt17(e.eta) + "," + std::to_string(e.n) + "," +
               std::to_string(e.seed) + "\n";
        if (rows) {
            json r = {{"L", Ls[i]},   {"estimate", e.value}, {"std_error", e.std_error},
                      {"M", e.M},     {"tau", e.tau},        {"eta", e.eta},
                      {"n", e.n},     {"seed", e.seed}};
            r["exact_if_known"] = std::isnan(exact) ? json() : json(exact);
            r["lower_bound"] = std::isnan(lb) ? json() : json(lb);
            rows->push_back(r);
        }
    }
    return csv;
}

int run_pickands(const PickandsArgs& args, RunContext& ctx) {
    SimConfig cfg;
    cfg.M = args.M;
    cfg.eta = args.eta;
    cfg.n = args.n;
    cfg.seed = args.seed;
    cfg.threads = args.threads;
    const std::vector<double> taus = args.taus.empty() ? std::vector<double>{0.005} : args.taus;

    if (args.bias_sweep) {
        if (args.H != 0.5)
            throw UsageError("--bias-sweep needs --H 0.5, the only case with an exact reference");
        if (!args.sweep.empty()) throw UsageError("--bias-sweep takes a single --L, not --sweep-L");
        std::vector<Estimate> ests;
        for (double tau : taus) {
            SimConfig c = cfg;
            c.tau = tau;
            ests.push_back(simulate_pickands(0.5, args.L, c));
            print_warnings(ests.back().warnings);
        }
        json rows = json::array();
        const std::string csv = bias_csv(taus, ests, args.L, &rows);
        if (args.json_out) {
            json obj = {{"command", "pickands"}, {"mode", "bias-sweep"}, {"H", 0.5},
                        {"L", args.L},           {"results", rows}};
            std::cout << obj.dump(2) << "\n";
        } else {
            std::printf("grid-step bias at H=0.5, L=%g (exact %.10g)\n", args.L,
                        exact_F1(args.L));
            for (std::size_t i = 0; i < taus.size(); ++i)
                std::printf("  tau=%-8g estimate %.10g (se %.3g), bias %+.3e\n", taus[i],
                            ests[i].value, ests[i].std_error, ests[i].value - exact_F1(args.L));
        }
        if (!args.out.empty()) ctx.write_file(args.out, csv);
        return 0;
    }

    if (taus.size() > 1) throw UsageError("repeated --tau is only meaningful with --bias-sweep");
    cfg.tau = taus[0];
    const std::vector<double> Ls =
        args.sweep.empty() ? std::vector<double>{args.L} : sweep_values(args.sweep, "--sweep-L");

    std::vector<Estimate> ests;
    if (Ls.size() == 1) {
        ests.push_back(simulate_pickands(args.H, Ls[0], cfg));
    } else if (args.independent) {
        for (std::size_t i = 0; i < Ls.size(); ++i) {
            SimConfig c = cfg;
            c.seed = cfg.seed + i;
            ests.push_back(simulate_pickands(args.H, Ls[i], c));
        }
    } else {
        ests = pickands_sweep(args.H, Ls, cfg);
    }
    for (const auto& e : ests) print_warnings(e.warnings);

    std::optional<std::vector<double>> bounds;
    if (args.lower_bound) {
        SimConfig ing = cfg;
        if (ing.eta <= 0) ing.eta = ing.tau;
        const std::vector<double> m_grid = {0.25, 0.5, 1.0 / std::sqrt(2.0), 1.0, 1.25};
        const Estimate inv = estimate_inverse_integral_expectation(args.H, ing);
        const std::vector<double> cdf = estimate_sup_cdf(args.H, m_grid, ing);
        bounds.emplace();
        for (double L : Ls)
            bounds->push_back(pickands_lower_bound(args.H, L, inv.value, m_grid, cdf).bound);
    }

    json rows = json::array();
    const std::string csv =
        pickands_csv(args.H, Ls, ests, bounds ? &*bounds : nullptr, &rows);
    if (args.json_out) {
        json obj = {{"command", "pickands"}, {"H", args.H}, {"results", rows}};
        std::cout << obj.dump(2) << "\n";
    } else {
        std::printf("window constant at H=%g\n", args.H);
        for (std::size_t i = 0; i < Ls.size(); ++i) {
            std::printf("  L=%-8g estimate %.10g (se %.3g)", Ls[i], ests[i].value,
                        ests[i].std_error);
            if (args.H == 0.5) std::printf(", exact %.10g", exact_F1(Ls[i]));
            if (bounds) std::printf(", lower bound %.6g", (*bounds)[i]);
            std::printf("\n");
        }
        std::printf("  settings: M=%g tau=%g eta=%g n=%zu seed=%llu\n", ests[0].M, ests[0].tau,
                    ests[0].eta, ests[0].n, static_cast<unsigned long long>(ests[0].seed));
    }

    if (!args.out.empty()) ctx.write_file(args.out, csv);
    if (args.save) {
        if (args.registry_path.empty())
            throw UsageError("--save needs --registry or PARISIAN_REGISTRY");
        Registry reg(args.registry_path);
        for (std::size_t i = 0; i < Ls.size(); ++i) {
            ConstantRecord rec;
            rec.desc.kind = ConstantDescriptor::Kind::Pickands;
            rec.desc.hurst = args.H;
            rec.desc.window = Ls[i];
            rec.cfg.M = ests[i].M;
            rec.cfg.tau = ests[i].tau;
            rec.cfg.eta = ests[i].eta;
            rec.cfg.n = ests[i].n;
            rec.cfg.seed = ests[i].seed;
            rec.value = ests[i].value;
            rec.std_error = ests[i].std_error;
            reg.put(rec);
        }
        std::cerr << "stored " << Ls.size() << " record(s) in " << args.registry_path << "\n";
    }
    return 0;
}

// ------------------------------------------------- shared model-input flags

struct ModelArgs {
    double c1 = 0, c2 = 0, q1 = 0, q2 = 0;
    double x1 = std::nan(""), x2 = std::nan(""), rho1 = std::nan(""), rho2 = std::nan("");
    double delta1 = std::nan(""), delta2 = std::nan("");
    double u_ref = 1.0;
    double H = 0.5, T = 0;
    bool one_dim = false;

    bool quota_share_given() const {
        return !std::isnan(x1) || !std::isnan(x2) || !std::isnan(rho1) || !std::isnan(rho2) ||
               !std::isnan(delta1) || !std::isnan(delta2);
    }

    ModelParams two_dim_params() const {
        if (quota_share_given()) {
            if (std::isnan(x1) || std::isnan(x2) || std::isnan(rho1) || std::isnan(rho2) ||
                std::isnan(delta1) || std::isnan(delta2))
                throw UsageError(
                    "quota-share input needs all of --x1 --x2 --rho1 --rho2 --delta1 --delta2");
            QuotaShareInputs in{x1, x2, rho1, rho2, delta1, delta2};
            return normalize_quota_share(in, H, T, u_ref);
        }
        if (!(c1 > 0) || !(c2 > 0) || !(q1 > 0) || !(q2 > 0))
            throw UsageError("need --c1 --c2 --q1 --q2 (all positive), or quota-share inputs");
        ModelParams p;
        p.c1 = c1;
        p.c2 = c2;
        p.q1 = q1;
        p.q2 = q2;
        p.hurst = H;
        p.T = T;
        return p;
    }

    void check_one_dim() const {
        if (quota_share_given())
            throw UsageError("--one-dim takes --c1 and --q1 directly, not quota-share inputs");
        if (!(c1 > 0) || !(q1 > 0)) throw UsageError("--one-dim needs --c1 > 0 and --q1 > 0");
    }

    json to_json() const {
        json j = {{"hurst", H}, {"T", T}};
        if (one_dim) {
            j["c"] = c1;
            j["q"] = q1;
        } else if (quota_share_given()) {
            j["x1"] = x1;      j["x2"] = x2;
            j["rho1"] = rho1;  j["rho2"] = rho2;
            j["delta1"] = delta1; j["delta2"] = delta2;
            j["u_ref"] = u_ref;
        } else {
            j["c1"] = c1; j["c2"] = c2; j["q1"] = q1; j["q2"] = q2;
        }
        return j;
    }
};

void add_model_flags(CLI::App* cmd, ModelArgs& m) {
    cmd->add_option("--c1,--c", m.c1, "boundary slope of company 1");
    cmd->add_option("--c2", m.c2, "boundary slope of company 2");
    cmd->add_option("--q1,--q", m.q1, "boundary level of company 1");
    cmd->add_option("--q2", m.q2, "boundary level of company 2");
    cmd->add_option("--x1", m.x1, "initial capital of company 1 (quota-share form)");
    cmd->add_option("--x2", m.x2, "initial capital of company 2 (quota-share form)");
    cmd->add_option("--rho1", m.rho1, "premium rate of company 1 (quota-share form)");
    cmd->add_option("--rho2", m.rho2, "premium rate of company 2 (quota-share form)");
    cmd->add_option("--delta1", m.delta1, "retained share of company 1 (quota-share form)");
    cmd->add_option("--delta2", m.delta2, "retained share of company 2 (quota-share form)");
    cmd->add_option("--u-ref", m.u_ref, "capital scale for the quota-share normalization");
    cmd->add_option("--H", m.H, "Hurst index in (0,1)")->capture_default_str();
    cmd->add_option("--T", m.T, "minimal excursion length parameter")->capture_default_str();
    cmd->add_flag("--one-dim", m.one_dim, "single company: use --c/--q (or --c1/--q1)");
}

// Builds the constant provider stack shared by `asymptotics` and `mc-ruin`.
struct ProviderStack {
    std::optional<Registry> registry;
    std::unique_ptr<SimulatingProvider> simulating;
    std::unique_ptr<RefusingProvider> refusing;
    std::unique_ptr<RecordingProvider> recording;
    ConstantProvider* get() { return recording.get(); }
};

ProviderStack make_providers(const std::string& registry_path, bool simulate_constants,
                             bool cache_only, const SimConfig& cfg) {
    ProviderStack s;
    if (cache_only && registry_path.empty())
        throw UsageError("--cache-only needs --registry or PARISIAN_REGISTRY");
    const ResolvePolicy policy =
        cache_only ? ResolvePolicy::CacheOnly : ResolvePolicy::UseOrSimulate;
    ConstantProvider* inner = nullptr;
    if (!registry_path.empty()) {
        s.registry.emplace(registry_path);
        s.simulating = std::make_unique<SimulatingProvider>(cfg, &*s.registry, policy);
        inner = s.simulating.get();
    } else if (simulate_constants) {
        s.simulating = std::make_unique<SimulatingProvider>(cfg, nullptr, policy);
        inner = s.simulating.get();
    } else {
        s.refusing = std::make_unique<RefusingProvider>();
        inner = s.refusing.get();
    }
    s.recording = std::make_unique<RecordingProvider>(inner);
    return s;
}

// -------------------------------------------------------------- asymptotics

struct AsymptoticsArgs {
    ModelArgs model;
    double u = 0;
    double M = 0, tau = 0.005, eta = 0;
    std::size_t n = 10000;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string out, registry_path;
    bool json_out = false, simulate_constants = false, cache_only = false;
};

int run_asymptotics(const AsymptoticsArgs& args, RunContext& ctx) {
    if (!(args.u > 0)) throw UsageError("--u must be positive");
    SimConfig cfg;
    cfg.M = args.M;
    cfg.tau = args.tau;
    cfg.eta = args.eta;
    cfg.n = args.n;
    cfg.seed = args.seed;
    cfg.threads = args.threads;
    ProviderStack providers =
        make_providers(args.registry_path, args.simulate_constants, args.cache_only, cfg);

    AsymptoticResult res;
    json obj;
    obj["command"] = "asymptotics";
    obj["u"] = args.u;
    obj["parameters"] = args.model.to_json();
    if (args.model.one_dim) {
        args.model.check_one_dim();
        res = one_dim_parisian_asymptotic(args.model.H, args.model.c1, args.model.q1, args.u,
                                          args.model.T, providers.get());
        obj["mode"] = "one-dim";
        obj["regime"] = "one-dim";
    } else {
        ModelParams p;
        try {
            p = args.model.two_dim_params();
        } catch (const NonIntersectingBarriers& e) {
            throw UsageError(std::string(e.what()) +
                             "; rerun with --one-dim for the single dominant boundary");
        }
        res = two_dim_parisian_asymptotic(p, args.u, providers.get());
        obj["mode"] = "two-dim";
        obj["regime"] = regime_name(res.regime.tag);
        obj["dominant"] = res.regime.dominant;
        if (res.regime.tag == RegimeTag::Interior) {
            const StructuralConstants s = structural_constants(p);
            obj["drift"] = {s.drift_pos_slope, s.drift_neg_slope};
        }
    }

    obj["formula_id"] = res.branch;
    obj["value"] = res.value;
    obj["constant"] = {{"value", res.constant},
                       {"std_error", res.constant_se},
                       {"source", res.constant_source}};
    json consts = json::array();
    for (const auto& [d, r] : providers.recording->seen)
        consts.push_back({{"descriptor", descriptor_json(d)},
                          {"value", r.value},
                          {"std_error", r.std_error},
                          {"source", r.source}});
    obj["constants"] = consts;
    obj["T_prime"] = providers.recording->seen.empty()
                         ? json()
                         : json(providers.recording->seen.front().first.window);
    obj["notes"] = res.notes;

    if (args.json_out) {
        std::cout << obj.dump(2) << "\n";
    } else {
        std::printf("regime:  %s\n", obj["regime"].get<std::string>().c_str());
        std::printf("formula: %s\n", res.branch.c_str());
        std::printf("value:   %.12g at u=%g\n", res.value, args.u);
        if (!res.constant_source.empty())
            std::printf("constant: %.10g (se %.3g, %s)\n", res.constant, res.constant_se,
                        res.constant_source.c_str());
        for (const auto& [d, r] : providers.recording->seen)
            std::printf("  needed %s -> %.10g (%s)\n", describe(d).c_str(), r.value,
                        r.source.c_str());
        for (const auto& n : res.notes) std::printf("note: %s\n", n.c_str());
    }
    if (!args.out.empty()) ctx.write_file(args.out, obj.dump(2) + "\n");
    return 0;
}

// ------------------------------------------------------------------ mc-ruin

struct McRuinArgs {
    ModelArgs model;
    std::vector<double> us;
    std::string u_sweep;
    double horizon = 0, step = 0;
    std::size_t n = 100000;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    WindowSchedule schedule = WindowSchedule::ConstantWindow;
    bool force = false, independent = false;
    double M = 0, tau = 0.005;
    std::string out, registry_path;
    bool json_out = false, simulate_constants = false, cache_only = false;
};

int run_mc_ruin(const McRuinArgs& args, RunContext& ctx) {
    std::vector<double> us = args.us;
    if (!args.u_sweep.empty())
        for (double u : sweep_values(args.u_sweep, "--u-sweep")) us.push_back(u);
    if (us.empty()) throw UsageError("need at least one --u (or --u-sweep)");
    for (double u : us)
        if (!(u > 0)) throw UsageError("--u must be positive");

    std::optional<ModelParams> p;
    if (args.model.one_dim)
        args.model.check_one_dim();
    else
        p = args.model.two_dim_params();

    SimConfig scfg;
    scfg.M = args.M;
    scfg.tau = args.tau;
    scfg.n = 10000;  // constants for the feasibility gate only
    scfg.seed = args.seed;
    scfg.threads = args.threads;
    ProviderStack providers =
        make_providers(args.registry_path, args.simulate_constants, args.cache_only, scfg);

    // Feasibility gate: expected hit counts below 10 make the plain MC
    // estimate meaningless, so refuse unless forced.
    std::vector<double> hints(us.size(), std::nan(""));
    bool hint_missing = false;
    for (std::size_t i = 0; i < us.size(); ++i) {
        try {
            const AsymptoticResult a =
                args.model.one_dim
                    ? one_dim_parisian_asymptotic(args.model.H, args.model.c1, args.model.q1,
                                                  us[i], args.model.T, providers.get())
                    : two_dim_parisian_asymptotic(*p, us[i], providers.get());
            hints[i] = a.value;
        } catch (const MissingConstant&) {
            hint_missing = true;
        }
    }
    if (hint_missing)
        std::cerr << "warning: feasibility gate skipped (no constant available; pass "
                     "--registry or --simulate-constants)\n";
    if (!args.force) {
        for (std::size_t i = 0; i < us.size(); ++i) {
            if (std::isnan(hints[i]) || hints[i] < 0) continue;
            const double expected = hints[i] * static_cast<double>(args.n);
            if (expected < 10.0) {
                std::cerr << "refusing u=" << us[i] << ": asymptotic value " << hints[i]
                          << " implies ~" << expected << " hits at n=" << args.n
                          << " (need >= 10). Increase --n to >= "
                          << static_cast<long long>(std::ceil(10.0 / hints[i]))
                          << ", lower u, or pass --force.\n";
                return 2;
            }
        }
    }

    RuinMCConfig cfg;
    cfg.horizon = args.horizon;
    cfg.step = args.step;
    cfg.n = args.n;
    cfg.seed = args.seed;
    cfg.threads = args.threads;
    cfg.schedule = args.schedule;

    std::string csv = "u,T,H,p_hat,ci95,n,horizon,step,seed\n";
    json rows = json::array();
    if (!args.json_out)
        std::printf("direct simulation, H=%g T=%g schedule=%s\n", args.model.H, args.model.T,
                    args.schedule == WindowSchedule::ConstantWindow ? "constant" : "scaled");
    for (std::size_t i = 0; i < us.size(); ++i) {
        RuinMCConfig c = cfg;
        if (args.independent) c.seed = cfg.seed + i;
        c.asymptotic_hint = hints[i];
        const RuinEstimate est =
            args.model.one_dim
                ? simulate_one_dim_parisian(args.model.H, args.model.c1, args.model.q1, us[i],
                                            args.model.T, c)
                : simulate_two_dim_parisian(*p, us[i], c);
        print_warnings(est.warnings);
        csv += fmt17(us[i]) + "," + fmt17(args.model.T) + "," + fmt17(args.model.H) + "," +
               fmt17(est.p_hat) + "," + fmt17(est.ci95_half_width) + "," +
               std::to_string(est.n) + "," + fmt17(est.horizon) + "," + fmt17(est.step) + "," +
               std::to_string(est.seed) + "\n";
        json r = {{"u", us[i]},
                  {"p_hat", est.p_hat},
                  {"ci_low", est.ci_low},
                  {"ci_high", est.ci_high},
                  {"ci95", est.ci95_half_width},
                  {"hits", est.hits},
                  {"n", est.n},
                  {"window", est.window},
                  {"horizon", est.horizon},
                  {"step", est.step},
                  {"seed", est.seed},
                  {"warnings", est.warnings}};
        if (!std::isnan(hints[i])) {
            r["asymptotic"] = hints[i];
            if (hints[i] > 0) r["ratio"] = est.p_hat / hints[i];
        }
        rows.push_back(r);
        if (!args.json_out) {
            std::printf("  u=%-8g p_hat=%.6g ci=[%.6g, %.6g] hits=%zu n=%zu horizon=%g step=%g",
                        us[i], est.p_hat, est.ci_low, est.ci_high, est.hits, est.n, est.horizon,
                        est.step);
            if (!std::isnan(hints[i]) && hints[i] > 0)
                std::printf(" ratio=%.4g", est.p_hat / hints[i]);
            std::printf("\n");
        }
    }
    if (args.json_out) {
        json obj = {{"command", "mc-ruin"},
                    {"parameters", args.model.to_json()},
                    {"results", rows}};
        std::cout << obj.dump(2) << "\n";
    }
    if (!args.out.empty()) ctx.write_file(args.out, csv);
    return 0;
}

// ----------------------------------------------------------------- validate

int run_validate(const std::string& report_path, unsigned threads, RunContext& ctx) {
    AcceptanceOptions opt;
    opt.threads = threads;
    opt.verbose = true;
    const std::vector<CriterionResult> results = run_acceptance(opt);
    print_acceptance(std::cout, results);

    std::size_t passed = 0;
    for (const auto& r : results) passed += r.passed ? 1u : 0u;
    std::ostringstream report;
    report << "validation report, tool version " << kVersion << "\n";
    {
        std::time_t t = std::time(nullptr);
        std::tm tm{};
        gmtime_r(&t, &tm);
        char buf[32];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
        report << "run at " << buf << "\n\n";
    }
    std::ostringstream lines;
    print_acceptance(lines, results);
    report << lines.str();
    report << "\n" << passed << "/" << results.size() << " criteria passed\n";
    ctx.write_file(report_path, report.str());
    std::printf("%zu/%zu criteria passed, report written to %s\n", passed, results.size(),
                report_path.c_str());
    return passed == results.size() ? 0 : 3;
}

// ------------------------------------------------------------------ figures

int run_figures(const std::string& out_dir, unsigned threads, RunContext& ctx) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    auto path = [&](const std::string& name) { return (fs::path(out_dir) / name).string(); };

    {  // grid-step bias of the Brownian window constant
        std::cerr << "figures: grid-step bias...\n";
        const double L = 0.5;
        const std::vector<double> taus = {0.02, 0.01, 0.005, 0.0025};
        std::vector<Estimate> ests;
        for (double tau : taus) {
            SimConfig c;
            c.tau = tau;
            c.n = 20000;
            c.seed = 31415;
            c.threads = threads;
            ests.push_back(simulate_pickands(0.5, L, c));
        }
        ctx.write_file(path("fig_f1_bias.csv"), bias_csv(taus, ests, L, nullptr));
    }

    {  // envelope of the drifted sup-inf constant across window lengths
        std::cerr << "figures: drifted-constant envelope...\n";
        const DriftSpec drift{1.0, 1.0};
        const std::vector<double> Ls = sweep_values("0:2:0.25", "--sweep-L");
        SimConfig c;
        c.tau = 0.005;
        c.n = 10000;
        c.seed = 27182;
        c.threads = threads;
        const std::vector<Estimate> ests = piterbarg_sweep(drift, Ls, c);
        std::string csv = "L,a,b,estimate,std_error,lower,upper,M,tau,n,seed\n";
        for (std::size_t i = 0; i < Ls.size(); ++i) {
            const auto [lower, upper] = piterbarg_bounds(drift, Ls[i]);
            csv += fmt17(Ls[i]) + ",1,1," + fmt17(ests[i].value) + "," +
                   fmt17(ests[i].std_error) + "," + fmt17(lower) + "," + fmt17(upper) + "," +
                   fmt17(ests[i].M) + "," + fmt17(ests[i].tau) + "," +
                   std::to_string(ests[i].n) + "," + std::to_string(ests[i].seed) + "\n";
        }
        ctx.write_file(path("fig_piterbarg_bounds.csv"), csv);
    }

    {  // window-constant curves per Hurst index, with the provable lower bound
        const std::vector<double> Hs = {0.1, 0.3, 0.5, 0.7, 0.9};
        const std::vector<double> Ls = sweep_values("0:2:0.25", "--sweep-L");
        const std::vector<double> m_grid = {0.25, 0.5, 1.0 / std::sqrt(2.0), 1.0, 1.25};
        for (std::size_t hi = 0; hi < Hs.size(); ++hi) {
            std::cerr << "figures: window constant at H=" << Hs[hi] << "...\n";
            SimConfig c;
            c.tau = 0.02;
            c.n = 2000;
            c.seed = 16180 + hi;
            c.threads = threads;
            const std::vector<Estimate> ests = pickands_sweep(Hs[hi], Ls, c);
            const Estimate inv = estimate_inverse_integral_expectation(Hs[hi], c);
            const std::vector<double> cdf = estimate_sup_cdf(Hs[hi], m_grid, c);
            std::vector<double> bounds;
            for (double L : Ls)
                bounds.push_back(pickands_lower_bound(Hs[hi], L, inv.value, m_grid, cdf).bound);
            char name[64];
            std::snprintf(name, sizeof(name), "fig_pickands_H%g.csv", Hs[hi]);
            ctx.write_file(path(name), pickands_csv(Hs[hi], Ls, ests, &bounds, nullptr));
        }
    }
    std::printf("wrote %zu figure data files to %s\n", ctx.outputs.size(), out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parisian ruin of (fractional) Brownian risk processes: constants, "
                 "asymptotics, direct simulation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    PiterbargArgs pit;
    CLI::App* cmd_pit = app.add_subcommand(
        "piterbarg", "estimate the drifted sup-inf constant of Brownian motion");
    cmd_pit->add_option("--a", pit.a, "drift slope on the right half-line")->required();
    cmd_pit->add_option("--b", pit.b, "drift slope on the left half-line")->required();
    cmd_pit->add_option("--L", pit.L, "window length")->capture_default_str();
    cmd_pit->add_option("--sweep-L", pit.sweep, "lo:hi:step window sweep (inclusive)");
    cmd_pit->add_option("--M", pit.M, "truncation half-width, 0 = default rule");
    cmd_pit->add_option("--tau", pit.tau, "grid step")->capture_default_str();
    cmd_pit->add_option("--n", pit.n, "replications")->capture_default_str();
    cmd_pit->add_option("--seed", pit.seed, "base seed")->capture_default_str();
    cmd_pit->add_option("--threads", pit.threads, "worker threads, 0 = hardware");
    cmd_pit->add_option("--out", pit.out, "write sweep CSV here");
    cmd_pit->add_option("--registry", pit.registry_path, "constant store path")
        ->envname("PARISIAN_REGISTRY");
    cmd_pit->add_flag("--json", pit.json_out, "print a JSON object instead of text");
    cmd_pit->add_flag("--save", pit.save, "store estimates in the registry");
    cmd_pit->add_flag("--independent-seeds", pit.independent,
                      "fresh seed per sweep point instead of common random numbers");

    PickandsArgs pick;
    CLI::App* cmd_pick = app.add_subcommand(
        "pickands", "estimate the window constant of fractional Brownian motion");
    cmd_pick->add_option("--H", pick.H, "Hurst index in (0,1)")->required();
    cmd_pick->add_option("--L", pick.L, "window length")->capture_default_str();
    cmd_pick->add_option("--sweep-L", pick.sweep, "lo:hi:step window sweep (inclusive)");
    cmd_pick->add_flag("--bias-sweep", pick.bias_sweep,
                       "estimate at every --tau and report bias against the exact value");
    cmd_pick->add_flag("--lower-bound", pick.lower_bound,
                       "also simulate the provable lower bound (two extra small runs)");
    cmd_pick->add_option("--M", pick.M, "truncation half-width, 0 = default rule");
    cmd_pick->add_option("--tau", pick.taus, "grid step; repeat with --bias-sweep");
    cmd_pick->add_option("--eta", pick.eta, "averaging-grid step, 0 = same as tau");
    cmd_pick->add_option("--n", pick.n, "replications")->capture_default_str();
    cmd_pick->add_option("--seed", pick.seed, "base seed")->capture_default_str();
    cmd_pick->add_option("--threads", pick.threads, "worker threads, 0 = hardware");
    cmd_pick->add_option("--out", pick.out, "write sweep CSV here");
    cmd_pick->add_option("--registry", pick.registry_path, "constant store path")
        ->envname("PARISIAN_REGISTRY");
    cmd_pick->add_flag("--json", pick.json_out, "print a JSON object instead of text");
    cmd_pick->add_flag("--save", pick.save, "store estimates in the registry");
    cmd_pick->add_flag("--independent-seeds", pick.independent,
                       "fresh seed per sweep point instead of common random numbers");

    AsymptoticsArgs asym;
    CLI::App* cmd_asym = app.add_subcommand(
        "asymptotics", "evaluate the large-capital approximation of the ruin probability");
    add_model_flags(cmd_asym, asym.model);
    cmd_asym->add_option("--u", asym.u, "capital level")->required();
    cmd_asym->add_option("--M", asym.M, "constant-simulation truncation, 0 = default");
    cmd_asym->add_option("--tau", asym.tau, "constant-simulation grid step")
        ->capture_default_str();
    cmd_asym->add_option("--eta", asym.eta, "constant-simulation averaging step");
    cmd_asym->add_option("--n", asym.n, "constant-simulation replications")
        ->capture_default_str();
    cmd_asym->add_option("--seed", asym.seed, "constant-simulation seed");
    cmd_asym->add_option("--threads", asym.threads, "worker threads");
    cmd_asym->add_option("--out", asym.out, "write the JSON result here");
    cmd_asym->add_option("--registry", asym.registry_path, "constant store path")
        ->envname("PARISIAN_REGISTRY");
    cmd_asym->add_flag("--json", asym.json_out, "print the JSON result object");
    cmd_asym->add_flag("--simulate-constants", asym.simulate_constants,
                       "simulate missing constants on the fly");
    cmd_asym->add_flag("--cache-only", asym.cache_only,
                       "never simulate; fail on constants absent from the registry");

    McRuinArgs mc;
    CLI::App* cmd_mc = app.add_subcommand(
        "mc-ruin", "simulate the ruin probability directly (crude Monte Carlo)");
    add_model_flags(cmd_mc, mc.model);
    cmd_mc->add_option("--u", mc.us, "capital level (repeatable for a sweep)");
    cmd_mc->add_option("--u-sweep", mc.u_sweep, "lo:hi:step capital sweep (inclusive)");
    cmd_mc->add_option("--horizon", mc.horizon, "rescaled-time span, 0 = automatic");
    cmd_mc->add_option("--step", mc.step, "grid step, 0 = automatic");
    cmd_mc->add_option("--n", mc.n, "replications")->capture_default_str();
    cmd_mc->add_option("--seed", mc.seed, "base seed")->capture_default_str();
    cmd_mc->add_option("--threads", mc.threads, "worker threads, 0 = hardware");
    cmd_mc->add_option("--schedule", mc.schedule, "window growth in u")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, WindowSchedule>{
                {"constant", WindowSchedule::ConstantWindow},
                {"scaled", WindowSchedule::ScaledWindow}},
            CLI::ignore_case));
    cmd_mc->add_flag("--force", mc.force, "run even when the expected hit count is below 10");
    cmd_mc->add_flag("--independent-seeds", mc.independent,
                     "fresh seed per capital level instead of common random numbers");
    cmd_mc->add_option("--M", mc.M, "gate-constant truncation, 0 = default");
    cmd_mc->add_option("--tau", mc.tau, "gate-constant grid step")->capture_default_str();
    cmd_mc->add_option("--out", mc.out, "write sweep CSV here");
    cmd_mc->add_option("--registry", mc.registry_path, "constant store path")
        ->envname("PARISIAN_REGISTRY");
    cmd_mc->add_flag("--json", mc.json_out, "print a JSON object instead of text");
    cmd_mc->add_flag("--simulate-constants", mc.simulate_constants,
                     "simulate gate constants on the fly");
    cmd_mc->add_flag("--cache-only", mc.cache_only, "gate constants from the registry only");

    std::string report_path = "validation_report.txt";
    unsigned validate_threads = 0;
    CLI::App* cmd_val =
        app.add_subcommand("validate", "run the full release checklist (ten criteria)");
    cmd_val->add_option("--out", report_path, "report file")->capture_default_str();
    cmd_val->add_option("--threads", validate_threads, "worker threads, 0 = hardware");

    std::string fig_dir = ".";
    unsigned fig_threads = 0;
    CLI::App* cmd_fig =
        app.add_subcommand("figures", "write the figure data files (CSV, fixed seeds)");
    cmd_fig->add_option("--out-dir", fig_dir, "output directory")->capture_default_str();
    cmd_fig->add_option("--threads", fig_threads, "worker threads, 0 = hardware");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    RunContext ctx;
    for (int i = 0; i < argc; ++i) ctx.argv.emplace_back(argv[i]);

    try {
        int rc = 0;
        if (cmd_pit->parsed()) {
            ctx.command = "piterbarg";
            ctx.seed = pit.seed;
            ctx.parameters = {{"a", pit.a},     {"b", pit.b},   {"L", pit.L},
                              {"sweep_L", pit.sweep}, {"M", pit.M},   {"tau", pit.tau},
                              {"n", pit.n},     {"seed", pit.seed}, {"threads", pit.threads},
                              {"independent_seeds", pit.independent}};
            rc = run_piterbarg(pit, ctx);
        } else if (cmd_pick->parsed()) {
            ctx.command = "pickands";
            ctx.seed = pick.seed;
            ctx.parameters = {{"H", pick.H},    {"L", pick.L},  {"sweep_L", pick.sweep},
                              {"bias_sweep", pick.bias_sweep}, {"lower_bound", pick.lower_bound},
                              {"M", pick.M},    {"tau", pick.taus}, {"eta", pick.eta},
                              {"n", pick.n},    {"seed", pick.seed}, {"threads", pick.threads},
                              {"independent_seeds", pick.independent}};
            rc = run_pickands(pick, ctx);
        } else if (cmd_asym->parsed()) {
            ctx.command = "asymptotics";
            ctx.seed = asym.seed;
            ctx.parameters = asym.model.to_json();
            ctx.parameters["u"] = asym.u;
            ctx.parameters["tau"] = asym.tau;
            ctx.parameters["n"] = asym.n;
            ctx.parameters["seed"] = asym.seed;
            ctx.parameters["simulate_constants"] = asym.simulate_constants;
            ctx.parameters["cache_only"] = asym.cache_only;
            rc = run_asymptotics(asym, ctx);
        } else if (cmd_mc->parsed()) {
            ctx.command = "mc-ruin";
            ctx.seed = mc.seed;
            ctx.parameters = mc.model.to_json();
            ctx.parameters["u"] = mc.us;
            ctx.parameters["u_sweep"] = mc.u_sweep;
            ctx.parameters["horizon"] = mc.horizon;
            ctx.parameters["step"] = mc.step;
            ctx.parameters["n"] = mc.n;
            ctx.parameters["seed"] = mc.seed;
            ctx.parameters["schedule"] =
                mc.schedule == WindowSchedule::ConstantWindow ? "constant" : "scaled";
            ctx.parameters["force"] = mc.force;
            ctx.parameters["independent_seeds"] = mc.independent;
            rc = run_mc_ruin(mc, ctx);
        } else if (cmd_val->parsed()) {
            ctx.command = "validate";
            ctx.parameters = {{"out", report_path}, {"threads", validate_threads}};
            rc = run_validate(report_path, validate_threads, ctx);
        } else if (cmd_fig->parsed()) {
            ctx.command = "figures";
            ctx.parameters = {{"out_dir", fig_dir}, {"threads", fig_threads}};
            rc = run_figures(fig_dir, fig_threads, ctx);
        }
        ctx.write_manifest();
        return rc;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
