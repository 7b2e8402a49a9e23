#ifndef SURROFIT_BENCH_HPP
#define SURROFIT_BENCH_HPP

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "surrofit/dataset.hpp"
#include "surrofit/sampling.hpp"
#include "surrofit/serialize.hpp"
#include "surrofit/surrogate.hpp"
#include "surrofit/testbed.hpp"
#include "surrofit/transform.hpp"

namespace surrofit {

/// Invalid experiment description (bad JSON keys, unknown names, bad ranges).
class SpecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class DomainKind {
    Identity,
    MinMax,
    GradientTransform,
    FunctionTransform,
    KrigingScale,
    Ideal,
};

inline const char* to_string(DomainKind d) {
    switch (d) {
        case DomainKind::Identity: return "identity";
        case DomainKind::MinMax: return "minmax";
        case DomainKind::GradientTransform: return "gradient-transform";
        case DomainKind::FunctionTransform: return "function-transform";
        case DomainKind::KrigingScale: return "kriging-scale";
        case DomainKind::Ideal: return "ideal";
    }
    return "identity";
}

inline DomainKind domain_kind_from_string(const std::string& s) {
    for (DomainKind d : {DomainKind::Identity, DomainKind::MinMax, DomainKind::GradientTransform,
                         DomainKind::FunctionTransform, DomainKind::KrigingScale,
                         DomainKind::Ideal})
        if (s == to_string(d)) return d;
    throw SpecError("unknown domain: " + s);
}

inline constexpr std::uint64_t kDefaultMasterSeed = 20260814;

/// Everything a sweep needs: the target function and frame, which domain
/// fixes and model kinds to cross, the sample-count grid, and seeding.
struct ExperimentSpec {
    std::string function = "sinusoid";  // sinusoid | example2d[_scaled|_rotated]
    int dim = 2;
    bool rotated = false;          // sinusoid only: embed in a random rotation
    std::uint64_t frame_seed = 1;  // seeds that rotation
    std::vector<std::string> domains;
    std::vector<std::string> models;
    std::vector<int> sample_counts;
    int repeats = 50;
    int test_points = 100000;
    std::uint64_t master_seed = kDefaultMasterSeed;
    bool collect_pointwise = false;  // keep signed test errors; shares the test
                                     // cloud across repeats so pointwise
                                     // variance is well defined

    void validate() const {
        const std::set<std::string> fns = {"sinusoid", "example2d", "example2d_scaled",
                                           "example2d_rotated"};
        if (!fns.count(function)) throw SpecError("unknown function: " + function);
        if (function != "sinusoid" && dim != 2)
            throw SpecError(function + " is 2-dimensional");
        if (dim < 1) throw SpecError("dim must be >= 1");
        if (domains.empty()) throw SpecError("domains must be non-empty");
        if (models.empty()) throw SpecError("models must be non-empty");
        std::set<std::string> seen;
        for (const auto& d : domains) {
            domain_kind_from_string(d);
            if (!seen.insert(d).second) throw SpecError("duplicate domain: " + d);
        }
        seen.clear();
        for (const auto& m : models) {
            try {
                surrogate_kind_from_string(m);
            } catch (const InvalidArgumentError& e) {
                throw SpecError(e.what());
            }
            if (!seen.insert(m).second) throw SpecError("duplicate model: " + m);
        }
        if (sample_counts.empty()) throw SpecError("sample_counts must be non-empty");
        for (std::size_t i = 0; i < sample_counts.size(); ++i) {
            if (sample_counts[i] < 1) throw SpecError("sample counts must be positive");
            if (i > 0 && sample_counts[i] <= sample_counts[i - 1])
                throw SpecError("sample_counts must be ascending");
        }
        if (repeats < 1) throw SpecError("repeats must be >= 1");
        if (test_points < 1) throw SpecError("test_points must be >= 1");
    }
};

inline json spec_to_json(const ExperimentSpec& s) {
    return json{{"function", s.function},
                {"dim", s.dim},
                {"rotated", s.rotated},
                {"frame_seed", s.frame_seed},
                {"domains", s.domains},
                {"models", s.models},
                {"sample_counts", s.sample_counts},
                {"repeats", s.repeats},
                {"test_points", s.test_points},
                {"master_seed", s.master_seed},
                {"collect_pointwise", s.collect_pointwise}};
}

inline ExperimentSpec spec_from_json(const json& j) {
    if (!j.is_object()) throw SpecError("experiment spec must be a JSON object");
    const std::set<std::string> known = {"function",      "dim",         "rotated",
                                         "frame_seed",    "domains",     "models",
                                         "sample_counts", "repeats",     "test_points",
                                         "master_seed",   "collect_pointwise"};
    for (const auto& item : j.items())
        if (!known.count(item.key())) throw SpecError("unknown spec key: " + item.key());
    ExperimentSpec s;
    try {
        s.function = j.at("function").get<std::string>();
        s.dim = j.at("dim").get<int>();
        s.domains = j.at("domains").get<std::vector<std::string>>();
        s.models = j.at("models").get<std::vector<std::string>>();
        s.sample_counts = j.at("sample_counts").get<std::vector<int>>();
        s.rotated = j.value("rotated", s.rotated);
        s.frame_seed = j.value("frame_seed", s.frame_seed);
        s.repeats = j.value("repeats", s.repeats);
        s.test_points = j.value("test_points", s.test_points);
        s.master_seed = j.value("master_seed", s.master_seed);
        s.collect_pointwise = j.value("collect_pointwise", s.collect_pointwise);
    } catch (const json::exception& e) {
        throw SpecError(std::string("malformed spec: ") + e.what());
    }
    s.validate();
    return s;
}

/// Canned sweeps named after the benchmark dimension they exercise.
inline ExperimentSpec preset_spec(const std::string& name) {
    ExperimentSpec s;
    if (name == "2d") {
        s.function = "example2d_rotated";
        s.dim = 2;
        s.domains = {"identity", "minmax", "gradient-transform", "function-transform",
                     "kriging-scale", "ideal"};
        s.models = {"rbf"};
        for (int p = 7; p <= 26; ++p) s.sample_counts.push_back(p);
    } else if (name == "4d") {
        s.function = "sinusoid";
        s.dim = 4;
        s.rotated = true;
        s.frame_seed = 41;
        s.domains = {"minmax", "gradient-transform", "function-transform", "kriging-scale",
                     "ideal"};
        s.models = {"rbf", "ge-rbf"};
        s.sample_counts = {20, 30, 40, 50};
    } else if (name == "8d") {
        s.function = "sinusoid";
        s.dim = 8;
        s.rotated = true;
        s.frame_seed = 81;
        s.domains = {"minmax", "gradient-transform", "function-transform", "kriging-scale",
                     "ideal"};
        s.models = {"ge-rbf"};
        s.sample_counts = {130, 160, 190};
    } else if (name == "16d") {
        // Long-running sweep; not part of any default run.
        s.function = "sinusoid";
        s.dim = 16;
        s.rotated = true;
        s.frame_seed = 161;
        s.domains = {"minmax", "gradient-transform", "ideal"};
        s.models = {"ge-rbf"};
        s.sample_counts = {400, 800, 1200, 1600, 2000};
    } else {
        throw SpecError("unknown preset: " + name + " (expected 2d, 4d, 8d or 16d)");
    }
    return s;
}

/// Shrink a spec for smoke runs: 10 repeats, 1e4 test points.
inline void apply_quick(ExperimentSpec& s) {
    s.repeats = std::min(s.repeats, 10);
    s.test_points = std::min(s.test_points, 10000);
}

/// A resolved experiment target: the (possibly frame-wrapped) function to
/// sample plus the underlying sinusoid and the applied frame, which the
/// ideal-domain baseline needs.
///
/// Two kinds of sampling region coexist. The 2d example variants keep the
/// axis-aligned sampling box fixed while the frame distorts the function
/// underneath it; the mismatch between the sampling frame and the function's
/// natural frame is the effect those cells exist to measure (an isotropic
/// kernel is blind to a rotation that is applied to samples and function
/// alike). The rotated sinusoid problems instead pose the domain itself as
/// the rotated cube, so sampling follows the image of [0,1]^N under the
/// frame; sampling the image's bounding box would spread the budget over a
/// region exponentially larger than the domain as the dimension grows,
/// starving every fit equally and erasing the domain effects under study.
struct Problem {
    TestFunction fn;
    SinusoidSpec sinusoid;
    Matrix r_applied;
    Vector s_applied;
    bool framed = false;
    bool domain_is_image = false;  // sample R S [0,1]^N instead of fn.bounds

    /// Map pre-image rows u in [0,1]^N to domain points x_hat = R S u.
    Matrix to_domain(const Matrix& u) const {
        if (!framed) return u;
        return u * s_applied.asDiagonal() * r_applied.transpose();
    }
    Vector to_domain_point(const Vector& u) const {
        if (!framed) return u;
        return r_applied * s_applied.cwiseProduct(u);
    }
};

inline Problem make_problem(const ExperimentSpec& spec) {
    Problem pr;
    if (spec.function == "sinusoid") {
        pr.sinusoid = make_sinusoid(spec.dim);
        if (spec.rotated) {
            Rng rng(derive_seed(spec.frame_seed, 0xf7a3eu));
            pr.r_applied = random_rotation(spec.dim, rng);
        } else {
            pr.r_applied = Matrix::Identity(spec.dim, spec.dim);
        }
        pr.s_applied = Vector::Ones(spec.dim);
    } else {
        // sin(2 pi x1) + sin(2 pi x2) as a 2-term sinusoid, optionally in the
        // stretched and rotated frames of the worked 2D example.
        pr.sinusoid.amplitudes = Vector::Constant(2, 2.0);
        pr.sinusoid.frequencies = Vector::Constant(2, 2.0 * M_PI);
        pr.r_applied = Matrix::Identity(2, 2);
        pr.s_applied = Vector::Ones(2);
        if (spec.function == "example2d_scaled" || spec.function == "example2d_rotated")
            pr.s_applied << 2.0, 1.0;
        if (spec.function == "example2d_rotated") pr.r_applied = rotation_2d(M_PI / 6.0);
    }
    const TestFunction inner = sinusoid_function(pr.sinusoid, spec.function);
    pr.framed = (pr.r_applied - Matrix::Identity(spec.dim, spec.dim)).cwiseAbs().maxCoeff() > 0.0 ||
                (pr.s_applied.array() != 1.0).any();
    pr.domain_is_image = spec.function == "sinusoid" && spec.rotated;
    pr.fn = pr.framed ? wrap_frame(inner, pr.r_applied, pr.s_applied) : inner;
    return pr;
}

/// Latin-hypercube construction sample in the problem's sampling region.
inline Matrix domain_lhs(const Problem& prob, int p, Rng& rng) {
    if (!prob.domain_is_image) return latin_hypercube(p, prob.fn.bounds, rng);
    return prob.to_domain(latin_hypercube(p, Bounds::cube(prob.fn.dim, 0.0, 1.0), rng));
}

/// Uniform test cloud in the problem's sampling region.
inline Matrix domain_cloud(const Problem& prob, int n, Rng& rng) {
    if (!prob.domain_is_image) return uniform_cloud(n, prob.fn.bounds, rng);
    return prob.to_domain(uniform_cloud(n, Bounds::cube(prob.fn.dim, 0.0, 1.0), rng));
}

namespace seedtag {
inline constexpr std::uint64_t kTestCloud = 1;
inline constexpr std::uint64_t kConstruction = 2;
inline constexpr std::uint64_t kDomainScale = 3;
inline constexpr std::uint64_t kModelTune = 4;
inline constexpr std::uint64_t kLines = 5;
} // namespace seedtag

/// Domain fix for one cell, built strictly from that cell's construction
/// data (plus, for the ideal baseline, the analytically known frame).
inline DomainTransform build_domain_transform(DomainKind kind, const Dataset& construction,
                                              const Problem& prob, std::uint64_t scale_seed) {
    const int dim = construction.dim();
    switch (kind) {
        case DomainKind::Identity:
            return DomainTransform::identity(dim);
        case DomainKind::MinMax: {
            DomainTransform t;
            t.dim = dim;
            t.rotation = Matrix::Identity(dim, dim);
            t.scales = detail::span_scales(construction.points).cwiseInverse();
            t.provenance = Provenance::MinMax;
            t.validate();
            return t;
        }
        case DomainKind::GradientTransform: {
            if (!construction.has_gradients())
                throw InvalidArgumentError("gradient-transform needs gradients");
            return build_transform(construction);
        }
        case DomainKind::FunctionTransform: {
            Dataset values_only = construction;
            values_only.gradients.resize(0, 0);
            return build_transform(values_only);
        }
        case DomainKind::KrigingScale: {
            // Tune in the min-max frame for conditioning, then fold the
            // min-max scaling into the result so it still maps raw inputs.
            const Vector spans = detail::span_scales(construction.points);
            const Matrix xmm = construction.points * spans.cwiseInverse().asDiagonal();
            const Vector eps = tune_kriging(xmm, construction.values, scale_seed);
            DomainTransform t;
            t.dim = dim;
            t.rotation = Matrix::Identity(dim, dim);
            t.scales = eps.cwiseSqrt().cwiseQuotient(spans);
            t.provenance = Provenance::KrigingScale;
            t.validate();
            return t;
        }
        case DomainKind::Ideal:
            return ideal_transform(prob.sinusoid, prob.r_applied, prob.s_applied);
    }
    throw SpecError("unknown domain kind");
}

/// One (domain, model, sample count, repeat) cell of a sweep.
struct RmseRecord {
    std::string domain;
    std::string kind;
    int p = 0;
    int repeat = 0;
    double rmse = 0.0;
    bool failed = false;
    std::string failure;
    Vector pointwise;  // signed prediction errors, present when collected
};

struct TransformLog {
    std::string domain;
    int p = 0;
    int repeat = 0;
    DomainTransform transform;
};

struct RunResult {
    ExperimentSpec spec;
    std::vector<RmseRecord> records;       // canonical (domain, kind, p, repeat) order
    std::vector<TransformLog> transforms;  // canonical (domain, p, repeat) order
    int failures = 0;
};

namespace detail {

template <typename F>
void parallel_for(int count, F&& fn) {
    const unsigned hw = std::thread::hardware_concurrency();
    const int workers = std::min<int>(count, static_cast<int>(hw ? hw : 1));
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) fn(i);
        });
    for (auto& t : pool) t.join();
}

} // namespace detail

/// Execute a sweep. Every cell draws its construction set from a sub-seed of
/// (master seed, repeat, sample count), builds its domain transform from that
/// construction data alone, fits, and scores RMSE on the repeat's uniform
/// test cloud (shared within the repeat so domains and models are compared
/// on identical points). Fit failures are recorded per cell and never abort
/// the sweep. Output is deterministic for a fixed spec: repeats may run on
/// any number of threads, but every random stream is derived, not shared.
inline RunResult run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    const Problem prob = make_problem(spec);
    const int dim = prob.fn.dim;
    const int nd = static_cast<int>(spec.domains.size());
    const int nk = static_cast<int>(spec.models.size());
    const int np = static_cast<int>(spec.sample_counts.size());
    const int nr = spec.repeats;

    std::vector<RmseRecord> recs(static_cast<std::size_t>(nd) * nk * np * nr);
    std::vector<std::optional<DomainTransform>> tlog(static_cast<std::size_t>(nd) * np * nr);
    auto rec_at = [&](int d, int k, int pi, int r) -> RmseRecord& {
        return recs[((static_cast<std::size_t>(d) * nk + k) * np + pi) * nr + r];
    };
    auto tlog_at = [&](int d, int pi, int r) -> std::optional<DomainTransform>& {
        return tlog[(static_cast<std::size_t>(d) * np + pi) * nr + r];
    };
    for (int d = 0; d < nd; ++d)
        for (int k = 0; k < nk; ++k)
            for (int pi = 0; pi < np; ++pi)
                for (int r = 0; r < nr; ++r) {
                    RmseRecord& rec = rec_at(d, k, pi, r);
                    rec.domain = spec.domains[d];
                    rec.kind = spec.models[k];
                    rec.p = spec.sample_counts[pi];
                    rec.repeat = r;
                }

    std::vector<SurrogateKind> kinds;
    for (const auto& m : spec.models) kinds.push_back(surrogate_kind_from_string(m));
    const bool needs_gradients =
        std::any_of(kinds.begin(), kinds.end(),
                    [](SurrogateKind k) {
                        return k == SurrogateKind::GeRbf || k == SurrogateKind::GePolynomial;
                    }) ||
        std::any_of(spec.domains.begin(), spec.domains.end(), [](const std::string& d) {
            return domain_kind_from_string(d) == DomainKind::GradientTransform;
        });

    detail::parallel_for(nr, [&](int r) {
        try {
            const std::uint64_t cloud_rep = spec.collect_pointwise ? 0 : static_cast<std::uint64_t>(r);
            Rng cloud_rng(derive_seed(spec.master_seed, seedtag::kTestCloud, cloud_rep));
            const Matrix cloud = domain_cloud(prob, spec.test_points, cloud_rng);
            Vector truth(spec.test_points);
            for (int i = 0; i < spec.test_points; ++i)
                truth[i] = prob.fn.value(cloud.row(i).transpose());

            for (int pi = 0; pi < np; ++pi) {
                const int p = spec.sample_counts[pi];
                Rng lhs_rng(derive_seed(spec.master_seed, seedtag::kConstruction,
                                        static_cast<std::uint64_t>(r),
                                        static_cast<std::uint64_t>(p)));
                Dataset data;
                data.points = domain_lhs(prob, p, lhs_rng);
                data.values.resize(p);
                for (int i = 0; i < p; ++i)
                    data.values[i] = prob.fn.value(data.points.row(i).transpose());
                if (needs_gradients) {
                    data.gradients.resize(p, dim);
                    for (int i = 0; i < p; ++i)
                        data.gradients.row(i) =
                            prob.fn.gradient(data.points.row(i).transpose()).transpose();
                }

                for (int d = 0; d < nd; ++d) {
                    const DomainKind dk = domain_kind_from_string(spec.domains[d]);
                    DomainTransform t;
                    try {
                        t = build_domain_transform(
                            dk, data, prob,
                            derive_seed(spec.master_seed, seedtag::kDomainScale,
                                        static_cast<std::uint64_t>(r),
                                        static_cast<std::uint64_t>(p) * 8 + d));
                    } catch (const std::exception& e) {
                        for (int k = 0; k < nk; ++k) {
                            rec_at(d, k, pi, r).failed = true;
                            rec_at(d, k, pi, r).failure = e.what();
                        }
                        continue;
                    }
                    tlog_at(d, pi, r) = t;

                    double rbf_eps = 0.0;  // shared by plain and GE fits
                    for (int k = 0; k < nk; ++k) {
                        RmseRecord& rec = rec_at(d, k, pi, r);
                        try {
                            Surrogate s;
                            switch (kinds[k]) {
                                case SurrogateKind::Rbf:
                                case SurrogateKind::GeRbf: {
                                    if (rbf_eps == 0.0)
                                        rbf_eps = rippa_loocv(t.forward_points(data.points),
                                                              data.values,
                                                              default_epsilon_grid())
                                                      .best_epsilon;
                                    RbfConfig cfg;
                                    cfg.epsilon = rbf_eps;
                                    s = fit_rbf(data, cfg, kinds[k] == SurrogateKind::GeRbf, t);
                                    break;
                                }
                                case SurrogateKind::Polynomial:
                                case SurrogateKind::GePolynomial:
                                    s = fit_polynomial(
                                        data, 2, kinds[k] == SurrogateKind::GePolynomial, t);
                                    break;
                                case SurrogateKind::Kriging: {
                                    const Vector eps = tune_kriging(
                                        t.forward_points(data.points), data.values,
                                        derive_seed(spec.master_seed, seedtag::kModelTune,
                                                    static_cast<std::uint64_t>(r),
                                                    static_cast<std::uint64_t>(p) * 8 + d));
                                    s = fit_kriging(data, eps, t);
                                    break;
                                }
                            }
                            const Vector err = s.predict_many(cloud) - truth;
                            const double rmse =
                                std::sqrt(err.squaredNorm() / spec.test_points);
                            if (!std::isfinite(rmse)) throw NumericsError("non-finite RMSE");
                            rec.rmse = rmse;
                            if (spec.collect_pointwise) rec.pointwise = err;
                        } catch (const std::exception& e) {
                            rec.failed = true;
                            rec.failure = e.what();
                        }
                    }
                }
            }
        } catch (const std::exception& e) {
            // Defensive: per-cell failures are handled above, so reaching
            // here means setup for the whole repeat failed. Mark it all.
            for (int d = 0; d < nd; ++d)
                for (int k = 0; k < nk; ++k)
                    for (int pi = 0; pi < np; ++pi) {
                        RmseRecord& rec = rec_at(d, k, pi, r);
                        if (!rec.failed && rec.rmse == 0.0) {
                            rec.failed = true;
                            rec.failure = e.what();
                        }
                    }
        }
    });

    RunResult res;
    res.spec = spec;
    res.records = std::move(recs);
    for (int d = 0; d < nd; ++d)
        for (int pi = 0; pi < np; ++pi)
            for (int r = 0; r < nr; ++r)
                if (tlog_at(d, pi, r))
                    res.transforms.push_back({spec.domains[d], spec.sample_counts[pi], r,
                                              *tlog_at(d, pi, r)});
    for (const auto& rec : res.records)
        if (rec.failed) ++res.failures;
    return res;
}

/// Mean over test points of the across-repeat variance (population
/// convention) of the signed pointwise error. Requires records collected on
/// a shared test cloud.
inline double shape_variance(const std::vector<const RmseRecord*>& group) {
    if (group.size() < 2)
        throw InvalidArgumentError("shape_variance: need at least 2 repeats");
    const Eigen::Index m = group.front()->pointwise.size();
    if (m < 1) throw InvalidArgumentError("shape_variance: records lack pointwise errors");
    for (const auto* rec : group)
        if (rec->pointwise.size() != m)
            throw InvalidArgumentError("shape_variance: mismatched test clouds");
    Vector mean = Vector::Zero(m);
    for (const auto* rec : group) mean += rec->pointwise;
    mean /= static_cast<double>(group.size());
    double acc = 0.0;
    for (const auto* rec : group) acc += (rec->pointwise - mean).squaredNorm();
    return acc / (static_cast<double>(group.size()) * static_cast<double>(m));
}

struct CellStats {
    int repeats_used = 0;
    int failures = 0;
    double mean_rmse = std::numeric_limits<double>::quiet_NaN();
    double variance_rmse = std::numeric_limits<double>::quiet_NaN();
    double mean_log10_rmse = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> shape_var;
};

/// Aggregate one (domain, kind, p) cell across repeats; failures excluded
/// from the statistics, variance in the population convention.
inline CellStats cell_stats(const RunResult& res, const std::string& domain,
                            const std::string& kind, int p) {
    CellStats st;
    std::vector<const RmseRecord*> ok;
    for (const auto& rec : res.records) {
        if (rec.domain != domain || rec.kind != kind || rec.p != p) continue;
        if (rec.failed) {
            ++st.failures;
            continue;
        }
        ok.push_back(&rec);
    }
    st.repeats_used = static_cast<int>(ok.size());
    if (ok.empty()) return st;
    double sum = 0.0, sum_log = 0.0;
    for (const auto* rec : ok) {
        sum += rec->rmse;
        sum_log += std::log10(std::max(rec->rmse, 1e-300));
    }
    st.mean_rmse = sum / st.repeats_used;
    st.mean_log10_rmse = sum_log / st.repeats_used;
    double var = 0.0;
    for (const auto* rec : ok) var += (rec->rmse - st.mean_rmse) * (rec->rmse - st.mean_rmse);
    st.variance_rmse = var / st.repeats_used;
    if (res.spec.collect_pointwise && ok.size() >= 2 && ok.front()->pointwise.size() > 0)
        st.shape_var = shape_variance(ok);
    return st;
}

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Write rmse.csv, summary.json and transforms/<cell>.json under `out_dir`.
/// CSV rows appear in canonical (domain, kind, p, repeat) order, failed cells
/// omitted (they are tallied in the summary); numbers are printed with 17
/// significant digits so re-runs can be compared byte for byte.
inline void emit(const RunResult& res, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir / "transforms", ec);
    if (ec) throw std::runtime_error("cannot create output directory: " + out_dir.string());

    {
        std::ofstream csv(out_dir / "rmse.csv");
        if (!csv) throw std::runtime_error("cannot write " + (out_dir / "rmse.csv").string());
        csv << "domain,kind,p,repeat,rmse,log10_rmse\n";
        for (const auto& rec : res.records) {
            if (rec.failed) continue;
            csv << rec.domain << ',' << rec.kind << ',' << rec.p << ',' << rec.repeat << ','
                << format_g17(rec.rmse) << ','
                << format_g17(std::log10(std::max(rec.rmse, 1e-300))) << '\n';
        }
    }

    json cells = json::array();
    for (const auto& domain : res.spec.domains)
        for (const auto& kind : res.spec.models)
            for (int p : res.spec.sample_counts) {
                const CellStats st = cell_stats(res, domain, kind, p);
                json c{{"domain", domain},
                       {"kind", kind},
                       {"p", p},
                       {"repeats_used", st.repeats_used},
                       {"failures", st.failures},
                       {"mean_rmse", st.mean_rmse},
                       {"variance_rmse", st.variance_rmse},
                       {"mean_log10_rmse", st.mean_log10_rmse}};
                if (st.shape_var) c["shape_variance"] = *st.shape_var;
                cells.push_back(std::move(c));
            }
    const json summary{{"spec", spec_to_json(res.spec)},
                       {"variance_convention", "population"},
                       {"failures", res.failures},
                       {"cells", cells}};
    {
        std::ofstream js(out_dir / "summary.json");
        if (!js) throw std::runtime_error("cannot write summary.json");
        js << summary.dump(2) << '\n';
    }

    for (const auto& tl : res.transforms) {
        const std::string name =
            tl.domain + "_p" + std::to_string(tl.p) + "_r" + std::to_string(tl.repeat) + ".json";
        std::ofstream tj(out_dir / "transforms" / name);
        if (!tj) throw std::runtime_error("cannot write transforms/" + name);
        tj << to_json(tl.transform).dump(2) << '\n';
    }
}

struct LineSample {
    double t = 0.0;
    double truth = 0.0;
    double prediction = 0.0;
};

/// Sample the surrogate against the truth along straight segments between
/// random endpoint pairs in the problem's domain (the function's box when no
/// problem is supplied). Degenerate (zero-length) segments are redrawn.
inline std::vector<std::vector<LineSample>> line_slice(const Surrogate& s,
                                                       const TestFunction& fn,
                                                       int points_per_line, int line_count,
                                                       Rng& rng,
                                                       const Problem* domain = nullptr) {
    if (points_per_line < 2 || line_count < 1)
        throw InvalidArgumentError("line_slice: need >= 2 points and >= 1 line");
    auto draw = [&] {
        Vector u(fn.dim);
        if (domain && domain->domain_is_image) {
            for (int k = 0; k < fn.dim; ++k) u[k] = rng.uniform01();
            return domain->to_domain_point(u);
        }
        for (int k = 0; k < fn.dim; ++k) u[k] = rng.uniform(fn.bounds.lo[k], fn.bounds.hi[k]);
        return u;
    };
    std::vector<std::vector<LineSample>> lines;
    lines.reserve(line_count);
    for (int l = 0; l < line_count; ++l) {
        Vector a = draw(), b(fn.dim);
        do {
            b = draw();
        } while ((a - b).norm() == 0.0);

        Matrix pts(points_per_line, fn.dim);
        for (int i = 0; i < points_per_line; ++i) {
            const double t = static_cast<double>(i) / (points_per_line - 1);
            pts.row(i) = ((1.0 - t) * a + t * b).transpose();
        }
        const Vector pred = s.predict_many(pts);
        std::vector<LineSample> line(points_per_line);
        for (int i = 0; i < points_per_line; ++i) {
            line[i].t = static_cast<double>(i) / (points_per_line - 1);
            line[i].truth = fn.value(pts.row(i).transpose());
            line[i].prediction = pred[i];
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

/// For every (domain, model) pair: fit at the largest sample count of the
/// spec (repeat 0, same construction data as the sweep would use) and emit
/// four line slices of 200 points each under
/// out_dir/lines/<domain>_<kind>/lines_<k>.csv. Returns the number of cells
/// that failed to fit.
inline int run_lines(const ExperimentSpec& spec, const std::filesystem::path& out_dir) {
    spec.validate();
    const Problem prob = make_problem(spec);
    const int dim = prob.fn.dim;
    const int p = spec.sample_counts.back();

    Rng lhs_rng(derive_seed(spec.master_seed, seedtag::kConstruction, 0,
                            static_cast<std::uint64_t>(p)));
    Dataset data;
    data.points = domain_lhs(prob, p, lhs_rng);
    data.values.resize(p);
    data.gradients.resize(p, dim);
    for (int i = 0; i < p; ++i) {
        data.values[i] = prob.fn.value(data.points.row(i).transpose());
        data.gradients.row(i) = prob.fn.gradient(data.points.row(i).transpose()).transpose();
    }

    namespace fs = std::filesystem;
    int failures = 0;
    for (int d = 0; d < static_cast<int>(spec.domains.size()); ++d) {
        const DomainKind dk = domain_kind_from_string(spec.domains[d]);
        for (int k = 0; k < static_cast<int>(spec.models.size()); ++k) {
            const SurrogateKind sk = surrogate_kind_from_string(spec.models[k]);
            try {
                const DomainTransform t = build_domain_transform(
                    dk, data, prob,
                    derive_seed(spec.master_seed, seedtag::kDomainScale, 0,
                                static_cast<std::uint64_t>(p) * 8 + d));
                Surrogate s;
                switch (sk) {
                    case SurrogateKind::Rbf:
                    case SurrogateKind::GeRbf: {
                        RbfConfig cfg;
                        cfg.grid = default_epsilon_grid();
                        s = fit_rbf(data, cfg, sk == SurrogateKind::GeRbf, t);
                        break;
                    }
                    case SurrogateKind::Polynomial:
                    case SurrogateKind::GePolynomial:
                        s = fit_polynomial(data, 2, sk == SurrogateKind::GePolynomial, t);
                        break;
                    case SurrogateKind::Kriging: {
                        const Vector eps = tune_kriging(
                            t.forward_points(data.points), data.values,
                            derive_seed(spec.master_seed, seedtag::kModelTune, 0,
                                        static_cast<std::uint64_t>(p) * 8 + d));
                        s = fit_kriging(data, eps, t);
                        break;
                    }
                }

                Rng line_rng(derive_seed(spec.master_seed, seedtag::kLines,
                                         static_cast<std::uint64_t>(d),
                                         static_cast<std::uint64_t>(k)));
                const auto lines = line_slice(s, prob.fn, 200, 4, line_rng, &prob);
                const fs::path dir =
                    out_dir / "lines" / (spec.domains[d] + "_" + spec.models[k]);
                std::error_code ec;
                fs::create_directories(dir, ec);
                if (ec) throw std::runtime_error("cannot create " + dir.string());
                for (std::size_t l = 0; l < lines.size(); ++l) {
                    std::ofstream csv(dir / ("lines_" + std::to_string(l) + ".csv"));
                    if (!csv) throw std::runtime_error("cannot write line CSV");
                    csv << "t,truth,prediction\n";
                    for (const auto& smp : lines[l])
                        csv << format_g17(smp.t) << ',' << format_g17(smp.truth) << ','
                            << format_g17(smp.prediction) << '\n';
                }
            } catch (const std::exception&) {
                ++failures;
            }
        }
    }
    return failures;
}

} // namespace surrofit

#endif
