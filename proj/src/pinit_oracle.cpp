#include "hybridgrid/pinit_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <json.hpp>

#include "hybridgrid/walk.hpp"

namespace hybridgrid {

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h = (h ^ c) * 0x100000001b3ULL;
    }
    return h;
}

std::string spec_label(const GridworldSpec& spec) {
    return "b=" + std::to_string(spec.base_size()) + ", d_wall=" +
           std::to_string(spec.wall_distance());
}

}  // namespace

std::string to_string(EstimateMethod m) {
    switch (m) {
        case EstimateMethod::monte_carlo: return "monte_carlo";
        case EstimateMethod::exact_dp: return "exact_dp";
        case EstimateMethod::interpolated: return "interpolated";
    }
    return "?";
}

EstimateMethod parse_estimate_method(const std::string& s) {
    if (s == "monte_carlo") return EstimateMethod::monte_carlo;
    if (s == "exact_dp") return EstimateMethod::exact_dp;
    if (s == "interpolated") return EstimateMethod::interpolated;
    throw std::invalid_argument("unknown estimate method '" + s + "'");
}

MissingCurvePoint::MissingCurvePoint(const GridworldSpec& spec, std::int64_t length)
    : std::runtime_error("success curve for " + spec_label(spec) + " has no point at L=" +
                         std::to_string(length)),
      length_(length) {}

double SuccessCurve::at(std::int64_t length) const {
    const auto it = points.find(length);
    if (it == points.end()) {
        throw MissingCurvePoint(spec, length);
    }
    return it->second.estimate;
}

std::vector<std::int64_t> SuccessCurve::low_confidence_lengths(std::int64_t min_successes) const {
    std::vector<std::int64_t> out;
    for (const auto& [length, p] : points) {
        if (p.method == EstimateMethod::monte_carlo && p.n_success < min_successes) {
            out.push_back(length);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

OccupationPropagator::OccupationPropagator(const GridworldSpec& spec)
    : spec_(spec),
      cur_(static_cast<std::size_t>(spec.num_cells()), 0.0),
      next_(static_cast<std::size_t>(spec.num_cells()), 0.0),
      target_index_(spec.index(spec.target())) {
    cur_[static_cast<std::size_t>(spec.index(spec.start()))] = 1.0;
}

double OccupationPropagator::advance() {
    // Pull form: a cell receives a quarter of each neighbour's mass; where a
    // neighbour would lie behind a wall, the blocked move keeps the cell's own mass.
    const int w = spec_.side();
    const double* src = cur_.data();
    double* dst = next_.data();
    for (int y = 0; y < w; ++y) {
        const double* row = src + static_cast<std::ptrdiff_t>(y) * w;
        const double* below = y > 0 ? row - w : row;
        const double* above = y < w - 1 ? row + w : row;
        double* out = dst + static_cast<std::ptrdiff_t>(y) * w;

        out[0] = 0.25 * (row[0] + row[1] + below[0] + above[0]);
        for (int x = 1; x < w - 1; ++x) {
            out[x] = 0.25 * (row[x - 1] + row[x + 1] + below[x] + above[x]);
        }
        out[w - 1] = 0.25 * (row[w - 2] + row[w - 1] + below[w - 1] + above[w - 1]);
    }
    const double hit = next_[static_cast<std::size_t>(target_index_)];
    next_[static_cast<std::size_t>(target_index_)] = 0.0;
    cur_.swap(next_);
    ++steps_;
    absorbed_ += hit;
    return hit;
}

double OccupationPropagator::remaining() const {
    return std::accumulate(cur_.begin(), cur_.end(), 0.0);
}

double exact_dp(const GridworldSpec& spec, std::int64_t length) {
    if (length < 0) {
        throw std::invalid_argument("exact_dp: length must be >= 0");
    }
    if (length < spec.min_length()) {
        return 0.0;
    }
    OccupationPropagator prop(spec);
    while (prop.steps() < length) {
        prop.advance();
    }
    return prop.absorbed();
}

// ---------------------------------------------------------------------------

FirstHitDistribution::FirstHitDistribution(GridworldSpec spec, std::vector<double> mass,
                                           double failure_mass)
    : spec_(spec), mass_(std::move(mass)), failure_mass_(failure_mass) {
    cumulative_.resize(mass_.size());
    weighted_.resize(mass_.size());
    // Same left-to-right summation order as OccupationPropagator::absorbed().
    double c = 0.0;
    double w = 0.0;
    for (std::size_t i = 0; i < mass_.size(); ++i) {
        c += mass_[i];
        w += static_cast<double>(i + 1) * mass_[i];
        cumulative_[i] = c;
        weighted_[i] = w;
    }
}

double FirstHitDistribution::mass(std::int64_t t) const {
    if (t < 1 || t > horizon()) return 0.0;
    return mass_[static_cast<std::size_t>(t - 1)];
}

double FirstHitDistribution::cumulative(std::int64_t t) const {
    if (t < 1 || horizon() == 0) return 0.0;
    t = std::min(t, horizon());
    return cumulative_[static_cast<std::size_t>(t - 1)];
}

double FirstHitDistribution::conditional_mean(std::int64_t t) const {
    const double c = cumulative(t);
    if (c <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    t = std::min(t, horizon());
    return weighted_[static_cast<std::size_t>(t - 1)] / c;
}

std::int64_t FirstHitDistribution::sample_conditional(std::int64_t length, Rng& rng) const {
    if (length < 1 || length > horizon()) {
        throw std::out_of_range("first-hit sample at L=" + std::to_string(length) +
                                " beyond horizon " + std::to_string(horizon()));
    }
    const double total = cumulative_[static_cast<std::size_t>(length - 1)];
    if (!(total > 0.0)) {
        throw std::domain_error("first-hit sample at L=" + std::to_string(length) +
                                " with zero success probability");
    }
    const double u = uniform01(rng) * total;
    const auto end = cumulative_.begin() + length;
    auto it = std::upper_bound(cumulative_.begin(), end, u);
    if (it == end) --it;
    return static_cast<std::int64_t>(it - cumulative_.begin()) + 1;
}

FirstHitDistribution first_hit_distribution(const GridworldSpec& spec, std::int64_t length) {
    if (length < 1) {
        throw std::invalid_argument("first_hit_distribution: length must be >= 1");
    }
    OccupationPropagator prop(spec);
    std::vector<double> mass;
    mass.reserve(static_cast<std::size_t>(length));
    while (prop.steps() < length) {
        mass.push_back(prop.advance());
    }
    return FirstHitDistribution(spec, std::move(mass), prop.remaining());
}

// ---------------------------------------------------------------------------

CurvePoint estimate_mc(const GridworldSpec& spec, std::int64_t length, Rng& rng,
                       const McOptions& options) {
    if (length < 1) {
        throw std::invalid_argument("estimate_mc: length must be >= 1");
    }
    if (options.batch_size < 1 || options.shot_cap < options.batch_size ||
        options.shot_cap % options.batch_size != 0) {
        throw std::invalid_argument("estimate_mc: shot cap must be a positive multiple of the batch size");
    }
    CurvePoint point{length, 0.0, 0, 0, EstimateMethod::monte_carlo};
    do {
        for (std::int64_t i = 0; i < options.batch_size; ++i) {
            if (random_walk_hit(spec, length, rng) != 0) {
                ++point.n_success;
            }
        }
        point.n_shots += options.batch_size;
    } while (point.n_success < options.min_successes && point.n_shots < options.shot_cap);
    point.estimate = static_cast<double>(point.n_success) / static_cast<double>(point.n_shots);
    return point;
}

// ---------------------------------------------------------------------------

double expected_first_passage(const GridworldSpec& spec, double tolerance) {
    const int n_cells = spec.num_cells();
    const int target = spec.index(spec.target());
    // Unknowns are all cells except the target, packed in cell order.
    auto unknown = [target](int cell) { return cell < target ? cell : cell - 1; };
    const int n = n_cells - 1;

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(n) * 5);
    for (int y = 0; y < spec.side(); ++y) {
        for (int x = 0; x < spec.side(); ++x) {
            const Position p{x, y};
            const int cell = spec.index(p);
            if (cell == target) continue;
            const int row = unknown(cell);
            double diag = 1.0;
            for (Action a : kAllActions) {
                const int next = spec.index(step(spec, p, a));
                if (next == target) continue;
                if (next == cell) {
                    diag -= 0.25;
                } else {
                    entries.emplace_back(row, unknown(next), -0.25);
                }
            }
            entries.emplace_back(row, row, diag);
        }
    }
    Eigen::SparseMatrix<double> a(n, n);
    a.setFromTriplets(entries.begin(), entries.end());
    const Eigen::VectorXd rhs = Eigen::VectorXd::Ones(n);

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(a);
    if (solver.info() != Eigen::Success) {
        throw SolverError("hitting-time factorization failed for " + spec_label(spec));
    }
    Eigen::VectorXd h = solver.solve(rhs);
    double residual = (rhs - a * h).lpNorm<Eigen::Infinity>();
    for (int refine = 0; refine < 5 && residual > tolerance; ++refine) {
        h += solver.solve(rhs - a * h);
        residual = (rhs - a * h).lpNorm<Eigen::Infinity>();
    }
    if (!(residual <= tolerance)) {
        std::ostringstream msg;
        msg << "hitting-time solve for " << spec_label(spec) << " stalled at residual "
            << residual << " > " << tolerance;
        throw SolverError(msg.str());
    }
    return h[unknown(spec.index(spec.start()))];
}

// ---------------------------------------------------------------------------

std::string to_string(CurvePolicy p) {
    switch (p) {
        case CurvePolicy::mc: return "mc";
        case CurvePolicy::exact: return "exact";
        case CurvePolicy::hybrid: return "hybrid";
    }
    return "?";
}

CurvePolicy parse_curve_policy(const std::string& s) {
    if (s == "mc") return CurvePolicy::mc;
    if (s == "exact") return CurvePolicy::exact;
    if (s == "hybrid") return CurvePolicy::hybrid;
    throw std::invalid_argument("unknown curve policy '" + s + "' (expected mc, exact or hybrid)");
}

SuccessCurve build_curve(const GridworldSpec& spec, Rng& rng, const CurveOptions& options) {
    SuccessCurve curve{spec, {}, std::nullopt};
    const double cells = static_cast<double>(spec.num_cells());
    OccupationPropagator prop(spec);

    for (std::int64_t length = 1; length <= options.max_length; length *= 2) {
        const bool use_dp =
            options.policy == CurvePolicy::exact ||
            (options.policy == CurvePolicy::hybrid && cells * static_cast<double>(length) <= options.dp_budget);
        CurvePoint point;
        if (use_dp) {
            while (prop.steps() < length) {
                prop.advance();
            }
            point = CurvePoint{length, prop.absorbed(), 0, 0, EstimateMethod::exact_dp};
        } else {
            point = estimate_mc(spec, length, rng, options.mc);
        }
        curve.points.emplace(length, point);
        if (point.estimate >= options.convergence) {
            curve.converged_at = length;
            break;
        }
    }
    return curve;
}

SuccessCurve curve_at_lengths(const FirstHitDistribution& hits,
                              const std::vector<std::int64_t>& lengths) {
    SuccessCurve curve{hits.spec(), {}, std::nullopt};
    for (std::int64_t length : lengths) {
        if (length < 1 || length > hits.horizon()) {
            throw std::out_of_range("curve_at_lengths: L=" + std::to_string(length) +
                                    " outside first-hit horizon " + std::to_string(hits.horizon()));
        }
        curve.points[length] = CurvePoint{length, hits.cumulative(length), 0, 0, EstimateMethod::exact_dp};
    }
    return curve;
}

SuccessCurve interpolate(const SuccessCurve& curve, const std::vector<std::int64_t>& lengths) {
    SuccessCurve out{curve.spec, {}, curve.converged_at};
    for (std::int64_t length : lengths) {
        if (const auto it = curve.points.find(length); it != curve.points.end()) {
            out.points[length] = it->second;
            continue;
        }
        const auto hi = curve.points.upper_bound(length);
        if (hi == curve.points.begin() || hi == curve.points.end()) {
            throw std::out_of_range("interpolate: L=" + std::to_string(length) +
                                    " outside the curve's range");
        }
        const auto lo = std::prev(hi);
        const double frac = static_cast<double>(length - lo->first) /
                            static_cast<double>(hi->first - lo->first);
        const double value = lo->second.estimate + frac * (hi->second.estimate - lo->second.estimate);
        out.points[length] = CurvePoint{length, value, 0, 0, EstimateMethod::interpolated};
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string stopping_rule(const CurveOptions& options) {
    std::ostringstream s;
    s << "min_success=" << options.mc.min_successes << ";shot_cap=" << options.mc.shot_cap
      << ";convergence=" << options.convergence << ";max_length=" << options.max_length
      << ";dp_budget=" << options.dp_budget;
    return s.str();
}

CacheKey cache_key(const GridworldSpec& spec, const CurveOptions& options) {
    return CacheKey{spec.base_size(), spec.wall_distance(), to_string(options.policy),
                    options.mc.batch_size, stopping_rule(options)};
}

std::filesystem::path cache_path(const std::filesystem::path& dir, const CacheKey& key) {
    // The stopping rule is folded in as a short hash so that differently
    // configured curves never share a file name.
    const auto rule_hash = fnv1a(key.stopping_rule);
    std::ostringstream name;
    name << "curve_b" << key.base_size << "_d" << key.wall_distance << "_" << key.method << "_bs"
         << key.batch_size << "_" << std::hex << (rule_hash & 0xffffffffULL) << ".json";
    return dir / name.str();
}

void cache_store(const std::filesystem::path& path, const SuccessCurve& curve,
                 const CacheKey& key) {
    if (curve.spec.base_size() != key.base_size || curve.spec.wall_distance() != key.wall_distance) {
        throw CacheError("cache_store: curve spec does not match its key");
    }
    nlohmann::ordered_json doc;
    doc["format"] = "hybridgrid-success-curve";
    doc["version"] = 1;
    doc["b"] = key.base_size;
    doc["d_wall"] = key.wall_distance;
    doc["method"] = key.method;
    doc["batch_size"] = key.batch_size;
    doc["stopping_rule"] = key.stopping_rule;
    doc["converged_at"] = curve.converged_at ? nlohmann::ordered_json(*curve.converged_at)
                                             : nlohmann::ordered_json(nullptr);
    auto& pts = doc["points"] = nlohmann::ordered_json::array();
    for (const auto& [length, p] : curve.points) {
        pts.push_back({{"L", length},
                       {"estimate", p.estimate},
                       {"n_shots", p.n_shots},
                       {"n_success", p.n_success},
                       {"method", to_string(p.method)}});
    }

    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw CacheError("cannot write cache file " + tmp.string());
        }
        out << doc.dump(2) << '\n';
        if (!out) {
            throw CacheError("write failed for cache file " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

namespace {

SuccessCurve load_curve_file(const std::filesystem::path& path, const CacheKey* expected) {
    if (!std::filesystem::exists(path)) {
        throw CacheNotFound("cache file not found: " + path.string());
    }
    std::ifstream in(path, std::ios::binary);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw CacheError("corrupt cache file " + path.string() + ": " + e.what());
    }

    try {
        if (doc.at("format").get<std::string>() != "hybridgrid-success-curve") {
            throw CacheError("not a success-curve file: " + path.string());
        }
        const CacheKey found{doc.at("b").get<int>(), doc.at("d_wall").get<int>(),
                             doc.at("method").get<std::string>(),
                             doc.at("batch_size").get<std::int64_t>(),
                             doc.at("stopping_rule").get<std::string>()};
        if (expected && !(found == *expected)) {
            std::ostringstream msg;
            msg << "cache key mismatch in " << path.string() << ": file has (b=" << found.base_size
                << ", d_wall=" << found.wall_distance << ", method=" << found.method
                << ", batch=" << found.batch_size << ", rule=" << found.stopping_rule
                << "), requested (b=" << expected->base_size << ", d_wall=" << expected->wall_distance
                << ", method=" << expected->method << ", batch=" << expected->batch_size
                << ", rule=" << expected->stopping_rule << ")";
            throw CacheError(msg.str());
        }
        SuccessCurve curve{GridworldSpec(found.base_size, found.wall_distance), {}, std::nullopt};
        if (!doc.at("converged_at").is_null()) {
            curve.converged_at = doc.at("converged_at").get<std::int64_t>();
        }
        std::int64_t previous = 0;
        for (const auto& p : doc.at("points")) {
            CurvePoint point{p.at("L").get<std::int64_t>(), p.at("estimate").get<double>(),
                             p.at("n_shots").get<std::int64_t>(),
                             p.at("n_success").get<std::int64_t>(),
                             parse_estimate_method(p.at("method").get<std::string>())};
            if (point.length <= previous || !(point.estimate >= 0.0 && point.estimate <= 1.0)) {
                throw CacheError("invalid point at L=" + std::to_string(point.length) + " in " +
                                 path.string());
            }
            previous = point.length;
            curve.points.emplace(point.length, point);
        }
        return curve;
    } catch (const nlohmann::json::exception& e) {
        throw CacheError("malformed cache file " + path.string() + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw CacheError("malformed cache file " + path.string() + ": " + e.what());
    }
}

}  // namespace

SuccessCurve cache_load(const std::filesystem::path& path, const CacheKey& expected) {
    return load_curve_file(path, &expected);
}

SuccessCurve cache_load_any(const std::filesystem::path& path) {
    return load_curve_file(path, nullptr);
}

}  // namespace hybridgrid
